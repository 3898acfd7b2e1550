#include "gauduchon/catalog.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gauduchon/error.hpp"
#include "spectral.hpp"

namespace gauduchon::catalog {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr int kX3 = 4;

GridShape x3_shape(int points) {
    if (points < 4) throw ArgumentError("the x3 grid needs at least 4 points");
    return GridShape::active(3, {kX3}, points);
}

HermitianMetric diagonal_metric(const GridShape& s, const GridFunction& a, const GridFunction& b) {
    std::vector<std::vector<GridFunction>> g(3, std::vector<GridFunction>(3, GridFunction::zero(s)));
    g[0][0] = a;
    g[1][1] = b;
    g[2][2] = GridFunction::constant(s, 1.0);
    return HermitianMetric(Form::hermitian(s, g));
}

}  // namespace

double torus_kappa(double C) {
    if (!(C > 0.0) || !std::isfinite(C)) throw ArgumentError("C must be positive");
    const double r = 1.0 / (1.0 + C);
    return std::sqrt(1.0 - r * r);
}

TorusProfiles torus_profiles(double C, int points) {
    const double kappa = torus_kappa(C);
    const GridShape s = x3_shape(points);
    auto sample = [&](auto&& f) {
        return GridFunction::sample(s, [&](std::span<const double> x) { return cplx{f(x[kX3]), 0.0}; });
    };
    GridFunction xi = sample([&](double t) { return 1.0 + kappa * std::sin(t); });
    // ξ''/ξ has mean C, so the right-hand side is mean zero up to quadrature error.
    GridFunction rhs = sample([&](double t) { return C + kappa * std::sin(t) / (1.0 + kappa * std::sin(t)); });
    rhs = rhs + cplx{-mean(rhs).real(), 0.0};
    const spectral::Spectrum spec(rhs);
    GridFunction zeta = spec.apply([](const double* k) {
        const double kk = k[kX3] * k[kX3];
        return kk == 0.0 ? cplx{0.0, 0.0} : cplx{-1.0 / kk, 0.0};
    });
    zeta = zeta.real_part();
    GridFunction eta = exp(zeta);
    return {C, kappa, std::move(xi), std::move(zeta), std::move(eta)};
}

HermitianMetric torus_positive_gamma1(double C, int points) {
    const TorusProfiles p = torus_profiles(C, points);
    return diagonal_metric(p.xi.shape(), p.xi, p.eta);
}

double chi(double a, double b, double t) {
    if (!(t > a && t < b)) return 0.0;
    return std::exp(1.0 / (t - b) - 1.0 / (t - a));
}

double BumpChart::eta(double x, double y) const {
    const double dx = x - std::numbers::pi;
    const double dy = y - std::numbers::pi;
    const double q = (dx * dx + dy * dy) / (eta_radius * eta_radius);
    if (q >= 1.0) return 0.0;
    return eta_normalization() * std::exp(-1.0 / (1.0 - q));
}

double BumpChart::eta_normalization() const {
    // ∫ exp(-2/(1-r²/R²)) dx dy = πR² ∫₀¹ exp(-2/(1-s)) ds.
    using boost::math::quadrature::gauss_kronrod;
    const double inner = gauss_kronrod<double, 61>::integrate(
        [](double s) { return s < 1.0 ? std::exp(-2.0 / (1.0 - s)) : 0.0; }, 0.0, 1.0, 15, 1e-14);
    return 1.0 / std::sqrt(std::numbers::pi * eta_radius * eta_radius * inner);
}

Form bump_semimetric(const GridShape& shape, const BumpChart& chart) {
    if (shape.n() != 3) throw ArgumentError("the bump semi-metric lives in complex dimension 3");
    for (int d = 0; d < shape.dims(); ++d)
        if (shape.size(d) < 2) throw ArgumentError("the bump semi-metric needs every real dimension active");
    if (!(chart.fill > 0.0 && chart.fill < 1.0) || !(chart.eta_radius > 0.0 && chart.eta_radius < std::numbers::pi))
        throw ArgumentError("bump chart must sit strictly inside one period");
    const double c = chart.eta_normalization();
    auto eta = [&](double x, double y) {
        const double dx = x - std::numbers::pi;
        const double dy = y - std::numbers::pi;
        const double q = (dx * dx + dy * dy) / (chart.eta_radius * chart.eta_radius);
        return q >= 1.0 ? 0.0 : c * std::exp(-1.0 / (1.0 - q));
    };
    const GridFunction phi = GridFunction::sample(shape, [&](std::span<const double> x) {
        return cplx{eta(x[0], x[1]) * eta(x[2], x[3]) * chart.f(x[4]) * chart.f(x[5]), 0.0};
    });
    const GridFunction psi = GridFunction::sample(shape, [&](std::span<const double> x) {
        return cplx{eta(x[0], x[1]) * eta(x[2], x[3]) * chart.g(x[4]) * chart.g(x[5]), 0.0};
    });
    Form w(shape, 1, 1);
    w.set({1}, {1}, phi);
    w.set({2}, {2}, psi);
    w *= cplx{0.0, 0.5};
    return w;
}

HermitianMetric bump_family(double t, const GridShape& shape, const BumpChart& chart) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("bump_family needs t > 0");
    Form w = bump_semimetric(shape, chart);
    w += cplx{t, 0.0} * Form::flat(shape);
    return HermitianMetric(std::move(w));
}

const char* const kIwasawaText = R"(# Iwasawa manifold, phi3 = dz3 - z1 dz2
generators phi1 phi2 phi3
del phi3 = -phi1^phi2
)";

const char* const kS5S1Text = R"(# S5 x S1 as a torus bundle over CP2; W pulls back the Fubini-Study form
generators theta
formal W
W^3 = 0
delbar theta = W
)";

CoframeExample iwasawa() {
    coframe::CoframeAlgebra alg = coframe::CoframeAlgebra::parse(kIwasawaText);
    coframe::CoframeForm w = alg.parse_form("(i/2)*(phi1^bar(phi1) + phi2^bar(phi2) + phi3^bar(phi3))");
    return {std::move(alg), std::move(w)};
}

CoframeExample s5s1() {
    coframe::CoframeAlgebra alg = coframe::CoframeAlgebra::parse(kS5S1Text);
    coframe::CoframeForm w = alg.parse_form("W + (i/2)*theta^bar(theta)");
    return {std::move(alg), std::move(w)};
}

HermitianMetric sine_family_metric(double a, double b, double phase, int points) {
    if (!(std::abs(a) < 1.0 && std::abs(b) < 1.0)) throw ArgumentError("sine family needs |a|, |b| < 1");
    const GridShape s = x3_shape(points);
    const GridFunction xi =
        GridFunction::sample(s, [&](std::span<const double> x) { return cplx{1.0 + a * std::sin(x[kX3]), 0.0}; });
    const GridFunction eta = GridFunction::sample(
        s, [&](std::span<const double> x) { return cplx{1.0 + b * std::sin(x[kX3] + phase), 0.0}; });
    return diagonal_metric(s, xi, eta);
}

SearchSpec SearchSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ArgumentError("search spec must be a JSON object");
    SearchSpec s;
    for (const auto& [key, value] : j.items()) {
        if (key == "family") s.family = value.get<std::string>();
        else if (key == "points") s.points = value.get<int>();
        else if (key == "budget") s.budget = value.get<int>();
        else if (key == "kappa_max") s.kappa_max = value.get<double>();
        else if (key == "seed") s.seed = value.get<std::uint64_t>();
        else if (key == "k") s.k = value.get<int>();
        else if (key == "tol") s.tol = value.get<double>();
        else if (key != "solve") throw ArgumentError("unknown search spec key '" + key + "'");
    }
    if (s.family != "torus-sine") throw ArgumentError("unknown family '" + s.family + "'");
    if (s.budget < 1) throw ArgumentError("budget must be positive");
    if (!(s.kappa_max > 0.0 && s.kappa_max < 1.0)) throw ArgumentError("kappa_max must lie in (0, 1)");
    if (j.contains("solve")) s.solve = solve_options_from_json(j["solve"], x3_shape(s.points));
    return s;
}

HermitianMetric SearchResult::best_metric() const {
    if (!best) throw ArgumentError("the search produced no candidate");
    const SearchSample& b = log.at(static_cast<std::size_t>(*best));
    return sine_family_metric(b.a, b.b, b.phase, spec.points);
}

SearchResult negative_gamma1_search(const SearchSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    SearchResult r;
    r.spec = spec;
    r.log.resize(static_cast<std::size_t>(spec.budget));
    // Parameters are drawn serially so that they depend only on the seed.
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> amp(0.0, spec.kappa_max);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    for (int i = 0; i < spec.budget; ++i) {
        SearchSample& s = r.log[static_cast<std::size_t>(i)];
        s.index = i;
        s.a = amp(rng);
        s.b = amp(rng);
        s.phase = angle(rng);
    }
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < spec.budget; ++i) {
        SearchSample& s = r.log[static_cast<std::size_t>(i)];
        try {
            const HermitianMetric w = sine_family_metric(s.a, s.b, s.phase, spec.points);
            s.integral = gauduchon_criterion(w, spec.k);
            const SolveReport rep = gamma_k(w, spec.k, spec.solve);
            s.gamma = rep.gamma;
            s.residual = rep.residual;
        } catch (const Error& e) {
            s.error = e.what();
        }
    }
    for (const SearchSample& s : r.log)
        if (s.gamma && (!r.best || *s.gamma < *r.log[static_cast<std::size_t>(*r.best)].gamma)) r.best = s.index;
    r.success = r.best && *r.log[static_cast<std::size_t>(*r.best)].gamma < -spec.tol;
    r.seconds = seconds_since(t0);
    return r;
}

void to_json(nlohmann::json& j, const SearchSample& s) {
    j = {{"index", s.index}, {"a", s.a}, {"b", s.b}, {"phase", s.phase}, {"integral", s.integral},
         {"gamma", s.gamma ? nlohmann::json(*s.gamma) : nlohmann::json(nullptr)}, {"residual", s.residual}};
    if (!s.error.empty()) j["error"] = s.error;
}

nlohmann::json search_json(const SearchResult& r, bool with_seconds) {
    nlohmann::json j = {{"family", r.spec.family}, {"points", r.spec.points}, {"budget", r.spec.budget},
                        {"kappa_max", r.spec.kappa_max}, {"seed", r.spec.seed}, {"k", r.spec.k},
                        {"tol", r.spec.tol}, {"success", r.success}, {"log", r.log}};
    j["best"] = r.best ? nlohmann::json(*r.best) : nlohmann::json(nullptr);
    if (with_seconds) j["seconds"] = r.seconds;
    return j;
}

const std::vector<ExampleSpec>& examples() {
    static const std::vector<ExampleSpec> list = {
        {"flat", "flat metric on the x3-only torus grid", 1, "gamma", '0', "derived", {{"points", 16}}},
        {"torus-positive", "diag(1 + kappa sin x3, e^zeta, 1) with zeta'' + xi''/xi = C", 1, "gamma", '+',
         "stated", {{"C", 1.0}, {"points", 128}}},
        {"iwasawa", "standard balanced metric on the Iwasawa coframe", 1, "gamma", '+', "stated", nlohmann::json::object()},
        {"s5s1", "omega0 = W + (i/2) theta^bar(theta) on S5 x S1", 1, "gamma", '-', "stated", nlohmann::json::object()},
        {"bump", "(i/2) integral of ddbar(w)^w for the compactly supported bump semi-metric", 1,
         "integral_criterion", '+', "stated", {{"points", 16}}},
    };
    return list;
}

const ExampleSpec& find_example(const std::string& name) {
    for (const ExampleSpec& e : examples())
        if (e.name == name) return e;
    std::string names;
    for (const ExampleSpec& e : examples()) names += (names.empty() ? "" : ", ") + e.name;
    throw ArgumentError("unknown example '" + name + "' (known: " + names + ")");
}

char sign_of(double x, double zero_tol) {
    if (x > zero_tol) return '+';
    if (x < -zero_tol) return '-';
    return '0';
}

namespace {

constexpr double kZeroTol = 1e-8;

void fill_from_solve(ReproduceRow& row, const SolveReport& rep) {
    row.gamma = rep.gamma.value_or(0.0);
    row.residual = rep.residual;
    row.sign_observed = sign_of(row.gamma, kZeroTol);
    for (const std::string& w : rep.warnings) row.notes.push_back(w);
}

void fill_from_coframe(ReproduceRow& row, const CoframeExample& ex) {
    const coframe::Rational g = coframe::gamma_k_invariant(ex.algebra, ex.omega, row.k);
    row.gamma = boost::rational_cast<double>(g);
    row.exact = coframe::GaussianRational(g).to_string();
    row.residual = 0.0;
    row.sign_observed = g.numerator() > 0 ? '+' : g.numerator() < 0 ? '-' : '0';
}

}  // namespace

ReproduceRow reproduce(const std::string& name, const nlohmann::json& params, const SolveOptions& opts) {
    ExampleSpec spec = find_example(name);
    if (!params.is_null()) {
        if (!params.is_object()) throw ArgumentError("example parameters must be a JSON object");
        for (const auto& [key, value] : params.items()) {
            if (!spec.parameters.contains(key))
                throw ArgumentError("example '" + name + "' has no parameter '" + key + "'");
            if (!value.is_number()) throw ArgumentError("parameter '" + key + "' must be a number");
            spec.parameters[key] = value;
        }
    }
    const auto t0 = std::chrono::steady_clock::now();
    ReproduceRow row;
    row.example = spec.name;
    row.k = spec.k;
    row.quantity = spec.quantity;
    row.sign_expected = spec.expected_sign;
    if (name == "flat") {
        const GridShape s = x3_shape(spec.parameters["points"].get<int>());
        fill_from_solve(row, gamma_k(HermitianMetric(Form::flat(s)), spec.k, opts));
    } else if (name == "torus-positive") {
        const HermitianMetric w =
            torus_positive_gamma1(spec.parameters["C"].get<double>(), spec.parameters["points"].get<int>());
        fill_from_solve(row, gamma_k(w, spec.k, opts));
        row.notes.push_back("min phi = " + std::to_string(phi_k(w, 1).min_real()));
    } else if (name == "iwasawa") {
        const CoframeExample ex = iwasawa();
        fill_from_coframe(row, ex);
        if (!ex.algebra.d(coframe::power(ex.omega, 2)).is_zero()) row.notes.push_back("d(omega^2) is not zero");
    } else if (name == "s5s1") {
        const CoframeExample ex = s5s1();
        fill_from_coframe(row, ex);
        row.notes.push_back(
            "the closed form (i/2)ddbar(omega0)^omega0 = -omega0^3/3! would give gamma_1 = -1/6; the exact "
            "coframe computation gives (i/2)ddbar(omega0)^omega0 = -(1/12) omega0^3, so only the sign is compared");
    } else if (name == "bump") {
        const int points = spec.parameters["points"].get<int>();
        const Form w = bump_semimetric(GridShape::uniform(3, points));
        row.gamma = integral_criterion(w, spec.k);
        // The value is tiny by construction, so the sign is read without a tolerance.
        row.sign_observed = sign_of(row.gamma, 0.0);
    }
    row.seconds = seconds_since(t0);
    return row;
}

void to_json(nlohmann::json& j, const ReproduceRow& r) {
    j = {{"example", r.example},
         {"k", r.k},
         {"quantity", r.quantity},
         {"gamma", r.gamma},
         {"exact", r.exact ? nlohmann::json(*r.exact) : nlohmann::json(nullptr)},
         {"sign_expected", std::string(1, r.sign_expected)},
         {"sign_observed", std::string(1, r.sign_observed)},
         {"residual", r.residual},
         {"notes", r.notes},
         {"seconds", r.seconds}};
}

}  // namespace gauduchon::catalog
