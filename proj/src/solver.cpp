#include "gauduchon/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/LU>

// Boost 1.74's pchip calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

#include "gauduchon/error.hpp"
#include "gauduchon/krylov.hpp"
#include "spectral.hpp"

namespace gauduchon {

// ---------------------------------------------------------------- PsiFunction

PsiFunction::PsiFunction(std::function<double(double)> value, std::function<double(double)> derivative,
                         double mu, double nu, std::string name, bool linear)
    : value_(std::move(value)),
      derivative_(std::move(derivative)),
      mu_(mu),
      nu_(nu),
      name_(std::move(name)),
      linear_(linear) {
    if (!(mu_ > 0.5) || !(nu_ > 0.0)) throw ArgumentError("psi growth parameters need mu > 1/2 and nu > 0");
}

PsiFunction PsiFunction::linear(double shift) {
    if (!std::isfinite(shift)) throw ArgumentError("psi shift must be finite");
    std::ostringstream name;
    name << "linear(" << shift << ")";
    return PsiFunction([shift](double t) { return t + shift; }, [](double) { return 1.0; }, 1.0, 1.0,
                       name.str(), true);
}

PsiFunction PsiFunction::table(std::vector<double> t, std::vector<double> psi, double mu, double nu) {
    if (t.size() != psi.size()) throw ArgumentError("psi table: t and psi differ in length");
    if (t.size() < 4) throw ArgumentError("psi table needs at least 4 samples");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(psi[i])) throw ArgumentError("psi table has a non-finite entry");
        if (i > 0 && !(t[i] > t[i - 1])) throw ArgumentError("psi table: t must be strictly increasing");
    }
    const double lo = t.front(), hi = t.back();
    const double psi_lo = psi.front(), psi_hi = psi.back();
    using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
    auto spline = std::make_shared<Pchip>(std::move(t), std::move(psi));
    const double slope_lo = spline->prime(lo), slope_hi = spline->prime(hi);
    auto value = [spline, lo, hi, psi_lo, psi_hi, slope_lo, slope_hi](double s) {
        if (s < lo) return psi_lo + slope_lo * (s - lo);
        if (s > hi) return psi_hi + slope_hi * (s - hi);
        return (*spline)(s);
    };
    auto derivative = [spline, lo, hi, slope_lo, slope_hi](double s) {
        if (s < lo) return slope_lo;
        if (s > hi) return slope_hi;
        return spline->prime(s);
    };
    return PsiFunction(value, derivative, mu, nu, "table", false);
}

PsiFunction PsiFunction::custom(std::function<double(double)> value, std::function<double(double)> derivative,
                                double mu, double nu, std::string name) {
    return PsiFunction(std::move(value), std::move(derivative), mu, nu, std::move(name), false);
}

PsiFunction PsiFunction::from_json(const nlohmann::json& j) {
    try {
        return table(j.at("t").get<std::vector<double>>(), j.at("psi").get<std::vector<double>>(),
                     j.value("mu", 1.0), j.value("nu", 1.0));
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("psi table: ") + e.what());
    }
}

double PsiFunction::operator()(double t) const { return value_(t); }

double PsiFunction::derivative(double t) const {
    const double d = derivative_(t);
    if (!std::isfinite(d)) throw ArgumentError("psi' is not finite at t = " + std::to_string(t));
    return d;
}

PsiFunction::GrowthCertificate PsiFunction::growth_certificate(double t0, double t1, int samples) const {
    GrowthCertificate out{t0, t1, samples, std::numeric_limits<double>::infinity(), false};
    for (int s = 0; s < samples; ++s) {
        // Geometric sampling; the bound concerns large t.
        const double t = t0 * std::pow(t1 / t0, samples > 1 ? double(s) / (samples - 1) : 0.0);
        out.min_ratio = std::min(out.min_ratio, value_(t) / (nu_ * std::pow(t, mu_)));
    }
    out.holds = out.min_ratio >= 1.0;
    return out;
}

// ---------------------------------------------------------------- options

GridFunction band_limited_random(const GridShape& shape, std::uint64_t seed, double amplitude, int max_wave) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> wave(-max_wave, max_wave);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<std::vector<int>> ks;
    std::vector<cplx> cs;
    for (int m = 0; m < 4; ++m) {
        std::vector<int> k(static_cast<std::size_t>(shape.dims()), 0);
        for (int d = 0; d < shape.dims(); ++d)
            if (shape.size(d) > 1) k[static_cast<std::size_t>(d)] = wave(rng);
        ks.push_back(std::move(k));
        cs.push_back(amplitude * cplx{coef(rng), coef(rng)});
    }
    return GridFunction::sample(shape, [&](std::span<const double> x) {
        double acc = 0.0;
        for (std::size_t m = 0; m < ks.size(); ++m) {
            double phase = 0.0;
            for (std::size_t d = 0; d < x.size(); ++d) phase += ks[m][d] * x[d];
            acc += 2.0 * (cs[m] * std::exp(cplx{0.0, phase})).real();
        }
        return cplx{acc, 0.0};
    });
}

SolveOptions solve_options_from_json(const nlohmann::json& j, const GridShape& shape) {
    if (!j.is_object()) throw ArgumentError("solver options must be a JSON object");
    SolveOptions o;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "newton_tol") o.newton_tol = value.get<double>();
            else if (key == "krylov_tol") o.krylov_tol = value.get<double>();
            else if (key == "max_newton") o.max_newton = value.get<int>();
            else if (key == "min_step") o.min_step = value.get<double>();
            else if (key == "dealias") o.dealias = value.get<bool>();
            else if (key == "dense_max_points") o.dense_max_points = value.get<std::size_t>();
            else if (key == "gmres_restart") o.gmres_restart = value.get<int>();
            else if (key == "max_krylov") o.max_krylov = value.get<int>();
            else if (key == "initial_guess") {
                if (value.is_null() || (value.is_string() && value.get<std::string>() == "zero")) {
                    o.initial_guess.reset();
                } else if (value.is_object() && value.contains("random_seed")) {
                    o.initial_guess = band_limited_random(shape, value.at("random_seed").get<std::uint64_t>(),
                                                          value.value("amplitude", 0.1), value.value("max_wave", 2));
                } else if (value.is_object()) {
                    GridFunction g = grid_function_from_json(value);
                    if (g.shape().n() != shape.n()) throw ArgumentError("initial guess has the wrong dimension");
                    o.initial_guess = g.shape() == shape ? g : resample(g, shape);
                } else {
                    throw ArgumentError("initial_guess must be null, \"zero\", a random spec or a grid function");
                }
            } else {
                throw ArgumentError("unknown solver option '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("solver options: ") + e.what());
    }
    if (!(o.newton_tol > 0.0) || !(o.krylov_tol > 0.0) || o.max_newton < 1 || !(o.min_step > 0.0) ||
        !(o.min_step <= 1.0) || o.gmres_restart < 1 || o.max_krylov < 1)
        throw ArgumentError("solver options out of range");
    return o;
}

// ---------------------------------------------------------------- solver core

namespace {

using Clock = std::chrono::steady_clock;
using krylov::Vector;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Vector to_vector(const GridFunction& u) {
    Vector x(static_cast<Eigen::Index>(u.size()));
    for (std::size_t p = 0; p < u.size(); ++p) x(static_cast<Eigen::Index>(p)) = u[p].real();
    return x;
}

GridFunction to_grid(const GridShape& shape, const double* x) {
    return GridFunction::from_real(shape, std::span<const double>(x, shape.points()));
}

double sup_abs(const Vector& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }

// Residual N(v) and its linearization at a base point.
class Problem {
public:
    virtual ~Problem() = default;
    virtual GridFunction residual(const GridFunction& v) const = 0;
    virtual void linearize(const GridFunction& v) = 0;
    virtual GridFunction jacobian(const GridFunction& h) const = 0;
};

// N(v) = Δv + ψ(|∇v|²) + ⟨B, dv⟩.
class SemilinearProblem final : public Problem {
public:
    SemilinearProblem(const HermitianMetric& w, const OneFormPair& B, const PsiFunction& psi, bool dealias)
        : w_(w), B_(B), psi_(psi), dealias_(dealias), dv_(OneFormPair::zero(w.shape())),
          psi_prime_(GridFunction::zero(w.shape())) {}

    GridFunction residual(const GridFunction& v) const override {
        const OneFormPair dv = OneFormPair::differential(v);
        const GridFunction g2 = grad_sq(dv);
        const PsiFunction& psi = psi_;
        GridFunction out = laplacian(w_, v) + g2.map([&psi](cplx t) { return cplx{psi(t.real()), 0.0}; });
        out += pair(w_, B_, dv);
        return coerce_real(out, 1e-9, "semilinear residual");
    }

    void linearize(const GridFunction& v) override {
        dv_ = OneFormPair::differential(v);
        const PsiFunction& psi = psi_;
        psi_prime_ = grad_sq(dv_).map([&psi](cplx t) { return cplx{psi.derivative(t.real()), 0.0}; });
    }

    // Δh + ⟨B, dh⟩ + ψ'(|∇v|²) Σ g^{ij̄}(h_i v_{j̄} + v_i h_{j̄}).
    GridFunction jacobian(const GridFunction& h) const override {
        const OneFormPair dh = OneFormPair::differential(h);
        GridFunction cross = GridFunction::zero(w_.shape());
        const int n = w_.n();
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                if (const GridFunction* gi = w_.ginv(i, j)) {
                    const auto a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(j - 1);
                    cross += *gi * (product(dh.hol[a], dv_.anti[b], dealias_) +
                                    product(dv_.hol[a], dh.anti[b], dealias_));
                }
        GridFunction out = laplacian(w_, h) + pair(w_, B_, dh) + psi_prime_ * cross;
        return out.real_part();
    }

    // Σ g^{ij̄} v_i v_{j̄}, with the derivative products optionally dealiased.
    GridFunction grad_sq(const OneFormPair& dv) const {
        GridFunction out = GridFunction::zero(w_.shape());
        const int n = w_.n();
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                if (const GridFunction* gi = w_.ginv(i, j))
                    out += *gi * product(dv.hol[static_cast<std::size_t>(i - 1)],
                                         dv.anti[static_cast<std::size_t>(j - 1)], dealias_);
        return out.real_part();
    }

private:
    const HermitianMetric& w_;
    const OneFormPair& B_;
    const PsiFunction& psi_;
    bool dealias_;
    OneFormPair dv_;
    GridFunction psi_prime_;
};

// N(v) = F(v) - φ, with F(v) = n e^{-v}(i/2)∂∂̄(e^v ω^k)∧ω^{n-k-1}/ωⁿ evaluated on forms.
class GammaProblem final : public Problem {
public:
    GammaProblem(const HermitianMetric& w, int k, GridFunction phi)
        : w_(w), k_(k), phi_(std::move(phi)), ev_(phi_), emv_(phi_), F_(phi_) {}

    GridFunction residual(const GridFunction& v) const override { return nonlinear_F(w_, k_, v) - phi_; }

    void linearize(const GridFunction& v) override {
        ev_ = exp(v);
        emv_ = exp(-v);
        F_ = nonlinear_F(w_, k_, v);
    }

    // DF[h] = -h F(v) + e^{-v} conformal_operator(h e^v).
    GridFunction jacobian(const GridFunction& h) const override {
        GridFunction out = emv_ * conformal_operator(w_, k_, h * ev_);
        out -= h * F_;
        return out.real_part();
    }

private:
    const HermitianMetric& w_;
    int k_;
    GridFunction phi_;
    GridFunction ev_, emv_, F_;
};

// Solver state shared across the continuation: weights of the mean-zero
// constraint, the Nyquist projection and the constant-coefficient preconditioner.
class Context {
public:
    Context(const HermitianMetric& w, const SolveOptions& opts)
        : w_(w), opts_(opts), shape_(w.shape()), filter_(spectral::has_nyquist(shape_)) {
        const auto P = static_cast<Eigen::Index>(shape_.points());
        weights_ = to_vector(w.volume_density());
        weights_ /= weights_.sum();
        const int n = w.n();
        avg_ginv_.assign(static_cast<std::size_t>(n * n), cplx{});
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                if (const GridFunction* gi = w.ginv(i, j))
                    avg_ginv_[static_cast<std::size_t>((i - 1) * n + (j - 1))] = mean(*gi);
        dense_ = static_cast<std::size_t>(P) <= opts.dense_max_points;
    }

    const GridShape& shape() const { return shape_; }
    bool dense() const { return dense_; }

    // Newton stops at max(newton_tol, roundoff floor). The floor estimates the
    // rounding error of second spectral derivatives on a metric of condition
    // sup|g| / eigen floor, for data of size `scale`.
    void set_tolerance(double scale) {
        double k2 = 0.0;
        for (int d = 0; d < shape_.dims(); ++d)
            if (shape_.size(d) > 1) k2 += 0.25 * shape_.size(d) * shape_.size(d);
        const double cond = 2.0 * w_.form().sup_norm() / w_.eigen_floor();
        floor_ = std::numeric_limits<double>::epsilon() * k2 * cond * std::max(1.0, scale);
    }
    double tolerance() const { return std::max(opts_.newton_tol, floor_); }

    GridFunction filter(const GridFunction& u) const { return filter_ ? spectral::drop_nyquist(u) : u; }

    // Nyquist-free and ω-mean zero.
    GridFunction project(const GridFunction& v) const {
        GridFunction out = filter(v).real_part();
        const double m = weighted_mean(out);
        return out + cplx{-m, 0.0};
    }

    double weighted_mean(const GridFunction& u) const { return to_vector(u).dot(weights_); }

    // Approximate inverse of (h, δc) ↦ (L₀h - δc, w·h) with L₀ the Laplacian of the averaged metric.
    void precondition(const Vector& in, Vector& out) const {
        const auto P = static_cast<Eigen::Index>(shape_.points());
        const double dc = -in.head(P).mean();
        Vector rhs = in.head(P).array() + dc;
        const int n = w_.n();
        const auto& g = avg_ginv_;
        const GridFunction h = spectral::Spectrum(to_grid(shape_, rhs.data())).apply([n, &g](const double* k) {
            cplx s{};
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j) {
                    const cplx gij = g[static_cast<std::size_t>((i - 1) * n + (j - 1))];
                    if (gij != cplx{})
                        s += gij * spectral::holomorphic_symbol(k, i, false) * spectral::holomorphic_symbol(k, j, true);
                }
            return std::abs(s) > 1e-14 ? cplx{1.0 / s.real(), 0.0} : cplx{};
        });
        out.resize(P + 1);
        for (Eigen::Index p = 0; p < P; ++p) out(p) = h[static_cast<std::size_t>(p)].real();
        out.head(P).array() += in(P) - out.head(P).dot(weights_);
        out(P) = dc;
    }

    // (h, δc) ↦ (P J h - δc, w·h).
    void apply(const Problem& prob, const Vector& in, Vector& out) const {
        const auto P = static_cast<Eigen::Index>(shape_.points());
        const GridFunction Jh = filter(prob.jacobian(to_grid(shape_, in.data())));
        out.resize(P + 1);
        for (Eigen::Index p = 0; p < P; ++p) out(p) = Jh[static_cast<std::size_t>(p)].real() - in(P);
        out(P) = in.head(P).dot(weights_);
    }

    // Dense matrix of the same map, with the identity on the Nyquist complement.
    Eigen::MatrixXd assemble(const Problem& prob) const {
        const auto P = static_cast<Eigen::Index>(shape_.points());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P + 1, P + 1);
        std::vector<double> unit(static_cast<std::size_t>(P), 0.0);
        for (Eigen::Index p = 0; p < P; ++p) {
            unit[static_cast<std::size_t>(p)] = 1.0;
            const GridFunction e = GridFunction::from_real(shape_, unit);
            unit[static_cast<std::size_t>(p)] = 0.0;
            const GridFunction pe = filter(e);
            const GridFunction col = filter(prob.jacobian(pe.real_part()));
            for (Eigen::Index q = 0; q < P; ++q)
                A(q, p) = col[static_cast<std::size_t>(q)].real() + e[static_cast<std::size_t>(q)].real() -
                          pe[static_cast<std::size_t>(q)].real();
            A(P, p) = weights_(p);
            A(p, P) = -1.0;
        }
        return A;
    }

    const SolveOptions& opts() const { return opts_; }

private:
    const HermitianMetric& w_;
    const SolveOptions& opts_;
    GridShape shape_;
    bool filter_;
    bool dense_ = false;
    double floor_ = 0.0;
    Vector weights_;
    std::vector<cplx> avg_ginv_;
};

struct NewtonOutcome {
    bool converged = false;
    int iterations = 0;
    int linear_iterations = 0;
    double residual = 0.0;
    std::string reason;
    GridFunction v;
    double c = 0.0;
};

// Newton on N(v) - target - c = 0 (projected), ∫ v ωⁿ = 0.
NewtonOutcome newton(Problem& prob, const Context& ctx, GridFunction v, double c, const GridFunction& target) {
    const SolveOptions& opts = ctx.opts();
    const GridShape& shape = ctx.shape();
    const auto P = static_cast<Eigen::Index>(shape.points());
    auto resid = [&](const GridFunction& u, double cc) {
        return to_vector(ctx.filter(prob.residual(u) - target + cplx{-cc, 0.0}));
    };

    NewtonOutcome out{false, 0, 0, 0.0, {}, v, c};
    Vector r = resid(v, c);
    out.residual = sup_abs(r);
    while (true) {
        if (!std::isfinite(out.residual)) {
            out.reason = "non-finite residual";
            return out;
        }
        if (out.residual <= ctx.tolerance()) {
            out.converged = true;
            out.v = std::move(v);
            out.c = c;
            return out;
        }
        if (out.iterations >= opts.max_newton) {
            out.reason = "no convergence in " + std::to_string(opts.max_newton) + " Newton iterations";
            return out;
        }
        ++out.iterations;
        prob.linearize(v);

        Vector rhs(P + 1);
        rhs.head(P) = -r;
        rhs(P) = 0.0;
        Vector step;
        if (ctx.dense()) {
            step = Eigen::PartialPivLU<Eigen::MatrixXd>(ctx.assemble(prob)).solve(rhs);
            if (!step.allFinite()) {
                out.reason = "singular Jacobian";
                return out;
            }
        } else {
            const auto res = krylov::gmres([&](const Vector& x, Vector& y) { ctx.apply(prob, x, y); },
                                           [&](const Vector& x, Vector& y) { ctx.precondition(x, y); }, rhs,
                                           {opts.krylov_tol, opts.gmres_restart, opts.max_krylov});
            out.linear_iterations += res.iterations;
            // A loose linear solve still gives a descent direction; the line search decides.
            if (!res.x.allFinite() || res.relative_residual > 1e-2) {
                out.reason = "GMRES stalled at relative residual " + std::to_string(res.relative_residual);
                return out;
            }
            step = res.x;
        }

        const GridFunction h = to_grid(shape, step.data());
        bool accepted = false;
        for (double lambda = 1.0; lambda >= 1.0 / 64.0; lambda *= 0.5) {
            GridFunction trial = ctx.project(v + h * cplx{lambda, 0.0});
            const double ctrial = c + lambda * step(P);
            Vector rt = resid(trial, ctrial);
            const double st = sup_abs(rt);
            if (std::isfinite(st) && st < out.residual) {
                v = std::move(trial);
                c = ctrial;
                r = std::move(rt);
                out.residual = st;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.reason = "line search found no decrease below residual " + std::to_string(out.residual);
            return out;
        }
    }
}

std::string format_attempt(double t, const NewtonOutcome& o) {
    std::ostringstream s;
    s << "t=" << t << " newton_iterations=" << o.iterations << " residual=" << o.residual
      << (o.converged ? " ok" : " failed: " + o.reason);
    return s.str();
}

struct ContinuationResult {
    GridFunction v;
    double c;
    double residual;
    int linear_iterations = 0;
    std::vector<ContinuationStep> path;
};

// S(v_t) = t f from t = 0 to 1, S subtracting the ω-average of N.
ContinuationResult continuation(Problem& prob, const Context& ctx, const HermitianMetric& w, const GridFunction& f) {
    const SolveOptions& opts = ctx.opts();
    GridFunction v = ctx.project(opts.initial_guess ? *opts.initial_guess : GridFunction::zero(ctx.shape()));
    if (!(v.shape() == ctx.shape())) throw ArgumentError("initial guess lives on a different grid");
    double c = w.average(prob.residual(v));

    ContinuationResult out{v, c, 0.0, 0, {}};
    std::vector<std::string> history;
    double t = 0.0, step = 1.0;
    bool done = false;
    while (!done) {
        const double next = std::min(1.0, t + step);
        NewtonOutcome o = newton(prob, ctx, v, c, f * cplx{next, 0.0});
        history.push_back(format_attempt(next, o));
        out.linear_iterations += o.linear_iterations;
        if (o.converged) {
            t = next;
            v = std::move(o.v);
            c = o.c;
            out.path.push_back({t, o.iterations, o.residual});
            out.residual = o.residual;
            done = t >= 1.0;
            step = std::min(1.0, 2.0 * step);
        } else {
            step *= 0.5;
            if (step < opts.min_step)
                throw NonconvergenceError("continuation stalled at t = " + std::to_string(t) +
                                              " with step below " + std::to_string(opts.min_step),
                                          history);
        }
    }
    out.v = std::move(v);
    out.c = c;
    return out;
}

// Finishes a report from a converged continuation.
SolveReport finish(const HermitianMetric& w, Problem& prob, const Context& ctx, const GridFunction& f,
                   ContinuationResult&& res, double psi0) {
    SolveReport r;
    const GridFunction Nv = prob.residual(res.v);
    r.c = w.average(Nv);
    const GridFunction full = Nv - f + cplx{-r.c, 0.0};
    const GridFunction resolved = ctx.filter(full);
    r.residual = res.residual;
    r.tolerance = ctx.tolerance();
    if (r.tolerance > ctx.opts().newton_tol) {
        std::ostringstream msg;
        msg << "newton_tol raised to the roundoff floor " << std::scientific << std::setprecision(2) << r.tolerance;
        r.warnings.push_back(msg.str());
    }
    r.unresolved_residual = (full - resolved).sup_norm();
    r.c_bounds = {psi0 - f.max_real(), psi0 - f.min_real()};
    const double abs_mean = w.average(res.v.map([](cplx x) { return cplx{std::abs(x.real()), 0.0}; }));
    r.mean_constraint = abs_mean > 0.0 ? std::abs(w.average(res.v)) / abs_mean : 0.0;
    const GridFunction g2 = grad_norm_sq(w, res.v);
    r.sup_grad_v = std::sqrt(std::max(0.0, g2.max_real()));
    r.continuation_path = std::move(res.path);
    r.linear_solver = ctx.dense() ? "dense-lu" : "gmres";
    r.linear_iterations = res.linear_iterations;
    r.v = std::move(res.v);
    return r;
}

GridFunction mean_adjusted(const HermitianMetric& w, const GridFunction& f, std::vector<std::string>& warnings) {
    GridFunction out = coerce_real(f, 1e-12, "f");
    const double avg = w.average(out);
    if (std::abs(avg) > 1e-10 * std::max(out.sup_norm(), std::numeric_limits<double>::min())) {
        warnings.push_back("f has omega-average " + std::to_string(avg) + "; subtracted it");
        out = out + cplx{-avg, 0.0};
    }
    return out;
}

}  // namespace

SolveReport solve_semilinear(const HermitianMetric& w, const OneFormPair& B, const GridFunction& f,
                             const PsiFunction& psi, const SolveOptions& opts) {
    const auto start = Clock::now();
    const GridShape& shape = w.shape();
    if (!(f.shape() == shape)) throw ArgumentError("f and the metric live on different grids");
    if (B.hol.size() != static_cast<std::size_t>(w.n()) || B.anti.size() != static_cast<std::size_t>(w.n()))
        throw ArgumentError("B must have n holomorphic and n antiholomorphic components");
    for (std::size_t j = 0; j < B.hol.size(); ++j)
        if (!(B.hol[j].shape() == shape) || !(B.anti[j].shape() == shape))
            throw ArgumentError("B and the metric live on different grids");
    if (B.reality_defect() > 1e-12 * std::max(1.0, B.sup_norm())) throw ArgumentError("B must be a real 1-form");

    std::vector<std::string> warnings;
    const GridFunction fa = mean_adjusted(w, f, warnings);
    SemilinearProblem prob(w, B, psi, opts.dealias);
    Context ctx(w, opts);
    ctx.set_tolerance(fa.sup_norm());
    ContinuationResult res = continuation(prob, ctx, w, fa);

    SolveReport r = finish(w, prob, ctx, fa, std::move(res), psi(0.0));
    // Ellipticity of the linearization needs ψ' > 0 along |∇v|².
    const GridFunction g2 = prob.grad_sq(OneFormPair::differential(r.v));
    r.psi_prime_min = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < g2.size(); ++p) r.psi_prime_min = std::min(r.psi_prime_min, psi.derivative(g2[p].real()));
    if (r.psi_prime_min <= 0.0)
        warnings.push_back("psi' reaches " + std::to_string(r.psi_prime_min) +
                           " at the solution; the linearization is not uniformly elliptic there");
    r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
    r.seconds = seconds_since(start);
    return r;
}

SolveReport gamma_k(const HermitianMetric& w, int k, const SolveOptions& opts) {
    const auto start = Clock::now();
    const int n = w.n();
    if (k < 1 || k > n - 1) throw ArgumentError("k must lie in 1..n-1");
    const GridFunction phi = phi_k(w, k);
    const double avg_phi = w.average(phi);
    const GridFunction f = GridFunction::constant(w.shape(), avg_phi) - phi;

    GammaProblem prob(w, k, phi);
    Context ctx(w, opts);
    ctx.set_tolerance(phi.sup_norm());
    ContinuationResult res = continuation(prob, ctx, w, f);
    SolveReport r = finish(w, prob, ctx, f, std::move(res), 0.0);
    r.k = k;
    r.gamma = (r.c + avg_phi) / n;

    // Cross-checks at the computed v.
    const GridFunction& v = r.v;
    const GridFunction F = nonlinear_F(w, k, v);
    GammaCrossCheck cc;
    cc.defining = w.average(F) / n;
    const OneFormPair dv = OneFormPair::differential(v);
    const GridFunction contraction = laplacian(w, v) + grad_norm_sq(w, v) + pair(w, b1_form(w, k), dv) + phi;
    cc.contraction = w.average(coerce_real(contraction, 1e-9, "contraction route")) / n;
    const GridFunction ev = exp(v);
    cc.weighted = w.average(ev * F) / (n * w.average(ev));
    const double hi = std::max({cc.defining, cc.contraction, cc.weighted, *r.gamma});
    const double lo = std::min({cc.defining, cc.contraction, cc.weighted, *r.gamma});
    cc.scale = std::max(std::abs(*r.gamma), phi.sup_norm() / n);
    if (cc.scale < 1e-14) cc.scale = 1.0;
    cc.spread = (hi - lo) / cc.scale;
    r.cross_check = cc;

    r.seconds = seconds_since(start);
    return r;
}

// ---------------------------------------------------------------- bisection

namespace {

int sign_of(double x, double zero_tol) { return x > zero_tol ? 1 : (x < -zero_tol ? -1 : 0); }

std::vector<std::string> describe(const std::vector<BisectionStep>& history) {
    std::vector<std::string> out;
    for (const auto& s : history) {
        std::ostringstream line;
        line.precision(17);
        line << "t=" << s.t << " gamma=" << s.gamma;
        out.push_back(line.str());
    }
    return out;
}

}  // namespace

BisectionResult bisect_sign_change(const std::function<double(double)>& g, double g0, double g1, double tol,
                                   int max_iterations) {
    if (!(tol > 0.0)) throw ArgumentError("bisection tolerance must be positive");
    const int s0 = sign_of(g0, tol), s1 = sign_of(g1, tol);
    if (s0 == 0 || s1 == 0 || s0 == s1)
        throw ArgumentError("bisection needs endpoint values of strictly opposite sign beyond the tolerance");
    BisectionResult out;
    out.history = {{0.0, g0}, {1.0, g1}};
    double a = 0.0, b = 1.0;
    for (int it = 0; it < max_iterations; ++it) {
        const double t = 0.5 * (a + b);
        const double gt = g(t);
        out.history.push_back({t, gt});
        if (!std::isfinite(gt)) throw NonconvergenceError("bisection hit a non-finite value", describe(out.history));
        if (std::abs(gt) <= tol) {
            out.t = t;
            out.gamma = gt;
            out.lower = a;
            out.upper = b;
            return out;
        }
        (sign_of(gt, 0.0) == s0 ? a : b) = t;
    }
    throw NonconvergenceError("bisection budget of " + std::to_string(max_iterations) + " exhausted in [" +
                                  std::to_string(a) + ", " + std::to_string(b) + "]",
                              describe(out.history));
}

KGauduchonResult find_k_gauduchon(const HermitianMetric& w1, const HermitianMetric& w2, int k, double tol,
                                  const SolveOptions& opts, int max_iterations) {
    if (!(w1.shape() == w2.shape())) throw ArgumentError("the two metrics live on different grids");
    // g(t) = γ_k(t ω₁ + (1-t) ω₂); t = 0 is ω₂.
    auto metric_at = [&](double t) { return HermitianMetric(w1.form() * cplx{t, 0.0} + w2.form() * cplx{1.0 - t, 0.0}); };

    SolveOptions o = opts;
    const SolveReport r1 = gamma_k(w1, k, o);
    const SolveReport r2 = gamma_k(w2, k, o);
    std::optional<SolveReport> last;
    auto g = [&](double t) {
        // Warm start from the previous midpoint.
        if (last) o.initial_guess = last->v;
        last = gamma_k(metric_at(t), k, o);
        return *last->gamma;
    };
    BisectionResult b = bisect_sign_change(g, *r2.gamma, *r1.gamma, tol, max_iterations);

    HermitianMetric raw = metric_at(b.t);
    HermitianMetric scaled = raw.conformal(last->v * cplx{1.0 / k, 0.0});
    const double residual = k_gauduchon_residual(scaled, k);
    return KGauduchonResult{b.t, std::move(scaled), std::move(raw), std::move(*last), residual, std::move(b.history)};
}

ConformalCheckReport conformal_bounds_check(const HermitianMetric& w, const GridFunction& rho, int k,
                                            const SolveOptions& opts, double zero_tol) {
    const auto start = Clock::now();
    if (!(rho.shape() == w.shape())) throw ArgumentError("rho and the metric live on different grids");
    const GridFunction r = coerce_real(rho, 1e-12, "rho");
    ConformalCheckReport out;
    out.k = k;
    out.gamma = *gamma_k(w, k, opts).gamma;
    out.gamma_rho = *gamma_k(w.conformal(r), k, opts).gamma;
    out.rho_min = r.min_real();
    out.rho_max = r.max_real();
    const double a = std::exp(-out.rho_max) * out.gamma, b = std::exp(-out.rho_min) * out.gamma;
    out.lower = std::min(a, b);
    out.upper = std::max(a, b);
    out.sandwich_holds = out.lower - out.slack <= out.gamma_rho && out.gamma_rho <= out.upper + out.slack;
    out.sign = sign_of(out.gamma, zero_tol);
    out.sign_rho = sign_of(out.gamma_rho, zero_tol);
    out.sign_equal = out.sign == out.sign_rho;
    out.seconds = seconds_since(start);
    return out;
}

// ---------------------------------------------------------------- JSON

nlohmann::json summary_json(const SolveReport& r) {
    nlohmann::json path = nlohmann::json::array();
    for (const auto& s : r.continuation_path)
        path.push_back({{"t", s.t}, {"newton_iterations", s.newton_iterations}, {"residual", s.residual}});
    nlohmann::json cross = nullptr;
    if (r.cross_check)
        cross = {{"defining", r.cross_check->defining},
                 {"contraction", r.cross_check->contraction},
                 {"weighted", r.cross_check->weighted},
                 {"spread", r.cross_check->spread},
                 {"scale", r.cross_check->scale}};
    return {{"gamma", r.gamma ? nlohmann::json(*r.gamma) : nlohmann::json(nullptr)},
            {"k", r.k},
            {"c", r.c},
            {"c_bounds", {r.c_bounds.first, r.c_bounds.second}},
            {"residual", r.residual},
            {"tolerance", r.tolerance},
            {"unresolved_residual", r.unresolved_residual},
            {"mean_constraint", r.mean_constraint},
            {"sup_grad_v", r.sup_grad_v},
            {"psi_prime_min", r.psi_prime_min},
            {"continuation_path", path},
            {"cross_check", cross},
            {"linear_solver", r.linear_solver},
            {"linear_iterations", r.linear_iterations},
            {"warnings", r.warnings},
            {"seconds", r.seconds}};
}

void to_json(nlohmann::json& j, const SolveReport& r) {
    j = summary_json(r);
    j["v"] = r.v;
}

void to_json(nlohmann::json& j, const KGauduchonResult& r) {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& s : r.history) hist.push_back({{"t", s.t}, {"gamma", s.gamma}});
    j = {{"t_star", r.t_star},
         {"gamma", r.report.gamma ? *r.report.gamma : 0.0},
         {"k_gauduchon_residual", r.residual},
         {"history", hist},
         {"report", summary_json(r.report)},
         {"metric", r.metric.form()}};
}

void to_json(nlohmann::json& j, const ConformalCheckReport& r) {
    j = {{"k", r.k},
         {"gamma", r.gamma},
         {"gamma_rho", r.gamma_rho},
         {"rho_min", r.rho_min},
         {"rho_max", r.rho_max},
         {"lower", r.lower},
         {"upper", r.upper},
         {"slack", r.slack},
         {"sign", r.sign},
         {"sign_rho", r.sign_rho},
         {"sandwich_holds", r.sandwich_holds},
         {"sign_equal", r.sign_equal},
         {"seconds", r.seconds}};
}

}  // namespace gauduchon
