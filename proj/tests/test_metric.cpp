#include <doctest.h>

#include <cmath>
#include <random>

#include "gauduchon/error.hpp"
#include "gauduchon/metric.hpp"
#include "support.hpp"

using namespace gauduchon;
using testing_support::random_real_11;
using testing_support::random_trig;

namespace {

GridShape x3_line(int points) { return GridShape::active(3, {4}, points); }

HermitianMetric diagonal_x3(const GridShape& s, double kappa, double beta) {
    const auto xi = GridFunction::sample(s, [kappa](auto x) { return 1.0 + kappa * std::sin(x[4]); });
    const auto eta = GridFunction::sample(s, [beta](auto x) { return std::exp(beta * std::cos(x[4])); });
    const auto one = GridFunction::constant(s, 1.0), zero = GridFunction::zero(s);
    return HermitianMetric(Form::hermitian(s, {{xi, zero, zero}, {zero, eta, zero}, {zero, zero, one}}));
}

// Kähler metric flat + (i/2)∂∂̄u written out through g_{ij̄} = δ_ij + u_{ij̄}.
HermitianMetric kahler_potential_metric(const GridShape& s, const GridFunction& u) {
    const auto n = static_cast<std::size_t>(s.n());
    std::vector<std::vector<GridFunction>> g(n, std::vector<GridFunction>(n, GridFunction::zero(s)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            g[i][j] = mixed_derivative(u, static_cast<int>(i + 1), static_cast<int>(j + 1));
            if (i == j) g[i][j] = g[i][j] + 1.0;
        }
    return HermitianMetric(Form::hermitian(s, g));
}

double sup_diff(const GridFunction& a, const GridFunction& b) { return (a - b).sup_norm(); }

}  // namespace

TEST_CASE("metric validation") {
    const GridShape s = x3_line(8);
    const auto one = GridFunction::constant(s, 1.0), zero = GridFunction::zero(s);
    const auto half = GridFunction::constant(s, 0.5);
    CHECK_THROWS_AS(HermitianMetric(Form::hermitian(s, {{one, half, zero}, {zero, one, zero}, {zero, zero, one}})),
                    ArgumentError);
    CHECK_THROWS_AS(HermitianMetric(Form::hermitian(s, {{one, zero, zero}, {zero, -one, zero}, {zero, zero, one}})),
                    ArgumentError);
    CHECK_THROWS_AS(HermitianMetric(Form::flat(s) * 2.0 - Form::flat(s) * 2.0), ArgumentError);

    const HermitianMetric flat(Form::flat(s));
    CHECK(flat.is_diagonal());
    CHECK(flat.eigen_floor() == doctest::Approx(1.0));
    CHECK(flat.hermitian_residual() == 0.0);
    // ω^n = n! dV for the identity matrix.
    CHECK(sup_diff(flat.volume_density(), GridFunction::constant(s, 6.0)) <= 1e-14);
    CHECK(flat.total_volume() == doctest::Approx(6.0 * std::pow(kTwoPi, 6)));
}

TEST_CASE("inverse matrix is the transposed inverse") {
    std::mt19937_64 rng(31);
    const GridShape s(2, {5, 1, 4, 3});
    const HermitianMetric w(random_real_11(s, rng));
    CHECK_FALSE(w.is_diagonal());
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            GridFunction acc = GridFunction::zero(s);
            for (int l = 1; l <= 2; ++l) acc += *w.g(i, l) * *w.ginv(j, l);
            CHECK(sup_diff(acc, GridFunction::constant(s, i == j ? 1.0 : 0.0)) <= 1e-14);
        }
}

TEST_CASE("laplacian examples") {
    const GridShape s(3, {16, 1, 1, 1, 1, 1});
    const HermitianMetric flat(Form::flat(s));
    const auto h = GridFunction::sample(s, [](auto x) { return std::cos(x[0]); });
    CHECK(sup_diff(laplacian(flat, h), -0.25 * h) <= 1e-14);
    CHECK(laplacian(flat, GridFunction::constant(s, 3.0)).sup_norm() == 0.0);

    const GridShape line = x3_line(64);
    const HermitianMetric diag = diagonal_x3(line, 0.8, 0.5);
    const auto g = GridFunction::sample(line, [](auto x) { return std::sin(2 * x[4]); });
    const auto expect = GridFunction::sample(line, [](auto x) { return -std::sin(2 * x[4]); });
    CHECK(sup_diff(laplacian(diag, g), expect) <= 1e-12);
}

TEST_CASE("property: laplacian two-path agreement") {
    std::mt19937_64 rng(32);
    const GridShape s(3, {6, 1, 5, 4, 1, 5});
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianMetric w(random_real_11(s, rng));
        const auto h = random_trig(s, rng, 2, 1.0, true);
        const auto a = laplacian(w, h), b = laplacian_form_route(w, h);
        CHECK(sup_diff(a, b) <= 1e-9 * std::max(1.0, a.sup_norm()));
        CHECK(a.max_abs_imag() <= 1e-12);
    }
}

TEST_CASE("gradient and pairing") {
    const GridShape s(3, {16, 1, 1, 1, 1, 1});
    const HermitianMetric flat(Form::flat(s));
    const auto h = GridFunction::sample(s, [](auto x) { return std::sin(x[0]); });
    const auto expect = GridFunction::sample(s, [](auto x) { return 0.25 * std::cos(x[0]) * std::cos(x[0]); });
    CHECK(sup_diff(grad_norm_sq(flat, h), expect) <= 1e-14);

    std::mt19937_64 rng(33);
    const GridShape g(3, {5, 4, 1, 5, 4, 1});
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianMetric w(random_real_11(g, rng));
        const auto u = random_trig(g, rng, 2, 1.0, true), v = random_trig(g, rng, 2, 1.0, true);
        const auto du = OneFormPair::differential(u), dv = OneFormPair::differential(v);
        CHECK(sup_diff(pair(w, du, dv), pair(w, dv, du)) <= 1e-13);
        const auto q = grad_norm_sq(w, u);
        CHECK(q.max_abs_imag() <= 1e-13);
        CHECK(q.min_real() >= -1e-14);
        CHECK(sup_diff(q, pair(w, du, du)) == 0.0);
    }
    CHECK(grad_norm_sq(flat, GridFunction::constant(s, 2.0)).sup_norm() == 0.0);
}

TEST_CASE("phi, B1 and F vanish or reduce for Kähler metrics") {
    const GridShape flat_grid(3, {4, 4, 1, 1, 4, 1});
    const HermitianMetric flat(Form::flat(flat_grid));
    for (int k = 1; k <= 2; ++k) {
        CHECK(phi_k(flat, k).sup_norm() == 0.0);
        CHECK(b1_form(flat, k).sup_norm() == 0.0);
    }
    const auto report = classify(flat, 1e-12);
    CHECK(report.is_kahler);
    CHECK(report.is_balanced);
    CHECK(report.is_gauduchon);
    CHECK(report.is_pluriclosed);

    const GridShape s(3, {24, 1, 1, 24, 1, 1});
    const auto u = GridFunction::sample(s, [](auto x) { return 0.05 * (std::cos(x[0] + x[3]) + std::sin(x[0] - 2 * x[3])); });
    const HermitianMetric w = kahler_potential_metric(s, u);
    CHECK_FALSE(w.is_diagonal());
    for (int k = 1; k <= 2; ++k) {
        CHECK(phi_k(w, k).sup_norm() <= 1e-12);
        CHECK(b1_form(w, k).sup_norm() <= 1e-12);
    }
    const auto r = classify(w, 1e-11);
    CHECK(r.is_kahler);
    CHECK(r.is_pluriclosed);
}

TEST_CASE("phi and B1 for a diagonal x3 metric") {
    const GridShape s = x3_line(64);
    const double kappa = 0.7, beta = 0.4;
    const HermitianMetric w = diagonal_x3(s, kappa, beta);
    // φ = (ξ''/ξ + η''/η)/8 for diag(ξ(x3), η(x3), 1).
    const auto oracle = GridFunction::sample(s, [&](auto x) {
        const double t = x[4];
        const double xi = 1 + kappa * std::sin(t), xi2 = -kappa * std::sin(t);
        const double eta_ratio = beta * beta * std::sin(t) * std::sin(t) - beta * std::cos(t);
        return (xi2 / xi + eta_ratio) / 8.0;
    });
    CHECK(sup_diff(phi_k(w, 1), oracle) <= 1e-12);
    CHECK(phi_k(w, 1).max_abs_imag() == 0.0);

    const OneFormPair b = b1_form(w, 1);
    for (int j = 0; j < 2; ++j) {
        CHECK(b.hol[static_cast<std::size_t>(j)].sup_norm() <= 1e-14);
        CHECK(b.anti[static_cast<std::size_t>(j)].sup_norm() <= 1e-14);
    }
    CHECK(b.hol[2].sup_norm() > 0.1);
    CHECK(b.reality_defect() <= 1e-13);
    CHECK_THROWS_AS(phi_k(w, 0), ArgumentError);
    CHECK_THROWS_AS(phi_k(w, 3), ArgumentError);
}

TEST_CASE("nonlinear F at constant v is phi") {
    std::mt19937_64 rng(35);
    const GridShape s(3, {8, 1, 8, 1, 1, 8});
    const HermitianMetric w(random_real_11(s, rng));
    for (int k = 1; k <= 2; ++k) {
        const auto phi = phi_k(w, k);
        CHECK(sup_diff(nonlinear_F(w, k, GridFunction::zero(s)), phi) <= 1e-13);
        CHECK(sup_diff(nonlinear_F(w, k, GridFunction::constant(s, 0.7)), phi) <= 1e-12);
    }
}

TEST_CASE("property: F = Δv + |∇v|² + <B1, dv> + φ") {
    std::mt19937_64 rng(36);
    const GridShape s(3, {32, 1, 1, 32, 32, 1});
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 1 + trial % 2;
        const HermitianMetric w(random_real_11(s, rng));
        const auto v = random_trig(s, rng, 1, 0.1, true, 3);
        const auto F = nonlinear_F(w, k, v);
        const auto dv = OneFormPair::differential(v);
        const auto rhs = laplacian(w, v) + grad_norm_sq(w, v) + pair(w, b1_form(w, k), dv) + phi_k(w, k);
        CHECK(sup_diff(F, rhs) <= 1e-9);
    }
}

TEST_CASE("classification of a diagonal x3 metric") {
    const GridShape s = x3_line(32);
    const HermitianMetric w = diagonal_x3(s, 0.8, 0.0);
    const auto r = classify(w, 1e-10);
    CHECK_FALSE(r.is_kahler);
    // |∂ω| = |(i/2) ∂ξ/∂z3| = 0.8/4.
    CHECK(r.kahler_residual == doctest::Approx(0.2).epsilon(1e-12));
    REQUIRE(r.k_gauduchon_residuals.size() == 2);
    CHECK(r.k_gauduchon_residuals[1] == doctest::Approx(r.gauduchon_residual).epsilon(1e-12));
    CHECK(r.k_gauduchon_residuals[0] > 1e-3);
    nlohmann::json j = r;
    CHECK(j.at("is_kahler") == false);
}

TEST_CASE("integral criterion") {
    const GridShape s(3, {4, 1, 4, 1, 4, 1});
    CHECK(integral_criterion(Form::flat(s), 1) == 0.0);
    const auto one = GridFunction::constant(s, 1.0), zero = GridFunction::zero(s);
    CHECK_THROWS_AS(integral_criterion(Form::hermitian(s, {{one, zero, zero}, {zero, -one, zero}, {zero, zero, one}}), 1),
                    ArgumentError);
    // Equals ∫ φ ω^n / n for a metric.
    const GridShape line = x3_line(64);
    const HermitianMetric w = diagonal_x3(line, 0.5, 0.3);
    const double direct = integrate(phi_k(w, 1) * w.volume_density()).real() / 3.0;
    CHECK(gauduchon_criterion(w, 1) == doctest::Approx(direct).epsilon(1e-10));
    CHECK(integral_criterion(w.form(), 1) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("one-form JSON round trip") {
    std::mt19937_64 rng(37);
    const GridShape s(2, {3, 1, 2, 1});
    const auto b = OneFormPair::differential(random_trig(s, rng, 1, 1.0, true));
    nlohmann::json j = b;
    const auto back = one_form_from_json(j, s);
    CHECK(sup_diff(back.hol[0], b.hol[0]) == 0.0);
    CHECK(sup_diff(back.anti[1], b.anti[1]) == 0.0);
    CHECK_THROWS_AS(one_form_from_json(j, GridShape(2, {3, 1, 1, 1})), ArgumentError);
}
