#include <doctest.h>

#include <cmath>
#include <random>

#include "gauduchon/error.hpp"
#include "gauduchon/grid.hpp"
#include "gauduchon/kernels.hpp"
#include "support.hpp"

using namespace gauduchon;
using testing_support::random_trig;

namespace {

GridShape x3_line(int points) { return GridShape(3, {1, 1, 1, 1, points, 1}); }

double sup_diff(const GridFunction& a, const GridFunction& b) { return (a - b).sup_norm(); }

}  // namespace

TEST_CASE("shape validation") {
    CHECK_THROWS_AS(GridShape(0, {}), ArgumentError);
    CHECK_THROWS_AS(GridShape(2, {4, 4, 4}), ArgumentError);
    CHECK_THROWS_AS(GridShape(1, {4, 0}), ArgumentError);
    const GridShape s(2, {4, 1, 3, 5});
    CHECK(s.points() == 60);
    CHECK(s.stride(3) == 1);
    CHECK(s.stride(0) == 15);
    CHECK(s.x_dim(2) == 2);
    CHECK(s.y_dim(1) == 1);
    CHECK(s.active_mask() == 0b1101u);
    CHECK_THROWS_AS(GridFunction(s, std::vector<cplx>(59)), ArgumentError);
}

TEST_CASE("derivative of sin(x3) on 64 points") {
    const GridShape s = x3_line(64);
    const auto u = GridFunction::sample(s, [](auto x) { return std::sin(x[4]); });
    const auto expect = GridFunction::sample(s, [](auto x) { return std::cos(x[4]); });
    CHECK(sup_diff(derivative(u, 4), expect) <= 1e-12);
    // y3 has a single node: derivative is identically zero.
    CHECK(derivative(u, 5).sup_norm() == 0.0);
    CHECK_THROWS_AS(derivative(u, 6), ArgumentError);
    CHECK_THROWS_AS(derivative(u, -1), ArgumentError);
}

TEST_CASE("derivative of a constant is exactly zero") {
    const auto u = GridFunction::constant(GridShape::uniform(2, 6), 5.0);
    for (int d = 0; d < 4; ++d) CHECK(derivative(u, d).sup_norm() == 0.0);
    CHECK(holomorphic_derivative(u, 1, false).sup_norm() == 0.0);
    CHECK(holomorphic_derivative(u, 2, true).sup_norm() == 0.0);
}

TEST_CASE("single Fourier mode e^{ix1}") {
    const GridShape s(1, {32, 1});
    const auto u = GridFunction::sample(s, [](auto x) { return std::exp(cplx{0.0, x[0]}); });
    CHECK(sup_diff(derivative(u, 0), cplx{0.0, 1.0} * u) <= 1e-14);
    CHECK(sup_diff(holomorphic_derivative(u, 1, false), cplx{0.0, 0.5} * u) <= 1e-14);
    CHECK(sup_diff(holomorphic_derivative(u, 1, true), cplx{0.0, 0.5} * u) <= 1e-14);
    CHECK_THROWS_AS(holomorphic_derivative(u, 2, false), ArgumentError);
    CHECK_THROWS_AS(holomorphic_derivative(u, 0, true), ArgumentError);
}

TEST_CASE("holomorphic derivative of sin(x3)") {
    const GridShape s = x3_line(32);
    const auto u = GridFunction::sample(s, [](auto x) { return std::sin(x[4]); });
    const auto half_cos = GridFunction::sample(s, [](auto x) { return 0.5 * std::cos(x[4]); });
    CHECK(sup_diff(holomorphic_derivative(u, 3, false), half_cos) <= 1e-13);
    CHECK(sup_diff(holomorphic_derivative(u, 3, true), half_cos) <= 1e-13);
    CHECK(holomorphic_derivative(u, 1, false).sup_norm() == 0.0);
}

TEST_CASE("y-direction enters with the right sign") {
    // u = e^{i y1}: ∂/∂z = ½(∂x - i∂y) gives ½ u, ∂/∂z̄ gives -½ u.
    const GridShape s(1, {1, 16});
    const auto u = GridFunction::sample(s, [](auto x) { return std::exp(cplx{0.0, x[1]}); });
    CHECK(sup_diff(holomorphic_derivative(u, 1, false), 0.5 * u) <= 1e-14);
    CHECK(sup_diff(holomorphic_derivative(u, 1, true), -0.5 * u) <= 1e-14);
}

TEST_CASE("integrate") {
    const GridShape s = GridShape::active(3, {4}, 64);
    CHECK(std::abs(integrate(GridFunction::constant(s, 1.0)) - std::pow(kTwoPi, 6)) <= 1e-9);
    const auto sine = GridFunction::sample(s, [](auto x) { return std::sin(x[4]); });
    // Measured against the torus volume: the rounded samples of sin alone sum to ~1e-15.
    CHECK(std::abs(integrate(sine)) / std::pow(kTwoPi, 6) <= 1e-13);
    const auto sq = GridFunction::sample(s, [](auto x) { return std::sin(x[4]) * std::sin(x[4]); });
    const double expect = 0.5 * std::pow(kTwoPi, 6);
    CHECK(std::abs(integrate(sq) - expect) / expect <= 1e-12);
}

TEST_CASE("mixed derivative equals composition") {
    std::mt19937_64 rng(7);
    const GridShape s(2, {8, 10, 9, 8});
    for (int trial = 0; trial < 5; ++trial) {
        const auto u = random_trig(s, rng, 3, 1.0, false);
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j) {
                const auto composed = holomorphic_derivative(holomorphic_derivative(u, j, true), i, false);
                CHECK(sup_diff(mixed_derivative(u, i, j), composed) <= 1e-12);
            }
    }
}

TEST_CASE("property: derivatives commute across dimensions") {
    std::mt19937_64 rng(11);
    const GridShape s(2, {8, 6, 10, 7});
    for (int trial = 0; trial < 20; ++trial) {
        const auto u = random_trig(s, rng, 2, 1.0, trial % 2 == 0);
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                CHECK(sup_diff(derivative(derivative(u, a), b), derivative(derivative(u, b), a)) <= 1e-12);
    }
}

TEST_CASE("property: integral of a derivative vanishes") {
    std::mt19937_64 rng(12);
    const GridShape s(2, {8, 6, 10, 1});
    for (int trial = 0; trial < 20; ++trial) {
        const auto u = random_trig(s, rng, 3, 1.0, false);
        const double scale = std::pow(kTwoPi, 4);
        for (int d = 0; d < 4; ++d) CHECK(std::abs(integrate(derivative(u, d))) <= 1e-12 * scale);
    }
}

TEST_CASE("property: conjugation swaps the holomorphic derivatives") {
    std::mt19937_64 rng(13);
    const GridShape s(2, {6, 8, 8, 5});
    for (int trial = 0; trial < 20; ++trial) {
        const auto u = random_trig(s, rng, 2, 1.0, false);
        for (int j = 1; j <= 2; ++j)
            CHECK(sup_diff(holomorphic_derivative(u.conj(), j, false),
                           holomorphic_derivative(u, j, true).conj()) <= 1e-14);
    }
}

TEST_CASE("FFT derivative matches direct DFT reference") {
    std::mt19937_64 rng(14);
    const GridShape s(2, {6, 5, 8, 3});
    const auto u = random_trig(s, rng, 5, 1.0, false, 8);
    for (int d = 0; d < 4; ++d) {
        std::vector<cplx> ref(u.size());
        std::vector<std::size_t> strides;
        for (int e = 0; e < 4; ++e) strides.push_back(s.stride(e));
        kernels::serial::dft_derivative(u.values(), ref, s.sizes(), strides, d);
        CHECK(sup_diff(derivative(u, d), GridFunction(s, ref)) <= 1e-11);
    }
}

TEST_CASE("resample is exact for band-limited data and refines losslessly") {
    std::mt19937_64 rng(15);
    const GridShape coarse(2, {8, 1, 6, 7});
    const auto u = random_trig(coarse, rng, 2, 1.0, true);
    const auto fine = resample(u, coarse.refined(2));
    CHECK(fine.shape() == GridShape(2, {16, 1, 12, 14}));
    CHECK(sup_diff(resample(fine, coarse), u) <= 1e-13);
    CHECK(std::abs(integrate(fine) - integrate(u)) <= 1e-10);
}

TEST_CASE("dealiased product removes the aliased modes") {
    const GridShape s(1, {8, 1});
    // cos(3x)·cos(3x) = ½ + ½cos(6x); cos(6x) aliases to cos(2x) on 8 nodes.
    const auto c3 = GridFunction::sample(s, [](auto x) { return std::cos(3 * x[0]); });
    const auto plain = product(c3, c3, false);
    const auto clean = product(c3, c3, true);
    const auto half = GridFunction::constant(s, 0.5);
    CHECK(sup_diff(clean, half) <= 1e-14);
    CHECK(sup_diff(plain, half) > 0.4);
    // Band-limited products are unaffected.
    const auto c1 = GridFunction::sample(s, [](auto x) { return std::cos(x[0]); });
    CHECK(sup_diff(product(c1, c1, true), product(c1, c1, false)) <= 1e-14);
}

TEST_CASE("JSON round trip") {
    std::mt19937_64 rng(16);
    const GridShape s(1, {5, 3});
    const auto u = random_trig(s, rng, 1, 1.0, false);
    nlohmann::json j = u;
    CHECK(j.at("sizes") == nlohmann::json({5, 3}));
    const auto back = grid_function_from_json(j);
    CHECK(back.shape() == s);
    CHECK(sup_diff(back, u) == 0.0);
    CHECK_THROWS_AS(grid_function_from_json(nlohmann::json{{"n", 1}}), ArgumentError);
}

TEST_CASE("serial and parallel kernels agree bitwise") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const std::size_t points = 10007;
    const int n = 3;
    // Random hermitian positive matrices g = A A^* + I.
    std::vector<std::vector<cplx>> g(9, std::vector<cplx>(points));
    for (std::size_t p = 0; p < points; ++p) {
        cplx a[3][3];
        for (auto& row : a)
            for (auto& e : row) e = {uni(rng), uni(rng)};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                cplx acc = i == j ? 1.0 : 0.0;
                for (int l = 0; l < 3; ++l) acc += a[i][l] * std::conj(a[j][l]);
                g[static_cast<std::size_t>(i * 3 + j)][p] = acc;
            }
    }
    kernels::MatrixFieldView view{n, {}};
    for (auto& e : g) view.entries.push_back(e.data());
    std::vector<std::vector<cplx>> inv_s(9, std::vector<cplx>(points)), inv_p = inv_s;
    kernels::MatrixFieldOut out_s{n, {}}, out_p{n, {}};
    for (int e = 0; e < 9; ++e) {
        out_s.entries.push_back(inv_s[static_cast<std::size_t>(e)].data());
        out_p.entries.push_back(inv_p[static_cast<std::size_t>(e)].data());
    }
    std::vector<double> eig_s(points), eig_p(points);
    kernels::serial::invert_hermitian(view, points, out_s, eig_s);
    kernels::parallel::invert_hermitian(view, points, out_p, eig_p);
    CHECK(inv_s == inv_p);
    CHECK(eig_s == eig_p);
    CHECK(*std::min_element(eig_s.begin(), eig_s.end()) >= 1.0 - 1e-12);

    // ginv(i,j) = (G^{-1})_{ji}: Σ_l g_{il} ginv(j,l) = δ_ij at a sample point.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cplx acc = 0.0;
            for (int l = 0; l < 3; ++l)
                acc += g[static_cast<std::size_t>(i * 3 + l)][5] * inv_s[static_cast<std::size_t>(j * 3 + l)][5];
            CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) <= 1e-12);
        }

    std::vector<const cplx*> a, b;
    for (int i = 0; i < 3; ++i) {
        a.push_back(g[static_cast<std::size_t>(i)].data());
        b.push_back(g[static_cast<std::size_t>(3 + i)].data());
    }
    std::vector<cplx> bs(points), bp(points), ts(points), tp(points);
    kernels::serial::contract_bilinear(view, a, b, bs);
    kernels::parallel::contract_bilinear(view, a, b, bp);
    CHECK(bs == bp);
    kernels::serial::contract_trace(view, view, ts);
    kernels::parallel::contract_trace(view, view, tp);
    CHECK(ts == tp);
    CHECK(kernels::serial::block_sum(ts) == kernels::parallel::block_sum(ts));
}
