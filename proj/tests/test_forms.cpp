#include <doctest.h>

#include <cmath>
#include <random>

#include "gauduchon/error.hpp"
#include "gauduchon/forms.hpp"
#include "support.hpp"

using namespace gauduchon;
using testing_support::max_diff;
using testing_support::random_form;
using testing_support::random_real_11;
using testing_support::random_trig;

namespace {

const cplx kHalfI{0.0, 0.5};

Form monomial(const GridShape& s, std::vector<int> I, std::vector<int> J, cplx c = 1.0) {
    Form f(s, static_cast<int>(I.size()), static_cast<int>(J.size()));
    f.set(I, J, GridFunction::constant(s, c));
    return f;
}

Form torus_form(const GridShape& s, double kappa) {
    const auto xi = GridFunction::sample(s, [kappa](auto x) { return 1.0 + kappa * std::sin(x[4]); });
    const auto eta = GridFunction::sample(s, [](auto x) { return 1.0 + 0.3 * std::cos(x[4]); });
    const auto one = GridFunction::constant(s, 1.0), zero = GridFunction::zero(s);
    return Form::hermitian(s, {{xi, zero, zero}, {zero, eta, zero}, {zero, zero, one}});
}

}  // namespace

TEST_CASE("merge_sign") {
    // n = 2: bits dz1=0, dz2=1, dz̄1=2, dz̄2=3.
    CHECK(merge_sign(0b0001, 0b0010) == 1);
    CHECK(merge_sign(0b0010, 0b0001) == -1);
    CHECK(merge_sign(0b0011, 0b0011) == 0);
    // (dz̄1) ∧ (dz2) = -dz2 ∧ dz̄1.
    CHECK(merge_sign(0b0100, 0b0010) == -1);
}

TEST_CASE("wedge of two diagonal 2-forms") {
    const GridShape s = GridShape::uniform(2, 1);
    const Form a = monomial(s, {1}, {1});
    const Form b = monomial(s, {2}, {2});
    const Form ab = wedge(a, b);
    CHECK(ab.p() == 2);
    CHECK(ab.q() == 2);
    // Even forms commute.
    CHECK(max_diff(ab, wedge(b, a)) == 0.0);
    // dz1∧dz̄1∧dz2∧dz̄2 is +1 times the interleaved monomial, i.e. -1 against dz1∧dz2∧dz̄1∧dz̄2.
    CHECK(ab.coefficient({1, 2}, {1, 2})->values()[0] == cplx{-1.0, 0.0});
    const Form interleaved = wedge(wedge(wedge(monomial(s, {1}, {}), monomial(s, {}, {1})), monomial(s, {2}, {})),
                                   monomial(s, {}, {2}));
    CHECK(max_diff(ab, interleaved) == 0.0);
}

TEST_CASE("(φ1∧φ2)∧(φ̄1∧φ̄2) against φ1∧φ̄1∧φ2∧φ̄2 carries -1") {
    const GridShape s = GridShape::uniform(2, 1);
    const Form lhs = wedge(monomial(s, {1, 2}, {}), monomial(s, {}, {1, 2}));
    const Form rhs = wedge(monomial(s, {1}, {1}), monomial(s, {2}, {2}));
    CHECK(max_diff(lhs, rhs * -1.0) == 0.0);
}

TEST_CASE("degree overflow gives the zero form") {
    const GridShape s = GridShape::uniform(2, 1);
    const Form w = wedge(monomial(s, {1, 2}, {}), monomial(s, {1}, {}));
    CHECK(w.p() == 3);
    CHECK(w.is_zero());
}

TEST_CASE("property: graded commutativity") {
    std::mt19937_64 rng(21);
    const GridShape s(3, {4, 1, 5, 1, 4, 3});
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> deg(0, 2);
        const int pa = deg(rng), qa = deg(rng), pb = deg(rng), qb = deg(rng);
        const Form a = random_form(s, pa, qa, rng);
        const Form b = random_form(s, pb, qb, rng);
        const double sign = ((pa + qa) * (pb + qb)) % 2 ? -1.0 : 1.0;
        CHECK(max_diff(wedge(a, b), wedge(b, a) * sign) <= 1e-12);
    }
}

TEST_CASE("∂∂̄ + ∂̄∂ = 0 and ∂² = ∂̄² = 0") {
    std::mt19937_64 rng(22);
    const GridShape s(2, {6, 6, 5, 7});
    for (int trial = 0; trial < 10; ++trial) {
        const Form u = Form::scalar(random_trig(s, rng, 2, 1.0, false));
        CHECK((del(delbar(u)) + delbar(del(u))).sup_norm() <= 1e-12);
        const Form a = random_form(s, 1, trial % 2, rng);
        CHECK(del(del(a)).sup_norm() <= 1e-12);
        CHECK(delbar(delbar(a)).sup_norm() <= 1e-12);
    }
}

TEST_CASE("property: graded Leibniz rule") {
    std::mt19937_64 rng(23);
    // Products of wave-2 data need more than 8 nodes per dimension to stay unaliased.
    const GridShape s(2, {10, 9, 10, 9});
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> deg(0, 1);
        const Form a = random_form(s, deg(rng), deg(rng), rng);
        const Form b = random_form(s, deg(rng), deg(rng), rng);
        const double sign = a.degree() % 2 ? -1.0 : 1.0;
        const Form lhs = del(wedge(a, b));
        const Form rhs = wedge(del(a), b) + wedge(a, del(b)) * sign;
        CHECK(max_diff(lhs, rhs) <= 1e-11);
        CHECK(max_diff(delbar(wedge(a, b)), wedge(delbar(a), b) + wedge(a, delbar(b)) * sign) <= 1e-11);
    }
}

TEST_CASE("property: conj(∂a) = ∂̄(conj a)") {
    std::mt19937_64 rng(24);
    const GridShape s(2, {5, 6, 4, 6});
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> deg(0, 2);
        const Form a = random_form(s, deg(rng), deg(rng), rng);
        const Form lhs = conj(del(a));
        const Form rhs = delbar(conj(a));
        CHECK(lhs.p() == rhs.p());
        CHECK(lhs.q() == rhs.q());
        CHECK(lhs.terms().size() == rhs.terms().size());
        CHECK(max_diff(lhs, rhs) <= 1e-13);
    }
}

TEST_CASE("conjugation of a real (1,1)-form is the identity") {
    std::mt19937_64 rng(25);
    const GridShape s(2, {4, 4, 4, 4});
    const Form w = random_real_11(s, rng);
    CHECK(max_diff(conj(w), w) <= 1e-15);
}

TEST_CASE("power") {
    const GridShape s = GridShape::uniform(3, 1);
    const Form flat = Form::flat(s);
    CHECK(max_diff(power(flat, 3), Form::volume(s) * 6.0) <= 1e-15);
    const Form unit = power(flat, 0);
    CHECK(unit.p() == 0);
    CHECK(unit.coefficient({}, {})->values()[0] == cplx{1.0, 0.0});
    CHECK_THROWS_AS(power(monomial(s, {1}, {}), 2), ArgumentError);

    std::mt19937_64 rng(26);
    const GridShape g(3, {3, 1, 4, 1, 1, 3});
    const Form a = random_real_11(g, rng), b = random_real_11(g, rng);
    const double t = 0.37;
    const Form lhs = power(a + b * t, 2);
    const Form rhs = power(a, 2) + wedge(a, b) * (2.0 * t) + power(b, 2) * (t * t);
    CHECK(max_diff(lhs, rhs) <= 1e-13);
}

TEST_CASE("ratio_to_volume") {
    const GridShape s = GridShape::active(3, {4}, 16);
    const Form flat3 = power(Form::flat(s), 3);
    const auto one = ratio_to_volume(flat3, flat3);
    CHECK((one - GridFunction::constant(s, 1.0)).sup_norm() <= 1e-15);
    CHECK((ratio_to_volume(Form::volume(s) * 6.0, flat3) - GridFunction::constant(s, 1.0)).sup_norm() <= 1e-15);

    // A volume that vanishes at one node.
    auto c = GridFunction::sample(s, [](auto x) { return std::abs(x[4] - kTwoPi * 3 / 16) < 1e-9 ? 0.0 : 1.0; });
    Form bad(s, 3, 3);
    bad.set({1, 2, 3}, {1, 2, 3}, c);
    try {
        (void)ratio_to_volume(flat3, bad);
        FAIL("expected SingularVolumeError");
    } catch (const SingularVolumeError& e) {
        CHECK(e.point() == 3);
    }
    CHECK_THROWS_AS(ratio_to_volume(Form::flat(s), flat3), ArgumentError);
}

TEST_CASE("diagonal x3 metric: (i/2)∂∂̄ω∧ω") {
    const GridShape s = GridShape::active(3, {4}, 64);
    const double kappa = 0.6;
    const Form w = torus_form(s, kappa);
    const Form lhs = wedge(del(delbar(w)), w) * kHalfI;
    // (η ξ_{z3z̄3} + ξ η_{z3z̄3}) with f_{z3z̄3} = f''/4 for f = f(x3).
    const auto expect = GridFunction::sample(s, [kappa](auto x) {
        const double t = x[4];
        const double xi = 1 + kappa * std::sin(t), xi2 = -kappa * std::sin(t);
        const double eta = 1 + 0.3 * std::cos(t), eta2 = -0.3 * std::cos(t);
        return 0.25 * (eta * xi2 + xi * eta2);
    });
    CHECK((top_density(lhs) - expect).sup_norm() <= 1e-13);

    // Ratio to ω³ is (ξ''/ξ + η''/η)/24.
    const auto ratio = ratio_to_volume(lhs, power(w, 3));
    const auto oracle = GridFunction::sample(s, [kappa](auto x) {
        const double t = x[4];
        return (-kappa * std::sin(t) / (1 + kappa * std::sin(t)) - 0.3 * std::cos(t) / (1 + 0.3 * std::cos(t))) / 24.0;
    });
    CHECK((ratio - oracle).sup_norm() <= 1e-13);
}

TEST_CASE("ddbar_top_density matches the full computation") {
    std::mt19937_64 rng(27);
    const GridShape s(3, {4, 3, 1, 4, 3, 4});
    for (int k = 0; k <= 2; ++k) {
        const Form w = random_real_11(s, rng);
        const Form omega = power(w, k);
        const Form theta = power(w, 2 - k);
        const auto full = top_density(wedge(del(delbar(omega)), theta));
        CHECK((ddbar_top_density(omega, theta) - full).sup_norm() <= 1e-12);
    }
    CHECK_THROWS_AS(ddbar_top_density(Form::flat(s), power(Form::flat(s), 2)), ArgumentError);
}

TEST_CASE("property: integral identity for conformal rescaling") {
    // ∫ e^{-v}(i/2)∂∂̄(e^v w^k)∧w^{n-k-1}
    //   = (i/2)∫[∂∂̄w^k∧w^{n-k-1} + ∂v∧∂̄v∧w^{n-1}] + (i/2)(1 - 2k/(n-1))∫ v ∂∂̄w^{n-1}
    // Discretely this holds up to the aliasing of e^v·w^k, so v and w are kept
    // well resolved.
    std::mt19937_64 rng(28);
    const GridShape s(3, {24, 1, 1, 24, 24, 1});
    const int n = 3;
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 1 + trial % 2;
        const Form w = random_real_11(s, rng);
        const auto v = random_trig(s, rng, 1, 0.25, true, 3);
        const Form wk = power(w, k), rest = power(w, n - k - 1), wn1 = power(w, n - 1);
        const cplx lhs = kHalfI * integrate(exp(-v) * ddbar_top_density(exp(v) * wk, rest));
        const Form vform = Form::scalar(v);
        const cplx grad = integrate_top(wedge(wedge(del(vform), delbar(vform)), wn1));
        const cplx rhs = kHalfI * (integrate(ddbar_top_density(wk, rest)) + grad) +
                         kHalfI * (1.0 - 2.0 * k / (n - 1.0)) * integrate(v * ddbar_top_density(wn1, Form::one(s)));
        const double scale = std::abs(lhs) + std::abs(grad) + 1e-300;
        CHECK(std::abs(lhs - rhs) / scale <= 1e-8);
    }
}

TEST_CASE("form JSON round trip") {
    std::mt19937_64 rng(29);
    const GridShape s(2, {3, 1, 2, 2});
    const Form a = random_form(s, 1, 2, rng, 3);
    nlohmann::json j = a;
    const Form back = form_from_json(j);
    CHECK(back.p() == 1);
    CHECK(back.q() == 2);
    CHECK(max_diff(a, back) == 0.0);
    CHECK(j.at("terms")[0].at("I").is_array());
}
