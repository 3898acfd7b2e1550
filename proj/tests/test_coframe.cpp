#include <doctest.h>

#include <random>

#include "gauduchon/coframe.hpp"
#include "gauduchon/error.hpp"
#include "gauduchon/metric.hpp"
#include "gauduchon/solver.hpp"

using namespace gauduchon;
using namespace gauduchon::coframe;

namespace {

const char* kIwasawa = R"(
# holomorphic coframe of the Iwasawa manifold
generators phi1 phi2 phi3
del phi3 = -phi1^phi2
)";

const char* kS5S1 = R"(
generators theta
formal W
W^3 = 0
delbar theta = W
)";

const char* kStandard = "(i/2)*(phi1^bar(phi1) + phi2^bar(phi2) + phi3^bar(phi3))";

// Random form with small integer coefficients over every monomial kind.
CoframeForm random_form(const CoframeAlgebra& alg, std::mt19937_64& rng, int terms) {
    const auto& layout = alg.layout();
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<std::uint32_t> mask(0, (1u << (2 * layout->m())) - 1);
    CoframeForm f(layout);
    for (int t = 0; t < terms; ++t) {
        Monomial m{mask(rng), std::vector<int>(layout->formal.size(), 0)};
        for (std::size_t k = 0; k < m.powers.size(); ++k)
            m.powers[k] = std::uniform_int_distribution<int>(0, layout->orders[k] - 1)(rng);
        f.accumulate(m, GaussianRational(Rational(coef(rng)), Rational(coef(rng))));
    }
    return f;
}

}  // namespace

TEST_CASE("gaussian rationals") {
    const GaussianRational half_i(0, Rational(1, 2));
    CHECK(half_i * half_i == GaussianRational(Rational(-1, 4)));
    CHECK((GaussianRational(1) / half_i) == GaussianRational(0, -2));
    CHECK(GaussianRational(Rational(1, 6)).to_string() == "1/6");
    CHECK(GaussianRational(0, Rational(-1, 4)).to_string() == "-1/4*i");
    CHECK(GaussianRational(Rational(1, 2), 3).to_string() == "(1/2 + 3*i)");
    CHECK(GaussianRational(Rational(1, 2), -1).to_string() == "(1/2 - i)");
    CHECK_THROWS_AS(GaussianRational(1) / GaussianRational(0), ArgumentError);
}

TEST_CASE("form parsing, printing and round trips") {
    const CoframeAlgebra alg = CoframeAlgebra::parse(kIwasawa);
    CHECK(alg.dimension() == 3);
    const CoframeForm a = alg.parse_form("phi2^phi1");
    CHECK(a.to_string() == "-phi1^phi2");
    CHECK(alg.parse_form("phi1^phi1").is_zero());
    CHECK(alg.parse_form("0.5*phi1 - phi1/2").is_zero());
    CHECK(alg.parse_form("(phi1 + phi2)^2").is_zero());
    CHECK(alg.parse_form("(phi1 + bar(phi1))^2").is_zero());
    CHECK(alg.parse_form("(phi1^bar(phi1) + phi2^bar(phi2))^2") == alg.parse_form("2*phi1^bar(phi1)^phi2^bar(phi2)"));
    const CoframeForm w = alg.parse_form(kStandard);
    CHECK(w.bidegree() == std::pair{1, 1});
    CHECK(conj(w) == w);
    CHECK(alg.parse_form(w.to_string()) == w);

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const CoframeForm f = random_form(alg, rng, 4);
        CHECK(alg.parse_form(f.to_string()) == f);
    }

    CHECK_THROWS_AS(alg.parse_form("phi4"), ParseError);
    try {
        alg.parse_form("phi1 + x7");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 7);
    }
    CHECK_THROWS_AS(alg.parse_form("phi1 / phi2"), ParseError);
    CHECK_THROWS_AS(alg.parse_form("(phi1"), ParseError);
    CHECK_THROWS_AS(alg.parse_form("phi1 $"), ParseError);
}

TEST_CASE("algebra text format errors") {
    CHECK_THROWS_AS(CoframeAlgebra::parse("generators a\nformal W\n"), ParseError);
    CHECK_THROWS_AS(CoframeAlgebra::parse("generators a\nV^3 = 0\n"), ParseError);
    CHECK_THROWS_AS(CoframeAlgebra::parse("generators a\ndel b = 0\n"), ParseError);
    CHECK_THROWS_AS(CoframeAlgebra::parse("generators a\nfoo a\n"), ParseError);
    CHECK_THROWS_AS(CoframeAlgebra::parse("generators i\n"), ParseError);
    CHECK_THROWS_AS(CoframeAlgebra(std::vector<std::string>{"a", "a"}, {}), ArgumentError);
    // (1,1) value for ∂ of a (1,0) generator.
    CHECK_THROWS_AS(CoframeAlgebra::parse("generators a b\ndel a = b^bar(b)\n"), IntegrabilityError);
}

TEST_CASE("Leibniz rule, d^2 = 0 and conjugation consistency on random forms") {
    for (const char* text : {kIwasawa, kS5S1}) {
        const CoframeAlgebra alg = CoframeAlgebra::parse(text);
        verify_integrability(alg);
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 30; ++trial) {
            // Homogeneous a so that (-1)^{|a|} is defined.
            CoframeForm a = random_form(alg, rng, 1);
            if (a.is_zero()) continue;
            const CoframeForm b = random_form(alg, rng, 3);
            const GaussianRational sign = a.degree() % 2 ? -1 : 1;
            for (bool hol : {true, false}) {
                auto D = [&](const CoframeForm& f) { return hol ? alg.del(f) : alg.delbar(f); };
                CHECK(D(wedge(a, b)) == wedge(D(a), b) + sign * wedge(a, D(b)));
                CHECK(D(D(b)).is_zero());
            }
            CHECK(alg.del(alg.delbar(b)) + alg.delbar(alg.del(b)) == alg.zero());
            CHECK(conj(alg.del(b)) == alg.delbar(conj(b)));
            CHECK(alg.d(alg.d(b)).is_zero());
        }
    }
}

TEST_CASE("Iwasawa: structure, balancedness and gamma_1 = 1/6") {
    const CoframeAlgebra alg = CoframeAlgebra::parse(kIwasawa);
    const IntegrabilityReport rep = verify_integrability(alg);
    CHECK(rep.ok());
    CHECK(rep.entries.size() == 6);
    // Derived conjugate equation.
    CHECK(alg.delbar(alg.parse_form("bar(phi3)")) == alg.parse_form("-bar(phi1)^bar(phi2)"));
    CHECK(alg.delbar(alg.parse_form("phi3")).is_zero());

    const CoframeForm w = alg.parse_form(kStandard);
    CHECK(alg.d(power(w, 2)).is_zero());
    CHECK_FALSE(alg.d(w).is_zero());
    CHECK(top_ratio(alg, power(w, 3)) == GaussianRational(6));
    CHECK(gamma_k_invariant(alg, w, 1) == Rational(1, 6));
    CHECK(gamma_k_invariant(alg, w, 2) == Rational(0));
    CHECK(pluriclosed_obstruction(alg, w, w) == Rational(1));
    CHECK(pluriclosed_obstruction(alg, w, w) > Rational(0));
}

TEST_CASE("S5 x S1: gamma_1 = -1/12 and a negative pluriclosed obstruction") {
    const CoframeAlgebra alg = CoframeAlgebra::parse(kS5S1);
    CHECK(alg.dimension() == 3);
    CHECK(verify_integrability(alg).ok());
    const CoframeForm w0 = alg.parse_form("W + (i/2)*theta^bar(theta)");
    CHECK(alg.del(alg.parse_form("bar(theta)")) == alg.parse_form("W"));
    CHECK(power(alg.parse_form("W"), 3).is_zero());
    CHECK(top_ratio(alg, power(w0, 3)) == GaussianRational(3));
    const CoframeForm lhs = wedge(GaussianRational(0, Rational(1, 2)) * alg.del(alg.delbar(w0)), w0);
    CHECK(top_ratio(alg, lhs) == GaussianRational(Rational(-1, 4)));
    CHECK(gamma_k_invariant(alg, w0, 1) == Rational(-1, 12));
    CHECK(gamma_k_invariant(alg, w0, 2) == Rational(0));
    CHECK(pluriclosed_obstruction(alg, w0, w0) == Rational(-1, 4));

    // Every invariant positive ω = aW + b(i/2)θ∧θ̄ is obstructed.
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b) {
            const CoframeForm w = GaussianRational(a) * alg.parse_form("W") +
                                  GaussianRational(b) * alg.parse_form("(i/2)*theta^bar(theta)");
            CHECK(pluriclosed_obstruction(alg, w, w0) < Rational(0));
        }
}

TEST_CASE("abelian coframe: everything closed, gamma_k = 0, agreement with the grid solver") {
    const CoframeAlgebra alg = CoframeAlgebra::parse("generators a b c\n");
    CHECK(verify_integrability(alg).ok());
    const CoframeForm w = alg.parse_form("(i/2)*(a^bar(a) + 2*b^bar(b) + c^bar(c)) + (1/4)*(a^bar(b) + bar(a)^b)");
    CHECK(conj(w) == w);
    for (int k = 1; k <= 2; ++k) CHECK(gamma_k_invariant(alg, w, k) == Rational(0));
    CHECK(pluriclosed_obstruction(alg, w, w) == Rational(0));

    // The same constant metric on a grid.
    const GridShape s = GridShape::active(3, {0, 3}, 8);
    std::vector<std::vector<GridFunction>> g(3, std::vector<GridFunction>(3, GridFunction::zero(s)));
    g[0][0] = GridFunction::constant(s, 1.0);
    g[1][1] = GridFunction::constant(s, 2.0);
    g[2][2] = GridFunction::constant(s, 1.0);
    g[0][1] = GridFunction::constant(s, cplx{0.0, -0.5});
    g[1][0] = GridFunction::constant(s, cplx{0.0, 0.5});
    const HermitianMetric metric(Form::hermitian(s, g));
    for (int k = 1; k <= 2; ++k) CHECK(std::abs(*gamma_k(metric, k).gamma) <= 1e-8);
}

TEST_CASE("inconsistent structure equations are reported per generator") {
    const CoframeAlgebra alg = CoframeAlgebra::parse("generators a b\ndelbar a = b^bar(b)\ndelbar b = a^bar(a)\n");
    const IntegrabilityReport rep = check_integrability(alg);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.entries[0].delbar_delbar.empty());
    try {
        verify_integrability(alg);
        FAIL("expected an integrability error");
    } catch (const IntegrabilityError& e) {
        CHECK(e.generator() == "a");
    }
    const nlohmann::json j = rep;
    CHECK(j["ok"] == false);
}

TEST_CASE("non-real or degenerate omega is rejected") {
    const CoframeAlgebra alg = CoframeAlgebra::parse(kIwasawa);
    CHECK_THROWS_AS(gamma_k_invariant(alg, alg.parse_form("phi1^bar(phi1)"), 1), ArgumentError);
    CHECK_THROWS_AS(gamma_k_invariant(alg, alg.parse_form("(i/2)*phi1^bar(phi1)"), 1), ArgumentError);
    CHECK_THROWS_AS(gamma_k_invariant(alg, alg.parse_form(kStandard), 3), ArgumentError);
    CHECK_THROWS_AS(top_ratio(alg, alg.parse_form("phi1^phi2^phi3")), NotInvariantError);
}
