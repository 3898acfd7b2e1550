#pragma once

// Exact exterior algebra over an invariant coframe.
//
// Odd generators φ_1..φ_m are (1,0)-forms; their conjugates are implicit.
// Formal generators W are closed-by-default real (1,1)-forms with a declared
// nilpotency order N (W^N = 0); they stand in for pulled-back Kähler forms of
// a base of complex dimension N - 1. Conjugate structure equations are derived
// from ∂̄(conj g) = conj(∂g), never entered.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>
#include <json.hpp>

namespace gauduchon::coframe {

using Rational = boost::rational<std::int64_t>;

class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(Rational re, Rational im = 0) : re_(re), im_(im) {}
    GaussianRational(std::int64_t re) : re_(re) {}

    static GaussianRational i() { return {0, 1}; }

    const Rational& re() const noexcept { return re_; }
    const Rational& im() const noexcept { return im_; }
    bool is_zero() const noexcept { return re_.numerator() == 0 && im_.numerator() == 0; }
    bool is_real() const noexcept { return im_.numerator() == 0; }
    GaussianRational conj() const { return {re_, -im_}; }
    double real_value() const { return boost::rational_cast<double>(re_); }
    double imag_value() const { return boost::rational_cast<double>(im_); }

    GaussianRational& operator+=(const GaussianRational& o);
    GaussianRational& operator-=(const GaussianRational& o);
    GaussianRational& operator*=(const GaussianRational& o);
    // Throws ArgumentError on division by zero.
    GaussianRational& operator/=(const GaussianRational& o);
    GaussianRational operator-() const { return {-re_, -im_}; }

    bool operator==(const GaussianRational& o) const noexcept { return re_ == o.re_ && im_ == o.im_; }

    // "1/6", "-1/4*i", "(1/2 + 3*i)".
    std::string to_string() const;

private:
    Rational re_{0};
    Rational im_{0};
};

GaussianRational operator+(GaussianRational a, const GaussianRational& b);
GaussianRational operator-(GaussianRational a, const GaussianRational& b);
GaussianRational operator*(GaussianRational a, const GaussianRational& b);
GaussianRational operator/(GaussianRational a, const GaussianRational& b);

// Generator names and nilpotency orders shared by every form of one algebra.
struct Layout {
    std::vector<std::string> generators;  // odd (1,0)
    std::vector<std::string> formal;      // even (1,1)
    std::vector<int> orders;              // W_f^{orders[f]} = 0

    int m() const noexcept { return static_cast<int>(generators.size()); }
    // Complex dimension: one per odd generator plus orders[f] - 1 per formal one.
    int dimension() const;
};

// Bits 0..m-1 are φ_i, bits m..2m-1 are φ̄_i; the monomial is the ascending
// wedge of the odd generators followed by the formal powers.
struct Monomial {
    std::uint32_t odd = 0;
    std::vector<int> powers;

    auto operator<=>(const Monomial&) const = default;
};

class CoframeForm {
public:
    explicit CoframeForm(std::shared_ptr<const Layout> layout);

    static CoframeForm scalar(std::shared_ptr<const Layout> layout, const GaussianRational& c);
    // φ_i or φ̄_i, 0-based.
    static CoframeForm generator(std::shared_ptr<const Layout> layout, int index, bool conjugate);
    static CoframeForm formal(std::shared_ptr<const Layout> layout, int index);

    const std::shared_ptr<const Layout>& layout() const noexcept { return layout_; }
    const std::map<Monomial, GaussianRational>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    // Constant term when the form is a pure scalar; throws ArgumentError otherwise.
    GaussianRational scalar_value() const;

    // Bidegree of a nonzero homogeneous form; throws ArgumentError if mixed.
    std::pair<int, int> bidegree() const;
    int degree() const;

    void accumulate(const Monomial& m, const GaussianRational& c);

    CoframeForm& operator+=(const CoframeForm& o);
    CoframeForm& operator-=(const CoframeForm& o);
    CoframeForm& operator*=(const GaussianRational& c);

    bool operator==(const CoframeForm& o) const { return terms_ == o.terms_; }

    std::string to_string() const;
    // One string per monomial, for residual reports.
    std::vector<std::string> monomial_strings() const;

private:
    std::shared_ptr<const Layout> layout_;
    std::map<Monomial, GaussianRational> terms_;
};

CoframeForm operator+(CoframeForm a, const CoframeForm& b);
CoframeForm operator-(CoframeForm a, const CoframeForm& b);
CoframeForm operator*(const GaussianRational& c, CoframeForm a);
CoframeForm wedge(const CoframeForm& a, const CoframeForm& b);
CoframeForm conj(const CoframeForm& a);
CoframeForm power(const CoframeForm& a, int k);

class CoframeAlgebra {
public:
    // formal: (name, nilpotency order ≥ 2).
    CoframeAlgebra(std::vector<std::string> generators, std::vector<std::pair<std::string, int>> formal);

    // Text format, one statement per line, '#' starts a comment:
    //   generators phi1 phi2 phi3
    //   formal W
    //   W^3 = 0
    //   del phi3 = -phi1^phi2
    //   delbar theta = W
    // Unlisted differentials are zero.
    static CoframeAlgebra parse(std::string_view text);

    // Forms over the generators: + - * / ^, bar(...), i, integers and decimals;
    // "a^k" with an integer literal k is the k-th exterior power.
    CoframeForm parse_form(std::string_view text) const;

    // Sets ∂g or ∂̄g for a named odd or formal generator; checks the bidegree.
    void set_del(const std::string& name, const CoframeForm& value);
    void set_delbar(const std::string& name, const CoframeForm& value);

    const std::shared_ptr<const Layout>& layout() const noexcept { return layout_; }
    int dimension() const { return layout_->dimension(); }

    CoframeForm del(const CoframeForm& a) const;
    CoframeForm delbar(const CoframeForm& a) const;
    CoframeForm d(const CoframeForm& a) const { return del(a) + delbar(a); }

    // Π_i (i/2)φ_i∧φ̄_i ∧ Π_f W_f^{orders[f]-1}.
    CoframeForm volume() const;

    CoframeForm zero() const { return CoframeForm(layout_); }
    CoframeForm scalar(const GaussianRational& c) const { return CoframeForm::scalar(layout_, c); }

private:
    CoframeForm derive(const CoframeForm& a, bool holomorphic) const;
    void set_entry(const std::string& name, const CoframeForm& value, bool holomorphic);

    std::shared_ptr<const Layout> layout_;
    // ∂ and ∂̄ of φ_i (0..m-1), φ̄_i (m..2m-1) and W_f.
    std::vector<CoframeForm> del_odd_, delbar_odd_, del_formal_, delbar_formal_;
    std::vector<bool> formal_set_;  // whether ∂ or ∂̄ of W_f was entered
};

struct IntegrabilityReport {
    struct Entry {
        std::string generator;
        std::vector<std::string> del_del;        // ∂∂g
        std::vector<std::string> delbar_delbar;  // ∂̄∂̄g
        std::vector<std::string> anticommutator; // (∂∂̄ + ∂̄∂)g
        bool ok() const { return del_del.empty() && delbar_delbar.empty() && anticommutator.empty(); }
    };
    std::vector<Entry> entries;
    bool ok() const;
};

IntegrabilityReport check_integrability(const CoframeAlgebra& alg);
// As check_integrability, throwing IntegrabilityError for the first failing generator.
IntegrabilityReport verify_integrability(const CoframeAlgebra& alg);
void to_json(nlohmann::json& j, const IntegrabilityReport& r);

// c with top = c · volume(); NotInvariantError if top is not such a multiple.
GaussianRational top_ratio(const CoframeAlgebra& alg, const CoframeForm& top);

// γ_k from (i/2)∂∂̄ω^k ∧ ω^{n-k-1} = γ_k ωⁿ. Requires a real (1,1) ω with ωⁿ a
// positive multiple of the volume.
Rational gamma_k_invariant(const CoframeAlgebra& alg, const CoframeForm& omega, int k);

// Coefficient of (i/2)∂∂̄ω_test ∧ ω₀ against the volume (n = 3) or, in general,
// of (i/2)∂∂̄ω_test ∧ ω₀^{n-2}.
Rational pluriclosed_obstruction(const CoframeAlgebra& alg, const CoframeForm& omega_test, const CoframeForm& omega0);

}  // namespace gauduchon::coframe
