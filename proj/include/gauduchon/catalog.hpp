#pragma once

// Explicit examples: torus metrics, the compactly supported bump semi-metric,
// the invariant Iwasawa and S5 x S1 coframes, and a sampled search for
// negative γ₁ on the torus.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gauduchon/coframe.hpp"
#include "gauduchon/metric.hpp"
#include "gauduchon/solver.hpp"

namespace gauduchon::catalog {

// κ with ∫₀^{2π} dt / (1 + κ sin t) = 2π (1 + C), i.e. √(1 - 1/(1+C)²).
double torus_kappa(double C);

struct TorusProfiles {
    double C = 0.0;
    double kappa = 0.0;
    GridFunction xi;    // 1 + κ sin x₃
    GridFunction zeta;  // ζ'' = C - ξ''/ξ, mean zero
    GridFunction eta;   // e^ζ
};

// Profiles on the x₃-only grid with `points` nodes.
TorusProfiles torus_profiles(double C, int points);

// diag(ξ(x₃), η(x₃), 1); ξ''/ξ + η''/η ≥ C pointwise.
HermitianMetric torus_positive_gamma1(double C, int points = 128);

// χ_{a,b}(t) = exp(1/(t-b) - 1/(t-a)) on (a,b), 0 elsewhere.
double chi(double a, double b, double t);

// Chart of the bump construction inside one period. The coordinate t ∈ [-1,1]
// of z₃ = x₃ + i y₃ is placed by the affine map u = π + s (t - 1/6), so that
// supp f ∪ supp g = [-1/3, 2/3] covers `fill` of the period. η is a radial
// cutoff of radius eta_radius about (π, π) in z₁ and z₂, normalized to ∫η² = 1.
struct BumpChart {
    double fill = 0.95;
    double eta_radius = 0.95 * std::numbers::pi;

    double scale() const { return fill * kTwoPi; }
    double chart_t(double u) const { return 1.0 / 6.0 + (u - std::numbers::pi) / scale(); }
    double f(double u) const { return chi(-1.0 / 3.0, 1.0 / 3.0, chart_t(u)); }
    double g(double u) const { return chi(0.0, 2.0 / 3.0, chart_t(u)); }
    double eta(double x, double y) const;
    // Constant with ∫ (c exp(-1/(1-r²/R²)))² dx dy = 1.
    double eta_normalization() const;
};

// ω̊ = (i/2)[φ dz₁∧dz̄₁ + ψ dz₂∧dz̄₂] with φ = η(z₁)η(z₂)f(x₃)f(y₃) and
// ψ = η(z₁)η(z₂)g(x₃)g(y₃). Needs n = 3 with every real dimension active.
Form bump_semimetric(const GridShape& shape, const BumpChart& chart = {});

// ω̊ + t · flat.
HermitianMetric bump_family(double t, const GridShape& shape, const BumpChart& chart = {});

struct CoframeExample {
    coframe::CoframeAlgebra algebra;
    coframe::CoframeForm omega;
};

extern const char* const kIwasawaText;
extern const char* const kS5S1Text;

// ω = (i/2)(φ₁∧φ̄₁ + φ₂∧φ̄₂ + φ₃∧φ̄₃) on ∂φ₃ = -φ₁∧φ₂.
CoframeExample iwasawa();
// ω₀ = W + (i/2)θ∧θ̄ with W the pulled-back Fubini-Study form, W³ = 0, ∂̄θ = W.
CoframeExample s5s1();

// diag(1 + a sin x₃, 1 + b sin(x₃ + phase), 1) on the x₃-only grid.
HermitianMetric sine_family_metric(double a, double b, double phase, int points);

struct SearchSpec {
    std::string family = "torus-sine";
    int points = 32;
    int budget = 24;         // number of sampled parameter sets
    double kappa_max = 0.9;  // |a|, |b| ≤ kappa_max
    std::uint64_t seed = 1;
    int k = 1;
    double tol = 1e-8;       // success iff the best γ_k < -tol
    SolveOptions solve;

    static SearchSpec from_json(const nlohmann::json& j);
};

struct SearchSample {
    int index = 0;
    double a = 0.0, b = 0.0, phase = 0.0;
    double integral = 0.0;  // (i/2)∫∂∂̄ω∧ω, the first term of the γ₁ integral identity
    std::optional<double> gamma;
    double residual = 0.0;
    std::string error;
};

struct SearchResult {
    SearchSpec spec;
    bool success = false;
    std::optional<int> best;  // index into log of the most negative γ
    std::vector<SearchSample> log;
    double seconds = 0.0;

    // The metric of the best sample; throws ArgumentError if there is none.
    HermitianMetric best_metric() const;
};

// Samples are evaluated in parallel; the log is ordered by index and depends
// only on the seed.
SearchResult negative_gamma1_search(const SearchSpec& spec);

void to_json(nlohmann::json& j, const SearchSample& s);
// The log without timing fields when `with_seconds` is false.
nlohmann::json search_json(const SearchResult& r, bool with_seconds = true);

struct ExampleSpec {
    std::string name;
    std::string description;
    int k = 1;
    std::string quantity;       // "gamma" or "integral_criterion"
    char expected_sign = '+';   // '+', '-' or '0'
    std::string provenance;     // "stated" by the construction or "derived" here
    nlohmann::json parameters;
};

const std::vector<ExampleSpec>& examples();
const ExampleSpec& find_example(const std::string& name);

struct ReproduceRow {
    std::string example;
    int k = 1;
    std::string quantity;
    double gamma = 0.0;
    std::optional<std::string> exact;
    char sign_expected = '+';
    char sign_observed = '0';
    double residual = 0.0;
    std::vector<std::string> notes;
    double seconds = 0.0;

    bool sign_matches() const { return sign_expected == sign_observed; }
};

// Values with |x| ≤ zero_tol count as zero.
char sign_of(double x, double zero_tol);

// `params` overrides entries of the example's parameters; other keys are rejected.
ReproduceRow reproduce(const std::string& name, const nlohmann::json& params = nlohmann::json::object(),
                       const SolveOptions& opts = {});
void to_json(nlohmann::json& j, const ReproduceRow& r);

}  // namespace gauduchon::catalog
