#pragma once

// Continuity-method solver for
//
//     Δv + ψ(|∇v|²) + ⟨B, dv⟩ = f + c,   ∫ v ωⁿ = 0,
//
// the γ_k invariant built on it, and bisection for k-th Gauduchon metrics
// along a segment of metrics.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gauduchon/grid.hpp"
#include "gauduchon/metric.hpp"

namespace gauduchon {

class PsiFunction {
public:
    // ψ(t) = t + shift.
    static PsiFunction linear(double shift = 0.0);
    // Monotone cubic (pchip) through the samples, extended linearly past both ends.
    static PsiFunction table(std::vector<double> t, std::vector<double> psi, double mu, double nu);
    static PsiFunction custom(std::function<double(double)> value, std::function<double(double)> derivative,
                              double mu, double nu, std::string name);
    // {"t": [...], "psi": [...], "mu": μ, "nu": ν}
    static PsiFunction from_json(const nlohmann::json& j);

    double operator()(double t) const;
    // Throws ArgumentError when ψ' is not finite at t.
    double derivative(double t) const;

    double mu() const noexcept { return mu_; }
    double nu() const noexcept { return nu_; }
    const std::string& name() const noexcept { return name_; }
    bool is_linear() const noexcept { return linear_; }

    // Sampled check of ψ(t) ≥ ν t^μ on [t0, t1]; evidence only, not a proof of the growth bound.
    struct GrowthCertificate {
        double t0 = 0.0;
        double t1 = 0.0;
        int samples = 0;
        double min_ratio = 0.0;  // min ψ(t) / (ν t^μ)
        bool holds = false;
    };
    GrowthCertificate growth_certificate(double t0 = 1.0, double t1 = 1e3, int samples = 64) const;

private:
    PsiFunction(std::function<double(double)> value, std::function<double(double)> derivative, double mu,
                double nu, std::string name, bool linear);
    std::function<double(double)> value_;
    std::function<double(double)> derivative_;
    double mu_;
    double nu_;
    std::string name_;
    bool linear_;
};

struct SolveOptions {
    double newton_tol = 1e-10;  // sup-norm residual
    double krylov_tol = 1e-12;  // relative
    int max_newton = 20;
    double min_step = 1e-3;
    bool dealias = false;
    std::optional<GridFunction> initial_guess;  // zero when empty
    std::size_t dense_max_points = 4096;
    int gmres_restart = 30;
    int max_krylov = 2000;
};

// Keys: newton_tol, krylov_tol, max_newton, min_step, dealias, initial_guess,
// dense_max_points, gmres_restart, max_krylov. initial_guess is null, "zero",
// {"random_seed": s, "amplitude": a, "max_wave": m} or a grid-function document.
SolveOptions solve_options_from_json(const nlohmann::json& j, const GridShape& shape);

// Real trigonometric polynomial with wavenumbers |k| ≤ max_wave, deterministic in `seed`.
GridFunction band_limited_random(const GridShape& shape, std::uint64_t seed, double amplitude, int max_wave = 2);

struct ContinuationStep {
    double t = 0.0;
    int newton_iterations = 0;
    double residual = 0.0;
};

// γ_k evaluated three ways at the computed v.
struct GammaCrossCheck {
    double defining = 0.0;     // ∫ e^{-v}(i/2)∂∂̄(e^v ω^k)∧ω^{n-k-1} / ∫ωⁿ
    double contraction = 0.0;  // ∫ (Δv + |∇v|² + ⟨B₁,dv⟩ + φ) ωⁿ / (n ∫ωⁿ)
    double weighted = 0.0;     // ∫ (i/2)∂∂̄(e^v ω^k)∧ω^{n-k-1} / ∫ e^v ωⁿ
    double spread = 0.0;       // max - min of the three, divided by `scale`
    double scale = 1.0;        // max(|γ|, sup|φ|/n), or 1 when both vanish
};

struct SolveReport {
    std::optional<double> gamma;  // set by gamma_k
    int k = 0;
    GridFunction v = GridFunction::zero(GridShape(1, {1, 1}));
    double c = 0.0;
    std::pair<double, double> c_bounds;
    double residual = 0.0;             // sup of the resolved residual
    double tolerance = 0.0;            // max(newton_tol, roundoff floor of the metric)
    double unresolved_residual = 0.0;  // sup of its Nyquist part, which no iterate can change
    double mean_constraint = 0.0;      // |∫ v ωⁿ| / ∫ |v| ωⁿ
    double sup_grad_v = 0.0;
    double psi_prime_min = 1.0;
    std::vector<ContinuationStep> continuation_path;
    std::optional<GammaCrossCheck> cross_check;
    std::string linear_solver;
    int linear_iterations = 0;
    std::vector<std::string> warnings;
    double seconds = 0.0;
};

void to_json(nlohmann::json& j, const SolveReport& r);
// Same document without the field samples of v.
nlohmann::json summary_json(const SolveReport& r);

SolveReport solve_semilinear(const HermitianMetric& w, const OneFormPair& B, const GridFunction& f,
                             const PsiFunction& psi, const SolveOptions& opts = {});

// 1 ≤ k ≤ n-1.
SolveReport gamma_k(const HermitianMetric& w, int k, const SolveOptions& opts = {});

struct BisectionStep {
    double t = 0.0;
    double gamma = 0.0;
};

struct BisectionResult {
    double t = 0.0;
    double gamma = 0.0;
    double lower = 0.0;  // final bracket
    double upper = 1.0;
    std::vector<BisectionStep> history;
};

// Bisection for a zero of g on [0, 1] given g(0) and g(1) of strictly opposite
// signs with |g| > tol at both ends; stops at the first midpoint with |g| ≤ tol.
BisectionResult bisect_sign_change(const std::function<double(double)>& g, double g0, double g1, double tol,
                                   int max_iterations = 60);

struct KGauduchonResult {
    double t_star = 0.0;
    HermitianMetric metric;      // e^{v/k} ω_{t*}
    HermitianMetric raw_metric;  // ω_{t*} = t* ω₁ + (1 - t*) ω₂
    SolveReport report;          // γ_k at ω_{t*}
    double residual = 0.0;       // k_gauduchon_residual(metric, k)
    std::vector<BisectionStep> history;
};

KGauduchonResult find_k_gauduchon(const HermitianMetric& w1, const HermitianMetric& w2, int k, double tol,
                                  const SolveOptions& opts = {}, int max_iterations = 60);
void to_json(nlohmann::json& j, const KGauduchonResult& r);

struct ConformalCheckReport {
    int k = 0;
    double gamma = 0.0;      // γ_k(ω)
    double gamma_rho = 0.0;  // γ_k(e^ρ ω)
    double rho_min = 0.0;
    double rho_max = 0.0;
    double lower = 0.0;  // min of e^{-max ρ}γ and e^{-min ρ}γ
    double upper = 0.0;
    double slack = 1e-6;
    int sign = 0;
    int sign_rho = 0;
    bool sandwich_holds = false;
    bool sign_equal = false;
    double seconds = 0.0;
};

// Values with |γ| ≤ zero_tol count as sign 0.
ConformalCheckReport conformal_bounds_check(const HermitianMetric& w, const GridFunction& rho, int k,
                                            const SolveOptions& opts = {}, double zero_tol = 1e-8);
void to_json(nlohmann::json& j, const ConformalCheckReport& r);

}  // namespace gauduchon
