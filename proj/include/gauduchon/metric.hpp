#pragma once

// Hermitian metrics ω = (i/2) Σ g_{ij̄} dz_i ∧ dz̄_j and the operators of the
// generalized Gauduchon equation built from them.

#include <optional>
#include <vector>

#include "gauduchon/forms.hpp"
#include "gauduchon/grid.hpp"

namespace gauduchon {

// A 1-form split into its (1,0) and (0,1) parts: A = Σ hol[i] dz_i + Σ anti[j] dz̄_j.
// Real 1-forms have anti[j] = conj(hol[j]).
struct OneFormPair {
    std::vector<GridFunction> hol;
    std::vector<GridFunction> anti;

    static OneFormPair zero(const GridShape& shape);
    // du = ∂u + ∂̄u.
    static OneFormPair differential(const GridFunction& u);

    double sup_norm() const;
    // max |anti[j] - conj(hol[j])|.
    double reality_defect() const;
};

OneFormPair operator+(const OneFormPair& a, const OneFormPair& b);
OneFormPair operator*(const GridFunction& u, const OneFormPair& a);

void to_json(nlohmann::json& j, const OneFormPair& a);
OneFormPair one_form_from_json(const nlohmann::json& j, const GridShape& shape);

class HermitianMetric {
public:
    // Rejects non-(1,1) input, a non-hermitian coefficient matrix, or eigen_floor ≤ 1e-10.
    explicit HermitianMetric(Form omega);

    const Form& form() const noexcept { return form_; }
    const GridShape& shape() const noexcept { return form_.shape(); }
    int n() const noexcept { return form_.n(); }

    // g_{ij̄} and g^{ij̄} = (G^{-1})_{ji}, 1-based; nullptr where identically zero.
    const GridFunction* g(int i, int j) const;
    const GridFunction* ginv(int i, int j) const;
    bool is_diagonal() const noexcept { return diagonal_; }

    // ω^k for 0 ≤ k ≤ n, cached.
    const Form& power(int k) const;
    const Form& volume() const { return power(n()); }
    // ω^n against dV, i.e. n! det g.
    const GridFunction& volume_density() const noexcept { return volume_density_; }
    // ∫ ω^n.
    double total_volume() const noexcept { return total_volume_; }
    // ω^n-weighted average.
    double average(const GridFunction& u) const;

    double eigen_floor() const noexcept { return eigen_floor_; }
    double hermitian_residual() const noexcept { return hermitian_residual_; }

    // e^ρ ω.
    HermitianMetric conformal(const GridFunction& rho) const;

private:
    Form form_;
    int n_;
    std::vector<std::optional<GridFunction>> g_;
    std::vector<std::optional<GridFunction>> ginv_;
    bool diagonal_ = true;
    std::vector<Form> powers_;
    GridFunction volume_density_;
    double total_volume_ = 0.0;
    double eigen_floor_ = 0.0;
    double hermitian_residual_ = 0.0;
};

// Σ g^{ij̄} h_{ij̄}.
GridFunction laplacian(const HermitianMetric& w, const GridFunction& h);
// n ω^{n-1} ∧ (i/2)∂∂̄h / ω^n.
GridFunction laplacian_form_route(const HermitianMetric& w, const GridFunction& h);

// ½ Σ g^{ij̄}(A_i B_{j̄} + A_{j̄} B_i).
GridFunction pair(const HermitianMetric& w, const OneFormPair& a, const OneFormPair& b);
// Σ g^{ij̄} h_i h_{j̄}.
GridFunction grad_norm_sq(const HermitianMetric& w, const GridFunction& h);

// u ↦ n (i/2) ∂∂̄(u ω^k) ∧ ω^{n-k-1} / ω^n, linear in u.
GridFunction conformal_operator(const HermitianMetric& w, int k, const GridFunction& u);

// n (i/2) ∂∂̄ω^k ∧ ω^{n-k-1} / ω^n, coerced to real.
GridFunction phi_k(const HermitianMetric& w, int k);

// First-order part of F, read off as coefficients against dz_j and dz̄_j.
OneFormPair b1_form(const HermitianMetric& w, int k);

// F(v) = n e^{-v} (i/2) ∂∂̄(e^v ω^k) ∧ ω^{n-k-1} / ω^n, coerced to real.
GridFunction nonlinear_F(const HermitianMetric& w, int k, const GridFunction& v);

// Drops the imaginary part after checking it is roundoff relative to the real part.
GridFunction coerce_real(const GridFunction& u, double tol, const char* what);

struct ClassificationReport {
    double tol = 0.0;
    double kahler_residual = 0.0;       // sup |dω|
    double balanced_residual = 0.0;     // sup |dω^{n-1}|
    double gauduchon_residual = 0.0;    // sup |∂∂̄ω^{n-1}|
    double pluriclosed_residual = 0.0;  // sup |∂∂̄ω|
    std::vector<double> k_gauduchon_residuals;  // k = 1..n-1, sup |∂∂̄ω^k ∧ ω^{n-k-1}|
    bool is_kahler = false;
    bool is_balanced = false;
    bool is_gauduchon = false;
    bool is_pluriclosed = false;
};

ClassificationReport classify(const HermitianMetric& w, double tol);
void to_json(nlohmann::json& j, const ClassificationReport& r);

// sup |∂∂̄ω^k ∧ ω^{n-k-1}| as a raw form coefficient.
double k_gauduchon_residual(const HermitianMetric& w, int k);

// Smallest eigenvalue of the coefficient matrix of a (1,1)-form over the grid.
double form_eigen_floor(const Form& w);

// (i/2) ∫ ∂∂̄w^k ∧ w^{n-k-1} for a semi-positive (1,1)-form.
double integral_criterion(const Form& w_ring, int k);
double gauduchon_criterion(const HermitianMetric& w, int k);

}  // namespace gauduchon
