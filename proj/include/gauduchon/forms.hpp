#pragma once

// (p,q)-forms on the torus with grid-function coefficients.
//
// A monomial dz_I ∧ dz̄_J (I, J strictly increasing, I written first) is
// encoded as a bitmask: bit i-1 for dz_i, bit n+j-1 for dz̄_j. With that
// encoding the canonical order of a monomial is ascending bit order, and every
// reordering sign comes from merge_sign().

#include <cstdint>
#include <map>
#include <vector>

#include "gauduchon/grid.hpp"

namespace gauduchon {

using Mask = std::uint32_t;

// Sign of (monomial a) ∧ (monomial b) relative to the canonical monomial a|b;
// zero if they share a factor.
int merge_sign(Mask a, Mask b) noexcept;

// Mask of dz_I ∧ dz̄_J with 1-based, strictly increasing index lists.
Mask monomial_mask(int n, const std::vector<int>& I, const std::vector<int>& J);
// Inverse of monomial_mask.
void monomial_indices(int n, Mask m, std::vector<int>& I, std::vector<int>& J);

class Form {
public:
    // Coefficients whose sup-norm does not exceed this are dropped.
    static constexpr double kPruneTol = 1e-15;

    Form(GridShape shape, int p, int q);

    static Form scalar(GridFunction u);
    static Form one(const GridShape& shape) { return scalar(GridFunction::constant(shape, 1.0)); }
    // (i/2) Σ g_{ij̄} dz_i ∧ dz̄_j from a n×n table g[i-1][j-1]; zero entries are pruned.
    static Form hermitian(const GridShape& shape, const std::vector<std::vector<GridFunction>>& g);
    // (i/2) Σ_j dz_j ∧ dz̄_j.
    static Form flat(const GridShape& shape);
    // dV = (i/2)^n dz_1 ∧ dz̄_1 ∧ ... ∧ dz_n ∧ dz̄_n.
    static Form volume(const GridShape& shape);

    const GridShape& shape() const noexcept { return shape_; }
    int n() const noexcept { return shape_.n(); }
    int p() const noexcept { return p_; }
    int q() const noexcept { return q_; }
    int degree() const noexcept { return p_ + q_; }
    const std::map<Mask, GridFunction>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    // Coefficient of dz_I ∧ dz̄_J, or nullptr if absent.
    const GridFunction* coefficient(const std::vector<int>& I, const std::vector<int>& J) const;
    GridFunction coefficient_or_zero(const std::vector<int>& I, const std::vector<int>& J) const;
    const GridFunction* coefficient(Mask m) const;

    void set(const std::vector<int>& I, const std::vector<int>& J, GridFunction c);
    // Adds c · (canonical monomial m); m must have this form's bidegree.
    void accumulate(Mask m, const GridFunction& c);
    void accumulate(Mask m, GridFunction&& c);

    // Largest sup-norm over all coefficients.
    double sup_norm() const;

    Form& operator+=(const Form& other);
    Form& operator-=(const Form& other);
    Form& operator*=(cplx s);

private:
    void prune();
    void check_mask(Mask m) const;

    GridShape shape_;
    int p_;
    int q_;
    std::map<Mask, GridFunction> terms_;
};

Form operator+(Form a, const Form& b);
Form operator-(Form a, const Form& b);
Form operator*(Form a, cplx s);
Form operator*(cplx s, Form a);
// Coefficient-wise multiplication by a function.
Form operator*(const GridFunction& u, const Form& a);

Form wedge(const Form& a, const Form& b);
Form del(const Form& a);
Form delbar(const Form& a);
Form conj(const Form& a);
// k-fold wedge of a (1,1)-form; k = 0 gives the constant 1.
Form power(const Form& w, int k);

// Coefficient of a top form against dV.
GridFunction top_density(const Form& top);
// ∫ top over the torus (dV integrates to the Lebesgue measure).
cplx integrate_top(const Form& top);
// Pointwise ratio of two (n,n)-forms; throws SingularVolumeError if |vol| ≤ 1e-14 somewhere.
GridFunction ratio_to_volume(const Form& a, const Form& vol);

// Coefficient against dV of ∂∂̄Ω ∧ Θ, with Ω of bidegree (k,k) and Θ of
// bidegree (n-k-1, n-k-1). Only the second derivatives that reach the top
// degree are formed, so ∂∂̄Ω itself is never stored.
GridFunction ddbar_top_density(const Form& omega, const Form& theta);

void to_json(nlohmann::json& j, const Form& f);
Form form_from_json(const nlohmann::json& j);

}  // namespace gauduchon
