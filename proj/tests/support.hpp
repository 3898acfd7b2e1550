#pragma once

// Hand-rolled generators for property tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gauduchon/forms.hpp"
#include "gauduchon/grid.hpp"

namespace testing_support {

using gauduchon::cplx;
using gauduchon::Form;
using gauduchon::GridFunction;
using gauduchon::GridShape;

// Random trigonometric polynomial with wavenumbers |k_d| ≤ max_wave on the
// active dimensions, comfortably below Nyquist for the grids used in tests.
inline GridFunction random_trig(const GridShape& shape, std::mt19937_64& rng, int max_wave, double amp,
                                bool real, int modes = 4) {
    std::uniform_int_distribution<int> wave(-max_wave, max_wave);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<std::vector<int>> ks;
    std::vector<cplx> cs;
    for (int m = 0; m < modes; ++m) {
        std::vector<int> k(static_cast<std::size_t>(shape.dims()), 0);
        for (int d = 0; d < shape.dims(); ++d)
            if (shape.size(d) > 1) k[static_cast<std::size_t>(d)] = wave(rng);
        ks.push_back(k);
        cs.push_back(amp * cplx{coef(rng), coef(rng)});
    }
    const double c0 = amp * coef(rng);
    return GridFunction::sample(shape, [&](std::span<const double> x) {
        cplx acc{c0, 0.0};
        for (std::size_t m = 0; m < ks.size(); ++m) {
            double phase = 0.0;
            for (std::size_t d = 0; d < x.size(); ++d) phase += ks[m][d] * x[d];
            const cplx e = cs[m] * std::exp(cplx{0.0, phase});
            acc += real ? cplx{2.0 * e.real(), 0.0} : e;
        }
        return acc;
    });
}

// Random form of bidegree (p,q) with `terms` monomials.
inline Form random_form(const GridShape& shape, int p, int q, std::mt19937_64& rng, int terms = 2) {
    const int n = shape.n();
    Form f(shape, p, q);
    std::uniform_int_distribution<int> idx(1, n);
    for (int t = 0; t < terms; ++t) {
        std::vector<int> I, J;
        while (static_cast<int>(I.size()) < p) {
            int i = idx(rng);
            if (std::find(I.begin(), I.end(), i) == I.end()) I.push_back(i);
        }
        while (static_cast<int>(J.size()) < q) {
            int j = idx(rng);
            if (std::find(J.begin(), J.end(), j) == J.end()) J.push_back(j);
        }
        std::sort(I.begin(), I.end());
        std::sort(J.begin(), J.end());
        f.accumulate(gauduchon::monomial_mask(n, I, J), random_trig(shape, rng, 2, 1.0, false, 3));
    }
    return f;
}

// Random real (1,1)-form (i/2) Σ h_{ij̄} dz_i ∧ dz̄_j with h hermitian; positive
// definite when `off` is small against 1 - `diag`.
inline Form random_real_11(const GridShape& s, std::mt19937_64& rng, double diag = 0.3, double off = 0.2,
                           int max_wave = 1) {
    const auto n = static_cast<std::size_t>(s.n());
    std::vector<std::vector<GridFunction>> h(n, std::vector<GridFunction>(n, GridFunction::zero(s)));
    for (std::size_t i = 0; i < n; ++i) {
        h[i][i] = random_trig(s, rng, max_wave, diag / 5.0, true, 2) + 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            auto c = random_trig(s, rng, max_wave, off / 5.0, false, 2);
            h[j][i] = c.conj();
            h[i][j] = std::move(c);
        }
    }
    return Form::hermitian(s, h);
}

inline double max_diff(const Form& a, const Form& b) { return (a - b).sup_norm(); }

}  // namespace testing_support
