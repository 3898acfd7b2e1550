#pragma once

// FFT plumbing shared by the grid and forms layers. Not installed.

#include <cstdint>
#include <span>
#include <vector>

#include "gauduchon/grid.hpp"
#include "gauduchon/kernels.hpp"

namespace gauduchon::spectral {

// In-place unnormalized DFT over the dimensions selected by `axes`
// (bit d = real dimension d). sign is -1 (forward) or +1 (backward).
void transform(std::span<cplx> data, const GridShape& shape, std::uint32_t axes, int sign);

// Integer wavenumbers for the selected dimensions; the Nyquist mode of an
// even-sized dimension maps to 0.
kernels::WaveTable wave_table(const GridShape& shape, std::uint32_t axes);

// True when some active dimension has even size and so carries a Nyquist mode.
bool has_nyquist(const GridShape& shape);
// Removes every Fourier mode sitting at index N/2 of an even-sized active dimension.
GridFunction drop_nyquist(const GridFunction& u);

// Symbol of ∂/∂z_j (conjugate = false) or ∂/∂z̄_j evaluated at wavevector k.
inline cplx holomorphic_symbol(const double* k, int j, bool conjugate) {
    const double kx = k[2 * (j - 1)];
    const double ky = k[2 * (j - 1) + 1];
    return conjugate ? cplx{-0.5 * ky, 0.5 * kx} : cplx{0.5 * ky, 0.5 * kx};
}

// Forward transform of a field over all its active dimensions, kept so that
// several Fourier multipliers can be applied without repeating it.
class Spectrum {
public:
    explicit Spectrum(const GridFunction& u);

    const GridShape& shape() const noexcept { return shape_; }

    // F^{-1}[symbol(k) · û]; `symbol` receives a pointer to the 2n wavenumbers.
    template <class Symbol>
    GridFunction apply(Symbol&& symbol) const {
        std::vector<cplx> out(coeffs_);
        kernels::parallel::multiply_symbol(out, waves_, symbol, scale_);
        transform(out, shape_, axes_, +1);
        return GridFunction(shape_, std::move(out));
    }

    GridFunction derivative(int dim) const;
    GridFunction holomorphic(int j, bool conjugate) const;
    GridFunction mixed(int i, int j) const;

private:
    GridShape shape_;
    std::uint32_t axes_;
    kernels::WaveTable waves_;
    double scale_;
    std::vector<cplx> coeffs_;
};

}  // namespace gauduchon::spectral
