#pragma once

// Data-parallel pointwise kernels used by the spectral and metric layers.
//
// Every kernel exists twice: `serial` is the straightforward reference kept
// for testing, `parallel` splits the point range across OpenMP threads. Both
// produce bitwise-identical results; reductions use a fixed block partition
// that does not depend on the thread count.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <omp.h>

namespace gauduchon::kernels {

using cplx = std::complex<double>;

// Reads GAUDUCHON_THREADS and caps the OpenMP team size accordingly.
void configure_threads_from_env();
int thread_limit();

// Wavenumbers per real dimension of a row-major grid. `k[d]` is empty for
// dimensions that are not part of the transform (treated as wavenumber 0).
struct WaveTable {
    std::vector<int> sizes;
    std::vector<std::size_t> strides;
    std::vector<std::vector<double>> k;
};

// n×n field of matrices; entry (i, j) is `entries[i * n + j]`, nullptr = zero.
struct MatrixFieldView {
    int n = 0;
    std::vector<const cplx*> entries;
};
struct MatrixFieldOut {
    int n = 0;
    std::vector<cplx*> entries;
};

inline constexpr std::size_t kReductionBlock = 4096;

namespace detail {

inline void decode(std::size_t p, const WaveTable& w, std::vector<int>& idx, std::vector<double>& kv) {
    for (std::size_t d = 0; d < w.sizes.size(); ++d) {
        idx[d] = static_cast<int>((p / w.strides[d]) % static_cast<std::size_t>(w.sizes[d]));
        kv[d] = w.k[d].empty() ? 0.0 : w.k[d][static_cast<std::size_t>(idx[d])];
    }
}

inline void advance(const WaveTable& w, std::vector<int>& idx, std::vector<double>& kv) {
    for (std::size_t d = w.sizes.size(); d-- > 0;) {
        if (++idx[d] < w.sizes[d]) {
            if (!w.k[d].empty()) kv[d] = w.k[d][static_cast<std::size_t>(idx[d])];
            return;
        }
        idx[d] = 0;
        if (!w.k[d].empty()) kv[d] = w.k[d][0];
    }
}

template <class Symbol>
void multiply_range(std::span<cplx> data, const WaveTable& w, Symbol& symbol, double scale,
                    std::size_t begin, std::size_t end) {
    if (begin >= end) return;
    std::vector<int> idx(w.sizes.size());
    std::vector<double> kv(w.sizes.size());
    decode(begin, w, idx, kv);
    for (std::size_t p = begin; p < end; ++p) {
        data[p] *= scale * symbol(static_cast<const double*>(kv.data()));
        advance(w, idx, kv);
    }
}

}  // namespace detail

namespace serial {

// data[p] *= scale * symbol(k(p)) where k(p) is the wavenumber vector of point p.
template <class Symbol>
void multiply_symbol(std::span<cplx> data, const WaveTable& waves, Symbol&& symbol, double scale) {
    detail::multiply_range(data, waves, symbol, scale, 0, data.size());
}

// Per-point transposed inverse g^{ij̄} = (G^{-1})_{ji} and smallest eigenvalue.
// Output entries may be nullptr when known to vanish (diagonal input).
void invert_hermitian(const MatrixFieldView& g, std::size_t points, const MatrixFieldOut& inv,
                      std::span<double> eig_min);

// out[p] = Σ_ij m_ij[p] a_i[p] b_j[p].
void contract_bilinear(const MatrixFieldView& m, std::span<const cplx* const> a,
                       std::span<const cplx* const> b, std::span<cplx> out);

// out[p] = Σ_ij m_ij[p] h_ij[p]; h uses the same layout and nullptr convention as m.
void contract_trace(const MatrixFieldView& m, const MatrixFieldView& h, std::span<cplx> out);

cplx block_sum(std::span<const cplx> values);

// Spectral derivative along one dimension by direct O(N·size) DFT sums; the
// reference for the FFT path. Nyquist mode dropped as in the FFT path.
void dft_derivative(std::span<const cplx> in, std::span<cplx> out, const std::vector<int>& sizes,
                    const std::vector<std::size_t>& strides, int dim);

}  // namespace serial

namespace parallel {

template <class Symbol>
void multiply_symbol(std::span<cplx> data, const WaveTable& waves, Symbol&& symbol, double scale) {
    const std::size_t total = data.size();
#pragma omp parallel
    {
        const auto threads = static_cast<std::size_t>(omp_get_num_threads());
        const auto id = static_cast<std::size_t>(omp_get_thread_num());
        const std::size_t chunk = (total + threads - 1) / threads;
        const std::size_t begin = std::min(total, id * chunk);
        const std::size_t end = std::min(total, begin + chunk);
        detail::multiply_range(data, waves, symbol, scale, begin, end);
    }
}

void invert_hermitian(const MatrixFieldView& g, std::size_t points, const MatrixFieldOut& inv,
                      std::span<double> eig_min);
void contract_bilinear(const MatrixFieldView& m, std::span<const cplx* const> a,
                       std::span<const cplx* const> b, std::span<cplx> out);
void contract_trace(const MatrixFieldView& m, const MatrixFieldView& h, std::span<cplx> out);
cplx block_sum(std::span<const cplx> values);

}  // namespace parallel

}  // namespace gauduchon::kernels
