#include "gauduchon/kernels.hpp"

#include <cstdlib>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace gauduchon::kernels {

void configure_threads_from_env() {
    if (const char* env = std::getenv("GAUDUCHON_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0) omp_set_num_threads(cap);
        } catch (const std::exception&) {
            // ignore malformed values, keep the OpenMP default
        }
    }
}

int thread_limit() { return omp_get_max_threads(); }

namespace {

bool is_diagonal(const MatrixFieldView& g) {
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (i != j && g.entries[static_cast<std::size_t>(i * g.n + j)] != nullptr) return false;
    return true;
}

void invert_range(const MatrixFieldView& g, const MatrixFieldOut& inv, std::span<double> eig_min,
                  std::size_t begin, std::size_t end) {
    const int n = g.n;
    const auto at = [n](int i, int j) { return static_cast<std::size_t>(i * n + j); };
    if (is_diagonal(g)) {
        for (std::size_t p = begin; p < end; ++p) {
            double lo = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                const cplx* gii = g.entries[at(i, i)];
                const double d = gii ? gii[p].real() : 0.0;
                lo = std::min(lo, d);
                if (cplx* out = inv.entries[at(i, i)]) out[p] = 1.0 / d;
            }
            eig_min[p] = lo;
        }
        return;
    }
    Eigen::MatrixXcd G(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(n);
    for (std::size_t p = begin; p < end; ++p) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const cplx* e = g.entries[at(i, j)];
                G(i, j) = e ? e[p] : cplx{0.0, 0.0};
            }
        solver.compute(G, Eigen::ComputeEigenvectors);
        const auto& lambda = solver.eigenvalues();
        const auto& V = solver.eigenvectors();
        eig_min[p] = lambda(0);
        const Eigen::MatrixXcd Ginv = V * lambda.cwiseInverse().asDiagonal() * V.adjoint();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (cplx* out = inv.entries[at(i, j)]) out[p] = Ginv(j, i);
    }
}

void bilinear_range(const MatrixFieldView& m, std::span<const cplx* const> a,
                    std::span<const cplx* const> b, std::span<cplx> out, std::size_t begin,
                    std::size_t end) {
    const int n = m.n;
    for (std::size_t p = begin; p < end; ++p) {
        cplx acc{0.0, 0.0};
        for (int i = 0; i < n; ++i) {
            if (!a[static_cast<std::size_t>(i)]) continue;
            for (int j = 0; j < n; ++j) {
                const cplx* mij = m.entries[static_cast<std::size_t>(i * n + j)];
                if (!mij || !b[static_cast<std::size_t>(j)]) continue;
                acc += mij[p] * a[static_cast<std::size_t>(i)][p] * b[static_cast<std::size_t>(j)][p];
            }
        }
        out[p] = acc;
    }
}

void trace_range(const MatrixFieldView& m, const MatrixFieldView& h, std::span<cplx> out,
                 std::size_t begin, std::size_t end) {
    const std::size_t nn = static_cast<std::size_t>(m.n * m.n);
    for (std::size_t p = begin; p < end; ++p) {
        cplx acc{0.0, 0.0};
        for (std::size_t e = 0; e < nn; ++e)
            if (m.entries[e] && h.entries[e]) acc += m.entries[e][p] * h.entries[e][p];
        out[p] = acc;
    }
}

template <class Body>
void split(std::size_t total, Body&& body) {
#pragma omp parallel
    {
        const auto threads = static_cast<std::size_t>(omp_get_num_threads());
        const auto id = static_cast<std::size_t>(omp_get_thread_num());
        const std::size_t chunk = (total + threads - 1) / threads;
        const std::size_t begin = std::min(total, id * chunk);
        const std::size_t end = std::min(total, begin + chunk);
        if (begin < end) body(begin, end);
    }
}

}  // namespace

namespace serial {

void invert_hermitian(const MatrixFieldView& g, std::size_t points, const MatrixFieldOut& inv,
                      std::span<double> eig_min) {
    invert_range(g, inv, eig_min, 0, points);
}

void contract_bilinear(const MatrixFieldView& m, std::span<const cplx* const> a,
                       std::span<const cplx* const> b, std::span<cplx> out) {
    bilinear_range(m, a, b, out, 0, out.size());
}

void contract_trace(const MatrixFieldView& m, const MatrixFieldView& h, std::span<cplx> out) {
    trace_range(m, h, out, 0, out.size());
}

cplx block_sum(std::span<const cplx> values) {
    const std::size_t blocks = (values.size() + kReductionBlock - 1) / kReductionBlock;
    cplx total{0.0, 0.0};
    for (std::size_t b = 0; b < blocks; ++b) {
        cplx partial{0.0, 0.0};
        const std::size_t end = std::min(values.size(), (b + 1) * kReductionBlock);
        for (std::size_t p = b * kReductionBlock; p < end; ++p) partial += values[p];
        total += partial;
    }
    return total;
}

}  // namespace serial

namespace parallel {

void invert_hermitian(const MatrixFieldView& g, std::size_t points, const MatrixFieldOut& inv,
                      std::span<double> eig_min) {
    split(points, [&](std::size_t b, std::size_t e) { invert_range(g, inv, eig_min, b, e); });
}

void contract_bilinear(const MatrixFieldView& m, std::span<const cplx* const> a,
                       std::span<const cplx* const> b, std::span<cplx> out) {
    split(out.size(), [&](std::size_t lo, std::size_t hi) { bilinear_range(m, a, b, out, lo, hi); });
}

void contract_trace(const MatrixFieldView& m, const MatrixFieldView& h, std::span<cplx> out) {
    split(out.size(), [&](std::size_t b, std::size_t e) { trace_range(m, h, out, b, e); });
}

cplx block_sum(std::span<const cplx> values) {
    const std::size_t blocks = (values.size() + kReductionBlock - 1) / kReductionBlock;
    std::vector<cplx> partial(blocks, cplx{0.0, 0.0});
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t end = std::min(values.size(), (b + 1) * kReductionBlock);
        cplx acc{0.0, 0.0};
        for (std::size_t p = b * kReductionBlock; p < end; ++p) acc += values[p];
        partial[b] = acc;
    }
    cplx total{0.0, 0.0};
    for (const cplx& v : partial) total += v;
    return total;
}

}  // namespace parallel

}  // namespace gauduchon::kernels

namespace gauduchon::kernels::serial {

void dft_derivative(std::span<const cplx> in, std::span<cplx> out, const std::vector<int>& sizes,
                    const std::vector<std::size_t>& strides, int dim) {
    const auto d = static_cast<std::size_t>(dim);
    const int N = sizes[d];
    const std::size_t stride = strides[d];
    std::vector<cplx> line(static_cast<std::size_t>(N)), coeff(static_cast<std::size_t>(N));
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t p = 0; p < in.size(); ++p) {
        if ((p / stride) % static_cast<std::size_t>(N) != 0) continue;  // visit each line once
        for (int m = 0; m < N; ++m) line[static_cast<std::size_t>(m)] = in[p + static_cast<std::size_t>(m) * stride];
        for (int k = 0; k < N; ++k) {
            cplx acc{0.0, 0.0};
            for (int m = 0; m < N; ++m)
                acc += line[static_cast<std::size_t>(m)] * std::polar(1.0, -two_pi * k * m / N);
            int wave = k <= N / 2 ? k : k - N;
            if (N % 2 == 0 && k == N / 2) wave = 0;
            coeff[static_cast<std::size_t>(k)] = acc * cplx{0.0, static_cast<double>(wave)} / static_cast<double>(N);
        }
        for (int m = 0; m < N; ++m) {
            cplx acc{0.0, 0.0};
            for (int k = 0; k < N; ++k)
                acc += coeff[static_cast<std::size_t>(k)] * std::polar(1.0, two_pi * k * m / N);
            out[p + static_cast<std::size_t>(m) * stride] = acc;
        }
    }
}

}  // namespace gauduchon::kernels::serial
