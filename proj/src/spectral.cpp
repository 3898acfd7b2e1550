#include "spectral.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

#include "gauduchon/error.hpp"

namespace gauduchon::spectral {

namespace {

using PlanKey = std::tuple<std::vector<int>, std::uint32_t, int>;

// fftw planning is not thread-safe; execution of an existing plan is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(const GridShape& shape, std::uint32_t axes, int sign, cplx* data) {
        std::lock_guard lock(mutex_);
        PlanKey key{shape.sizes(), axes, sign};
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        std::vector<fftw_iodim> dims, loops;
        for (int d = 0; d < shape.dims(); ++d) {
            if (shape.size(d) == 1) continue;
            const auto stride = static_cast<int>(shape.stride(d));
            fftw_iodim io{shape.size(d), stride, stride};
            ((axes >> d) & 1u ? dims : loops).push_back(io);
        }
        auto* buf = reinterpret_cast<fftw_complex*>(data);
        fftw_plan plan = fftw_plan_guru_dft(static_cast<int>(dims.size()), dims.data(),
                                            static_cast<int>(loops.size()), loops.data(), buf, buf,
                                            sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw Error("fftw could not create a plan");
        plans_.emplace(std::move(key), plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

}  // namespace

void transform(std::span<cplx> data, const GridShape& shape, std::uint32_t axes, int sign) {
    axes &= shape.active_mask();
    if (axes == 0 || data.empty()) return;
    fftw_plan plan = cache().get(shape, axes, sign, data.data());
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

kernels::WaveTable wave_table(const GridShape& shape, std::uint32_t axes) {
    kernels::WaveTable w;
    w.sizes = shape.sizes();
    w.k.resize(w.sizes.size());
    for (int d = 0; d < shape.dims(); ++d) {
        w.strides.push_back(shape.stride(d));
        const int N = shape.size(d);
        if (N == 1 || !((axes >> d) & 1u)) continue;
        auto& k = w.k[static_cast<std::size_t>(d)];
        k.resize(static_cast<std::size_t>(N));
        for (int m = 0; m < N; ++m) {
            int wave = m <= N / 2 ? m : m - N;
            if (N % 2 == 0 && m == N / 2) wave = 0;
            k[static_cast<std::size_t>(m)] = wave;
        }
    }
    return w;
}

bool has_nyquist(const GridShape& shape) {
    for (int d = 0; d < shape.dims(); ++d)
        if (shape.size(d) > 1 && shape.size(d) % 2 == 0) return true;
    return false;
}

GridFunction drop_nyquist(const GridFunction& u) {
    const GridShape& shape = u.shape();
    if (!has_nyquist(shape)) return u;
    std::vector<cplx> c(u.values().begin(), u.values().end());
    const std::uint32_t axes = shape.active_mask();
    transform(c, shape, axes, -1);
    for (int d = 0; d < shape.dims(); ++d) {
        const int N = shape.size(d);
        if (N == 1 || N % 2) continue;
        const std::size_t stride = shape.stride(d);
        const std::size_t block = stride * static_cast<std::size_t>(N);
        const std::size_t offset = stride * static_cast<std::size_t>(N / 2);
        for (std::size_t base = 0; base < c.size(); base += block)
            std::fill_n(c.begin() + static_cast<std::ptrdiff_t>(base + offset), stride, cplx{});
    }
    transform(c, shape, axes, +1);
    const double scale = 1.0 / static_cast<double>(shape.points());
    for (auto& x : c) x *= scale;
    return GridFunction(shape, std::move(c));
}

Spectrum::Spectrum(const GridFunction& u)
    : shape_(u.shape()),
      axes_(u.shape().active_mask()),
      waves_(wave_table(u.shape(), axes_)),
      scale_(1.0 / static_cast<double>(u.shape().points())),
      coeffs_(u.values().begin(), u.values().end()) {
    transform(coeffs_, shape_, axes_, -1);
}

GridFunction Spectrum::derivative(int dim) const {
    return apply([dim](const double* k) { return cplx{0.0, k[dim]}; });
}

GridFunction Spectrum::holomorphic(int j, bool conjugate) const {
    return apply([j, conjugate](const double* k) { return holomorphic_symbol(k, j, conjugate); });
}

GridFunction Spectrum::mixed(int i, int j) const {
    return apply([i, j](const double* k) {
        return holomorphic_symbol(k, i, false) * holomorphic_symbol(k, j, true);
    });
}

}  // namespace gauduchon::spectral
