#include "gauduchon/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gauduchon/error.hpp"
#include "spectral.hpp"

namespace gauduchon {

namespace {

constexpr std::size_t kParallelMin = 1u << 15;

void require_same(const GridShape& a, const GridShape& b) {
    if (!(a == b)) throw ArgumentError("grid shapes differ");
}

template <class F>
void for_points(std::size_t count, F&& f) {
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static) if (count >= kParallelMin)
    for (std::ptrdiff_t p = 0; p < n; ++p) f(static_cast<std::size_t>(p));
}

template <class Symbol>
GridFunction apply_symbol(const GridFunction& u, std::uint32_t axes, Symbol&& symbol) {
    const GridShape& shape = u.shape();
    axes &= shape.active_mask();
    std::vector<cplx> data(u.values().begin(), u.values().end());
    double count = 1.0;
    for (int d = 0; d < shape.dims(); ++d)
        if ((axes >> d) & 1u) count *= shape.size(d);
    spectral::transform(data, shape, axes, -1);
    kernels::parallel::multiply_symbol(data, spectral::wave_table(shape, axes), symbol, 1.0 / count);
    spectral::transform(data, shape, axes, +1);
    return GridFunction(shape, std::move(data));
}

void check_index(const GridShape& shape, int j) {
    if (j < 1 || j > shape.n())
        throw ArgumentError("holomorphic index " + std::to_string(j) + " out of range 1.." +
                            std::to_string(shape.n()));
}

std::uint32_t pair_axes(const GridShape& shape, int j) {
    return (1u << shape.x_dim(j)) | (1u << shape.y_dim(j));
}

// Where each source mode of one dimension lands on a target dimension of another size.
struct ModeTarget {
    int index;
    double weight;
};

std::vector<std::vector<ModeTarget>> mode_map(int from, int to) {
    std::vector<std::vector<ModeTarget>> map(static_cast<std::size_t>(from));
    const auto slot = [to](int wave) { return wave >= 0 ? wave : wave + to; };
    for (int m = 0; m < from; ++m) {
        const int wave = m <= from / 2 ? m : m - from;
        auto& out = map[static_cast<std::size_t>(m)];
        if (from % 2 == 0 && m == from / 2) {
            // Nyquist mode: split symmetrically when upsampling, drop otherwise.
            if (to > from) {
                out.push_back({slot(wave), 0.5});
                out.push_back({slot(-wave), 0.5});
            } else if (to == from) {
                out.push_back({m, 1.0});
            }
            continue;
        }
        if (2 * std::abs(wave) < to) out.push_back({slot(wave), 1.0});
    }
    return map;
}

}  // namespace

GridShape::GridShape(int n, std::vector<int> sizes) : n_(n), sizes_(std::move(sizes)) {
    if (n < 1) throw ArgumentError("complex dimension must be at least 1");
    if (sizes_.size() != static_cast<std::size_t>(2 * n))
        throw ArgumentError("grid needs " + std::to_string(2 * n) + " sizes, got " +
                            std::to_string(sizes_.size()));
    strides_.assign(sizes_.size(), 1);
    points_ = 1;
    for (std::size_t d = sizes_.size(); d-- > 0;) {
        if (sizes_[d] < 1) throw ArgumentError("grid sizes must be positive");
        strides_[d] = points_;
        points_ *= static_cast<std::size_t>(sizes_[d]);
    }
}

GridShape GridShape::uniform(int n, int points) {
    return GridShape(n, std::vector<int>(static_cast<std::size_t>(2 * n), points));
}

GridShape GridShape::active(int n, std::initializer_list<int> dims, int points) {
    std::vector<int> sizes(static_cast<std::size_t>(2 * n), 1);
    for (int d : dims) {
        if (d < 0 || d >= 2 * n) throw ArgumentError("dimension index out of range");
        sizes[static_cast<std::size_t>(d)] = points;
    }
    return GridShape(n, std::move(sizes));
}

int GridShape::x_dim(int j) const {
    check_index(*this, j);
    return 2 * (j - 1);
}

int GridShape::y_dim(int j) const {
    check_index(*this, j);
    return 2 * (j - 1) + 1;
}

void GridShape::coordinates(std::size_t point, std::span<double> out) const {
    for (int d = 0; d < dims(); ++d) {
        const auto idx = static_cast<int>((point / strides_[static_cast<std::size_t>(d)]) %
                                          static_cast<std::size_t>(sizes_[static_cast<std::size_t>(d)]));
        out[static_cast<std::size_t>(d)] = coordinate(d, idx);
    }
}

std::uint32_t GridShape::active_mask() const noexcept {
    std::uint32_t mask = 0;
    for (std::size_t d = 0; d < sizes_.size(); ++d)
        if (sizes_[d] > 1) mask |= 1u << d;
    return mask;
}

GridShape GridShape::refined(int factor) const {
    std::vector<int> sizes = sizes_;
    for (int& s : sizes)
        if (s > 1) s *= factor;
    return GridShape(n_, std::move(sizes));
}

GridFunction::GridFunction(GridShape shape, std::vector<cplx> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_.points())
        throw ArgumentError("expected " + std::to_string(shape_.points()) + " samples, got " +
                            std::to_string(values_.size()));
}

GridFunction GridFunction::constant(const GridShape& shape, cplx value) {
    return GridFunction(shape, std::vector<cplx>(shape.points(), value));
}

GridFunction GridFunction::from_real(const GridShape& shape, std::span<const double> values) {
    return GridFunction(shape, std::vector<cplx>(values.begin(), values.end()));
}

GridFunction GridFunction::sample(const GridShape& shape,
                                  const std::function<cplx(std::span<const double>)>& f) {
    std::vector<cplx> values(shape.points());
    std::vector<double> x(static_cast<std::size_t>(shape.dims()));
    for (std::size_t p = 0; p < values.size(); ++p) {
        shape.coordinates(p, x);
        values[p] = f(x);
    }
    return GridFunction(shape, std::move(values));
}

bool GridFunction::is_constant() const {
    return std::all_of(values_.begin(), values_.end(), [&](cplx v) { return v == values_.front(); });
}

double GridFunction::max_abs_imag() const {
    double m = 0.0;
    for (cplx v : values_) m = std::max(m, std::abs(v.imag()));
    return m;
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (cplx v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::min_real() const {
    double m = values_.front().real();
    for (cplx v : values_) m = std::min(m, v.real());
    return m;
}

double GridFunction::max_real() const {
    double m = values_.front().real();
    for (cplx v : values_) m = std::max(m, v.real());
    return m;
}

GridFunction GridFunction::conj() const {
    return map([](cplx v) { return std::conj(v); });
}

GridFunction GridFunction::real_part() const {
    return map([](cplx v) { return cplx{v.real(), 0.0}; });
}

std::vector<double> GridFunction::real_values() const {
    std::vector<double> out(values_.size());
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = values_[p].real();
    return out;
}

GridFunction GridFunction::map(const std::function<cplx(cplx)>& f) const {
    std::vector<cplx> out(values_.size());
    for_points(out.size(), [&](std::size_t p) { out[p] = f(values_[p]); });
    return GridFunction(shape_, std::move(out));
}

GridFunction GridFunction::operator-() const {
    GridFunction out = *this;
    for (cplx& v : out.values_) v = -v;
    return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same(shape_, other.shape_);
    for_points(values_.size(), [&](std::size_t p) { values_[p] += other.values_[p]; });
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same(shape_, other.shape_);
    for_points(values_.size(), [&](std::size_t p) { values_[p] -= other.values_[p]; });
    return *this;
}

GridFunction& GridFunction::operator*=(const GridFunction& other) {
    require_same(shape_, other.shape_);
    for_points(values_.size(), [&](std::size_t p) { values_[p] *= other.values_[p]; });
    return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
    for_points(values_.size(), [&](std::size_t p) { values_[p] *= s; });
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
GridFunction operator*(GridFunction a, cplx s) { return a *= s; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

GridFunction operator+(GridFunction a, cplx s) {
    return a.map([s](cplx v) { return v + s; });
}

GridFunction operator/(const GridFunction& a, const GridFunction& b) {
    require_same(a.shape_, b.shape_);
    std::vector<cplx> out(a.size());
    for_points(out.size(), [&](std::size_t p) { out[p] = a.values_[p] / b.values_[p]; });
    return GridFunction(a.shape_, std::move(out));
}

GridFunction exp(const GridFunction& u) {
    return u.map([](cplx v) { return std::exp(v); });
}

GridFunction derivative(const GridFunction& u, int dim) {
    const GridShape& shape = u.shape();
    if (dim < 0 || dim >= shape.dims())
        throw ArgumentError("dimension " + std::to_string(dim) + " out of range 0.." +
                            std::to_string(shape.dims() - 1));
    if (shape.size(dim) == 1 || u.is_constant()) return GridFunction::zero(shape);
    return apply_symbol(u, 1u << dim, [dim](const double* k) { return cplx{0.0, k[dim]}; });
}

GridFunction holomorphic_derivative(const GridFunction& u, int j, bool conjugate) {
    const GridShape& shape = u.shape();
    check_index(shape, j);
    const std::uint32_t axes = pair_axes(shape, j) & shape.active_mask();
    if (axes == 0 || u.is_constant()) return GridFunction::zero(shape);
    return apply_symbol(u, axes, [j, conjugate](const double* k) {
        return spectral::holomorphic_symbol(k, j, conjugate);
    });
}

GridFunction mixed_derivative(const GridFunction& u, int i, int j) {
    const GridShape& shape = u.shape();
    check_index(shape, i);
    check_index(shape, j);
    const std::uint32_t axes = shape.active_mask();
    if ((pair_axes(shape, i) & axes) == 0 || (pair_axes(shape, j) & axes) == 0 || u.is_constant())
        return GridFunction::zero(shape);
    return apply_symbol(u, pair_axes(shape, i) | pair_axes(shape, j), [i, j](const double* k) {
        return spectral::holomorphic_symbol(k, i, false) * spectral::holomorphic_symbol(k, j, true);
    });
}

cplx mean(const GridFunction& u) {
    return kernels::parallel::block_sum(u.values()) / static_cast<double>(u.size());
}

cplx integrate(const GridFunction& u) {
    return mean(u) * std::pow(kTwoPi, u.shape().dims());
}

GridFunction resample(const GridFunction& u, const GridShape& target) {
    const GridShape& source = u.shape();
    if (source.n() != target.n()) throw ArgumentError("resample between different dimensions");
    if (source == target) return u;

    std::vector<cplx> coeffs(u.values().begin(), u.values().end());
    spectral::transform(coeffs, source, source.active_mask(), -1);
    const double scale = 1.0 / static_cast<double>(source.points());

    const int dims = source.dims();
    std::vector<std::vector<std::vector<ModeTarget>>> maps;
    for (int d = 0; d < dims; ++d) maps.push_back(mode_map(source.size(d), target.size(d)));

    std::vector<cplx> out(target.points(), cplx{0.0, 0.0});
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    std::vector<std::size_t> choice(static_cast<std::size_t>(dims));
    for (std::size_t p = 0; p < coeffs.size(); ++p) {
        for (int d = 0; d < dims; ++d)
            idx[static_cast<std::size_t>(d)] =
                static_cast<int>((p / source.stride(d)) % static_cast<std::size_t>(source.size(d)));
        const cplx c = coeffs[p] * scale;
        if (c == cplx{0.0, 0.0}) continue;
        // Cartesian product of per-dimension targets.
        bool empty = false;
        for (int d = 0; d < dims; ++d) {
            choice[static_cast<std::size_t>(d)] = 0;
            if (maps[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])].empty())
                empty = true;
        }
        if (empty) continue;
        while (true) {
            std::size_t q = 0;
            double w = 1.0;
            for (int d = 0; d < dims; ++d) {
                const auto& t = maps[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])]
                                    [choice[static_cast<std::size_t>(d)]];
                q += static_cast<std::size_t>(t.index) * target.stride(d);
                w *= t.weight;
            }
            out[q] += c * w;
            int d = dims - 1;
            for (; d >= 0; --d) {
                const auto ds = static_cast<std::size_t>(d);
                if (++choice[ds] < maps[ds][static_cast<std::size_t>(idx[ds])].size()) break;
                choice[ds] = 0;
            }
            if (d < 0) break;
        }
    }
    spectral::transform(out, target, target.active_mask(), +1);
    return GridFunction(target, std::move(out));
}

GridFunction product(const GridFunction& a, const GridFunction& b, bool dealias) {
    require_same(a.shape(), b.shape());
    if (!dealias) return a * b;
    std::vector<int> sizes = a.shape().sizes();
    for (int& s : sizes)
        if (s > 1) s = (3 * s + 1) / 2;
    const GridShape padded(a.shape().n(), std::move(sizes));
    return resample(resample(a, padded) * resample(b, padded), a.shape());
}

void to_json(nlohmann::json& j, const GridFunction& u) {
    std::vector<double> re(u.size()), im(u.size());
    for (std::size_t p = 0; p < u.size(); ++p) {
        re[p] = u[p].real();
        im[p] = u[p].imag();
    }
    j = nlohmann::json{{"n", u.shape().n()}, {"sizes", u.shape().sizes()}, {"re", re}, {"im", im}};
}

GridFunction grid_function_from_json(const nlohmann::json& j) {
    try {
        GridShape shape(j.at("n").get<int>(), j.at("sizes").get<std::vector<int>>());
        const auto re = j.at("re").get<std::vector<double>>();
        std::vector<double> im(re.size(), 0.0);
        if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
        if (im.size() != re.size()) throw ArgumentError("re and im arrays differ in length");
        std::vector<cplx> values(re.size());
        for (std::size_t p = 0; p < re.size(); ++p) values[p] = {re[p], im[p]};
        return GridFunction(std::move(shape), std::move(values));
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("malformed grid function JSON: ") + e.what());
    }
}

}  // namespace gauduchon
