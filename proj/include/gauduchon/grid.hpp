#pragma once

// Periodic scalar fields on the real torus T^{2n} = (R / 2πZ)^{2n}.
//
// Real coordinates are ordered (x1, y1, ..., xn, yn) with z_j = x_j + i y_j.
// Samples are stored row-major (the last coordinate varies fastest) at the
// nodes x = 2πm/N. A dimension of size 1 carries translation-invariant data:
// every derivative along it is identically zero.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <json.hpp>

namespace gauduchon {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class GridShape {
public:
    GridShape(int n, std::vector<int> sizes);

    // Every real dimension sampled with `points` nodes.
    static GridShape uniform(int n, int points);
    // Only the listed real dimensions (0-based) are active, each with `points` nodes.
    static GridShape active(int n, std::initializer_list<int> dims, int points);

    int n() const noexcept { return n_; }
    int dims() const noexcept { return 2 * n_; }
    const std::vector<int>& sizes() const noexcept { return sizes_; }
    int size(int dim) const { return sizes_.at(static_cast<std::size_t>(dim)); }
    std::size_t points() const noexcept { return points_; }
    std::size_t stride(int dim) const { return strides_.at(static_cast<std::size_t>(dim)); }

    // Real-dimension indices of x_j and y_j, j = 1..n.
    int x_dim(int j) const;
    int y_dim(int j) const;

    double coordinate(int dim, int index) const {
        return kTwoPi * index / sizes_[static_cast<std::size_t>(dim)];
    }
    // Coordinates of a flat point index, written into `out` (length dims()).
    void coordinates(std::size_t point, std::span<double> out) const;

    // Bitmask of dimensions with more than one node.
    std::uint32_t active_mask() const noexcept;

    // Same torus with each active dimension multiplied by `factor`.
    GridShape refined(int factor) const;

    bool operator==(const GridShape& other) const noexcept {
        return n_ == other.n_ && sizes_ == other.sizes_;
    }

private:
    int n_;
    std::vector<int> sizes_;
    std::vector<std::size_t> strides_;
    std::size_t points_;
};

class GridFunction {
public:
    GridFunction(GridShape shape, std::vector<cplx> values);

    static GridFunction constant(const GridShape& shape, cplx value);
    static GridFunction zero(const GridShape& shape) { return constant(shape, 0.0); }
    static GridFunction from_real(const GridShape& shape, std::span<const double> values);
    // Samples `f(coords)` at every node; `coords` has length shape.dims().
    static GridFunction sample(const GridShape& shape,
                               const std::function<cplx(std::span<const double>)>& f);

    const GridShape& shape() const noexcept { return shape_; }
    std::span<const cplx> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    cplx operator[](std::size_t i) const { return values_[i]; }

    bool is_constant() const;
    double max_abs_imag() const;
    bool is_real(double tol = 1e-13) const { return max_abs_imag() <= tol; }
    double sup_norm() const;
    double min_real() const;
    double max_real() const;

    GridFunction conj() const;
    GridFunction real_part() const;
    std::vector<double> real_values() const;

    // Pointwise map.
    GridFunction map(const std::function<cplx(cplx)>& f) const;

    GridFunction operator-() const;
    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(const GridFunction& other);
    GridFunction& operator*=(cplx s);

private:
    friend GridFunction operator/(const GridFunction&, const GridFunction&);
    GridShape shape_;
    std::vector<cplx> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, cplx s);
GridFunction operator*(cplx s, GridFunction a);
GridFunction operator+(GridFunction a, cplx s);
GridFunction operator/(const GridFunction& a, const GridFunction& b);

GridFunction exp(const GridFunction& u);

// Spectral derivative along real dimension `dim` (0-based). The Nyquist mode of
// an even-sized dimension is dropped, so derivatives along distinct or equal
// dimensions compose exactly.
GridFunction derivative(const GridFunction& u, int dim);

// ∂u/∂z_j (conjugate = false) or ∂u/∂z̄_j (conjugate = true), j = 1..n.
GridFunction holomorphic_derivative(const GridFunction& u, int j, bool conjugate);

// ∂²u/∂z_i∂z̄_j in a single spectral pass; identical to composing the two
// first-order derivatives.
GridFunction mixed_derivative(const GridFunction& u, int i, int j);

// ∫ u dx over T^{2n}: mean of the samples times (2π)^{2n}.
cplx integrate(const GridFunction& u);
cplx mean(const GridFunction& u);

// Pointwise product; with `dealias` the product is formed on a grid padded by
// the 3/2 rule in every active dimension and truncated back.
GridFunction product(const GridFunction& a, const GridFunction& b, bool dealias);

// Trigonometric interpolation onto another grid over the same torus.
GridFunction resample(const GridFunction& u, const GridShape& target);

void to_json(nlohmann::json& j, const GridFunction& u);
GridFunction grid_function_from_json(const nlohmann::json& j);

}  // namespace gauduchon
