#include "gauduchon/metric.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <string>

#include "gauduchon/error.hpp"
#include "gauduchon/kernels.hpp"
#include "spectral.hpp"

namespace gauduchon {

namespace {

std::size_t at(int n, int i, int j) { return static_cast<std::size_t>((i - 1) * n + (j - 1)); }

Mask pair_mask(int n, int i, int j) { return (Mask{1} << (i - 1)) | (Mask{1} << (n + j - 1)); }

kernels::MatrixFieldView view(int n, const std::vector<std::optional<GridFunction>>& m) {
    kernels::MatrixFieldView v{n, std::vector<const cplx*>(m.size(), nullptr)};
    for (std::size_t e = 0; e < m.size(); ++e)
        if (m[e]) v.entries[e] = m[e]->values().data();
    return v;
}

// g_{ij̄} = -2i · (coefficient of dz_i ∧ dz̄_j).
std::vector<std::optional<GridFunction>> matrix_of(const Form& w) {
    if (w.p() != 1 || w.q() != 1) throw ArgumentError("metric form must have bidegree (1,1)");
    const int n = w.n();
    std::vector<std::optional<GridFunction>> g(static_cast<std::size_t>(n * n));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (const GridFunction* c = w.coefficient(pair_mask(n, i, j))) g[at(n, i, j)] = *c * cplx{0.0, -2.0};
    return g;
}

std::vector<double> pointwise_eigen_floor(int n, const std::vector<std::optional<GridFunction>>& g,
                                          std::size_t points) {
    std::vector<double> eig(points, 0.0);
    kernels::MatrixFieldOut none{n, std::vector<cplx*>(static_cast<std::size_t>(n * n), nullptr)};
    kernels::parallel::invert_hermitian(view(n, g), points, none, eig);
    return eig;
}

void check_k(const HermitianMetric& w, int k, int lo) {
    if (k < lo || k > w.n() - 1)
        throw ArgumentError("k = " + std::to_string(k) + " outside " + std::to_string(lo) + ".." +
                            std::to_string(w.n() - 1));
}

Form power_of(const Form& w, int k) { return k == 1 ? w : power(w, k); }

}  // namespace

OneFormPair OneFormPair::zero(const GridShape& shape) {
    const auto n = static_cast<std::size_t>(shape.n());
    return {std::vector<GridFunction>(n, GridFunction::zero(shape)),
            std::vector<GridFunction>(n, GridFunction::zero(shape))};
}

OneFormPair OneFormPair::differential(const GridFunction& u) {
    const GridShape& shape = u.shape();
    OneFormPair out = zero(shape);
    if (u.is_constant()) return out;
    const spectral::Spectrum spec(u);
    for (int j = 1; j <= shape.n(); ++j) {
        out.hol[static_cast<std::size_t>(j - 1)] = spec.holomorphic(j, false);
        out.anti[static_cast<std::size_t>(j - 1)] = spec.holomorphic(j, true);
    }
    return out;
}

double OneFormPair::sup_norm() const {
    double s = 0.0;
    for (const auto& c : hol) s = std::max(s, c.sup_norm());
    for (const auto& c : anti) s = std::max(s, c.sup_norm());
    return s;
}

double OneFormPair::reality_defect() const {
    double s = 0.0;
    for (std::size_t j = 0; j < hol.size(); ++j) s = std::max(s, (anti[j] - hol[j].conj()).sup_norm());
    return s;
}

OneFormPair operator+(const OneFormPair& a, const OneFormPair& b) {
    OneFormPair out = a;
    for (std::size_t j = 0; j < out.hol.size(); ++j) {
        out.hol[j] += b.hol[j];
        out.anti[j] += b.anti[j];
    }
    return out;
}

OneFormPair operator*(const GridFunction& u, const OneFormPair& a) {
    OneFormPair out = a;
    for (std::size_t j = 0; j < out.hol.size(); ++j) {
        out.hol[j] *= u;
        out.anti[j] *= u;
    }
    return out;
}

void to_json(nlohmann::json& j, const OneFormPair& a) {
    j = nlohmann::json{{"hol", a.hol}, {"anti", a.anti}};
}

OneFormPair one_form_from_json(const nlohmann::json& j, const GridShape& shape) {
    OneFormPair out;
    try {
        for (const auto& c : j.at("hol")) out.hol.push_back(grid_function_from_json(c));
        for (const auto& c : j.at("anti")) out.anti.push_back(grid_function_from_json(c));
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("malformed 1-form JSON: ") + e.what());
    }
    const auto n = static_cast<std::size_t>(shape.n());
    if (out.hol.size() != n || out.anti.size() != n)
        throw ArgumentError("1-form needs " + std::to_string(n) + " components of each type");
    for (std::size_t i = 0; i < n; ++i)
        if (!(out.hol[i].shape() == shape) || !(out.anti[i].shape() == shape))
            throw ArgumentError("1-form component lives on a different grid");
    return out;
}

HermitianMetric::HermitianMetric(Form omega)
    : form_(std::move(omega)), n_(form_.n()), volume_density_(GridFunction::zero(form_.shape())) {
    const int n = n_;
    const std::size_t points = shape().points();
    g_ = matrix_of(form_);

    double scale = 1.0;
    for (const auto& e : g_)
        if (e) scale = std::max(scale, e->sup_norm());
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            const auto& a = g_[at(n, i, j)];
            const auto& b = g_[at(n, j, i)];
            if (i != j && (a || b)) diagonal_ = false;
            double r = 0.0;
            if (a && b)
                r = (*a - b->conj()).sup_norm();
            else if (a)
                r = a->sup_norm();
            else if (b)
                r = b->sup_norm();
            hermitian_residual_ = std::max(hermitian_residual_, r);
        }
    if (hermitian_residual_ > 1e-12 * scale)
        throw ArgumentError("coefficient matrix is not hermitian (residual " +
                            std::to_string(hermitian_residual_) + ")");

    ginv_.assign(static_cast<std::size_t>(n * n), std::nullopt);
    std::vector<std::vector<cplx>> buffers(static_cast<std::size_t>(n * n));
    kernels::MatrixFieldOut out{n, std::vector<cplx*>(static_cast<std::size_t>(n * n), nullptr)};
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            if (diagonal_ && i != j) continue;
            buffers[at(n, i, j)].assign(points, cplx{0.0, 0.0});
            out.entries[at(n, i, j)] = buffers[at(n, i, j)].data();
        }
    std::vector<double> eig(points);
    kernels::parallel::invert_hermitian(view(n, g_), points, out, eig);
    eigen_floor_ = *std::min_element(eig.begin(), eig.end());
    if (!(eigen_floor_ > 1e-10))
        throw ArgumentError("metric is not positive definite (eigen floor " + std::to_string(eigen_floor_) + ")");
    for (std::size_t e = 0; e < buffers.size(); ++e)
        if (!buffers[e].empty()) ginv_[e] = GridFunction(shape(), std::move(buffers[e]));

    powers_.push_back(Form::one(shape()));
    for (int k = 1; k <= n; ++k) powers_.push_back(k == 1 ? form_ : wedge(powers_.back(), form_));
    volume_density_ = coerce_real(top_density(powers_.back()), 1e-11, "volume density");

    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) factorial *= k;
    const double bound = std::pow(eigen_floor_, n) * factorial;
    for (std::size_t p = 0; p < points; ++p)
        if (volume_density_[p].real() < bound * (1.0 - 1e-10))
            throw SingularVolumeError("volume density below the eigenvalue bound at grid point " +
                                          std::to_string(p),
                                      p);
    total_volume_ = integrate(volume_density_).real();
}

const GridFunction* HermitianMetric::g(int i, int j) const {
    const auto& e = g_.at(at(n_, i, j));
    return e ? &*e : nullptr;
}

const GridFunction* HermitianMetric::ginv(int i, int j) const {
    const auto& e = ginv_.at(at(n_, i, j));
    return e ? &*e : nullptr;
}

const Form& HermitianMetric::power(int k) const {
    if (k < 0 || k > n_) throw ArgumentError("power of ω out of range");
    return powers_[static_cast<std::size_t>(k)];
}

double HermitianMetric::average(const GridFunction& u) const {
    return (integrate(u * volume_density_) / total_volume_).real();
}

HermitianMetric HermitianMetric::conformal(const GridFunction& rho) const {
    return HermitianMetric(exp(rho) * form_);
}

GridFunction coerce_real(const GridFunction& u, double tol, const char* what) {
    const double scale = std::max(1.0, u.sup_norm());
    const double imag = u.max_abs_imag();
    if (imag > tol * scale)
    {
        std::ostringstream msg;
        msg << what << " has imaginary residue " << std::scientific << imag;
        throw Error(msg.str());
    }
    return u.real_part();
}

GridFunction laplacian(const HermitianMetric& w, const GridFunction& h) {
    if (!(w.shape() == h.shape())) throw ArgumentError("metric and function live on different grids");
    if (h.is_constant()) return GridFunction::zero(h.shape());
    const int n = w.n();
    const spectral::Spectrum spec(h);
    std::vector<std::optional<GridFunction>> hess(static_cast<std::size_t>(n * n));
    std::vector<std::optional<GridFunction>> inv(static_cast<std::size_t>(n * n));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (const GridFunction* gi = w.ginv(i, j)) {
                hess[at(n, i, j)] = spec.mixed(i, j);
                inv[at(n, i, j)] = *gi;
            }
    std::vector<cplx> out(h.size());
    kernels::parallel::contract_trace(view(n, inv), view(n, hess), out);
    GridFunction result(h.shape(), std::move(out));
#ifndef NDEBUG
    const double scale = std::max(1.0, result.sup_norm());
    assert((result - laplacian_form_route(w, h)).sup_norm() <= 1e-9 * scale);
#endif
    return result;
}

GridFunction laplacian_form_route(const HermitianMetric& w, const GridFunction& h) {
    if (!(w.shape() == h.shape())) throw ArgumentError("metric and function live on different grids");
    const int n = w.n();
    GridFunction top = ddbar_top_density(Form::scalar(h), w.power(n - 1));
    top *= cplx{0.0, 0.5 * n};
    return top / w.volume_density();
}

GridFunction pair(const HermitianMetric& w, const OneFormPair& a, const OneFormPair& b) {
    const int n = w.n();
    std::vector<std::optional<GridFunction>> inv(static_cast<std::size_t>(n * n));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (const GridFunction* gi = w.ginv(i, j)) inv[at(n, i, j)] = *gi;
    const auto ptrs = [](const std::vector<GridFunction>& v) {
        std::vector<const cplx*> p;
        for (const auto& c : v) p.push_back(c.values().data());
        return p;
    };
    const auto ah = ptrs(a.hol), aa = ptrs(a.anti), bh = ptrs(b.hol), ba = ptrs(b.anti);
    std::vector<cplx> first(w.shape().points()), second(w.shape().points());
    kernels::parallel::contract_bilinear(view(n, inv), ah, ba, first);
    kernels::parallel::contract_bilinear(view(n, inv), bh, aa, second);
    return (GridFunction(w.shape(), std::move(first)) + GridFunction(w.shape(), std::move(second))) * 0.5;
}

GridFunction grad_norm_sq(const HermitianMetric& w, const GridFunction& h) {
    const OneFormPair dh = OneFormPair::differential(h);
    return pair(w, dh, dh);
}

GridFunction conformal_operator(const HermitianMetric& w, int k, const GridFunction& u) {
    check_k(w, k, 0);
    const int n = w.n();
    GridFunction top = ddbar_top_density(u * w.power(k), w.power(n - k - 1));
    top *= cplx{0.0, 0.5 * n};
    return top / w.volume_density();
}

namespace {

// Roundoff in the contracted operators grows with sup|g| / eigen floor.
double realness_tol(const HermitianMetric& w) {
    return 1e-11 * std::max(1.0, w.form().sup_norm() / w.eigen_floor());
}

}  // namespace

GridFunction phi_k(const HermitianMetric& w, int k) {
    check_k(w, k, 1);
    return coerce_real(conformal_operator(w, k, GridFunction::constant(w.shape(), 1.0)), realness_tol(w), "phi");
}

GridFunction nonlinear_F(const HermitianMetric& w, int k, const GridFunction& v) {
    check_k(w, k, 1);
    const GridFunction ev = exp(v);
    return coerce_real(exp(-v) * conformal_operator(w, k, ev), realness_tol(w), "F(v)");
}

OneFormPair b1_form(const HermitianMetric& w, int k) {
    check_k(w, k, 1);
    const int n = w.n();
    const GridShape& shape = w.shape();
    const Form& omega_k = w.power(k);
    const Form& theta = w.power(n - k - 1);
    const Form d_omega = del(omega_k);
    const Form dbar_omega = delbar(omega_k);
    const cplx weight{0.0, 0.5 * n};

    std::vector<GridFunction> P, Q;
    for (int j = 1; j <= n; ++j) {
        Form dz(shape, 1, 0), dzb(shape, 0, 1);
        dz.accumulate(Mask{1} << (j - 1), GridFunction::constant(shape, 1.0));
        dzb.accumulate(Mask{1} << (n + j - 1), GridFunction::constant(shape, 1.0));
        P.push_back(top_density(wedge(wedge(dz, dbar_omega), theta)) * weight / w.volume_density());
        Q.push_back(top_density(wedge(wedge(d_omega, dzb), theta)) * weight / w.volume_density());
    }
    OneFormPair b = OneFormPair::zero(shape);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            const GridFunction* gij = w.g(i, j);
            if (!gij) continue;
            b.anti[static_cast<std::size_t>(j - 1)] += 2.0 * (*gij * P[static_cast<std::size_t>(i - 1)]);
            b.hol[static_cast<std::size_t>(i - 1)] += 2.0 * (*gij * Q[static_cast<std::size_t>(j - 1)]);
        }
    return b;
}

double k_gauduchon_residual(const HermitianMetric& w, int k) {
    check_k(w, k, 1);
    const int n = w.n();
    return ddbar_top_density(w.power(k), w.power(n - k - 1)).sup_norm() * std::pow(0.5, n);
}

ClassificationReport classify(const HermitianMetric& w, double tol) {
    if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
    const int n = w.n();
    const auto d_sup = [](const Form& f) { return std::max(del(f).sup_norm(), delbar(f).sup_norm()); };
    ClassificationReport r;
    r.tol = tol;
    r.kahler_residual = d_sup(w.form());
    r.balanced_residual = d_sup(w.power(n - 1));
    r.gauduchon_residual = del(delbar(w.power(n - 1))).sup_norm();
    r.pluriclosed_residual = del(delbar(w.form())).sup_norm();
    for (int k = 1; k <= n - 1; ++k) r.k_gauduchon_residuals.push_back(k_gauduchon_residual(w, k));
    r.is_kahler = r.kahler_residual <= tol;
    r.is_balanced = r.balanced_residual <= tol;
    r.is_gauduchon = r.gauduchon_residual <= tol;
    r.is_pluriclosed = r.pluriclosed_residual <= tol;
    return r;
}

void to_json(nlohmann::json& j, const ClassificationReport& r) {
    j = nlohmann::json{{"tol", r.tol},
                       {"is_kahler", r.is_kahler},
                       {"is_balanced", r.is_balanced},
                       {"is_gauduchon", r.is_gauduchon},
                       {"is_pluriclosed", r.is_pluriclosed},
                       {"kahler_residual", r.kahler_residual},
                       {"balanced_residual", r.balanced_residual},
                       {"gauduchon_residual", r.gauduchon_residual},
                       {"pluriclosed_residual", r.pluriclosed_residual},
                       {"k_gauduchon_residuals", r.k_gauduchon_residuals}};
}

double form_eigen_floor(const Form& w) {
    const auto g = matrix_of(w);
    const auto eig = pointwise_eigen_floor(w.n(), g, w.shape().points());
    return *std::min_element(eig.begin(), eig.end());
}

double integral_criterion(const Form& w_ring, int k) {
    const int n = w_ring.n();
    if (k < 1 || k > n - 1) throw ArgumentError("k out of range");
    const double floor = form_eigen_floor(w_ring);
    if (floor < -1e-12)
        throw ArgumentError("semi-metric is indefinite (eigen floor " + std::to_string(floor) + ")");
    const GridFunction top = ddbar_top_density(power_of(w_ring, k), power_of(w_ring, n - k - 1));
    return (cplx{0.0, 0.5} * integrate(top)).real();
}

double gauduchon_criterion(const HermitianMetric& w, int k) {
    check_k(w, k, 1);
    const GridFunction top = ddbar_top_density(w.power(k), w.power(w.n() - k - 1));
    return (cplx{0.0, 0.5} * integrate(top)).real();
}

}  // namespace gauduchon
