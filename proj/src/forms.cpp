#include "gauduchon/forms.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "gauduchon/error.hpp"
#include "spectral.hpp"

namespace gauduchon {

namespace {

Mask full_mask(int n) { return (Mask{1} << (2 * n)) - 1; }
Mask hol_part(int n, Mask m) { return m & ((Mask{1} << n) - 1); }

// (i/2)^n · (-1)^{n(n-1)/2}: dV expressed against the canonical monomial.
cplx volume_factor(int n) {
    const cplx half_i{0.0, 0.5};
    cplx f = std::pow(half_i, n);
    return (n * (n - 1) / 2) % 2 ? -f : f;
}

void check_same(const Form& a, const Form& b) {
    if (!(a.shape() == b.shape())) throw ArgumentError("forms live on different grids");
}

void check_top(const Form& a, const char* what) {
    if (a.p() != a.n() || a.q() != a.n())
        throw ArgumentError(std::string(what) + " must be an (n,n)-form");
}

}  // namespace

int merge_sign(Mask a, Mask b) noexcept {
    if (a & b) return 0;
    int swaps = 0;
    for (Mask rest = b; rest; rest &= rest - 1) {
        const int bit = std::countr_zero(rest);
        swaps += std::popcount(a >> (bit + 1));
    }
    return swaps % 2 ? -1 : 1;
}

Mask monomial_mask(int n, const std::vector<int>& I, const std::vector<int>& J) {
    Mask m = 0;
    const auto add = [&](const std::vector<int>& idx, int offset) {
        int prev = 0;
        for (int i : idx) {
            if (i < 1 || i > n) throw ArgumentError("form index " + std::to_string(i) + " out of range");
            if (i <= prev) throw ArgumentError("form multi-index must be strictly increasing");
            prev = i;
            m |= Mask{1} << (offset + i - 1);
        }
    };
    add(I, 0);
    add(J, n);
    return m;
}

void monomial_indices(int n, Mask m, std::vector<int>& I, std::vector<int>& J) {
    I.clear();
    J.clear();
    for (int b = 0; b < 2 * n; ++b) {
        if (!((m >> b) & 1u)) continue;
        if (b < n)
            I.push_back(b + 1);
        else
            J.push_back(b - n + 1);
    }
}

Form::Form(GridShape shape, int p, int q) : shape_(std::move(shape)), p_(p), q_(q) {
    if (p < 0 || q < 0) throw ArgumentError("negative bidegree");
}

Form Form::scalar(GridFunction u) {
    Form f(u.shape(), 0, 0);
    f.accumulate(0, std::move(u));
    return f;
}

Form Form::hermitian(const GridShape& shape, const std::vector<std::vector<GridFunction>>& g) {
    const int n = shape.n();
    if (g.size() != static_cast<std::size_t>(n)) throw ArgumentError("metric table must be n×n");
    Form f(shape, 1, 1);
    for (int i = 0; i < n; ++i) {
        if (g[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(n))
            throw ArgumentError("metric table must be n×n");
        for (int j = 0; j < n; ++j)
            f.accumulate((Mask{1} << i) | (Mask{1} << (n + j)),
                         g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * cplx{0.0, 0.5});
    }
    return f;
}

Form Form::flat(const GridShape& shape) {
    const int n = shape.n();
    Form f(shape, 1, 1);
    for (int i = 0; i < n; ++i)
        f.accumulate((Mask{1} << i) | (Mask{1} << (n + i)), GridFunction::constant(shape, cplx{0.0, 0.5}));
    return f;
}

Form Form::volume(const GridShape& shape) {
    Form f(shape, shape.n(), shape.n());
    f.accumulate(full_mask(shape.n()), GridFunction::constant(shape, volume_factor(shape.n())));
    return f;
}

const GridFunction* Form::coefficient(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? nullptr : &it->second;
}

const GridFunction* Form::coefficient(const std::vector<int>& I, const std::vector<int>& J) const {
    return coefficient(monomial_mask(n(), I, J));
}

GridFunction Form::coefficient_or_zero(const std::vector<int>& I, const std::vector<int>& J) const {
    const GridFunction* c = coefficient(I, J);
    return c ? *c : GridFunction::zero(shape_);
}

void Form::check_mask(Mask m) const {
    const int n = shape_.n();
    if (m & ~full_mask(n)) throw ArgumentError("monomial index out of range");
    if (std::popcount(hol_part(n, m)) != p_ || std::popcount(m >> n) != q_)
        throw ArgumentError("monomial does not match the form's bidegree");
}

void Form::set(const std::vector<int>& I, const std::vector<int>& J, GridFunction c) {
    const Mask m = monomial_mask(n(), I, J);
    check_mask(m);
    terms_.erase(m);
    if (c.sup_norm() > kPruneTol) terms_.emplace(m, std::move(c));
}

void Form::accumulate(Mask m, const GridFunction& c) { accumulate(m, GridFunction(c)); }

void Form::accumulate(Mask m, GridFunction&& c) {
    check_mask(m);
    if (!(c.shape() == shape_)) throw ArgumentError("coefficient lives on a different grid");
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        if (c.sup_norm() > kPruneTol) terms_.emplace(m, std::move(c));
        return;
    }
    it->second += c;
    if (it->second.sup_norm() <= kPruneTol) terms_.erase(it);
}

double Form::sup_norm() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s = std::max(s, c.sup_norm());
    return s;
}

void Form::prune() {
    std::erase_if(terms_, [](const auto& t) { return t.second.sup_norm() <= kPruneTol; });
}

Form& Form::operator+=(const Form& other) {
    check_same(*this, other);
    if (other.p_ != p_ || other.q_ != q_) throw ArgumentError("adding forms of different bidegree");
    for (const auto& [m, c] : other.terms_) accumulate(m, c);
    return *this;
}

Form& Form::operator-=(const Form& other) { return *this += other * cplx{-1.0, 0.0}; }

Form& Form::operator*=(cplx s) {
    for (auto& [m, c] : terms_) c *= s;
    prune();
    return *this;
}

Form operator+(Form a, const Form& b) { return a += b; }
Form operator-(Form a, const Form& b) { return a -= b; }
Form operator*(Form a, cplx s) { return a *= s; }
Form operator*(cplx s, Form a) { return a *= s; }

Form operator*(const GridFunction& u, const Form& a) {
    Form out(a.shape(), a.p(), a.q());
    for (const auto& [m, c] : a.terms()) out.accumulate(m, u * c);
    return out;
}

Form wedge(const Form& a, const Form& b) {
    check_same(a, b);
    Form out(a.shape(), a.p() + b.p(), a.q() + b.q());
    if (out.p() > a.n() || out.q() > a.n()) return out;
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) {
            const int s = merge_sign(ma, mb);
            if (s == 0) continue;
            out.accumulate(ma | mb, s > 0 ? ca * cb : -(ca * cb));
        }
    return out;
}

namespace {

Form differentiate(const Form& a, bool conjugate) {
    const int n = a.n();
    Form out(a.shape(), a.p() + (conjugate ? 0 : 1), a.q() + (conjugate ? 1 : 0));
    if (out.p() > n || out.q() > n) return out;
    for (const auto& [m, c] : a.terms()) {
        if (c.is_constant()) continue;
        const spectral::Spectrum spec(c);
        for (int j = 1; j <= n; ++j) {
            const Mask bit = Mask{1} << (conjugate ? n + j - 1 : j - 1);
            const int s = merge_sign(bit, m);
            if (s == 0) continue;
            GridFunction dc = spec.holomorphic(j, conjugate);
            if (s < 0) dc *= -1.0;
            out.accumulate(bit | m, std::move(dc));
        }
    }
    return out;
}

}  // namespace

Form del(const Form& a) { return differentiate(a, false); }
Form delbar(const Form& a) { return differentiate(a, true); }

Form conj(const Form& a) {
    const int n = a.n();
    Form out(a.shape(), a.q(), a.p());
    const bool odd = (a.p() * a.q()) % 2 != 0;
    for (const auto& [m, c] : a.terms()) {
        const Mask swapped = (m >> n) | (hol_part(n, m) << n);
        GridFunction cc = c.conj();
        if (odd) cc *= -1.0;
        out.accumulate(swapped, std::move(cc));
    }
    return out;
}

Form power(const Form& w, int k) {
    if (w.p() != 1 || w.q() != 1) throw ArgumentError("power expects a (1,1)-form");
    if (k < 0) throw ArgumentError("negative exponent");
    Form out = Form::one(w.shape());
    for (int i = 0; i < k; ++i) out = wedge(out, w);
    return out;
}

GridFunction top_density(const Form& top) {
    check_top(top, "top_density argument");
    const GridFunction* c = top.coefficient(full_mask(top.n()));
    if (!c) return GridFunction::zero(top.shape());
    return *c * (1.0 / volume_factor(top.n()));
}

cplx integrate_top(const Form& top) { return integrate(top_density(top)); }

GridFunction ratio_to_volume(const Form& a, const Form& vol) {
    check_same(a, vol);
    check_top(a, "numerator");
    check_top(vol, "volume");
    const Mask full = full_mask(a.n());
    const GridFunction* v = vol.coefficient(full);
    if (!v) throw SingularVolumeError("volume form vanishes identically", 0);
    for (std::size_t p = 0; p < v->size(); ++p)
        if (std::abs((*v)[p]) <= 1e-14)
            throw SingularVolumeError("volume form vanishes at grid point " + std::to_string(p), p);
    const GridFunction* c = a.coefficient(full);
    if (!c) return GridFunction::zero(a.shape());
    return *c / *v;
}

GridFunction ddbar_top_density(const Form& omega, const Form& theta) {
    check_same(omega, theta);
    const int n = omega.n();
    if (omega.p() != omega.q() || theta.p() != theta.q() || omega.p() + theta.p() != n - 1)
        throw ArgumentError("ddbar_top_density expects bidegrees (k,k) and (n-k-1,n-k-1)");
    const Mask full = full_mask(n);
    GridFunction acc = GridFunction::zero(omega.shape());
    for (const auto& [mo, co] : omega.terms()) {
        if (co.is_constant()) continue;
        // weight[(i,j)] = Σ_Θ sign · θ over Θ monomials completing dz_i dz̄_j Ω to the top.
        std::map<std::pair<int, int>, GridFunction> weights;
        for (const auto& [mt, ct] : theta.terms()) {
            if (mo & mt) continue;
            const Mask missing = full & ~(mo | mt);
            if (std::popcount(hol_part(n, missing)) != 1 || std::popcount(missing >> n) != 1) continue;
            const int i = std::countr_zero(hol_part(n, missing)) + 1;
            const int j = std::countr_zero(missing >> n) + 1;
            const Mask bi = Mask{1} << (i - 1);
            const Mask bj = Mask{1} << (n + j - 1);
            const int s = merge_sign(bj, mo) * merge_sign(bi, bj | mo) * merge_sign(bi | bj | mo, mt);
            auto key = std::make_pair(i, j);
            auto it = weights.find(key);
            if (it == weights.end())
                weights.emplace(key, s > 0 ? ct : -ct);
            else if (s > 0)
                it->second += ct;
            else
                it->second -= ct;
        }
        if (weights.empty()) continue;
        const spectral::Spectrum spec(co);
        for (const auto& [key, w] : weights) {
            GridFunction d = spec.mixed(key.first, key.second);
            d *= w;
            acc += d;
        }
    }
    acc *= 1.0 / volume_factor(n);
    return acc;
}

void to_json(nlohmann::json& j, const Form& f) {
    nlohmann::json terms = nlohmann::json::array();
    std::vector<int> I, J;
    for (const auto& [m, c] : f.terms()) {
        monomial_indices(f.n(), m, I, J);
        terms.push_back({{"I", I}, {"J", J}, {"coeff", c}});
    }
    j = nlohmann::json{{"n", f.n()}, {"sizes", f.shape().sizes()}, {"p", f.p()}, {"q", f.q()},
                       {"terms", terms}};
}

Form form_from_json(const nlohmann::json& j) {
    try {
        GridShape shape(j.at("n").get<int>(), j.at("sizes").get<std::vector<int>>());
        Form f(shape, j.at("p").get<int>(), j.at("q").get<int>());
        for (const auto& t : j.at("terms")) {
            GridFunction c = grid_function_from_json(t.at("coeff"));
            if (!(c.shape() == shape)) throw ArgumentError("form coefficient grid differs from the form's grid");
            f.accumulate(monomial_mask(shape.n(), t.at("I").get<std::vector<int>>(),
                                       t.at("J").get<std::vector<int>>()),
                         std::move(c));
        }
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("malformed form JSON: ") + e.what());
    }
}

}  // namespace gauduchon
