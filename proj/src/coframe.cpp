#include "gauduchon/coframe.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <optional>
#include <sstream>

#include "gauduchon/error.hpp"
#include "gauduchon/forms.hpp"

namespace gauduchon::coframe {

// ---------------------------------------------------------------- numbers

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
    const Rational re = re_ * o.re_ - im_ * o.im_;
    const Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = re;
    im_ = im;
    return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
    const Rational norm = o.re_ * o.re_ + o.im_ * o.im_;
    if (norm.numerator() == 0) throw ArgumentError("division by zero in exact arithmetic");
    *this *= o.conj();
    re_ /= norm;
    im_ /= norm;
    return *this;
}

GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

namespace {

std::string rational_string(const Rational& r) {
    std::ostringstream s;
    s << r.numerator();
    if (r.denominator() != 1) s << '/' << r.denominator();
    return s.str();
}

}  // namespace

std::string GaussianRational::to_string() const {
    if (im_.numerator() == 0) return rational_string(re_);
    const std::string imag = (im_ == Rational(1) ? "" : im_ == Rational(-1) ? "-" : rational_string(im_) + "*") + "i";
    if (re_.numerator() == 0) return imag;
    return "(" + rational_string(re_) + (im_ > Rational(0) ? " + " : " - ") +
           (im_ > Rational(0) ? imag : imag.substr(1)) + ")";
}

// ---------------------------------------------------------------- forms

int Layout::dimension() const {
    int n = m();
    for (int o : orders) n += o - 1;
    return n;
}

namespace {

using Mask = std::uint32_t;

CoframeForm monomial_form(const std::shared_ptr<const Layout>& layout, Monomial m) {
    CoframeForm f(layout);
    f.accumulate(m, GaussianRational(1));
    return f;
}

Mask low_bits(int count) { return count >= 32 ? ~Mask{0} : ((Mask{1} << count) - 1); }

}  // namespace

CoframeForm::CoframeForm(std::shared_ptr<const Layout> layout) : layout_(std::move(layout)) {
    if (!layout_) throw ArgumentError("coframe form without a layout");
}

CoframeForm CoframeForm::scalar(std::shared_ptr<const Layout> layout, const GaussianRational& c) {
    CoframeForm f(layout);
    f.accumulate({0, std::vector<int>(layout->formal.size(), 0)}, c);
    return f;
}

CoframeForm CoframeForm::generator(std::shared_ptr<const Layout> layout, int index, bool conjugate) {
    if (index < 0 || index >= layout->m()) throw ArgumentError("generator index out of range");
    const int bit = index + (conjugate ? layout->m() : 0);
    return monomial_form(layout, {Mask{1} << bit, std::vector<int>(layout->formal.size(), 0)});
}

CoframeForm CoframeForm::formal(std::shared_ptr<const Layout> layout, int index) {
    if (index < 0 || index >= static_cast<int>(layout->formal.size()))
        throw ArgumentError("formal generator index out of range");
    std::vector<int> powers(layout->formal.size(), 0);
    powers[static_cast<std::size_t>(index)] = 1;
    return monomial_form(layout, {0, std::move(powers)});
}

GaussianRational CoframeForm::scalar_value() const {
    if (terms_.empty()) return {};
    if (terms_.size() != 1 || terms_.begin()->first.odd != 0) throw ArgumentError("form is not a scalar");
    for (int p : terms_.begin()->first.powers)
        if (p) throw ArgumentError("form is not a scalar");
    return terms_.begin()->second;
}

std::pair<int, int> CoframeForm::bidegree() const {
    if (terms_.empty()) throw ArgumentError("the zero form has no bidegree");
    std::optional<std::pair<int, int>> out;
    const Mask hol = low_bits(layout_->m());
    for (const auto& [m, c] : terms_) {
        int p = std::popcount(m.odd & hol), q = std::popcount(m.odd & ~hol);
        for (int w : m.powers) p += w, q += w;
        if (out && *out != std::pair{p, q}) throw ArgumentError("form is not homogeneous");
        out = std::pair{p, q};
    }
    return *out;
}

int CoframeForm::degree() const {
    const auto [p, q] = bidegree();
    return p + q;
}

void CoframeForm::accumulate(const Monomial& m, const GaussianRational& c) {
    if (m.powers.size() != layout_->formal.size()) throw ArgumentError("monomial does not match the layout");
    for (std::size_t f = 0; f < m.powers.size(); ++f)
        if (m.powers[f] >= layout_->orders[f]) return;  // nilpotent
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

CoframeForm& CoframeForm::operator+=(const CoframeForm& o) {
    for (const auto& [m, c] : o.terms_) accumulate(m, c);
    return *this;
}

CoframeForm& CoframeForm::operator-=(const CoframeForm& o) {
    for (const auto& [m, c] : o.terms_) accumulate(m, -c);
    return *this;
}

CoframeForm& CoframeForm::operator*=(const GaussianRational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

CoframeForm operator+(CoframeForm a, const CoframeForm& b) { return a += b; }
CoframeForm operator-(CoframeForm a, const CoframeForm& b) { return a -= b; }
CoframeForm operator*(const GaussianRational& c, CoframeForm a) { return a *= c; }

CoframeForm wedge(const CoframeForm& a, const CoframeForm& b) {
    CoframeForm out(a.layout());
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) {
            const int sign = merge_sign(ma.odd, mb.odd);
            if (sign == 0) continue;
            Monomial m{ma.odd | mb.odd, ma.powers};
            for (std::size_t f = 0; f < m.powers.size(); ++f) m.powers[f] += mb.powers[f];
            out.accumulate(m, GaussianRational(sign) * ca * cb);
        }
    return out;
}

CoframeForm conj(const CoframeForm& a) {
    const int m = a.layout()->m();
    CoframeForm out(a.layout());
    for (const auto& [mono, c] : a.terms()) {
        // conj(g_1 ∧ ... ∧ g_r) = conj(g_1) ∧ ... ∧ conj(g_r), reordered.
        Mask acc = 0;
        int sign = 1;
        for (int bit = 0; bit < 2 * m; ++bit) {
            if (!((mono.odd >> bit) & 1u)) continue;
            const int target = bit < m ? bit + m : bit - m;
            sign *= merge_sign(acc, Mask{1} << target);
            acc |= Mask{1} << target;
        }
        out.accumulate({acc, mono.powers}, GaussianRational(sign) * c.conj());
    }
    return out;
}

CoframeForm power(const CoframeForm& a, int k) {
    if (k < 0) throw ArgumentError("negative exterior power");
    CoframeForm out = CoframeForm::scalar(a.layout(), 1);
    for (int i = 0; i < k; ++i) out = wedge(out, a);
    return out;
}

namespace {

std::string monomial_string(const Layout& layout, const Monomial& m) {
    std::vector<std::string> factors;
    for (int bit = 0; bit < 2 * layout.m(); ++bit) {
        if (!((m.odd >> bit) & 1u)) continue;
        factors.push_back(bit < layout.m() ? layout.generators[static_cast<std::size_t>(bit)]
                                           : "bar(" + layout.generators[static_cast<std::size_t>(bit - layout.m())] + ")");
    }
    for (std::size_t f = 0; f < m.powers.size(); ++f) {
        if (m.powers[f] == 1) factors.push_back(layout.formal[f]);
        if (m.powers[f] > 1) factors.push_back(layout.formal[f] + "^" + std::to_string(m.powers[f]));
    }
    std::string out;
    for (std::size_t i = 0; i < factors.size(); ++i) out += (i ? "^" : "") + factors[i];
    return out;
}

std::string term_string(const Layout& layout, const Monomial& m, const GaussianRational& c) {
    const std::string mono = monomial_string(layout, m);
    if (mono.empty()) return c.to_string();
    if (c == GaussianRational(1)) return mono;
    if (c == GaussianRational(-1)) return "-" + mono;
    return c.to_string() + "*" + mono;
}

}  // namespace

std::string CoframeForm::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
        std::string t = term_string(*layout_, m, c);
        if (out.empty()) out = t;
        else if (t[0] == '-') out += " - " + t.substr(1);
        else out += " + " + t;
    }
    return out;
}

std::vector<std::string> CoframeForm::monomial_strings() const {
    std::vector<std::string> out;
    for (const auto& [m, c] : terms_) out.push_back(term_string(*layout_, m, c));
    return out;
}

// ---------------------------------------------------------------- parsing

namespace {

struct Token {
    enum Kind { Number, Name, Op, End } kind;
    std::string text;
    std::size_t offset;
};

std::vector<Token> tokenize(std::string_view src, std::size_t base) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char ch = src[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            const std::size_t start = i;
            while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
            out.push_back({Token::Number, std::string(src.substr(start, i - start)), base + start});
        } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            const std::size_t start = i;
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
            out.push_back({Token::Name, std::string(src.substr(start, i - start)), base + start});
        } else if (std::string_view("+-*/^()=:").find(ch) != std::string_view::npos) {
            out.push_back({Token::Op, std::string(1, ch), base + i});
            ++i;
        } else {
            throw ParseError(std::string("unexpected character '") + ch + "'", base + i);
        }
    }
    out.push_back({Token::End, "", base + src.size()});
    return out;
}

Rational exact_decimal(const Token& t) {
    const std::string& s = t.text;
    const auto dot = s.find('.');
    if (s.find('.', dot == std::string::npos ? s.size() : dot + 1) != std::string::npos || s == ".")
        throw ParseError("malformed number '" + s + "'", t.offset);
    const std::string digits = dot == std::string::npos ? s : s.substr(0, dot) + s.substr(dot + 1);
    if (digits.size() > 17) throw ParseError("number '" + s + "' has too many digits for exact arithmetic", t.offset);
    const std::int64_t num = digits.empty() ? 0 : std::stoll(digits);
    std::int64_t den = 1;
    if (dot != std::string::npos)
        for (std::size_t k = dot + 1; k < s.size(); ++k) den *= 10;
    return Rational(num, den);
}

bool is_integer(const Token& t) {
    return t.kind == Token::Number && t.text.find('.') == std::string::npos;
}

class FormParser {
public:
    FormParser(const std::shared_ptr<const Layout>& layout, std::vector<Token> tokens)
        : layout_(layout), tokens_(std::move(tokens)) {}

    CoframeForm parse_all() {
        CoframeForm f = expr();
        if (peek().kind != Token::End) throw ParseError("unexpected '" + peek().text + "'", peek().offset);
        return f;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }
    bool accept(const char* op) {
        if (peek().kind == Token::Op && peek().text == op) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(const char* op) {
        if (!accept(op)) throw ParseError(std::string("expected '") + op + "'", peek().offset);
    }

    CoframeForm expr() {
        CoframeForm out = term();
        while (true) {
            if (accept("+")) out += term();
            else if (accept("-")) out -= term();
            else return out;
        }
    }

    CoframeForm term() {
        CoframeForm out = unary();
        while (true) {
            if (accept("*")) {
                out = wedge(out, unary());
            } else if (accept("^")) {
                if (is_integer(peek())) {
                    const Token& t = next();
                    out = power(out, static_cast<int>(std::stol(t.text)));
                } else {
                    out = wedge(out, unary());
                }
            } else if (peek().kind == Token::Op && peek().text == "/") {
                const std::size_t at = next().offset;
                const CoframeForm d = unary();
                GaussianRational c;
                try {
                    c = d.scalar_value();
                } catch (const ArgumentError&) {
                    throw ParseError("division by a non-scalar form", at);
                }
                if (c.is_zero()) throw ParseError("division by zero", at);
                out *= GaussianRational(1) / c;
            } else {
                return out;
            }
        }
    }

    CoframeForm unary() {
        if (accept("-")) return GaussianRational(-1) * unary();
        if (accept("+")) return unary();
        return atom();
    }

    CoframeForm atom() {
        const Token& t = next();
        if (t.kind == Token::Number) return CoframeForm::scalar(layout_, GaussianRational(exact_decimal(t)));
        if (t.kind == Token::Op && t.text == "(") {
            CoframeForm f = expr();
            expect(")");
            return f;
        }
        if (t.kind == Token::Name) {
            if (t.text == "i") return CoframeForm::scalar(layout_, GaussianRational::i());
            if (t.text == "bar") {
                expect("(");
                CoframeForm f = expr();
                expect(")");
                return conj(f);
            }
            for (int g = 0; g < layout_->m(); ++g)
                if (layout_->generators[static_cast<std::size_t>(g)] == t.text)
                    return CoframeForm::generator(layout_, g, false);
            for (std::size_t f = 0; f < layout_->formal.size(); ++f)
                if (layout_->formal[f] == t.text) return CoframeForm::formal(layout_, static_cast<int>(f));
            throw ParseError("unknown generator '" + t.text + "'", t.offset);
        }
        if (t.kind == Token::End) throw ParseError("unexpected end of input", t.offset);
        throw ParseError("unexpected '" + t.text + "'", t.offset);
    }

    std::shared_ptr<const Layout> layout_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

bool reserved(const std::string& name) { return name == "i" || name == "bar" || name == "del" || name == "delbar"; }

}  // namespace

// ---------------------------------------------------------------- algebra

CoframeAlgebra::CoframeAlgebra(std::vector<std::string> generators,
                               std::vector<std::pair<std::string, int>> formal) {
    auto layout = std::make_shared<Layout>();
    layout->generators = std::move(generators);
    for (auto& [name, order] : formal) {
        if (order < 2) throw ArgumentError("nilpotency order of '" + name + "' must be at least 2");
        layout->formal.push_back(name);
        layout->orders.push_back(order);
    }
    if (2 * layout->m() > 32) throw ArgumentError("at most 16 odd generators are supported");
    std::vector<std::string> all = layout->generators;
    all.insert(all.end(), layout->formal.begin(), layout->formal.end());
    for (std::size_t a = 0; a < all.size(); ++a) {
        if (all[a].empty() || reserved(all[a])) throw ArgumentError("invalid generator name '" + all[a] + "'");
        for (std::size_t b = a + 1; b < all.size(); ++b)
            if (all[a] == all[b]) throw ArgumentError("duplicate generator '" + all[a] + "'");
    }
    layout_ = std::move(layout);
    const CoframeForm zero(layout_);
    del_odd_.assign(static_cast<std::size_t>(2 * layout_->m()), zero);
    delbar_odd_ = del_odd_;
    del_formal_.assign(layout_->formal.size(), zero);
    delbar_formal_ = del_formal_;
    formal_set_.assign(layout_->formal.size(), false);
}

void CoframeAlgebra::set_del(const std::string& name, const CoframeForm& value) { set_entry(name, value, true); }
void CoframeAlgebra::set_delbar(const std::string& name, const CoframeForm& value) { set_entry(name, value, false); }

void CoframeAlgebra::set_entry(const std::string& name, const CoframeForm& value, bool holomorphic) {
    if (value.layout() != layout_) throw ArgumentError("structure equation built over another algebra");
    const std::string op = holomorphic ? "del" : "delbar";
    const auto& gens = layout_->generators;
    const auto& formal = layout_->formal;
    const int m = layout_->m();

    auto check_bidegree = [&](std::pair<int, int> expected) {
        if (value.is_zero()) return;
        std::pair<int, int> got;
        try {
            got = value.bidegree();
        } catch (const ArgumentError&) {
            throw IntegrabilityError(name, op + " is not of pure bidegree");
        }
        if (got != expected)
            throw IntegrabilityError(name, op + " has bidegree (" + std::to_string(got.first) + "," +
                                               std::to_string(got.second) + "), expected (" +
                                               std::to_string(expected.first) + "," + std::to_string(expected.second) +
                                               ")");
    };

    for (int g = 0; g < m; ++g) {
        if (gens[static_cast<std::size_t>(g)] != name) continue;
        check_bidegree(holomorphic ? std::pair{2, 0} : std::pair{1, 1});
        auto& own = holomorphic ? del_odd_ : delbar_odd_;
        auto& mirror = holomorphic ? delbar_odd_ : del_odd_;
        own[static_cast<std::size_t>(g)] = value;
        // ∂̄ φ̄ = conj(∂ φ) and ∂ φ̄ = conj(∂̄ φ).
        mirror[static_cast<std::size_t>(g + m)] = conj(value);
        return;
    }
    for (std::size_t f = 0; f < formal.size(); ++f) {
        if (formal[f] != name) continue;
        check_bidegree(holomorphic ? std::pair{2, 1} : std::pair{1, 2});
        auto& own = holomorphic ? del_formal_ : delbar_formal_;
        auto& mirror = holomorphic ? delbar_formal_ : del_formal_;
        // W is real, so the other half is the conjugate.
        if (formal_set_[f] && !(mirror[f] == conj(value)))
            throw IntegrabilityError(name, "del and delbar entries are not conjugate");
        own[f] = value;
        mirror[f] = conj(value);
        formal_set_[f] = true;
        return;
    }
    throw ArgumentError("unknown generator '" + name + "'");
}

CoframeForm CoframeAlgebra::derive(const CoframeForm& a, bool holomorphic) const {
    const auto& odd_table = holomorphic ? del_odd_ : delbar_odd_;
    const auto& formal_table = holomorphic ? del_formal_ : delbar_formal_;
    CoframeForm out(layout_);
    const std::vector<int> no_powers(layout_->formal.size(), 0);
    for (const auto& [mono, c] : a.terms()) {
        // Odd factors, each with the sign of the degree in front of it.
        int seen = 0;
        for (int bit = 0; bit < 2 * layout_->m(); ++bit) {
            if (!((mono.odd >> bit) & 1u)) continue;
            const CoframeForm& dg = odd_table[static_cast<std::size_t>(bit)];
            if (!dg.is_zero()) {
                const Mask before = mono.odd & low_bits(bit);
                const Mask after = mono.odd & ~low_bits(bit + 1);
                CoframeForm t = wedge(wedge(monomial_form(layout_, {before, no_powers}), dg),
                                      monomial_form(layout_, {after, mono.powers}));
                out += GaussianRational(seen % 2 ? -c : c) * t;
            }
            ++seen;
        }
        // Formal factors are even: d(W^p) = p W^{p-1} dW.
        for (std::size_t f = 0; f < mono.powers.size(); ++f) {
            const int p = mono.powers[f];
            if (p == 0 || formal_table[f].is_zero()) continue;
            std::vector<int> rest = mono.powers;
            --rest[f];
            CoframeForm t = wedge(wedge(monomial_form(layout_, {mono.odd, no_powers}), formal_table[f]),
                                  monomial_form(layout_, {0, rest}));
            out += GaussianRational(seen % 2 ? -p : p) * c * t;
        }
    }
    return out;
}

CoframeForm CoframeAlgebra::del(const CoframeForm& a) const { return derive(a, true); }
CoframeForm CoframeAlgebra::delbar(const CoframeForm& a) const { return derive(a, false); }

CoframeForm CoframeAlgebra::volume() const {
    const GaussianRational half_i(0, Rational(1, 2));
    CoframeForm out = scalar(1);
    for (int g = 0; g < layout_->m(); ++g)
        out = wedge(out, half_i * wedge(CoframeForm::generator(layout_, g, false),
                                        CoframeForm::generator(layout_, g, true)));
    for (std::size_t f = 0; f < layout_->formal.size(); ++f)
        out = wedge(out, power(CoframeForm::formal(layout_, static_cast<int>(f)), layout_->orders[f] - 1));
    return out;
}

CoframeForm CoframeAlgebra::parse_form(std::string_view text) const {
    return FormParser(layout_, tokenize(text, 0)).parse_all();
}

CoframeAlgebra CoframeAlgebra::parse(std::string_view text) {
    struct Line {
        std::vector<Token> tokens;
    };
    std::vector<Line> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tokens = tokenize(line, start);
        if (tokens.size() > 1) lines.push_back({std::move(tokens)});
        start = end + 1;
    }

    std::vector<std::string> generators;
    std::vector<std::pair<std::string, int>> formal;
    std::vector<std::size_t> formal_offsets;
    std::vector<const Line*> equations;
    std::vector<std::pair<Token, int>> relations;

    for (const Line& line : lines) {
        const auto& t = line.tokens;
        if (t[0].kind == Token::Name && (t[0].text == "generators" || t[0].text == "formal")) {
            std::size_t k = 1;
            if (t[k].kind == Token::Op && t[k].text == ":") ++k;
            for (; t[k].kind != Token::End; ++k) {
                if (t[k].kind != Token::Name) throw ParseError("expected a generator name", t[k].offset);
                if (reserved(t[k].text)) throw ParseError("'" + t[k].text + "' is reserved", t[k].offset);
                if (t[0].text == "generators") {
                    generators.push_back(t[k].text);
                } else {
                    formal.emplace_back(t[k].text, 0);
                    formal_offsets.push_back(t[k].offset);
                }
            }
        } else if (t[0].kind == Token::Name && (t[0].text == "del" || t[0].text == "delbar")) {
            equations.push_back(&line);
        } else if (t.size() == 6 && t[0].kind == Token::Name && t[1].text == "^" && is_integer(t[2]) &&
                   t[3].text == "=" && t[4].kind == Token::Number && exact_decimal(t[4]) == Rational(0)) {
            relations.emplace_back(t[0], std::stoi(t[2].text));
        } else {
            throw ParseError("unrecognized statement", t[0].offset);
        }
    }

    for (const auto& [tok, order] : relations) {
        auto it = std::find_if(formal.begin(), formal.end(), [&](const auto& f) { return f.first == tok.text; });
        if (it == formal.end()) throw ParseError("relation on undeclared formal generator '" + tok.text + "'", tok.offset);
        if (order < 2) throw ParseError("nilpotency order must be at least 2", tok.offset);
        it->second = order;
    }
    for (std::size_t f = 0; f < formal.size(); ++f)
        if (formal[f].second == 0)
            throw ParseError("formal generator '" + formal[f].first + "' has no nilpotency relation", formal_offsets[f]);

    CoframeAlgebra alg(std::move(generators), std::move(formal));
    for (const Line* line : equations) {
        const auto& t = line->tokens;
        if (t[1].kind != Token::Name) throw ParseError("expected a generator name", t[1].offset);
        if (!(t[2].kind == Token::Op && t[2].text == "=")) throw ParseError("expected '='", t[2].offset);
        std::vector<Token> rhs(t.begin() + 3, t.end());
        if (rhs.size() == 1) throw ParseError("missing right-hand side", rhs[0].offset);
        CoframeForm value = FormParser(alg.layout_, std::move(rhs)).parse_all();
        try {
            if (t[0].text == "del") alg.set_del(t[1].text, value);
            else alg.set_delbar(t[1].text, value);
        } catch (const ArgumentError& e) {
            throw ParseError(e.what(), t[1].offset);
        }
    }
    return alg;
}

// ---------------------------------------------------------------- checks

bool IntegrabilityReport::ok() const {
    return std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.ok(); });
}

IntegrabilityReport check_integrability(const CoframeAlgebra& alg) {
    const auto& layout = alg.layout();
    IntegrabilityReport out;
    auto check = [&](const std::string& name, const CoframeForm& g) {
        IntegrabilityReport::Entry e;
        e.generator = name;
        e.del_del = alg.del(alg.del(g)).monomial_strings();
        e.delbar_delbar = alg.delbar(alg.delbar(g)).monomial_strings();
        e.anticommutator = (alg.del(alg.delbar(g)) + alg.delbar(alg.del(g))).monomial_strings();
        out.entries.push_back(std::move(e));
    };
    for (int g = 0; g < layout->m(); ++g) {
        const std::string& name = layout->generators[static_cast<std::size_t>(g)];
        check(name, CoframeForm::generator(layout, g, false));
        check("bar(" + name + ")", CoframeForm::generator(layout, g, true));
    }
    for (std::size_t f = 0; f < layout->formal.size(); ++f)
        check(layout->formal[f], CoframeForm::formal(layout, static_cast<int>(f)));
    return out;
}

IntegrabilityReport verify_integrability(const CoframeAlgebra& alg) {
    IntegrabilityReport r = check_integrability(alg);
    for (const auto& e : r.entries) {
        if (e.ok()) continue;
        std::string detail;
        auto add = [&](const char* what, const std::vector<std::string>& terms) {
            if (terms.empty()) return;
            if (!detail.empty()) detail += "; ";
            detail += what;
            detail += " = ";
            for (std::size_t k = 0; k < terms.size(); ++k) detail += (k ? " + " : "") + terms[k];
        };
        add("del del", e.del_del);
        add("delbar delbar", e.delbar_delbar);
        add("del delbar + delbar del", e.anticommutator);
        throw IntegrabilityError(e.generator, detail);
    }
    return r;
}

void to_json(nlohmann::json& j, const IntegrabilityReport& r) {
    j = nlohmann::json::object();
    j["ok"] = r.ok();
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"generator", e.generator},
                           {"del_del", e.del_del},
                           {"delbar_delbar", e.delbar_delbar},
                           {"anticommutator", e.anticommutator}});
    j["generators"] = entries;
}

GaussianRational top_ratio(const CoframeAlgebra& alg, const CoframeForm& top) {
    const CoframeForm vol = alg.volume();
    const auto& [vm, vc] = *vol.terms().begin();
    GaussianRational out;
    for (const auto& [m, c] : top.terms()) {
        if (!(m == vm)) throw NotInvariantError("form is not a multiple of the volume: " + top.to_string());
        out = c / vc;
    }
    return out;
}

namespace {

Rational real_or_throw(const GaussianRational& x, const char* what) {
    if (!x.is_real()) throw NotInvariantError(std::string(what) + " is not real: " + x.to_string());
    return x.re();
}

void check_real_11(const CoframeForm& w, const char* what) {
    if (w.is_zero() || w.bidegree() != std::pair{1, 1})
        throw ArgumentError(std::string(what) + " must be a nonzero (1,1)-form");
    if (!(conj(w) == w)) throw ArgumentError(std::string(what) + " must be real");
}

const GaussianRational kHalfI(0, Rational(1, 2));

}  // namespace

Rational gamma_k_invariant(const CoframeAlgebra& alg, const CoframeForm& omega, int k) {
    const int n = alg.dimension();
    if (k < 1 || k > n - 1) throw ArgumentError("k must lie in 1..n-1");
    check_real_11(omega, "omega");
    const Rational vol = real_or_throw(top_ratio(alg, power(omega, n)), "omega^n");
    if (vol <= Rational(0)) throw ArgumentError("omega^n is not a positive volume");
    const CoframeForm num =
        wedge(kHalfI * alg.del(alg.delbar(power(omega, k))), power(omega, n - k - 1));
    return real_or_throw(top_ratio(alg, num), "gamma") / vol;
}

Rational pluriclosed_obstruction(const CoframeAlgebra& alg, const CoframeForm& omega_test, const CoframeForm& omega0) {
    const int n = alg.dimension();
    if (n < 2) throw ArgumentError("the obstruction needs complex dimension at least 2");
    check_real_11(omega_test, "omega_test");
    check_real_11(omega0, "omega0");
    const CoframeForm top = wedge(kHalfI * alg.del(alg.delbar(omega_test)), power(omega0, n - 2));
    return real_or_throw(top_ratio(alg, top), "obstruction");
}

}  // namespace gauduchon::coframe
