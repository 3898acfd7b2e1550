#include "gauduchon/expression.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gauduchon/error.hpp"

namespace gauduchon {

class ExpressionParser {
public:
    ExpressionParser(Expression& e) : e_(e), s_(e.source_) {}

    int run() {
        const int root = sum();
        skip();
        if (pos_ < s_.size()) throw ParseError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
        return root;
    }

private:
    using Kind = Expression::Kind;

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int add(Kind kind, std::size_t offset, std::vector<int> args = {}, double value = 0.0, int dim = -1) {
        e_.nodes_.push_back({kind, value, dim, offset, std::move(args)});
        return static_cast<int>(e_.nodes_.size()) - 1;
    }

    int sum() {
        int left = product();
        while (true) {
            skip();
            const std::size_t at = pos_;
            if (accept('+')) left = add(Kind::Add, at, {left, product()});
            else if (accept('-')) left = add(Kind::Sub, at, {left, product()});
            else return left;
        }
    }

    int product() {
        int left = unary();
        while (true) {
            skip();
            const std::size_t at = pos_;
            if (accept('*')) left = add(Kind::Mul, at, {left, unary()});
            else if (accept('/')) left = add(Kind::Div, at, {left, unary()});
            else return left;
        }
    }

    int unary() {
        skip();
        const std::size_t at = pos_;
        if (accept('-')) return add(Kind::Neg, at, {unary()});
        return power();
    }

    int power() {
        const int base = atom();
        skip();
        const std::size_t at = pos_;
        if (accept('^')) return add(Kind::Pow, at, {base, unary()});
        return base;
    }

    int atom() {
        skip();
        const std::size_t at = pos_;
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            const int inner = sum();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name(s_.substr(at, pos_ - at));
            skip();
            if (pos_ < s_.size() && s_[pos_] == '(') return call(name, at);
            if (name == "pi") return add(Kind::Number, at, {}, std::numbers::pi);
            return variable(name, at);
        }
        throw ParseError("unexpected '" + std::string(1, c) + "'", at);
    }

    int number() {
        const std::size_t at = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
            if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
                pos_ = q;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        double value = 0.0;
        const auto [end, ec] = std::from_chars(s_.data() + at, s_.data() + pos_, value);
        if (ec != std::errc() || end != s_.data() + pos_)
            throw ParseError("malformed number '" + std::string(s_.substr(at, pos_ - at)) + "'", at);
        return add(Kind::Number, at, {}, value);
    }

    int variable(const std::string& name, std::size_t at) {
        if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y')) {
            const std::string digits = name.substr(1);
            int j = 0;
            const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), j);
            if (ec == std::errc() && end == digits.data() + digits.size() && digits[0] != '0') {
                if (j < 1 || j > e_.n_) throw ParseError("unknown variable " + name, at);
                return add(Kind::Variable, at, {}, 0.0, 2 * (j - 1) + (name[0] == 'y' ? 1 : 0));
            }
        }
        throw ParseError("unknown variable " + name, at);
    }

    int call(const std::string& name, std::size_t at) {
        Kind kind;
        if (name == "sin") kind = Kind::Sin;
        else if (name == "cos") kind = Kind::Cos;
        else if (name == "exp") kind = Kind::Exp;
        else if (name == "log") kind = Kind::Log;
        else throw ParseError("unknown function " + name, at);
        accept('(');
        skip();
        if (pos_ < s_.size() && s_[pos_] == ')') throw ParseError(name + " takes exactly 1 argument, got 0", at);
        const int arg = sum();
        if (accept(',')) throw ParseError(name + " takes exactly 1 argument", at);
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return add(kind, at, {arg});
    }

    Expression& e_;
    std::string_view s_;
    std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view src, int n) {
    if (n < 1) throw ArgumentError("complex dimension must be at least 1");
    Expression e;
    e.source_ = std::string(src);
    e.n_ = n;
    ExpressionParser p(e);
    e.root_ = p.run();
    return e;
}

double Expression::eval(int node, std::span<const double> x, std::size_t point) const {
    const Node& nd = nodes_[static_cast<std::size_t>(node)];
    auto arg = [&](std::size_t i) { return eval(nd.args[i], x, point); };
    switch (nd.kind) {
    case Kind::Number: return nd.value;
    case Kind::Variable: return x[static_cast<std::size_t>(nd.dim)];
    case Kind::Neg: return -arg(0);
    case Kind::Add: return arg(0) + arg(1);
    case Kind::Sub: return arg(0) - arg(1);
    case Kind::Mul: return arg(0) * arg(1);
    case Kind::Div: {
        const double a = arg(0), b = arg(1);
        if (b == 0.0) throw EvaluationError("division by zero", nd.offset, point);
        return a / b;
    }
    case Kind::Pow: {
        const double r = std::pow(arg(0), arg(1));
        if (!std::isfinite(r)) throw EvaluationError("power is not a finite real number", nd.offset, point);
        return r;
    }
    case Kind::Sin: return std::sin(arg(0));
    case Kind::Cos: return std::cos(arg(0));
    case Kind::Exp: {
        const double r = std::exp(arg(0));
        if (!std::isfinite(r)) throw EvaluationError("exp overflows", nd.offset, point);
        return r;
    }
    case Kind::Log: {
        const double a = arg(0);
        if (!(a > 0.0)) throw EvaluationError("log of a nonpositive number", nd.offset, point);
        return std::log(a);
    }
    }
    return 0.0;
}

double Expression::evaluate(std::span<const double> coords) const {
    if (coords.size() != static_cast<std::size_t>(2 * n_)) throw ArgumentError("expected 2n coordinates");
    return eval(root_, coords, 0);
}

GridFunction Expression::evaluate(const GridShape& shape) const {
    if (shape.n() != n_) throw ArgumentError("expression and grid have different dimensions");
    std::vector<double> values(shape.points());
    std::vector<double> x(static_cast<std::size_t>(shape.dims()));
    for (std::size_t p = 0; p < shape.points(); ++p) {
        shape.coordinates(p, x);
        values[p] = eval(root_, x, p);
    }
    return GridFunction::from_real(shape, values);
}

std::uint32_t Expression::dimensions() const {
    std::uint32_t mask = 0;
    for (const Node& nd : nodes_)
        if (nd.kind == Kind::Variable) mask |= 1u << nd.dim;
    return mask;
}

std::string Expression::tree() const { return tree(root_); }

std::string Expression::tree(int node) const {
    static const char* names[] = {"Number", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow", "Sin", "Cos", "Exp", "Log"};
    const Node& nd = nodes_[static_cast<std::size_t>(node)];
    if (nd.kind == Kind::Number) {
        std::ostringstream s;
        s << nd.value;
        return s.str();
    }
    if (nd.kind == Kind::Variable)
        return std::string("Var ") + (nd.dim % 2 ? 'y' : 'x') + std::to_string(nd.dim / 2 + 1);
    std::string out = std::string(names[static_cast<int>(nd.kind)]) + "(";
    for (std::size_t i = 0; i < nd.args.size(); ++i) out += (i ? ", " : "") + tree(nd.args[i]);
    return out + ")";
}

}  // namespace gauduchon
