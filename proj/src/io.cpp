#include "gauduchon/io.hpp"

#include <bit>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include "gauduchon/error.hpp"
#include "gauduchon/expression.hpp"

namespace gauduchon::io {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json read_json_file(const std::string& path) {
    try {
        return nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ArgumentError("'" + path + "' is not valid JSON: " + e.what());
    }
}

GridShape shape_from_json(const nlohmann::json& j) {
    try {
        return GridShape(j.at("n").get<int>(), j.at("sizes").get<std::vector<int>>());
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("grid needs \"n\" and \"sizes\": ") + e.what());
    }
}

GridFunction field_from_expression(const std::string& src, const GridShape& shape) {
    const Expression e = Expression::parse(src, shape.n());
    const std::uint32_t flat = e.dimensions() & ~shape.active_mask();
    if (flat) {
        const int d = std::countr_zero(flat);
        throw ArgumentError("expression '" + src + "' reads " + (d % 2 ? "y" : "x") + std::to_string(d / 2 + 1) +
                            ", which has a single grid point");
    }
    return e.evaluate(shape);
}

GridFunction field_from_json(const nlohmann::json& v, const GridShape& shape) {
    if (v.is_number()) return GridFunction::constant(shape, v.get<double>());
    if (v.is_string()) return field_from_expression(v.get<std::string>(), shape);
    if (v.is_object() && v.contains("re") && !v.contains("sizes")) {
        for (const auto& [key, value] : v.items())
            if (key != "re" && key != "im") throw ArgumentError("unknown field key '" + key + "'");
        GridFunction out = field_from_json(v.at("re"), shape);
        if (v.contains("im")) out += cplx{0.0, 1.0} * field_from_json(v.at("im"), shape);
        return out;
    }
    if (v.is_object()) {
        GridFunction u = grid_function_from_json(v);
        if (!(u.shape() == shape)) throw ArgumentError("inline grid function lives on a different grid");
        return u;
    }
    throw ArgumentError("a field is a number, an expression string, {\"re\",\"im\"} or grid function JSON");
}

MetricSpec metric_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ArgumentError("metric spec must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (key != "n" && key != "sizes" && key != "entries" && key != "options")
            throw ArgumentError("unknown metric spec key '" + key + "'");
    const GridShape shape = shape_from_json(j);
    const int n = shape.n();
    if (!j.contains("entries") || !j["entries"].is_object()) throw ArgumentError("metric spec needs \"entries\"");

    static const std::regex key_re(R"(\(\s*(\d+)\s*,\s*(\d+)\s*\))");
    std::vector<std::vector<std::optional<GridFunction>>> g(static_cast<std::size_t>(n),
                                                           std::vector<std::optional<GridFunction>>(static_cast<std::size_t>(n)));
    for (const auto& [key, value] : j["entries"].items()) {
        std::smatch m;
        if (!std::regex_match(key, m, key_re)) throw ArgumentError("entry key '" + key + "' is not of the form (i,j)");
        const int i = std::stoi(m[1]), k = std::stoi(m[2]);
        if (i < 1 || i > n || k < 1 || k > n) throw ArgumentError("entry " + key + " out of range");
        auto& slot = g[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)];
        if (slot) throw ArgumentError("entry " + key + " given twice");
        try {
            slot = field_from_json(value, shape);
        } catch (const ParseError& e) {
            throw ParseError("entry " + key + ": " + e.detail(), e.offset());
        }
    }
    std::vector<std::vector<GridFunction>> table(static_cast<std::size_t>(n),
                                                 std::vector<GridFunction>(static_cast<std::size_t>(n), GridFunction::zero(shape)));
    for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = 0; b < g.size(); ++b) {
            if (g[a][b]) table[a][b] = *g[a][b];
            else if (g[b][a]) table[a][b] = g[b][a]->conj();
        }
    MetricSpec out{HermitianMetric(Form::hermitian(shape, table)), nlohmann::json::object()};
    if (j.contains("options")) {
        if (!j["options"].is_object()) throw ArgumentError("\"options\" must be an object");
        out.options = j["options"];
    }
    return out;
}

MetricSpec load_metric_spec(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    try {
        return metric_spec_from_json(j);
    } catch (const ArgumentError& e) {
        throw ArgumentError(path + ": " + e.what());
    }
}

OneFormPair one_form_spec_from_json(const nlohmann::json& j, const GridShape& shape) {
    if (!j.is_object() || !j.contains("hol")) throw ArgumentError("1-form spec needs \"hol\"");
    for (const auto& [key, value] : j.items())
        if (key != "hol" && key != "anti") throw ArgumentError("unknown 1-form key '" + key + "'");
    const auto n = static_cast<std::size_t>(shape.n());
    if (!j["hol"].is_array() || j["hol"].size() != n)
        throw ArgumentError("\"hol\" needs " + std::to_string(n) + " components");
    OneFormPair out;
    for (const auto& c : j["hol"]) out.hol.push_back(field_from_json(c, shape));
    if (j.contains("anti")) {
        if (!j["anti"].is_array() || j["anti"].size() != n)
            throw ArgumentError("\"anti\" needs " + std::to_string(n) + " components");
        for (const auto& c : j["anti"]) out.anti.push_back(field_from_json(c, shape));
    } else {
        for (const auto& h : out.hol) out.anti.push_back(h.conj());
    }
    return out;
}

}  // namespace gauduchon::io
