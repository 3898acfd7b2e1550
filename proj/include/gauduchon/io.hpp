#pragma once

// File formats of the command-line front end.
//
// Metric spec:
//   {"n": 3, "sizes": [1, 1, 1, 1, 32, 1],
//    "entries": {"(1,1)": "1 + 0.8660254*sin(x3)", "(2,2)": {...grid function...},
//                "(1,2)": {"re": "0.1*cos(x3)", "im": "0"}},
//    "options": {...solver options...}}
// Entry (j,i) defaults to the conjugate of (i,j); absent pairs are zero.
//
// Scalar fields (entries, f, rho, B components) are a number, an expression
// string, {"re": ..., "im": ...} of those, or inline grid function JSON.

#include <string>

#include <json.hpp>

#include "gauduchon/grid.hpp"
#include "gauduchon/metric.hpp"

namespace gauduchon::io {

std::string read_text_file(const std::string& path);
// ArgumentError on a missing file or malformed JSON.
nlohmann::json read_json_file(const std::string& path);

GridShape shape_from_json(const nlohmann::json& j);

// An expression reading a dimension of size 1 is rejected.
GridFunction field_from_json(const nlohmann::json& v, const GridShape& shape);
GridFunction field_from_expression(const std::string& src, const GridShape& shape);

struct MetricSpec {
    HermitianMetric metric;
    nlohmann::json options;  // empty object when absent
};

MetricSpec metric_spec_from_json(const nlohmann::json& j);
MetricSpec load_metric_spec(const std::string& path);

// {"hol": [n fields], "anti": [n fields]}; "anti" defaults to the conjugates,
// giving a real 1-form.
OneFormPair one_form_spec_from_json(const nlohmann::json& j, const GridShape& shape);

}  // namespace gauduchon::io
