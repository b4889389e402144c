#pragma once

// JSON input/output for trees, chart centers, chart pairs and results.
// Field names are documented in docs/schema.md.

#include "cornerlog/chart_transition.hpp"
#include "cornerlog/estimate_verifier.hpp"
#include "cornerlog/jet_calculus.hpp"
#include "cornerlog/moduli_plumbing.hpp"

#include <json.hpp>

#include <string>

namespace cornerlog {

using Json = nlohmann::ordered_json;

/// Input that does not follow the schema; the message names the field
/// (JSON pointer) or the line and column of a syntax error.
class SchemaError : public DomainError {
public:
    using DomainError::DomainError;
};

Json read_json_file(const std::string& path);

/// A complex number is either a JSON number or [re, im].
cplx<double> complex_from_json(const Json& j, const std::string& where);
Json to_json(const cplx<double>& z);

/// Parses "x", "x+yi", "x-yi", "yi" or "(x,y)".
cplx<double> parse_complex(const std::string& s);

ChartCenter center_from_json(const Json& j);
Json to_json(const ChartCenter& c);

/// A center file, or the name of a built-in center.
ChartCenter load_center(const std::string& file_or_builtin);

ChartPair pair_from_json(const Json& j);
/// A pair file, or a built-in pair name such as "mixed-2-2:rescale".
ChartPair load_pair(const std::string& file_or_builtin);

Json to_json(const ModuliCoords<double>& m);
Json to_json(const Configuration<double>& c);
Json to_json(const SmoothnessReport& r);
Json to_json(const DecayFit& f);
Json to_json(const AngularOffset& a);

}  // namespace cornerlog
