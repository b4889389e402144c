#pragma once

// The cornerlog command line: convert, classify, plumb, transition,
// verify-decay. Exit codes: 0 success, 2 input or domain error, 3 verdict
// differs from --expect, 4 a decay estimate failed.

#include "cornerlog/chart_transition.hpp"
#include "cornerlog/jet_calculus.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cornerlog {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitExpect = 3;
inline constexpr int kExitDecay = 4;

/// Smoothness class at the origin (or corner point) of a named map:
/// single-log-rescale, double-log-rescale, corner-rescale,
/// corner-double-rescale, or transition:<pair file or built-in pair>.
SmoothnessReport classify_named_map(const std::string& map, cplx<double> lambda, int max_order,
                                    Presentation pres = Presentation::double_log);

/// True when the report satisfies an --expect value: "smooth",
/// "C-infinity", "finitely-smooth", or an exact label such as "C1-not-C2".
bool report_matches(const SmoothnessReport& r, const std::string& expect);

/// Runs the command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cornerlog
