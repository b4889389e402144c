#pragma once

// Chart transitions between two chart centers p and q whose images overlap.
//
// Given a point of q's chart, the p-chart point with the same normal form is
// found by damped Newton in log unknowns (v_p, T_p, theta_p), seeded with the
// aligned q values. Gluing parameters below e^{-T_cap} are not resolved at the
// working precision; such nodes are solved at T_cap and the offsets
// T_p - T_q and theta_p are carried over unchanged (the neglected variation is
// O(e^{-T_cap})). Unsmoothed nodes stay unsmoothed.

#include "cornerlog/jet_calculus.hpp"
#include "cornerlog/moduli_plumbing.hpp"
#include "cornerlog/numeric.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cornerlog {

class NoOverlapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

struct TransitionOptions {
    double T_cap = 40.0;
    int max_iterations = 50;
    double residual_tolerance = 1e-10;
};

/// A chart point in log coordinates; T = +inf marks an unsmoothed node.
struct LogChartPoint {
    std::vector<mp_real> v;
    std::vector<mp_real> boundary_T;
    std::vector<mp_real> interior_T;
    std::vector<mp_real> interior_theta;
};

struct TransitionSolution {
    std::vector<mp_real> v;               // v_p
    std::vector<mp_real> boundary_delta;  // T_p - T_q per boundary node (0 at unsmoothed nodes)
    std::vector<mp_real> interior_delta;  // T_p - T_q per interior node
    std::vector<mp_real> interior_theta;  // theta_p, unwrapped next to theta_q
    int iterations = 0;
    double residual = 0.0;
};

class ChartTransition {
public:
    ChartTransition(ChartCenter p, ChartCenter q, TransitionOptions opt = {});

    const ChartCenter& p() const { return p_; }
    const ChartCenter& q() const { return q_; }
    const TransitionOptions& options() const { return opt_; }

    /// Solves Psi^p(v_p, .) = Psi^q(q_point); memoized on the capped input.
    TransitionSolution solve(const LogChartPoint& q_point) const;

    /// Full log-coordinate image of q_point.
    LogChartPoint apply(const LogChartPoint& q_point) const;

private:
    ChartCenter p_, q_;
    TransitionOptions opt_;
    mutable std::map<std::vector<mp_real>, TransitionSolution> cache_;
    mutable std::vector<mp_real> last_offset_;  // p unknowns minus aligned q values, last solve
};

enum class Presentation { log, single_log, double_log };

Presentation presentation_from_string(const std::string& s);
const char* to_string(Presentation p);

/// Flat chart vector layout used for smoothness classification:
/// v, then one corner coordinate per boundary node (t or s), then
/// (Re, Im) of rho or phi per interior node.
LogChartPoint log_point_from_flat(const ChartCenter& c, Presentation pres, const std::vector<mp_real>& x);
std::vector<mp_real> flat_from_log_point(const ChartCenter& c, Presentation pres, const LogChartPoint& L);

/// The transition as a map of flat chart vectors in the given presentation.
/// Corner offsets are applied in closed form from T_p - T_q, e.g.
/// s_p = s / (1 + s log1p(delta e^{-1/s})), so that arbitrarily small corner
/// coordinates keep full relative accuracy.
std::vector<mp_real> transition_flat(const ChartTransition& tr, Presentation pres, const std::vector<mp_real>& x_q);

/// Smoothness class of the transition at the corner point of q's chart (every
/// node unsmoothed, free parameters at the center), in the given presentation.
SmoothnessReport classify_transition(const ChartTransition& tr, Presentation pres, int max_order,
                                     SmoothnessOptions opt = {});

/// Double-precision convenience: (v_q, d_q) -> (v_p, d_p).
std::pair<std::vector<double>, DoubleLogCoords> chart_transition(const ChartCenter& p, const ChartCenter& q,
                                                                 const DoubleLogCoords& d_q,
                                                                 const std::vector<double>& v_q,
                                                                 const TransitionOptions& opt = {});

/// Named pairs (p, q) over a built-in model:
///   <model>:identical  q = p
///   <model>:rescale    q multiplies the child-branch coordinate of every node by e
///   <model>:nonlinear  q uses kappa(u) = u (1 + 0.3 u) on both branches of every node
///   <model>:rotate     q multiplies the child-branch coordinate of every interior node by e^{0.7 i}
struct ChartPair {
    std::string name;
    ChartCenter p;
    ChartCenter q;
};

ChartPair builtin_pair(const std::string& name);

}  // namespace cornerlog
