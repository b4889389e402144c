#pragma once

// Numerical verification of the exponential-decay estimates behind the smooth
// structure: derivatives of the gaps T^p - T^q, theta^p - theta^q,
// S^p - S^q (S = log T) and of the double-log chart coordinates, sampled along
// a family of chart points of q moving towards a corner, then fitted
// log-linearly against the claimed decay variable.

#include "cornerlog/chart_transition.hpp"
#include "cornerlog/numeric.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace cornerlog {

class FitDegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Families of estimated quantities.
enum class EstimateFamily {
    log_gap,            // d/dw (X^p - X^q), X in {T_d, T_s, theta}; decay in T of w's node
    angle_mixed,        // d/dw d/dT_s,i0 (theta^p - theta^q)_i0; decay in T_w + T_i0
    s_gap,              // (S^p - S^q) for one node; 1/T decay, i.e. e^{-S}
    s_derivative,       // d/dw (S^p - S^q), w in {S_d, S_s, theta}; decay in S_w + S_target
    offset_derivative,  // d/dw f_i0 with f_i0 = lim (theta^p - theta^q); decay in S_w
    angle_residual,     // d/dw (theta^p - theta^q - f)_i0; decay in S_w + S_i0
    chart_gap           // s^p - s^q, phi^p - e^{i f} phi^q; decay in 1/s or 1/|phi|
};

const char* to_string(EstimateFamily f);
EstimateFamily estimate_family_from_string(const std::string& s);

/// A coordinate of the q chart: a free parameter, the T (or S) of a node, or
/// the angle of an interior node.
struct Var {
    enum class Kind { v, boundary, interior, angle };
    Kind kind;
    std::size_t index;

    bool operator==(const Var&) const = default;
};

std::string to_string(const Var& v, bool use_s);

struct QuantitySpec {
    EstimateFamily family;
    int n = 1;      // the (n-1)-th derivatives of the base quantity enter the norm
    Var target;     // boundary/interior node j0 or i0 (angle i0 for angle families)
    Var wrt;        // derivative variable w (unused by s_gap and chart_gap)

    void validate(const ChartCenter& c) const;
    std::string id() const;
};

enum class FitVerdict { pass, fail, vacuous_pass };
const char* to_string(FitVerdict v);

struct DecayFit {
    std::string id;
    int n = 1;
    std::string abscissa;             // "T", "T-sum", "S-sum", "log-T", "1/s", "1/|phi|"
    std::vector<double> x;            // abscissa per sample, ascending
    std::vector<double> quantity;     // |quantity| per sample (0 = snapped to zero)
    double slope = 0.0;               // -c
    double intercept = 0.0;           // log C
    double r2 = 0.0;
    FitVerdict verdict = FitVerdict::fail;
    double halving_slope = 0.0;       // slope refitted on the grid with half the spacing
    bool stable = true;               // |halving_slope - slope| < 10% |slope|
    std::string note;

    bool passed() const { return verdict != FitVerdict::fail && stable; }
};

struct VerifierOptions {
    std::vector<double> T_grid = default_T_grid();
    std::vector<double> inverse_radius_grid = default_T_grid();  // 1/s, 1/|phi| for chart gaps
    bool move_all_nodes = true;     // sample along the diagonal: every node at the grid value
    double base_T = 8.0;            // T of the nodes that do not move along the family
    double base_theta = 0.5;
    std::vector<double> v;          // free parameters; empty = the center's own
    double c_min = 0.1;
    double r2_min = 0.99;
    double inverse_T_tolerance = 0.1;  // 1/T fit: slope <= -1 + tolerance in log T
    double zero_floor = 1e-280;
    double solve_noise = 1e-100;    // working precision; a node at depth T resolves to solve_noise * e^T
    double T_cap = 60.0;
    bool check_halving = true;

    static std::vector<double> default_T_grid();
};

/// Least-squares line through (x, y); returns slope, intercept, R^2.
struct LineFit {
    double slope, intercept, r2;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

class EstimateVerifier {
public:
    EstimateVerifier(ChartCenter p, ChartCenter q, VerifierOptions opt = {});

    const ChartTransition& transition() const { return tr_; }
    const VerifierOptions& options() const { return opt_; }

    /// Samples and fits one quantity. The s_gap family returns two fits
    /// (1/T decay in log T, and the e^{-S} restatement), all others one.
    std::vector<DecayFit> sample_estimate(const QuantitySpec& spec) const;

    /// The value of the quantity (before the norm over derivative
    /// multi-indices) at one grid value; exposed for tests.
    double quantity_at(const QuantitySpec& spec, double grid_value) const;

    /// All quantity specs that make sense on the center, for n = 1..max_n.
    std::vector<QuantitySpec> default_suite(int max_n) const;

private:
    ChartCenter p_, q_;
    VerifierOptions opt_;
    ChartTransition tr_;
};

struct AngularOffset {
    double value = 0.0;                    // f_i0, wrapped to (-pi, pi]
    std::vector<double> T;                 // sample T_i0
    std::vector<double> raw;               // theta^p - theta^q
    std::vector<double> extrapolated;      // Richardson in e^{-T}
    bool converged = false;
};

/// f_i0 = lim_{T_i0 -> inf} (theta^p_i0 - theta^q_i0) with the other nodes at
/// the base point. Values below 1e-30 are exact zeros (real positive rescales
/// leave theta unchanged).
AngularOffset estimate_angular_offset(const ChartCenter& p, const ChartCenter& q, std::size_t node,
                                      const std::vector<double>& T_grid = VerifierOptions::default_T_grid(),
                                      const VerifierOptions& opt = {}, double tolerance = 1e-9);

/// Checks |phi^p - e^{i f} phi^q| <= e^{-1/(2|phi|)} at every sample with |phi| <= 0.2.
struct ChartGapBound {
    bool holds = true;
    double worst_ratio = 0.0;  // max |gap| / e^{-1/(2|phi|)}
};
ChartGapBound check_chart_gap_bound(const EstimateVerifier& ev, std::size_t node);

/// CSV with columns estimate_id, n, T_or_invphi, quantity, fitted_slope,
/// fitted_intercept, r2, verdict; one row per sample.
void write_csv(std::ostream& os, const std::vector<DecayFit>& fits);

}  // namespace cornerlog
