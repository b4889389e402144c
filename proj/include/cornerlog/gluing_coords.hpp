#pragma once

// Gluing-parameter coordinate systems near the corners of the moduli space of
// stable marked disks, and the transition maps induced by rescaling a node's
// gluing parameter.
//
//   raw          r_j in [0,c),  sigma_i in D(c)
//   log          T = -log r,  T = -log|sigma|,  theta = -Im log sigma
//   single-log   t = 1/T,  rho = e^{i theta}/T
//   double-log   s = 1/log T,  phi = e^{i theta}/log T
//
// The convention sigma = exp(-(T + i theta)) is used in every direction.
// T = +inf encodes an unsmoothed node and maps to the exact corner value 0.

#include "cornerlog/numeric.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cornerlog {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

enum class NodeKind { boundary, interior };

inline const char* to_string(NodeKind k) { return k == NodeKind::boundary ? "boundary" : "interior"; }

/// e^{-2}: single-log radius 1/2, double-log radius 1/log 2.
inline const double kDefaultCutoff = std::exp(-2.0);

struct NodeParams {
    std::vector<double> boundary;          // r_j
    std::vector<cplx<double>> interior;    // sigma_i
    double cutoff = kDefaultCutoff;

    void validate() const;
};

struct InteriorLog {
    double T = 0.0;
    std::optional<double> theta;  // undefined at T = +inf
};

struct LogCoords {
    std::vector<double> boundary;          // T^d_j
    std::vector<InteriorLog> interior;     // (T^s_i, theta_i)
    double cutoff = kDefaultCutoff;

    void validate() const;
};

struct SingleLogCoords {
    std::vector<double> boundary;          // t_j
    std::vector<cplx<double>> interior;    // rho_i
    double cutoff = kDefaultCutoff;

    void validate() const;
};

struct DoubleLogCoords {
    std::vector<double> boundary;          // s_j
    std::vector<cplx<double>> interior;    // phi_i
    double cutoff = kDefaultCutoff;

    void validate() const;
};

/// Multiplier applied to a gluing parameter, sigma' = lambda * sigma.
/// Boundary nodes only admit real positive values.
class RescaleFactor {
public:
    explicit RescaleFactor(cplx<double> value);
    static RescaleFactor positive(double value);

    cplx<double> value() const { return value_; }
    bool is_positive_real() const { return value_.imag() == 0.0 && value_.real() > 0.0; }
    /// log lambda, defined only for the positive real case.
    double log_real() const;

private:
    cplx<double> value_;
};

struct NodeRef {
    NodeKind kind;
    std::size_t index;
};

// Ranges of the corner coordinates for a cutoff c.
double log_lower_bound(double cutoff);        // -log c
double single_log_radius(double cutoff);      // -1/log c
double double_log_radius(double cutoff);      // 1/log(-log c), requires c < 1/e
void require_double_log_cutoff(double cutoff);

LogCoords to_log(const NodeParams& p);
NodeParams from_log(const LogCoords& L);
SingleLogCoords to_single_log(const NodeParams& p);
NodeParams from_single_log(const SingleLogCoords& c);
DoubleLogCoords to_double_log(const NodeParams& p);
NodeParams from_double_log(const DoubleLogCoords& d);

SingleLogCoords single_log_from_log(const LogCoords& L);
DoubleLogCoords double_log_from_log(const LogCoords& L);
LogCoords log_from_double_log(const DoubleLogCoords& d);
LogCoords log_from_single_log(const SingleLogCoords& c);

LogCoords rescale_log(const LogCoords& L, NodeRef node, const RescaleFactor& lambda);
cplx<double> rescale_single_log(cplx<double> rho, const RescaleFactor& lambda);
cplx<double> rescale_double_log(cplx<double> phi, const RescaleFactor& lambda);
double rescale_corner(double t, const RescaleFactor& lambda);
double rescale_corner_double(double s, const RescaleFactor& lambda);

// ---------------------------------------------------------------------------
// Scalar kernels, generic over the working type so that multiprecision
// pipelines share the exact same formulas.

template <class R>
R log_from_radius(const R& r) {
    using std::log;
    if (r == 0) return infinity<R>();
    return -log(r);
}

template <class R>
R radius_from_log(const R& T) {
    using std::exp;
    if (is_inf(T)) return R(0);
    return exp(-T);
}

/// sigma = exp(-(T + i theta)).
template <class R>
cplx<R> sigma_from_log(const R& T, const R& theta) {
    using std::cos;
    using std::exp;
    using std::sin;
    if (is_inf(T)) return {R(0), R(0)};
    const R m = exp(-T);
    return {m * cos(theta), -m * sin(theta)};
}

/// theta = -arg sigma in [0, 2pi).
template <class R>
R angle_from_sigma(const cplx<R>& sigma) {
    using std::atan2;
    return wrap_angle<R>(-atan2(sigma.imag(), sigma.real()));
}

template <class R>
R corner_from_log(const R& T) {  // t = 1/T
    if (is_inf(T)) return R(0);
    return 1 / T;
}

template <class R>
R log_from_corner(const R& t) {  // T = 1/t
    if (t == 0) return infinity<R>();
    return 1 / t;
}

template <class R>
R double_corner_from_log(const R& T) {  // s = 1/log T
    using std::log;
    if (is_inf(T)) return R(0);
    return 1 / log(T);
}

template <class R>
R log_from_double_corner(const R& s) {  // T = exp(1/s)
    using std::exp;
    if (s == 0) return infinity<R>();
    return exp(1 / s);
}

/// rho' = rho / (1 - a|rho|), a = log lambda.
template <class R>
cplx<R> rescale_single_log_kernel(const cplx<R>& rho, const R& a) {
    using std::abs;
    const R denom = 1 - a * abs(rho);
    if (!(denom > 0)) throw RangeError("single-log rescale: 1 - log(lambda)|rho| must be positive");
    return rho / denom;
}

/// t' = t / (1 - a t).
template <class R>
R rescale_corner_kernel(const R& t, const R& a) {
    if (t < 0) throw DomainError("corner rescale: t must be non-negative");
    const R denom = 1 - a * t;
    if (!(denom > 0)) throw RangeError("corner rescale: 1 - log(lambda) t must be positive");
    return t / denom;
}

/// Radial factor m / (1 + m log(1 - a e^{-1/m})) shared by the double-log rescales;
/// extended by 0 at m = 0.
template <class R>
R double_log_radial_factor(const R& m, const R& a) {
    using std::exp;
    using std::log1p;
    if (m == 0) return R(0);
    const R inner = -a * exp(-1 / m);
    if (!(inner > -1)) throw RangeError("double-log rescale: 1 - log(lambda) e^{-1/|phi|} must be positive");
    const R denom = 1 + m * log1p(inner);
    if (!(denom > 0)) throw RangeError("double-log rescale: rescaled log T must stay positive");
    return 1 / denom;
}

/// phi' = phi / (1 + |phi| log(1 - a e^{-1/|phi|})).
template <class R>
cplx<R> rescale_double_log_kernel(const cplx<R>& phi, const R& a) {
    using std::abs;
    const R m = abs(phi);
    if (m == 0) return {R(0), R(0)};
    return phi * double_log_radial_factor(m, a);
}

/// s' = s / (1 + s log(1 - a e^{-1/s})).
template <class R>
R rescale_corner_double_kernel(const R& s, const R& a) {
    if (s < 0) throw DomainError("corner double-log rescale: s must be non-negative");
    if (s == 0) return R(0);
    return s * double_log_radial_factor(s, a);
}

}  // namespace cornerlog
