#include "cornerlog/gluing_coords.hpp"

#include <cmath>
#include <string>

namespace cornerlog {

namespace {

void check_cutoff(double c) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("cutoff must satisfy 0 < c < 1, got " + format_real(c));
}

std::string node_name(const char* kind, std::size_t i) { return std::string(kind) + " node " + std::to_string(i); }

}  // namespace

double log_lower_bound(double cutoff) {
    check_cutoff(cutoff);
    return -std::log(cutoff);
}

double single_log_radius(double cutoff) {
    check_cutoff(cutoff);
    return -1.0 / std::log(cutoff);
}

void require_double_log_cutoff(double cutoff) {
    check_cutoff(cutoff);
    if (!(-std::log(cutoff) > 1.0)) {
        throw DomainError("double-log coordinates need c < 1/e so that log(-log c) > 0, got c = " +
                          format_real(cutoff));
    }
}

double double_log_radius(double cutoff) {
    require_double_log_cutoff(cutoff);
    return 1.0 / std::log(-std::log(cutoff));
}

void NodeParams::validate() const {
    check_cutoff(cutoff);
    for (std::size_t j = 0; j < boundary.size(); ++j) {
        const double r = boundary[j];
        if (!(r >= 0.0 && r < cutoff)) {
            throw DomainError(node_name("boundary", j) + ": r = " + format_real(r) + " outside [0, c)");
        }
    }
    for (std::size_t i = 0; i < interior.size(); ++i) {
        if (!(std::abs(interior[i]) < cutoff)) {
            throw DomainError(node_name("interior", i) + ": |sigma| = " + format_real(std::abs(interior[i])) +
                              " outside [0, c)");
        }
    }
}

void LogCoords::validate() const {
    const double lo = log_lower_bound(cutoff);
    for (std::size_t j = 0; j < boundary.size(); ++j) {
        if (!(boundary[j] > lo)) {
            throw DomainError(node_name("boundary", j) + ": T = " + format_real(boundary[j]) + " must exceed -log c");
        }
    }
    for (std::size_t i = 0; i < interior.size(); ++i) {
        const auto& n = interior[i];
        if (!(n.T > lo)) {
            throw DomainError(node_name("interior", i) + ": T = " + format_real(n.T) + " must exceed -log c");
        }
        if (!std::isinf(n.T) && !n.theta) throw DomainError(node_name("interior", i) + ": angle missing");
    }
}

void SingleLogCoords::validate() const {
    const double rad = single_log_radius(cutoff);
    for (std::size_t j = 0; j < boundary.size(); ++j) {
        if (!(boundary[j] >= 0.0 && boundary[j] < rad)) {
            throw DomainError(node_name("boundary", j) + ": t = " + format_real(boundary[j]) + " outside [0, -1/log c)");
        }
    }
    for (std::size_t i = 0; i < interior.size(); ++i) {
        if (!(std::abs(interior[i]) < rad)) {
            throw DomainError(node_name("interior", i) + ": |rho| outside [0, -1/log c)");
        }
    }
}

void DoubleLogCoords::validate() const {
    const double rad = double_log_radius(cutoff);
    for (std::size_t j = 0; j < boundary.size(); ++j) {
        if (!(boundary[j] >= 0.0 && boundary[j] < rad)) {
            throw DomainError(node_name("boundary", j) + ": s = " + format_real(boundary[j]) +
                              " outside [0, 1/log(-log c))");
        }
    }
    for (std::size_t i = 0; i < interior.size(); ++i) {
        if (!(std::abs(interior[i]) < rad)) {
            throw DomainError(node_name("interior", i) + ": |phi| outside [0, 1/log(-log c))");
        }
    }
}

RescaleFactor::RescaleFactor(cplx<double> value) : value_(value) {
    if (!(std::abs(value) > 0.0) || !std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw DomainError("rescale factor must be a finite non-zero complex number");
    }
}

RescaleFactor RescaleFactor::positive(double value) {
    if (!(value > 0.0)) throw DomainError("rescale factor must be positive, got " + format_real(value));
    return RescaleFactor({value, 0.0});
}

double RescaleFactor::log_real() const {
    if (!is_positive_real()) throw DomainError("closed-form rescale maps need a real positive lambda");
    return std::log(value_.real());
}

LogCoords to_log(const NodeParams& p) {
    p.validate();
    LogCoords L;
    L.cutoff = p.cutoff;
    L.boundary.reserve(p.boundary.size());
    for (double r : p.boundary) L.boundary.push_back(log_from_radius(r));
    L.interior.reserve(p.interior.size());
    for (const auto& s : p.interior) {
        InteriorLog n;
        if (s == cplx<double>{}) {
            n.T = infinity<double>();
        } else {
            n.T = -std::log(std::abs(s));
            n.theta = angle_from_sigma(s);
        }
        L.interior.push_back(n);
    }
    return L;
}

NodeParams from_log(const LogCoords& L) {
    L.validate();
    NodeParams p;
    p.cutoff = L.cutoff;
    for (double T : L.boundary) p.boundary.push_back(radius_from_log(T));
    for (const auto& n : L.interior) p.interior.push_back(sigma_from_log(n.T, n.theta.value_or(0.0)));
    return p;
}

SingleLogCoords single_log_from_log(const LogCoords& L) {
    SingleLogCoords c;
    c.cutoff = L.cutoff;
    for (double T : L.boundary) c.boundary.push_back(corner_from_log(T));
    for (const auto& n : L.interior) {
        if (std::isinf(n.T)) {
            c.interior.emplace_back(0.0, 0.0);
        } else {
            c.interior.push_back(std::polar(1.0 / n.T, n.theta.value_or(0.0)));
        }
    }
    return c;
}

LogCoords log_from_single_log(const SingleLogCoords& c) {
    c.validate();
    LogCoords L;
    L.cutoff = c.cutoff;
    for (double t : c.boundary) L.boundary.push_back(log_from_corner(t));
    for (const auto& rho : c.interior) {
        InteriorLog n;
        if (rho == cplx<double>{}) {
            n.T = infinity<double>();
        } else {
            n.T = 1.0 / std::abs(rho);
            n.theta = wrap_angle(std::arg(rho));
        }
        L.interior.push_back(n);
    }
    return L;
}

DoubleLogCoords double_log_from_log(const LogCoords& L) {
    require_double_log_cutoff(L.cutoff);
    DoubleLogCoords d;
    d.cutoff = L.cutoff;
    for (double T : L.boundary) d.boundary.push_back(double_corner_from_log(T));
    for (const auto& n : L.interior) {
        if (std::isinf(n.T)) {
            d.interior.emplace_back(0.0, 0.0);
        } else {
            d.interior.push_back(std::polar(double_corner_from_log(n.T), n.theta.value_or(0.0)));
        }
    }
    return d;
}

LogCoords log_from_double_log(const DoubleLogCoords& d) {
    d.validate();
    LogCoords L;
    L.cutoff = d.cutoff;
    for (double s : d.boundary) L.boundary.push_back(log_from_double_corner(s));
    for (const auto& phi : d.interior) {
        InteriorLog n;
        if (phi == cplx<double>{}) {
            n.T = infinity<double>();
        } else {
            n.T = log_from_double_corner(std::abs(phi));
            n.theta = wrap_angle(std::arg(phi));
        }
        L.interior.push_back(n);
    }
    return L;
}

SingleLogCoords to_single_log(const NodeParams& p) { return single_log_from_log(to_log(p)); }

NodeParams from_single_log(const SingleLogCoords& c) {
    // Skip LogCoords::validate: the single-log range already encodes T > -log c.
    const LogCoords L = log_from_single_log(c);
    NodeParams p;
    p.cutoff = L.cutoff;
    for (double T : L.boundary) p.boundary.push_back(radius_from_log(T));
    for (const auto& n : L.interior) p.interior.push_back(sigma_from_log(n.T, n.theta.value_or(0.0)));
    return p;
}

DoubleLogCoords to_double_log(const NodeParams& p) {
    require_double_log_cutoff(p.cutoff);
    return double_log_from_log(to_log(p));
}

NodeParams from_double_log(const DoubleLogCoords& d) {
    const LogCoords L = log_from_double_log(d);
    NodeParams p;
    p.cutoff = L.cutoff;
    for (double T : L.boundary) p.boundary.push_back(radius_from_log(T));
    for (const auto& n : L.interior) p.interior.push_back(sigma_from_log(n.T, n.theta.value_or(0.0)));
    return p;
}

LogCoords rescale_log(const LogCoords& L, NodeRef node, const RescaleFactor& lambda) {
    LogCoords out = L;
    const double lo = log_lower_bound(L.cutoff);
    if (node.kind == NodeKind::boundary) {
        if (node.index >= out.boundary.size()) throw DomainError("rescale_log: boundary node index out of range");
        const double a = lambda.log_real();
        double& T = out.boundary[node.index];
        if (std::isinf(T)) return out;
        const double Tn = T - a;
        if (!(Tn > lo)) throw RangeError("rescale_log: rescaled T = " + format_real(Tn) + " not above -log c");
        T = Tn;
        return out;
    }
    if (node.index >= out.interior.size()) throw DomainError("rescale_log: interior node index out of range");
    auto& n = out.interior[node.index];
    if (std::isinf(n.T)) return out;
    const double Tn = n.T - std::log(std::abs(lambda.value()));
    if (!(Tn > lo)) throw RangeError("rescale_log: rescaled T = " + format_real(Tn) + " not above -log c");
    n.T = Tn;
    n.theta = wrap_angle(n.theta.value_or(0.0) - std::arg(lambda.value()));
    return out;
}

cplx<double> rescale_single_log(cplx<double> rho, const RescaleFactor& lambda) {
    return rescale_single_log_kernel(rho, lambda.log_real());
}

cplx<double> rescale_double_log(cplx<double> phi, const RescaleFactor& lambda) {
    return rescale_double_log_kernel(phi, lambda.log_real());
}

double rescale_corner(double t, const RescaleFactor& lambda) { return rescale_corner_kernel(t, lambda.log_real()); }

double rescale_corner_double(double s, const RescaleFactor& lambda) {
    return rescale_corner_double_kernel(s, lambda.log_real());
}

}  // namespace cornerlog
