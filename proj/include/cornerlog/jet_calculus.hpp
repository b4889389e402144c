#pragma once

// Corner-aware numerical differentiation.
//
// Derivatives are taken along lines through a point, one side at a time:
// n-th order one-sided divided differences over the step ladder
// h0, h0/2, ..., h0/2^L are combined by Richardson extrapolation (the error
// expansion of a one-sided difference contains every power of h). The entry
// of the tableau whose two neighbours agree best is returned, and that spread
// is the error estimate.
//
// Smoothness is classified by comparing the two one-sided jets across the
// point on every sampled line. Corner variables only admit the + side; for
// those the jet has to exist (the tableau has to settle) instead.

#include "cornerlog/gluing_coords.hpp"
#include "cornerlog/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cornerlog {

enum class Side { plus, minus };

class EvaluationDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Ladder {
    double initial_step = 1e-2;  // fraction of the chart radius
    double chart_radius = 1.0;
    int halvings = 6;

    double h0() const { return initial_step * chart_radius; }
};

template <class R>
struct JetEstimate {
    int order = 0;
    std::vector<R> direction;
    R value{0};
    R step{0};
    R error_estimate{0};
    Side side = Side::plus;
    bool converged = true;
};

enum class VarKind { corner, planar_re, planar_im, free };

/// Point of the local model [0,inf)^a x C^b x R^c. A planar complex variable
/// occupies two consecutive slots (planar_re, planar_im).
template <class R>
struct CornerPoint {
    std::vector<R> coords;
    std::vector<VarKind> kinds;

    void validate() const {
        if (coords.size() != kinds.size()) throw DomainError("corner point: coordinate/kind size mismatch");
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            if (kinds[k] == VarKind::corner && coords[k] < 0) {
                throw DomainError("corner point: corner variable " + std::to_string(k) + " is negative");
            }
            if (kinds[k] == VarKind::planar_re && (k + 1 >= kinds.size() || kinds[k + 1] != VarKind::planar_im)) {
                throw DomainError("corner point: planar variable without imaginary slot");
            }
        }
    }

    bool at_corner(std::size_t k) const { return kinds[k] == VarKind::corner && coords[k] == 0; }
};

template <class R>
using VectorMap = std::function<std::vector<R>(const std::vector<R>&)>;

template <class R>
using LineMap = std::function<std::vector<R>(const R&)>;

// ---------------------------------------------------------------------------

namespace detail {

inline double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

}  // namespace detail

/// Samples a line map on the grid side * m * h_finest and memoizes the values,
/// so every order and every ladder level reuses the same evaluations.
template <class R>
class LineSampler {
public:
    LineSampler(LineMap<R> g, const Ladder& ladder) : g_(std::move(g)), ladder_(ladder) {
        h_finest_ = R(ladder.h0());
        for (int l = 0; l < ladder.halvings; ++l) h_finest_ /= 2;
    }

    const Ladder& ladder() const { return ladder_; }

    R step(int level) const {
        R h(ladder_.h0());
        for (int l = 0; l < level; ++l) h /= 2;
        return h;
    }

    const std::vector<R>& at(Side side, long multiple) {
        const long key = side == Side::plus ? multiple : -multiple;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const R x = h_finest_ * R(key);
        std::vector<R> v;
        try {
            v = g_(x);
        } catch (const DomainError& e) {
            throw EvaluationDomainError(std::string("stencil left the domain: ") + e.what());
        } catch (const RangeError& e) {
            throw EvaluationDomainError(std::string("stencil left the domain: ") + e.what());
        }
        return cache_.emplace(key, std::move(v)).first->second;
    }

private:
    LineMap<R> g_;
    Ladder ladder_;
    R h_finest_;
    std::map<long, std::vector<R>> cache_;
};

/// n-th one-sided derivative of component `comp` of a sampled line map at 0.
template <class R>
JetEstimate<R> one_sided_jet(LineSampler<R>& sampler, std::size_t comp, int n, Side side,
                             double convergence_tol = 1e-3) {
    using std::abs;
    if (n < 0 || n > 8) throw DomainError("one-sided derivative: order must be in [0, 8]");
    JetEstimate<R> out;
    out.order = n;
    out.side = side;
    if (n == 0) {
        out.value = sampler.at(side, 0).at(comp);
        out.step = sampler.step(0);
        return out;
    }
    const int L = sampler.ladder().halvings;
    const R sgn = side == Side::plus ? R(1) : R(-1);
    std::vector<std::vector<R>> tab(L + 1);
    for (int l = 0; l <= L; ++l) {
        const R h = sampler.step(l);
        const long stride = 1L << (L - l);
        R acc(0);
        for (int k = 0; k <= n; ++k) {
            const double c = detail::binomial(n, k) * (((n - k) % 2 == 0) ? 1.0 : -1.0);
            acc += R(c) * sampler.at(side, k * stride).at(comp);
        }
        R scale(1);
        for (int k = 0; k < n; ++k) scale *= sgn * h;
        tab[l].push_back(acc / scale);
        R factor(1);
        for (int m = 1; m <= l; ++m) {
            factor *= 2;
            tab[l].push_back((factor * tab[l][m - 1] - tab[l - 1][m - 1]) / (factor - 1));
        }
    }
    bool have = false;
    for (int l = 1; l <= L; ++l) {
        for (int m = 1; m <= l; ++m) {
            const R e1 = abs(tab[l][m] - tab[l][m - 1]);
            const R e2 = abs(tab[l][m] - tab[l - 1][m - 1]);
            const R err = e1 > e2 ? e1 : e2;
            if (!is_finite(err) || !is_finite(tab[l][m])) continue;
            if (!have || err < out.error_estimate) {
                have = true;
                out.value = tab[l][m];
                out.error_estimate = err;
                out.step = sampler.step(l);
            }
        }
    }
    if (L == 0) {
        have = is_finite(tab[0][0]);
        out.value = tab[0][0];
        out.error_estimate = 0;
        out.step = sampler.step(0);
    }
    if (!have) throw InstabilityError("one-sided derivative: Richardson tableau has no finite entry");
    const R scale = abs(out.value) > 1 ? abs(out.value) : R(1);
    out.converged = out.error_estimate <= R(convergence_tol) * scale;
    return out;
}

/// Scalar convenience: n-th one-sided derivative of g at 0 along the real line.
template <class R>
JetEstimate<R> one_sided_derivative(const std::function<R(const R&)>& g, int n, Side side, const Ladder& ladder) {
    LineSampler<R> sampler([&g](const R& x) { return std::vector<R>{g(x)}; }, ladder);
    auto j = one_sided_jet(sampler, 0, n, side);
    j.direction = {R(1)};
    return j;
}

/// n-th one-sided derivative of component `comp` of f at x0 along dir.
template <class R>
JetEstimate<R> one_sided_derivative(const VectorMap<R>& f, const CornerPoint<R>& x0, const std::vector<R>& dir,
                                    int n, Side side, const Ladder& ladder, std::size_t comp = 0) {
    x0.validate();
    if (dir.size() != x0.coords.size()) throw DomainError("one-sided derivative: direction has wrong dimension");
    for (std::size_t k = 0; k < dir.size(); ++k) {
        if (x0.at_corner(k)) {
            const R eff = side == Side::plus ? dir[k] : -dir[k];
            if (eff < 0) throw EvaluationDomainError("one-sided derivative: stencil leaves the corner");
        }
    }
    LineSampler<R> sampler(
        [&](const R& x) {
            std::vector<R> p = x0.coords;
            for (std::size_t k = 0; k < p.size(); ++k) p[k] += x * dir[k];
            return f(p);
        },
        ladder);
    auto j = one_sided_jet(sampler, comp, n, side);
    j.direction = dir;
    return j;
}

// ---------------------------------------------------------------------------
// Smoothness classification

struct SmoothnessOptions {
    Ladder ladder;
    double mismatch_factor = 10.0;    // jump must exceed this multiple of the combined error estimates
    double abs_tolerance = 1e-6;      // ... and this absolute floor
    double rel_tolerance = 1e-6;      // ... plus this fraction of the jet size
    double convergence_tolerance = 1e-3;
    int great_circle_pairs = 4;
};

struct JetComparison {
    std::size_t direction = 0;
    std::size_t component = 0;
    int order = 0;
    double plus = 0.0;
    double minus = 0.0;
    double error_plus = 0.0;
    double error_minus = 0.0;
    double jump = 0.0;
    bool one_sided = false;
    bool certified_failure = false;
};

enum class Verdict { finitely_smooth, consistent_with_smooth };

struct SmoothnessReport {
    Verdict verdict = Verdict::consistent_with_smooth;
    int max_verified_order = 0;  // k of C^k-not-C^{k+1}, or the checked order
    int checked_order = 0;
    std::vector<std::vector<double>> directions;
    std::vector<JetComparison> evidence;
    SmoothnessOptions options;
    std::string failure;  // human-readable reason at the failing order

    /// "C1-not-C2" or "consistent-with-C-infinity-up-to-order-N".
    std::string label() const {
        if (verdict == Verdict::finitely_smooth) {
            return "C" + std::to_string(max_verified_order) + "-not-C" + std::to_string(max_verified_order + 1);
        }
        return "consistent-with-C-infinity-up-to-order-" + std::to_string(checked_order);
    }

    /// Largest jump at the given order over the sampled lines, measured as the
    /// Euclidean norm of the jump vector across output components.
    double jump_at(int order) const {
        std::map<std::size_t, double> sq;
        for (const auto& e : evidence) {
            if (e.order == order && !e.one_sided) sq[e.direction] += e.jump * e.jump;
        }
        double j = 0.0;
        for (const auto& [d, s] : sq) j = std::max(j, std::sqrt(s));
        return j;
    }
};

/// Directions sampled through x0: for each planar variable 8 rays (4 lines),
/// each free variable and each interior corner variable its axis, each active
/// corner variable its inward axis (one-sided), plus a few great-circle lines
/// mixing all two-sided variables.
template <class R>
std::vector<std::pair<std::vector<double>, bool>> sample_directions(const CornerPoint<R>& x0, int great_circle_pairs) {
    const std::size_t d = x0.coords.size();
    std::vector<std::pair<std::vector<double>, bool>> dirs;  // (direction, two_sided)
    const double pi_d = pi<double>();
    std::vector<std::size_t> two_sided;
    for (std::size_t k = 0; k < d; ++k) {
        switch (x0.kinds[k]) {
            case VarKind::planar_re:
                for (int r = 0; r < 4; ++r) {
                    std::vector<double> v(d, 0.0);
                    v[k] = std::cos(r * pi_d / 4);
                    v[k + 1] = std::sin(r * pi_d / 4);
                    dirs.emplace_back(v, true);
                }
                two_sided.push_back(k);
                two_sided.push_back(k + 1);
                break;
            case VarKind::planar_im:
                break;
            case VarKind::free: {
                std::vector<double> v(d, 0.0);
                v[k] = 1.0;
                dirs.emplace_back(v, true);
                two_sided.push_back(k);
                break;
            }
            case VarKind::corner: {
                std::vector<double> v(d, 0.0);
                v[k] = 1.0;
                const bool active = x0.at_corner(k);
                dirs.emplace_back(v, !active);
                if (!active) two_sided.push_back(k);
                break;
            }
        }
    }
    if (two_sided.size() >= 2) {
        for (int g = 0; g < great_circle_pairs; ++g) {
            std::vector<double> v(d, 0.0);
            double norm = 0.0;
            for (std::size_t m = 0; m < two_sided.size(); ++m) {
                const double angle = pi_d / 8 + g * pi_d / 4 + m * pi_d / 3;
                const double c = (m % 2 == 0) ? std::cos(angle) : std::sin(angle - m * pi_d / 3 + (m - 1) * pi_d / 3);
                v[two_sided[m]] = c;
                norm += c * c;
            }
            if (norm == 0.0) continue;
            for (double& c : v) c /= std::sqrt(norm);
            dirs.emplace_back(v, true);
        }
    }
    return dirs;
}

template <class R>
SmoothnessReport classify_smoothness(const VectorMap<R>& f, const CornerPoint<R>& x0, int max_order,
                                     const SmoothnessOptions& opt = {}) {
    using std::abs;
    x0.validate();
    if (max_order < 0 || max_order > 6) throw DomainError("classify_smoothness: max_order must be in [0, 6]");
    SmoothnessReport rep;
    rep.options = opt;
    rep.checked_order = max_order;
    const auto dirs = sample_directions(x0, opt.great_circle_pairs);
    int first_failure = max_order + 1;
    for (std::size_t di = 0; di < dirs.size(); ++di) {
        const auto& [dir, two_sided] = dirs[di];
        rep.directions.push_back(dir);
        LineSampler<R> sampler(
            [&](const R& x) {
                std::vector<R> p = x0.coords;
                for (std::size_t k = 0; k < p.size(); ++k) p[k] += x * R(dir[k]);
                return f(p);
            },
            opt.ladder);
        const std::size_t ncomp = sampler.at(Side::plus, 0).size();
        for (std::size_t c = 0; c < ncomp; ++c) {
            for (int n = 0; n <= max_order; ++n) {
                JetComparison cmp;
                cmp.direction = di;
                cmp.component = c;
                cmp.order = n;
                cmp.one_sided = !two_sided;
                JetEstimate<R> jp;
                try {
                    jp = one_sided_jet(sampler, c, n, Side::plus, opt.convergence_tolerance);
                } catch (const InstabilityError&) {
                    cmp.certified_failure = true;
                    rep.evidence.push_back(cmp);
                    first_failure = std::min(first_failure, n);
                    continue;
                }
                cmp.plus = to_double(jp.value);
                cmp.error_plus = to_double(jp.error_estimate);
                if (two_sided) {
                    JetEstimate<R> jm;
                    try {
                        jm = one_sided_jet(sampler, c, n, Side::minus, opt.convergence_tolerance);
                    } catch (const InstabilityError&) {
                        cmp.certified_failure = true;
                        rep.evidence.push_back(cmp);
                        first_failure = std::min(first_failure, n);
                        continue;
                    }
                    cmp.minus = to_double(jm.value);
                    cmp.error_minus = to_double(jm.error_estimate);
                    const R jump = jp.value - jm.value;
                    cmp.jump = to_double(jump);
                    const R combined = jp.error_estimate + jm.error_estimate;
                    const R size = abs(jp.value) > abs(jm.value) ? abs(jp.value) : abs(jm.value);
                    const R floor = R(opt.abs_tolerance) + R(opt.rel_tolerance) * size;
                    cmp.certified_failure = abs(jump) > R(opt.mismatch_factor) * combined && abs(jump) > floor;
                } else {
                    cmp.minus = cmp.plus;
                    cmp.certified_failure = !jp.converged;
                }
                if (cmp.certified_failure) first_failure = std::min(first_failure, n);
                rep.evidence.push_back(cmp);
            }
        }
    }
    if (first_failure <= max_order) {
        rep.verdict = Verdict::finitely_smooth;
        rep.max_verified_order = first_failure - 1;
        for (const auto& e : rep.evidence) {
            if (e.order == first_failure && e.certified_failure) {
                rep.failure = e.one_sided ? "one-sided jet does not settle" : "one-sided jets disagree across the point";
                break;
            }
        }
    } else {
        rep.verdict = Verdict::consistent_with_smooth;
        rep.max_verified_order = max_order;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Flatness: superpolynomial smallness of a correction term near 0.

struct FlatnessResult {
    bool flat = true;
    int failed_order = -1;
    std::vector<double> radii;
    std::vector<double> max_abs;                 // max |g| on each sampled circle
    std::vector<std::vector<double>> ratios;     // [n][k] = max_abs[k] / radii[k]^n
    std::vector<double> fitted_constant;         // C_n (ratio at the largest radius)
};

template <class R>
FlatnessResult flatness_test(const std::function<cplx<R>(const cplx<R>&)>& g, int N, const std::vector<double>& radii,
                             int samples_per_circle = 16) {
    using std::abs;
    if (radii.empty()) throw DomainError("flatness_test: no radii");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0)) throw DomainError("flatness_test: radii must be positive");
        if (k > 0 && !(radii[k] < radii[k - 1])) throw DomainError("flatness_test: radii must decrease");
    }
    FlatnessResult res;
    res.radii = radii;
    const double g0 = to_double(abs(g(cplx<R>(R(0), R(0)))));
    for (double r : radii) {
        R best(0);
        for (int a = 0; a < samples_per_circle; ++a) {
            const R ang = two_pi<R>() * R(a) / R(samples_per_circle);
            using std::cos;
            using std::sin;
            const cplx<R> z(R(r) * cos(ang), R(r) * sin(ang));
            const R m = abs(g(z));
            if (m > best) best = m;
        }
        res.max_abs.push_back(to_double(best));
    }
    res.ratios.assign(N + 1, {});
    res.fitted_constant.assign(N + 1, 0.0);
    if (g0 > 1e-300) {
        res.flat = false;
        res.failed_order = 0;
    }
    for (int n = 0; n <= N; ++n) {
        for (std::size_t k = 0; k < radii.size(); ++k) res.ratios[n].push_back(res.max_abs[k] / std::pow(radii[k], n));
        const double C = res.ratios[n].front();
        res.fitted_constant[n] = C;
        bool ok = true;
        for (double q : res.ratios[n]) ok = ok && q <= C * (1.0 + 1e-9);
        if (!ok && res.flat) {
            res.flat = false;
            res.failed_order = n;
        }
    }
    return res;
}

}  // namespace cornerlog
