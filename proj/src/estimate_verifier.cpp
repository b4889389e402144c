#include "cornerlog/estimate_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>

namespace cornerlog {

namespace {

using Point = std::vector<mp_real>;
using Field = std::function<std::vector<mp_real>(const Point&)>;

constexpr double kFarT = 1e6;  // stands in for T = inf when extracting f; capped by the solve

bool is_s_space(EstimateFamily f) {
    return f == EstimateFamily::s_derivative || f == EstimateFamily::offset_derivative ||
           f == EstimateFamily::angle_residual || f == EstimateFamily::chart_gap;
}

// Layout of a point: v, boundary nodes, interior nodes, interior angles.
struct Layout {
    std::size_t nv, nb, ni;

    std::size_t slot(const Var& x) const {
        switch (x.kind) {
            case Var::Kind::v: return x.index;
            case Var::Kind::boundary: return nv + x.index;
            case Var::Kind::interior: return nv + nb + x.index;
            case Var::Kind::angle: return nv + nb + ni + x.index;
        }
        return 0;
    }
    std::size_t size() const { return nv + nb + 2 * ni; }
};

Layout layout_of(const ChartCenter& c) {
    return {c.free_dimension(), c.tree.boundary_node_count(), c.tree.interior_node_count()};
}

// The node a variable belongs to, as a Var of kind boundary/interior.
Var node_of(const Var& w) {
    if (w.kind == Var::Kind::angle) return {Var::Kind::interior, w.index};
    return w;
}

// 4-point central difference, O(h^4)
std::vector<mp_real> central(const Field& g, const Point& x, std::size_t k, const mp_real& h) {
    auto at = [&](int m) {
        Point y = x;
        y[k] += m * h;
        return g(y);
    };
    const auto p1 = at(1), m1 = at(-1), p2 = at(2), m2 = at(-2);
    std::vector<mp_real> out(p1.size());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = (8 * (p1[c] - m1[c]) - (p2[c] - m2[c])) / (12 * h);
    return out;
}

// Mixed partial along the listed slots (nested central differences).
std::vector<mp_real> partial(const Field& g, const Point& x, const std::vector<std::size_t>& slots, const mp_real& h) {
    if (slots.empty()) return g(x);
    const std::size_t k = slots.front();
    const std::vector<std::size_t> rest(slots.begin() + 1, slots.end());
    const Field inner = [&](const Point& y) { return partial(g, y, rest, h); };
    return central(inner, x, k, h);
}

// Multisets of size m over `vars`, with their multinomial multiplicities.
void multisets(const std::vector<std::size_t>& vars, std::size_t m, std::size_t from, std::vector<std::size_t>& cur,
               std::vector<std::pair<std::vector<std::size_t>, double>>& out) {
    if (cur.size() == m) {
        double mult = std::tgamma(static_cast<double>(m) + 1);
        for (std::size_t a = 0; a < cur.size();) {
            std::size_t b = a;
            while (b < cur.size() && cur[b] == cur[a]) ++b;
            mult /= std::tgamma(static_cast<double>(b - a) + 1);
            a = b;
        }
        out.emplace_back(cur, mult);
        return;
    }
    for (std::size_t k = from; k < vars.size(); ++k) {
        cur.push_back(vars[k]);
        multisets(vars, m, k, cur, out);
        cur.pop_back();
    }
}

double mean(const std::vector<double>& a) { return std::accumulate(a.begin(), a.end(), 0.0) / a.size(); }

std::vector<double> halved(const std::vector<double>& g) {
    std::vector<double> out;
    for (std::size_t k = 0; k < g.size(); ++k) {
        out.push_back(g[k]);
        if (k + 1 < g.size()) out.push_back(0.5 * (g[k] + g[k + 1]));
    }
    return out;
}

}  // namespace

const char* to_string(EstimateFamily f) {
    switch (f) {
        case EstimateFamily::log_gap: return "log-gap";
        case EstimateFamily::angle_mixed: return "angle-mixed";
        case EstimateFamily::s_gap: return "s-gap";
        case EstimateFamily::s_derivative: return "s-derivative";
        case EstimateFamily::offset_derivative: return "offset-derivative";
        case EstimateFamily::angle_residual: return "angle-residual";
        case EstimateFamily::chart_gap: return "chart-gap";
    }
    return "?";
}

EstimateFamily estimate_family_from_string(const std::string& s) {
    for (auto f : {EstimateFamily::log_gap, EstimateFamily::angle_mixed, EstimateFamily::s_gap,
                   EstimateFamily::s_derivative, EstimateFamily::offset_derivative, EstimateFamily::angle_residual,
                   EstimateFamily::chart_gap}) {
        if (s == to_string(f)) return f;
    }
    throw DomainError("unknown estimate family '" + s + "'");
}

std::string to_string(const Var& v, bool use_s) {
    const std::string i = std::to_string(v.index);
    switch (v.kind) {
        case Var::Kind::v: return "v" + i;
        case Var::Kind::boundary: return (use_s ? "Sd" : "Td") + i;
        case Var::Kind::interior: return (use_s ? "Ss" : "Ts") + i;
        case Var::Kind::angle: return "theta" + i;
    }
    return "?";
}

const char* to_string(FitVerdict v) {
    switch (v) {
        case FitVerdict::pass: return "pass";
        case FitVerdict::fail: return "fail";
        case FitVerdict::vacuous_pass: return "vacuous-pass";
    }
    return "?";
}

void QuantitySpec::validate(const ChartCenter& c) const {
    if (n < 1 || n > 4) throw DomainError("estimate: derivative order n must be in 1..4");
    const std::size_t nb = c.tree.boundary_node_count(), ni = c.tree.interior_node_count();
    auto check = [&](const Var& x, const char* what) {
        const bool ok = (x.kind == Var::Kind::v && x.index < c.free_dimension()) ||
                        (x.kind == Var::Kind::boundary && x.index < nb) ||
                        ((x.kind == Var::Kind::interior || x.kind == Var::Kind::angle) && x.index < ni);
        if (!ok) throw DomainError(std::string("estimate: ") + what + " index out of range for the chart");
    };
    check(target, "target");
    const bool angle_target = family == EstimateFamily::angle_mixed || family == EstimateFamily::offset_derivative ||
                              family == EstimateFamily::angle_residual;
    if (angle_target && target.kind != Var::Kind::angle) {
        throw DomainError("estimate: angle families need an interior-angle target");
    }
    if (!angle_target && target.kind != Var::Kind::boundary && target.kind != Var::Kind::interior &&
        !(family == EstimateFamily::log_gap && target.kind == Var::Kind::angle)) {
        throw DomainError("estimate: target must be a node");
    }
    if (family == EstimateFamily::s_gap || family == EstimateFamily::chart_gap) return;
    check(wrt, "derivative variable");
    if (wrt.kind == Var::Kind::v) throw DomainError("estimate: the derivative variable must be a node coordinate");
    if (family == EstimateFamily::offset_derivative && node_of(wrt) == node_of(target)) {
        throw DomainError("estimate: f does not depend on its own node");
    }
}

std::string QuantitySpec::id() const {
    const bool s = is_s_space(family) || family == EstimateFamily::s_gap;
    std::string out = std::string(to_string(family)) + "[" + to_string(target, s);
    if (family != EstimateFamily::s_gap && family != EstimateFamily::chart_gap) out += "/d" + to_string(wrt, s);
    return out + "]";
}

std::vector<double> VerifierOptions::default_T_grid() {
    std::vector<double> g;
    for (int k = 0; k <= 14; ++k) g.push_back(5.0 + 2.5 * k);
    return g;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw FitDegenerateError("fit: need at least two samples");
    const double mx = mean(x), my = mean(y);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0) throw FitDegenerateError("fit: abscissa is constant");
    const double slope = sxy / sxx;
    const double r2 = syy == 0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    return {slope, my - slope * mx, r2};
}

// ---------------------------------------------------------------------------

EstimateVerifier::EstimateVerifier(ChartCenter p, ChartCenter q, VerifierOptions opt)
    : p_(std::move(p)), q_(std::move(q)), opt_(std::move(opt)), tr_(p_, q_, TransitionOptions{opt_.T_cap, 50, 1e-10}) {
    if (opt_.v.empty()) {
        for (const auto& x : q_.center_v()) opt_.v.push_back(x);
    }
    if (opt_.v.size() != q_.free_dimension()) throw DomainError("estimate: v has the wrong dimension");
    if (opt_.T_grid.size() < 3 || opt_.inverse_radius_grid.size() < 3) {
        throw DomainError("estimate: grids need at least three points");
    }
    if (!std::is_sorted(opt_.T_grid.begin(), opt_.T_grid.end()) ||
        !std::is_sorted(opt_.inverse_radius_grid.begin(), opt_.inverse_radius_grid.end())) {
        throw DomainError("estimate: grids must be ascending");
    }
    const double lo = -std::log(q_.cutoff);
    if (!(opt_.T_grid.front() > lo) || !(opt_.base_T > lo)) throw DomainError("estimate: grid leaves the chart");
    if (!(opt_.T_grid.back() < opt_.T_cap)) throw DomainError("estimate: T grid must stay below T_cap");
}

namespace {

struct Evaluator {
    const ChartTransition& tr;
    Layout L;
    bool s_space;

    LogChartPoint log_point(const Point& x) const {
        LogChartPoint P;
        P.v.assign(x.begin(), x.begin() + L.nv);
        for (std::size_t j = 0; j < L.nb; ++j) {
            const auto& a = x[L.nv + j];
            P.boundary_T.push_back(s_space ? mp_real(exp(a)) : a);
        }
        for (std::size_t i = 0; i < L.ni; ++i) {
            const auto& a = x[L.nv + L.nb + i];
            P.interior_T.push_back(s_space ? mp_real(exp(a)) : a);
            P.interior_theta.push_back(x[L.nv + L.nb + L.ni + i]);
        }
        return P;
    }

    mp_real angle_gap(const LogChartPoint& P, std::size_t i) const {
        return tr.solve(P).interior_theta[i] - P.interior_theta[i];
    }

    mp_real offset(LogChartPoint P, std::size_t i) const {
        P.interior_T[i] = mp_real(kFarT);
        return angle_gap(P, i);
    }
};

}  // namespace

double EstimateVerifier::quantity_at(const QuantitySpec& spec, double g) const {
    spec.validate(q_);
    const Layout L = layout_of(q_);
    const bool s_space = is_s_space(spec.family);
    const Evaluator ev{tr_, L, s_space};
    const auto fam = spec.family;

    // base quantity as a vector of real components
    const Field base = [&](const Point& x) -> std::vector<mp_real> {
        const auto P = ev.log_point(x);
        const std::size_t t = spec.target.index;
        switch (fam) {
            case EstimateFamily::log_gap: {
                const auto sol = tr_.solve(P);
                if (spec.target.kind == Var::Kind::boundary) return {sol.boundary_delta[t]};
                if (spec.target.kind == Var::Kind::interior) return {sol.interior_delta[t]};
                return {sol.interior_theta[t] - P.interior_theta[t]};
            }
            case EstimateFamily::angle_mixed: return {ev.angle_gap(P, t)};
            case EstimateFamily::s_gap:
            case EstimateFamily::s_derivative: {
                const auto sol = tr_.solve(P);
                const bool b = spec.target.kind == Var::Kind::boundary;
                const mp_real& T = b ? P.boundary_T[t] : P.interior_T[t];
                const mp_real& d = b ? sol.boundary_delta[t] : sol.interior_delta[t];
                return {mp_real(log1p(d / T))};
            }
            case EstimateFamily::offset_derivative: return {ev.offset(P, t)};
            case EstimateFamily::angle_residual: return {ev.angle_gap(P, t) - ev.offset(P, t)};
            case EstimateFamily::chart_gap: {
                const auto sol = tr_.solve(P);
                if (spec.target.kind == Var::Kind::boundary) {
                    const mp_real S = x[L.nv + t];
                    const mp_real Sp = S + log1p(sol.boundary_delta[t] / P.boundary_T[t]);
                    return {mp_real(1 / Sp - 1 / S)};
                }
                const mp_real S = x[L.nv + L.nb + t];
                const mp_real Sp = S + log1p(sol.interior_delta[t] / P.interior_T[t]);
                const mp_real f = ev.offset(P, t);
                const mp_real thp = sol.interior_theta[t];
                const mp_real thq = P.interior_theta[t] + f;
                return {mp_real(cos(thp) / Sp - cos(thq) / S), mp_real(sin(thp) / Sp - sin(thq) / S)};
            }
        }
        return {};
    };

    // sample point: nodes in the decay variable move with g, the rest stay at the base point
    Point x(L.size());
    for (std::size_t k = 0; k < L.nv; ++k) x[k] = mp_real(opt_.v[k]);
    const mp_real baseA = s_space ? mp_real(log(mp_real(opt_.base_T))) : mp_real(opt_.base_T);
    for (std::size_t k = L.nv; k < L.nv + L.nb + L.ni; ++k) x[k] = baseA;
    for (std::size_t k = L.nv + L.nb + L.ni; k < L.size(); ++k) x[k] = mp_real(opt_.base_theta);
    const mp_real moved = fam == EstimateFamily::chart_gap ? mp_real(g) : (s_space ? mp_real(log(mp_real(g))) : mp_real(g));
    std::vector<Var> movers;
    switch (fam) {
        case EstimateFamily::log_gap:
        case EstimateFamily::offset_derivative: movers = {node_of(spec.wrt)}; break;
        case EstimateFamily::s_gap:
        case EstimateFamily::chart_gap: movers = {node_of(spec.target)}; break;
        default: movers = {node_of(spec.wrt), node_of(spec.target)}; break;
    }
    if (opt_.move_all_nodes) {
        for (std::size_t k = L.nv; k < L.nv + L.nb + L.ni; ++k) x[k] = moved;
    } else {
        for (const auto& m : movers) x[L.slot(m)] = moved;
    }

    // the derivative slots of the base quantity and the variables of the norm
    std::vector<std::size_t> slots;
    if (fam != EstimateFamily::s_gap && fam != EstimateFamily::chart_gap) slots.push_back(L.slot(spec.wrt));
    if (fam == EstimateFamily::angle_mixed) slots.push_back(L.slot(Var{Var::Kind::interior, spec.target.index}));
    std::vector<std::size_t> grad_vars;
    const std::size_t nvars = fam == EstimateFamily::s_gap ? L.nv : L.size();
    for (std::size_t k = 0; k < nvars; ++k) grad_vars.push_back(k);
    if (spec.n > 1 && grad_vars.empty()) return 0.0;

    std::vector<std::pair<std::vector<std::size_t>, double>> idx;
    std::vector<std::size_t> cur;
    multisets(grad_vars, static_cast<std::size_t>(spec.n - 1), 0, cur, idx);
    // a node at depth T is resolved to about solve_noise * e^T
    double T_eff = 0;
    for (std::size_t k = L.nv; k < L.nv + L.nb + L.ni; ++k) {
        const double a = to_double(x[k]);
        T_eff = std::max(T_eff, s_space ? std::exp(std::min(a, 50.0)) : a);
    }
    const bool uses_offset = fam == EstimateFamily::offset_derivative || fam == EstimateFamily::angle_residual ||
                             (fam == EstimateFamily::chart_gap && spec.target.kind == Var::Kind::interior);
    if (uses_offset) T_eff = opt_.T_cap;
    const double eps = opt_.solve_noise * std::exp(std::min(T_eff, opt_.T_cap));
    const int depth = static_cast<int>(slots.size()) + spec.n - 1;
    const mp_real h = depth == 0 ? mp_real(0) : mp_real(std::pow(eps, 1.0 / (depth + 4)));
    mp_real sum(0);
    for (const auto& [m, mult] : idx) {
        std::vector<std::size_t> all = slots;
        all.insert(all.end(), m.begin(), m.end());
        for (const auto& c : partial(base, x, all, h)) sum += mult * c * c;
    }
    const double q = to_double(sqrt(sum));
    // below the differencing noise the quantity is indistinguishable from 0
    const double noise = depth == 0 ? eps : eps / std::pow(to_double(h), depth);
    return q <= std::max(opt_.zero_floor, 1e3 * noise) ? 0.0 : q;
}

std::vector<DecayFit> EstimateVerifier::sample_estimate(const QuantitySpec& spec) const {
    spec.validate(q_);
    const auto fam = spec.family;
    const auto& grid = fam == EstimateFamily::chart_gap ? opt_.inverse_radius_grid : opt_.T_grid;

    auto sample = [&](const std::vector<double>& gr) {
        std::vector<double> q;
        for (double g : gr) q.push_back(quantity_at(spec, g));
        return q;
    };
    const auto q = sample(grid);
    std::vector<double> qh, grid_h;
    if (opt_.check_halving) {
        grid_h = halved(grid);
        qh = sample(grid_h);
    }

    // abscissa of a grid value for the given decay variable
    auto exponent_nodes = [&]() -> int {
        switch (fam) {
            case EstimateFamily::log_gap:
            case EstimateFamily::offset_derivative:
            case EstimateFamily::s_gap:
            case EstimateFamily::chart_gap: return 1;
            default: return 2;
        }
    }();
    struct Criterion {
        std::string abscissa;
        std::function<double(double)> x;
        double max_slope;
        std::string suffix;
    };
    std::vector<std::vector<Criterion>> plans;  // each inner list: alternatives, first passing wins
    const double k = exponent_nodes;
    const std::string sum = exponent_nodes == 1 ? "" : "-sum";
    switch (fam) {
        case EstimateFamily::log_gap:
        case EstimateFamily::angle_mixed:
            plans.push_back({{"T" + sum, [k](double g) { return k * g; }, -opt_.c_min, ""}});
            break;
        case EstimateFamily::s_gap:
            // exponential decay in T is stronger than either claim (no net rescale)
            plans.push_back({{"log-T", [](double g) { return std::log(g); }, -1.0 + opt_.inverse_T_tolerance, "/inverse-T"},
                             {"T", [](double g) { return g; }, -opt_.c_min, "/inverse-T"}});
            plans.push_back({{"S", [](double g) { return std::log(g); }, -opt_.c_min, "/exp-S"},
                             {"T", [](double g) { return g; }, -opt_.c_min, "/exp-S"}});
            break;
        case EstimateFamily::s_derivative:
        case EstimateFamily::offset_derivative:
        case EstimateFamily::angle_residual:
            // the claimed e^{-c S} bound; decay e^{-c T} is stronger since T > S
            plans.push_back({{"S" + sum, [k](double g) { return k * std::log(g); }, -opt_.c_min, ""},
                             {"T" + sum, [k](double g) { return k * g; }, -opt_.c_min, ""}});
            break;
        case EstimateFamily::chart_gap:
            plans.push_back({{spec.target.kind == Var::Kind::boundary ? "1/s" : "1/|phi|", [](double g) { return g; },
                              -opt_.c_min, ""}});
            break;
    }

    auto fit_samples = [&](const Criterion& c, const std::vector<double>& gr, const std::vector<double>& qq,
                           DecayFit& out) {
        std::vector<double> xs, ys;
        for (std::size_t m = 0; m < gr.size(); ++m) {
            if (qq[m] > 0) {
                xs.push_back(c.x(gr[m]));
                ys.push_back(std::log(qq[m]));
            }
        }
        if (xs.empty()) return FitVerdict::vacuous_pass;
        if (xs.size() < 3) {
            out.note = "quantity is below the noise level at all but " + std::to_string(xs.size()) + " samples";
            return FitVerdict::vacuous_pass;
        }
        const auto lf = fit_line(xs, ys);
        out.slope = lf.slope;
        out.intercept = lf.intercept;
        out.r2 = lf.r2;
        return lf.slope <= c.max_slope && lf.r2 >= opt_.r2_min ? FitVerdict::pass : FitVerdict::fail;
    };

    std::vector<DecayFit> fits;
    for (const auto& alternatives : plans) {
        DecayFit best;
        for (std::size_t a = 0; a < alternatives.size(); ++a) {
            const auto& c = alternatives[a];
            DecayFit f;
            f.id = spec.id() + c.suffix;
            f.n = spec.n;
            f.abscissa = c.abscissa;
            for (double g : grid) f.x.push_back(c.x(g));
            f.quantity = q;
            f.verdict = fit_samples(c, grid, q, f);
            if (opt_.check_halving && f.verdict == FitVerdict::pass) {
                DecayFit h;
                fit_samples(c, grid_h, qh, h);
                f.halving_slope = h.slope;
                f.stable = std::abs(h.slope - f.slope) < 0.1 * std::abs(f.slope);
            } else {
                f.halving_slope = f.slope;
            }
            if (a == 0 || f.passed()) best = f;
            if (f.passed()) break;
        }
        fits.push_back(std::move(best));
    }
    return fits;
}

std::vector<QuantitySpec> EstimateVerifier::default_suite(int max_n) const {
    const std::size_t nb = q_.tree.boundary_node_count(), ni = q_.tree.interior_node_count();
    std::vector<Var> nodes, derivs;
    for (std::size_t j = 0; j < nb; ++j) nodes.push_back({Var::Kind::boundary, j});
    for (std::size_t i = 0; i < ni; ++i) nodes.push_back({Var::Kind::interior, i});
    derivs = nodes;
    for (std::size_t i = 0; i < ni; ++i) derivs.push_back({Var::Kind::angle, i});
    std::vector<QuantitySpec> out;
    for (int n = 1; n <= max_n; ++n) {
        for (const auto& t : derivs) {
            for (const auto& w : derivs) out.push_back({EstimateFamily::log_gap, n, t, w});
        }
        for (std::size_t i0 = 0; i0 < ni; ++i0) {
            for (const auto& w : derivs) out.push_back({EstimateFamily::angle_mixed, n, {Var::Kind::angle, i0}, w});
        }
        if (n == 1 || q_.free_dimension() > 0) {
            for (const auto& t : nodes) out.push_back({EstimateFamily::s_gap, n, t, t});
        }
        for (const auto& t : nodes) {
            for (const auto& w : derivs) out.push_back({EstimateFamily::s_derivative, n, t, w});
        }
        for (std::size_t i0 = 0; i0 < ni; ++i0) {
            const Var a{Var::Kind::angle, i0};
            for (const auto& w : derivs) {
                if (!(node_of(w) == node_of(a))) out.push_back({EstimateFamily::offset_derivative, n, a, w});
            }
            for (const auto& w : derivs) out.push_back({EstimateFamily::angle_residual, n, a, w});
        }
        for (const auto& t : nodes) out.push_back({EstimateFamily::chart_gap, n, t, t});
    }
    return out;
}

// ---------------------------------------------------------------------------

AngularOffset estimate_angular_offset(const ChartCenter& p, const ChartCenter& q, std::size_t node,
                                      const std::vector<double>& T_grid, const VerifierOptions& opt,
                                      double tolerance) {
    const std::size_t ni = q.tree.interior_node_count();
    if (node >= ni) throw DomainError("angular offset: interior node index out of range");
    if (T_grid.size() < 3) throw DomainError("angular offset: need at least three grid points");
    ChartTransition tr(p, q, TransitionOptions{opt.T_cap, 50, 1e-10});
    LogChartPoint P;
    const auto v = opt.v.empty() ? q.center_v() : opt.v;
    for (double x : v) P.v.emplace_back(x);
    P.boundary_T.assign(q.tree.boundary_node_count(), mp_real(opt.base_T));
    P.interior_T.assign(ni, mp_real(opt.base_T));
    P.interior_theta.assign(ni, mp_real(opt.base_theta));

    AngularOffset out;
    std::vector<mp_real> raw;
    for (double T : T_grid) {
        P.interior_T[node] = mp_real(T);
        raw.push_back(tr.solve(P).interior_theta[node] - P.interior_theta[node]);
        out.T.push_back(T);
        out.raw.push_back(to_double(raw.back()));
    }
    // x(T) = f + b e^{-T} + ...: eliminate b between neighbours
    std::vector<mp_real> ext;
    for (std::size_t k = 0; k + 1 < raw.size(); ++k) {
        const mp_real r = exp(mp_real(T_grid[k] - T_grid[k + 1]));
        ext.push_back((raw[k + 1] - r * raw[k]) / (1 - r));
        out.extrapolated.push_back(to_double(ext.back()));
    }
    const std::size_t m = ext.size();
    out.converged = m >= 2 && abs(ext[m - 1] - ext[m - 2]) < tolerance && abs(ext[m - 1] - raw.back()) < tolerance;
    mp_real f = ext.back();
    if (abs(f) < mp_real("1e-30")) f = 0;
    out.value = to_double(wrap_angle(f));
    return out;
}

ChartGapBound check_chart_gap_bound(const EstimateVerifier& ev, std::size_t node) {
    ChartGapBound out;
    const QuantitySpec spec{EstimateFamily::chart_gap, 1, {Var::Kind::interior, node}, {Var::Kind::interior, node}};
    for (double g : ev.options().inverse_radius_grid) {
        if (g < 5.0) continue;  // |phi| <= 0.2
        const double gap = ev.quantity_at(spec, g);
        const double ratio = gap / std::exp(-0.5 * g);
        out.worst_ratio = std::max(out.worst_ratio, ratio);
        if (!(ratio <= 1.0)) out.holds = false;
    }
    return out;
}

void write_csv(std::ostream& os, const std::vector<DecayFit>& fits) {
    os << "estimate_id,n,T_or_invphi,quantity,fitted_slope,fitted_intercept,r2,verdict\n";
    for (const auto& f : fits) {
        const char* verdict = f.passed() ? to_string(f.verdict) : "fail";
        for (std::size_t k = 0; k < f.x.size(); ++k) {
            os << f.id << ',' << f.n << ',' << format_real(f.x[k]) << ',' << format_real(f.quantity[k]) << ','
               << format_real(f.slope) << ',' << format_real(f.intercept) << ',' << format_real(f.r2) << ',' << verdict
               << '\n';
        }
    }
}

}  // namespace cornerlog
