#include "cornerlog/chart_transition.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cmath>

namespace cornerlog {

namespace {

using Vec = Eigen::Matrix<mp_real, Eigen::Dynamic, 1>;
using Mat = Eigen::Matrix<mp_real, Eigen::Dynamic, Eigen::Dynamic>;

mp_real inf_norm(const Vec& x) {
    mp_real m(0);
    for (Eigen::Index k = 0; k < x.size(); ++k) m = std::max(m, mp_real(abs(x[k])));
    return m;
}

std::vector<mp_real> normal_form(const ChartCenter& c, const std::vector<mp_real>& v, const std::vector<mp_real>& bT,
                                 const std::vector<mp_real>& iT, const std::vector<mp_real>& ith, std::string* type) {
    const auto mc = chart_map<mp_real>(c, v, gluing_from_log(bT, iT, ith));
    if (type) *type = mc.type;
    return mc.flatten();
}

}  // namespace

ChartTransition::ChartTransition(ChartCenter p, ChartCenter q, TransitionOptions opt)
    : p_(std::move(p)), q_(std::move(q)), opt_(opt) {
    p_.validate();
    q_.validate();
    const auto& a = p_.tree;
    const auto& b = q_.tree;
    if (a.boundary_node_count() != b.boundary_node_count() || a.interior_node_count() != b.interior_node_count() ||
        p_.free_dimension() != q_.free_dimension() || a.marked.size() != b.marked.size()) {
        throw NoOverlapError("chart transition: centers have different combinatorics");
    }
    if (p_.cutoff != q_.cutoff) throw DomainError("chart transition: centers use different cutoffs");
    if (!(opt_.T_cap > -std::log(p_.cutoff))) throw DomainError("chart transition: T_cap below the chart range");
}

TransitionSolution ChartTransition::solve(const LogChartPoint& x) const {
    const std::size_t nb = q_.tree.boundary_node_count(), ni = q_.tree.interior_node_count();
    if (x.v.size() != q_.free_dimension() || x.boundary_T.size() != nb || x.interior_T.size() != ni ||
        x.interior_theta.size() != ni) {
        throw DomainError("chart transition: chart point does not match the center");
    }
    const mp_real lo = -log(mp_real(q_.cutoff));
    const mp_real cap(opt_.T_cap);
    // capped input; unsmoothed nodes stay at +inf and carry no unknowns
    std::vector<mp_real> bT(nb), iT(ni), ith(ni);
    std::vector<mp_real> key = x.v;
    for (std::size_t j = 0; j < nb; ++j) {
        if (!(x.boundary_T[j] > lo)) throw DomainError("chart transition: boundary T outside (-log c, inf]");
        bT[j] = is_inf(x.boundary_T[j]) ? x.boundary_T[j] : std::min(x.boundary_T[j], cap);
        key.push_back(bT[j]);
    }
    for (std::size_t i = 0; i < ni; ++i) {
        if (!(x.interior_T[i] > lo)) throw DomainError("chart transition: interior T outside (-log c, inf]");
        iT[i] = is_inf(x.interior_T[i]) ? x.interior_T[i] : std::min(x.interior_T[i], cap);
        ith[i] = is_inf(x.interior_T[i]) ? mp_real(0) : x.interior_theta[i];
        key.push_back(iT[i]);
        key.push_back(ith[i]);
    }
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    std::string target_type;
    std::vector<mp_real> target;
    try {
        target = normal_form(q_, x.v, bT, iT, ith, &target_type);
    } catch (const RangeError& e) {
        throw NoOverlapError(std::string("chart transition: q point not representable: ") + e.what());
    }

    // unknown layout: v, smoothed boundary T, smoothed interior (T, theta)
    std::vector<std::size_t> bslot, islot;
    for (std::size_t j = 0; j < nb; ++j) {
        if (!is_inf(bT[j])) bslot.push_back(j);
    }
    for (std::size_t i = 0; i < ni; ++i) {
        if (!is_inf(iT[i])) islot.push_back(i);
    }
    const std::size_t nv = x.v.size();
    const Eigen::Index n = static_cast<Eigen::Index>(nv + bslot.size() + 2 * islot.size());
    Vec u(n);
    for (std::size_t k = 0; k < nv; ++k) u[k] = x.v[k];
    for (std::size_t k = 0; k < bslot.size(); ++k) u[nv + k] = bT[bslot[k]];
    for (std::size_t k = 0; k < islot.size(); ++k) {
        u[nv + bslot.size() + 2 * k] = iT[islot[k]];
        u[nv + bslot.size() + 2 * k + 1] = ith[islot[k]];
    }
    auto unpack = [&](const Vec& y, std::vector<mp_real>& v, std::vector<mp_real>& b, std::vector<mp_real>& t,
                      std::vector<mp_real>& th) {
        v.assign(nv, mp_real(0));
        b = bT;
        t = iT;
        th = ith;
        for (std::size_t k = 0; k < nv; ++k) v[k] = y[k];
        for (std::size_t k = 0; k < bslot.size(); ++k) b[bslot[k]] = y[nv + k];
        for (std::size_t k = 0; k < islot.size(); ++k) {
            t[islot[k]] = y[nv + bslot.size() + 2 * k];
            th[islot[k]] = y[nv + bslot.size() + 2 * k + 1];
        }
    };
    // residual; nullopt when the trial point leaves the chart
    auto residual = [&](const Vec& y) -> std::optional<Vec> {
        std::vector<mp_real> v, b, t, th;
        unpack(y, v, b, t, th);
        for (const auto& T : b) {
            if (!(T > lo)) return std::nullopt;
        }
        for (const auto& T : t) {
            if (!(T > lo)) return std::nullopt;
        }
        std::string type;
        std::vector<mp_real> f;
        try {
            f = normal_form(p_, v, b, t, th, &type);
        } catch (const RangeError&) {
            return std::nullopt;
        } catch (const DomainError&) {
            return std::nullopt;
        }
        if (type != target_type || f.size() != target.size()) {
            throw NoOverlapError("chart transition: p and q normal forms have different types");
        }
        Vec r(static_cast<Eigen::Index>(f.size()));
        for (std::size_t k = 0; k < f.size(); ++k) r[k] = f[k] - target[k];
        return r;
    };

    auto F = residual(u);
    if (!F) throw NoOverlapError("chart transition: aligned seed lies outside p's chart");
    const Vec u0 = u;
    // warm start from the offsets of the previous solve when that is closer
    if (last_offset_.size() == static_cast<std::size_t>(n)) {
        Vec w = u;
        for (Eigen::Index k = 0; k < n; ++k) w[k] += last_offset_[k];
        auto Fw = residual(w);
        if (Fw && inf_norm(*Fw) < inf_norm(*F)) {
            u = w;
            F = Fw;
        }
    }
    const mp_real fd("1e-20");
    const mp_real step_tol("1e-60");
    const mp_real noise_floor("1e-60");
    int it = 0;
    bool converged = n == 0 || inf_norm(*F) == 0;
    for (; it < opt_.max_iterations && !converged; ++it) {
        Mat J(F->size(), n);
        for (Eigen::Index k = 0; k < n; ++k) {
            Vec up = u, dn = u;
            up[k] += fd;
            dn[k] -= fd;
            auto a = residual(up), b = residual(dn);
            if (!a || !b) throw NoOverlapError("chart transition: Jacobian stencil leaves p's chart");
            J.col(k) = (*a - *b) / (2 * fd);
        }
        const Vec d = J.colPivHouseholderQr().solve(-*F);
        mp_real alpha(1);
        const mp_real f0 = inf_norm(*F);
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, alpha /= 2) {
            const Vec trial = u + alpha * d;
            auto Ft = residual(trial);
            if (Ft && inf_norm(*Ft) <= f0 * (1 - alpha / 10000)) {
                u = trial;
                F = Ft;
                accepted = true;
                break;
            }
            if (Ft && inf_norm(alpha * d) < step_tol) {
                u = trial;
                F = Ft;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // no further decrease: accept when the residual sits at the noise floor
            converged = inf_norm(*F) <= noise_floor;
            break;
        }
        if (inf_norm(alpha * d) < step_tol || inf_norm(*F) == 0) converged = true;
    }
    const double res = to_double(inf_norm(*F));
    if (!converged) throw ConvergenceError("chart transition: Newton did not converge", res);
    if (!(res < opt_.residual_tolerance)) {
        throw NoOverlapError("chart transition: target is outside the image of p's chart (residual " + format_real(res) + ")");
    }
    TransitionSolution sol;
    std::vector<mp_real> b, t, th;
    unpack(u, sol.v, b, t, th);
    sol.boundary_delta.assign(nb, mp_real(0));
    sol.interior_delta.assign(ni, mp_real(0));
    sol.interior_theta = th;
    for (std::size_t j : bslot) sol.boundary_delta[j] = b[j] - bT[j];
    for (std::size_t i : islot) sol.interior_delta[i] = t[i] - iT[i];
    last_offset_.assign(static_cast<std::size_t>(n), mp_real(0));
    for (Eigen::Index k = 0; k < n; ++k) last_offset_[k] = u[k] - u0[k];
    sol.iterations = it;
    sol.residual = res;
    cache_.emplace(std::move(key), sol);
    return sol;
}

LogChartPoint ChartTransition::apply(const LogChartPoint& x) const {
    const auto sol = solve(x);
    LogChartPoint out;
    out.v = sol.v;
    for (std::size_t j = 0; j < x.boundary_T.size(); ++j) out.boundary_T.push_back(x.boundary_T[j] + sol.boundary_delta[j]);
    for (std::size_t i = 0; i < x.interior_T.size(); ++i) {
        out.interior_T.push_back(x.interior_T[i] + sol.interior_delta[i]);
        out.interior_theta.push_back(is_inf(x.interior_T[i]) ? mp_real(0) : sol.interior_theta[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------

Presentation presentation_from_string(const std::string& s) {
    if (s == "log") return Presentation::log;
    if (s == "single-log") return Presentation::single_log;
    if (s == "double-log") return Presentation::double_log;
    throw DomainError("unknown presentation '" + s + "' (expected log, single-log or double-log)");
}

const char* to_string(Presentation p) {
    switch (p) {
        case Presentation::log: return "log";
        case Presentation::single_log: return "single-log";
        case Presentation::double_log: return "double-log";
    }
    return "?";
}

namespace {

mp_real T_from_corner(Presentation pres, const mp_real& c) {
    if (c < 0) throw DomainError("corner coordinate must be non-negative");
    if (pres == Presentation::single_log) return log_from_corner(c);
    return log_from_double_corner(c);
}

mp_real corner_from_T(Presentation pres, const mp_real& T) {
    if (pres == Presentation::single_log) return corner_from_log(T);
    return double_corner_from_log(T);
}

/// Corner coordinate after T -> T + delta, computed from the corner value itself.
mp_real shift_corner(Presentation pres, const mp_real& c, const mp_real& delta) {
    if (c == 0) return mp_real(0);
    if (pres == Presentation::single_log) return c / (1 + delta * c);
    return c / (1 + c * log1p(delta * exp(-1 / c)));
}

}  // namespace

LogChartPoint log_point_from_flat(const ChartCenter& c, Presentation pres, const std::vector<mp_real>& x) {
    const std::size_t nv = c.free_dimension(), nb = c.tree.boundary_node_count(), ni = c.tree.interior_node_count();
    if (x.size() != nv + nb + 2 * ni) throw DomainError("chart vector has the wrong length");
    LogChartPoint L;
    L.v.assign(x.begin(), x.begin() + static_cast<long>(nv));
    std::size_t k = nv;
    for (std::size_t j = 0; j < nb; ++j, ++k) {
        L.boundary_T.push_back(pres == Presentation::log ? x[k] : T_from_corner(pres, x[k]));
    }
    for (std::size_t i = 0; i < ni; ++i, k += 2) {
        if (pres == Presentation::log) {
            L.interior_T.push_back(x[k]);
            L.interior_theta.push_back(x[k + 1]);
            continue;
        }
        const cplx<mp_real> z(x[k], x[k + 1]);
        const mp_real m = abs(z);
        L.interior_T.push_back(T_from_corner(pres, m));
        L.interior_theta.push_back(m == 0 ? mp_real(0) : mp_real(atan2(z.imag(), z.real())));
    }
    return L;
}

std::vector<mp_real> flat_from_log_point(const ChartCenter& c, Presentation pres, const LogChartPoint& L) {
    (void)c;
    std::vector<mp_real> out = L.v;
    for (const auto& T : L.boundary_T) out.push_back(pres == Presentation::log ? T : corner_from_T(pres, T));
    for (std::size_t i = 0; i < L.interior_T.size(); ++i) {
        if (pres == Presentation::log) {
            out.push_back(L.interior_T[i]);
            out.push_back(L.interior_theta[i]);
            continue;
        }
        const mp_real m = corner_from_T(pres, L.interior_T[i]);
        out.push_back(m * cos(L.interior_theta[i]));
        out.push_back(m * sin(L.interior_theta[i]));
    }
    return out;
}

std::vector<mp_real> transition_flat(const ChartTransition& tr, Presentation pres, const std::vector<mp_real>& x) {
    const auto& c = tr.q();
    const LogChartPoint L = log_point_from_flat(c, pres, x);
    const auto sol = tr.solve(L);
    if (pres == Presentation::log) return flat_from_log_point(tr.p(), pres, tr.apply(L));
    const std::size_t nv = c.free_dimension(), nb = c.tree.boundary_node_count(), ni = c.tree.interior_node_count();
    std::vector<mp_real> out = sol.v;
    std::size_t k = nv;
    for (std::size_t j = 0; j < nb; ++j, ++k) out.push_back(shift_corner(pres, x[k], sol.boundary_delta[j]));
    for (std::size_t i = 0; i < ni; ++i, k += 2) {
        const cplx<mp_real> z(x[k], x[k + 1]);
        const mp_real m = abs(z);
        if (m == 0) {
            out.emplace_back(0);
            out.emplace_back(0);
            continue;
        }
        const mp_real mp = shift_corner(pres, m, sol.interior_delta[i]);
        out.push_back(mp * cos(sol.interior_theta[i]));
        out.push_back(mp * sin(sol.interior_theta[i]));
    }
    return out;
}

std::pair<std::vector<double>, DoubleLogCoords> chart_transition(const ChartCenter& p, const ChartCenter& q,
                                                                 const DoubleLogCoords& d_q,
                                                                 const std::vector<double>& v_q,
                                                                 const TransitionOptions& opt) {
    d_q.validate();
    if (d_q.cutoff != q.cutoff) throw DomainError("chart_transition: cutoff differs from q's");
    ChartTransition tr(p, q, opt);
    std::vector<mp_real> x;
    for (double a : v_q) x.emplace_back(a);
    for (double s : d_q.boundary) x.emplace_back(s);
    for (const auto& phi : d_q.interior) {
        x.emplace_back(phi.real());
        x.emplace_back(phi.imag());
    }
    const auto y = transition_flat(tr, Presentation::double_log, x);
    std::pair<std::vector<double>, DoubleLogCoords> out;
    std::size_t k = 0;
    for (; k < v_q.size(); ++k) out.first.push_back(to_double(y[k]));
    out.second.cutoff = p.cutoff;
    for (std::size_t j = 0; j < d_q.boundary.size(); ++j, ++k) out.second.boundary.push_back(to_double(y[k]));
    for (std::size_t i = 0; i < d_q.interior.size(); ++i, k += 2) {
        out.second.interior.emplace_back(to_double(y[k]), to_double(y[k + 1]));
    }
    return out;
}

ChartPair builtin_pair(const std::string& name) {
    const auto colon = name.find(':');
    if (colon == std::string::npos) throw DomainError("pair name must look like <model>:<kind>, got '" + name + "'");
    const std::string model = name.substr(0, colon), kind = name.substr(colon + 1);
    ChartPair pr;
    pr.name = name;
    pr.p = builtin_center(model);
    pr.q = pr.p;
    pr.q.name = model + "/" + kind;
    if (kind == "identical") {
    } else if (kind == "rescale") {
        for (auto& nd : pr.q.tree.nodes) nd.child_family.lambda = {std::exp(1.0), 0.0};
    } else if (kind == "nonlinear") {
        for (auto& nd : pr.q.tree.nodes) {
            nd.parent_family.a1 = {0.3, 0.0};
            nd.child_family.a1 = {0.3, 0.0};
        }
    } else if (kind == "rotate") {
        for (auto& nd : pr.q.tree.nodes) {
            if (nd.kind == NodeKind::interior) nd.child_family.lambda = std::polar(1.0, 0.7);
        }
    } else {
        throw DomainError("unknown pair kind '" + kind + "' (expected identical, rescale, nonlinear or rotate)");
    }
    return pr;
}

SmoothnessReport classify_transition(const ChartTransition& tr, Presentation pres, int max_order,
                                     SmoothnessOptions opt) {
    if (pres == Presentation::log) throw DomainError("classify_transition: the log presentation has no corner point");
    const auto& q = tr.q();
    CornerPoint<mp_real> x0;
    for (double v : q.center_v()) {
        x0.coords.emplace_back(v);
        x0.kinds.push_back(VarKind::free);
    }
    for (std::size_t j = 0; j < q.tree.boundary_node_count(); ++j) {
        x0.coords.emplace_back(0);
        x0.kinds.push_back(VarKind::corner);
    }
    for (std::size_t i = 0; i < q.tree.interior_node_count(); ++i) {
        x0.coords.emplace_back(0);
        x0.coords.emplace_back(0);
        x0.kinds.push_back(VarKind::planar_re);
        x0.kinds.push_back(VarKind::planar_im);
    }
    opt.ladder.chart_radius =
        pres == Presentation::double_log ? double_log_radius(q.cutoff) : single_log_radius(q.cutoff);
    const VectorMap<mp_real> f = [&](const std::vector<mp_real>& x) { return transition_flat(tr, pres, x); };
    return classify_smoothness(f, x0, max_order, opt);
}

}  // namespace cornerlog
