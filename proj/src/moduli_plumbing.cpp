#include "cornerlog/moduli_plumbing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cornerlog {

// ---------------------------------------------------------------------------
// Coordinate families

double CoordFamily::max_radius() const {
    const double p = 2.0 * std::abs(a1);
    const double q = 3.0 * std::abs(a2);
    if (q == 0.0) return p == 0.0 ? infinity<double>() : 1.0 / p;
    return (-p + std::sqrt(p * p + 4.0 * q)) / (2.0 * q);
}

double CoordFamily::validity_radius() const {
    if (radius > 0.0) return radius;
    return std::min(0.99 * max_radius(), 4.0);
}

void CoordFamily::validate(bool boundary_branch) const {
    if (!(std::abs(lambda) > 0.0)) throw DomainError("coordinate family: lambda must be non-zero");
    if (radius < 0.0) throw DomainError("coordinate family: negative radius");
    if (radius > 0.0 && radius >= max_radius()) {
        throw DomainError("coordinate family: radius exceeds the univalence bound");
    }
    if (boundary_branch) {
        if (lambda.imag() != 0.0 || !(lambda.real() > 0.0)) {
            throw DomainError("coordinate family: boundary branch needs real positive lambda");
        }
        if (a1.imag() != 0.0 || a2.imag() != 0.0) {
            throw DomainError("coordinate family: boundary branch needs real coefficients");
        }
    }
}

bool CoordFamily::is_identity() const {
    return lambda == cplx<double>(1.0, 0.0) && a1 == cplx<double>() && a2 == cplx<double>();
}

template <class R>
cplx<R> CoordFamily::apply(const cplx<R>& u) const {
    const cplx<R> l = lift<R>(lambda), b1 = lift<R>(a1), b2 = lift<R>(a2);
    return l * u * (cplx<R>(R(1), R(0)) + u * (b1 + u * b2));
}

template <class R>
cplx<R> CoordFamily::invert(const cplx<R>& z) const {
    using std::abs;
    using std::sqrt;
    const cplx<R> l = lift<R>(lambda), b1 = lift<R>(a1), b2 = lift<R>(a2);
    const cplx<R> y = z / l;
    const cplx<R> one(R(1), R(0));
    cplx<R> u;
    if (a2 == cplx<double>() && a1 == cplx<double>()) {
        u = y;
    } else if (a2 == cplx<double>()) {
        // b1 u^2 + u - y = 0, root near y
        u = (R(2) * y) / (one + sqrt(one + R(4) * b1 * y));
    } else {
        u = y;
        for (int it = 0; it < 200; ++it) {
            const cplx<R> f = u * (one + u * (b1 + u * b2)) - y;
            const cplx<R> df = one + u * (R(2) * b1 + R(3) * u * b2);
            const cplx<R> du = f / df;
            u -= du;
            if (abs(du) <= epsilon<R>() * (abs(u) + epsilon<R>()) * 4) break;
        }
    }
    if (!(abs(u) < R(validity_radius()))) {
        throw RangeError("plumbing: transported point leaves the coordinate family's validity radius");
    }
    return u;
}

// ---------------------------------------------------------------------------
// Trees

int StableTree::boundary_marked_count() const {
    return static_cast<int>(std::count_if(marked.begin(), marked.end(), [](const auto& m) { return m.boundary; }));
}

int StableTree::interior_marked_count() const {
    return static_cast<int>(marked.size()) - boundary_marked_count();
}

std::size_t StableTree::boundary_node_count() const {
    return std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.kind == NodeKind::boundary; });
}

std::size_t StableTree::interior_node_count() const { return nodes.size() - boundary_node_count(); }

std::size_t StableTree::parameter_slot(std::size_t n) const {
    std::size_t slot = 0;
    for (std::size_t k = 0; k < n; ++k) slot += nodes[k].kind == nodes[n].kind ? 1 : 0;
    return slot;
}

int StableTree::root() const {
    for (const auto& m : marked) {
        if (m.boundary && m.index == 0) return m.component;
    }
    return 0;
}

std::vector<std::string> validate(const StableTree& tree) {
    std::vector<std::string> out;
    const int nc = static_cast<int>(tree.components.size());
    if (nc == 0) {
        out.emplace_back("tree has no components");
        return out;
    }
    auto comp_ok = [&](int c) { return c >= 0 && c < nc; };
    std::vector<int> parent(nc, -1);
    std::vector<int> boundary_special(nc, 0), interior_special(nc, 0);
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
        const auto& nd = tree.nodes[n];
        const std::string tag = "node " + std::to_string(n) + ": ";
        if (!comp_ok(nd.parent) || !comp_ok(nd.child) || nd.parent == nd.child) {
            out.push_back(tag + "invalid component reference");
            continue;
        }
        if (parent[nd.child] != -1) out.push_back(tag + "component " + std::to_string(nd.child) + " has two parents");
        parent[nd.child] = nd.parent;
        const auto pk = tree.components[nd.parent].kind;
        const auto ck = tree.components[nd.child].kind;
        if (nd.kind == NodeKind::boundary) {
            if (pk != ComponentKind::disk || ck != ComponentKind::disk) out.push_back(tag + "boundary node must join two disks");
            if (nd.parent_position.imag() != 0.0 || nd.child_position.imag() != 0.0) {
                out.push_back(tag + "boundary node must sit on the boundary");
            }
            boundary_special[nd.parent]++;
            boundary_special[nd.child]++;
        } else {
            if (ck != ComponentKind::sphere) {
                out.push_back(tag + (pk == ComponentKind::disk && ck == ComponentKind::disk
                                         ? std::string("interior node joins two disks")
                                         : std::string("interior node child must be a sphere")));
            }
            if (pk == ComponentKind::disk && !(nd.parent_position.imag() > 0.0)) {
                out.push_back(tag + "interior node at disk boundary");
            }
            interior_special[nd.parent]++;
            interior_special[nd.child]++;
        }
        try {
            nd.parent_family.validate(nd.kind == NodeKind::boundary);
            nd.child_family.validate(nd.kind == NodeKind::boundary);
        } catch (const DomainError& e) {
            out.push_back(tag + e.what());
        }
    }
    if (tree.nodes.size() + 1 != static_cast<std::size_t>(nc)) out.emplace_back("not a tree: wrong number of nodes");
    const int root = tree.root();
    if (!comp_ok(root)) {
        out.emplace_back("root component out of range");
        return out;
    }
    if (parent[root] != -1) out.emplace_back("root component has a parent");
    for (int c = 0; c < nc; ++c) {
        // walk to the root; a cycle or a second root shows up here
        int x = c, steps = 0;
        while (x != root && x != -1 && steps <= nc) {
            x = parent[x];
            ++steps;
        }
        if (x != root) {
            out.push_back("component " + std::to_string(c) + " is not connected to the root");
        }
    }
    std::set<int> bidx, iidx;
    for (const auto& m : tree.marked) {
        const std::string tag = std::string(m.boundary ? "boundary" : "interior") + " marked point " +
                                std::to_string(m.index) + ": ";
        if (!comp_ok(m.component)) {
            out.push_back(tag + "invalid component");
            continue;
        }
        const auto k = tree.components[m.component].kind;
        if (m.boundary) {
            if (!bidx.insert(m.index).second) out.push_back(tag + "duplicate index");
            if (k != ComponentKind::disk) out.push_back(tag + "boundary point on a sphere");
            if (m.position.imag() != 0.0) out.push_back(tag + "not on the boundary");
            if (m.free_im) out.push_back(tag + "boundary point cannot move off the boundary");
            boundary_special[m.component]++;
        } else {
            if (!iidx.insert(m.index).second) out.push_back(tag + "duplicate index");
            if (k == ComponentKind::disk && !(m.position.imag() > 0.0)) out.push_back(tag + "not in the interior");
            interior_special[m.component]++;
        }
    }
    for (std::size_t k = 0; k < bidx.size(); ++k) {
        if (!bidx.count(static_cast<int>(k))) out.emplace_back("boundary marked indices are not 0..k");
    }
    for (std::size_t k = 0; k < iidx.size(); ++k) {
        if (!iidx.count(static_cast<int>(k))) out.emplace_back("interior marked indices are not 0..l-1");
    }
    if (!bidx.empty() && tree.components[root].kind != ComponentKind::disk) {
        out.emplace_back("root component must be a disk");
    }
    for (int c = 0; c < nc; ++c) {
        const std::string tag = "component " + std::to_string(c) + ": ";
        if (tree.components[c].kind == ComponentKind::sphere) {
            if (boundary_special[c] + interior_special[c] < 3) out.push_back(tag + "unstable sphere");
        } else {
            if (boundary_special[c] + 2 * interior_special[c] < 3) out.push_back(tag + "unstable disk");
            if (boundary_special[c] == 0) out.push_back(tag + "disk without boundary special point");
        }
    }
    // distinct special positions per component
    std::map<int, std::vector<cplx<double>>> pos;
    for (const auto& m : tree.marked) {
        if (comp_ok(m.component)) pos[m.component].push_back(m.position);
    }
    for (const auto& nd : tree.nodes) {
        if (comp_ok(nd.parent)) pos[nd.parent].push_back(nd.parent_position);
        if (comp_ok(nd.child)) pos[nd.child].push_back(nd.child_position);
    }
    for (const auto& [c, ps] : pos) {
        for (std::size_t a = 0; a < ps.size(); ++a) {
            for (std::size_t b = a + 1; b < ps.size(); ++b) {
                if (ps[a] == ps[b]) out.push_back("component " + std::to_string(c) + ": special points coincide");
            }
        }
    }
    return out;
}

std::size_t ChartCenter::free_dimension() const {
    std::size_t d = 0;
    for (const auto& m : tree.marked) d += (m.free_re ? 1 : 0) + (m.free_im ? 1 : 0);
    return d;
}

std::vector<double> ChartCenter::center_v() const {
    std::vector<double> v;
    for (const auto& m : tree.marked) {
        if (m.free_re) v.push_back(m.position.real());
        if (m.free_im) v.push_back(m.position.imag());
    }
    return v;
}

void ChartCenter::validate() const {
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw DomainError("chart center: cutoff must satisfy 0 < c < 1");
    const auto v = cornerlog::validate(tree);
    if (!v.empty()) {
        std::string msg = "chart center '" + name + "' is not a stable tree:";
        for (const auto& s : v) msg += "\n  " + s;
        throw DomainError(msg);
    }
}

// ---------------------------------------------------------------------------
// Plumbing

namespace {

std::string marked_label(const MarkedPoint& m) { return (m.boundary ? "b" : "i") + std::to_string(m.index); }

bool marked_less(const MarkedPoint* a, const MarkedPoint* b) {
    if (a->boundary != b->boundary) return a->boundary;
    return a->index < b->index;
}

/// Child-side marked set of every node, as "node[b2 b3]".
std::vector<std::string> node_labels(const StableTree& tree) {
    const int nc = static_cast<int>(tree.components.size());
    std::vector<std::vector<int>> children(nc);
    for (const auto& nd : tree.nodes) children[nd.parent].push_back(nd.child);
    std::vector<std::string> labels;
    for (const auto& nd : tree.nodes) {
        std::vector<const MarkedPoint*> ms;
        std::vector<int> stack{nd.child};
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            for (const auto& m : tree.marked) {
                if (m.component == c) ms.push_back(&m);
            }
            for (int ch : children[c]) stack.push_back(ch);
        }
        std::sort(ms.begin(), ms.end(), marked_less);
        std::string s = "node[";
        for (std::size_t k = 0; k < ms.size(); ++k) s += (k ? " " : "") + marked_label(*ms[k]);
        labels.push_back(s + "]");
    }
    return labels;
}

int kind_rank(SpecialKind k) {
    switch (k) {
        case SpecialKind::boundary_marked: return 0;
        case SpecialKind::boundary_node: return 1;
        case SpecialKind::interior_marked: return 2;
        case SpecialKind::interior_node: return 3;
    }
    return 4;
}

int marked_number(const std::string& label) { return std::stoi(label.substr(1)); }

template <class R>
bool special_less(const SpecialPoint<R>& a, const SpecialPoint<R>& b) {
    if (kind_rank(a.kind) != kind_rank(b.kind)) return kind_rank(a.kind) < kind_rank(b.kind);
    if (a.kind == SpecialKind::boundary_marked || a.kind == SpecialKind::interior_marked) {
        return marked_number(a.label) < marked_number(b.label);
    }
    return a.label < b.label;
}

template <class R>
R separation_floor() {
    if constexpr (is_multiprecision_v<R>) {
        return R("1e-60");
    } else {
        return R(1e-9);
    }
}

}  // namespace

template <class R>
std::string Piece<R>::label() const {
    std::string s;
    for (std::size_t k = 0; k < points.size(); ++k) s += (k ? "," : "") + points[k].label;
    return s;
}

template <class R>
std::string Configuration<R>::type() const {
    std::string s;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        s += (k ? " | " : "") + std::string(to_string(pieces[k].kind)) + "(" + pieces[k].label() + ")";
    }
    return s;
}

template <class R>
std::vector<R> ModuliCoords<R>::flatten() const {
    std::vector<R> out;
    for (const auto& p : pieces) out.insert(out.end(), p.values.begin(), p.values.end());
    return out;
}

template <class R>
GluingParams<R> gluing_from_log(const std::vector<R>& boundary_T, const std::vector<R>& interior_T,
                                const std::vector<R>& interior_theta) {
    if (interior_T.size() != interior_theta.size()) throw DomainError("gluing parameters: T/theta size mismatch");
    GluingParams<R> g;
    for (const auto& T : boundary_T) g.boundary.push_back(radius_from_log(T));
    for (std::size_t i = 0; i < interior_T.size(); ++i) g.interior.push_back(sigma_from_log(interior_T[i], interior_theta[i]));
    return g;
}

template <class R>
cplx<R> cross_ratio(const cplx<R>& z1, const cplx<R>& z2, const cplx<R>& z3, const cplx<R>& z4) {
    using std::abs;
    const bool i1 = is_inf(z1.real()), i2 = is_inf(z2.real()), i3 = is_inf(z3.real()), i4 = is_inf(z4.real());
    if (int(i1) + int(i2) + int(i3) + int(i4) > 1) throw DegenerateGaugeError("cross ratio: more than one point at infinity");
    cplx<R> num, den;
    if (i1) {
        num = z2 - z4;
        den = z2 - z3;
    } else if (i2) {
        num = z1 - z3;
        den = z1 - z4;
    } else if (i3) {
        num = z2 - z4;
        den = z1 - z4;
    } else if (i4) {
        num = z1 - z3;
        den = z2 - z3;
    } else {
        num = (z1 - z3) * (z2 - z4);
        den = (z1 - z4) * (z2 - z3);
    }
    const bool n0 = num == cplx<R>(), d0 = den == cplx<R>();
    if (n0 && d0) throw DegenerateGaugeError("cross ratio: 0/0 (coincident points)");
    if (d0) return {infinity<R>(), R(0)};
    return num / den;
}

template <class R>
Configuration<R> plumb(const ChartCenter& center, const std::vector<R>& v, const GluingParams<R>& params) {
    using std::abs;
    const StableTree& tree = center.tree;
    const int nc = static_cast<int>(tree.components.size());
    if (v.size() != center.free_dimension()) {
        throw DomainError("plumb: expected " + std::to_string(center.free_dimension()) + " free coordinates, got " +
                          std::to_string(v.size()));
    }
    if (params.boundary.size() != tree.boundary_node_count() || params.interior.size() != tree.interior_node_count()) {
        throw DomainError("plumb: gluing parameters do not match the tree's nodes");
    }
    const R c(center.cutoff);
    for (const auto& r : params.boundary) {
        if (!(r >= 0 && r < c)) throw DomainError("plumb: boundary parameter outside [0, c)");
    }
    for (const auto& s : params.interior) {
        if (!(abs(s) < c)) throw DomainError("plumb: interior parameter outside D(c)");
    }
    struct Live {
        SpecialPoint<R> pt;
        int owner;
        int node = -1;     // node this point belongs to, -1 for marked points
    };
    std::vector<Live> pts;
    std::size_t vk = 0;
    for (const auto& m : tree.marked) {
        cplx<R> p = lift<R>(m.position);
        if (m.free_re) p.real(v[vk++]);
        if (m.free_im) p.imag(v[vk++]);
        pts.push_back({{m.boundary ? SpecialKind::boundary_marked : SpecialKind::interior_marked, marked_label(m), p},
                       m.component});
    }
    const auto labels = node_labels(tree);
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
        const auto& nd = tree.nodes[n];
        const SpecialKind k = nd.kind == NodeKind::boundary ? SpecialKind::boundary_node : SpecialKind::interior_node;
        pts.push_back({{k, labels[n], lift<R>(nd.parent_position)}, nd.parent, static_cast<int>(n)});
        pts.push_back({{k, labels[n], lift<R>(nd.child_position)}, nd.child, static_cast<int>(n)});
    }
    // depth of each component, to smooth the deepest nodes first
    std::vector<int> parent(nc, -1);
    for (const auto& nd : tree.nodes) parent[nd.child] = nd.parent;
    auto depth = [&](int comp) {
        int d = 0;
        while (parent[comp] != -1 && d <= nc) {
            comp = parent[comp];
            ++d;
        }
        return d;
    };
    std::vector<std::size_t> order(tree.nodes.size());
    for (std::size_t n = 0; n < order.size(); ++n) order[n] = n;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return depth(tree.nodes[a].child) > depth(tree.nodes[b].child); });
    std::vector<int> owner(nc);
    for (int k = 0; k < nc; ++k) owner[k] = k;
    Configuration<R> cfg;
    for (std::size_t n : order) {
        const auto& nd = tree.nodes[n];
        const std::size_t slot = tree.parameter_slot(n);
        const bool boundary = nd.kind == NodeKind::boundary;
        const cplx<R> g = boundary ? cplx<R>(params.boundary[slot], R(0)) : params.interior[slot];
        if (g == cplx<R>()) {
            cfg.nodal.push_back(static_cast<int>(n));
            continue;
        }
        const int from = nd.child;  // the child is still its own piece owner
        const int to = owner[nd.parent];
        const cplx<R> cpos = lift<R>(nd.child_position), ppos = lift<R>(nd.parent_position);
        const R rc(nd.child_family.validity_radius());
        std::vector<Live> next;
        for (auto& lp : pts) {
            if (lp.node == static_cast<int>(n)) continue;  // the node disappears
            if (lp.owner == from) {
                const cplx<R> u = lp.pt.position - cpos;
                if (!(abs(u) < rc)) throw RangeError("plumbing: point " + lp.pt.label + " outside the child family's radius");
                // Only the linear part of the child family moves bubble points: the
                // full family would change the bubble's conformal class in the
                // limit and make the chart map jump at the node.
                const cplx<R> w = lift<R>(nd.child_family.lambda) * u;
                const cplx<R> z = boundary ? cplx<R>(-g.real(), R(0)) / w : g / w;
                lp.pt.position = ppos + nd.parent_family.invert(z);
                if (boundary && (lp.pt.kind == SpecialKind::boundary_marked || lp.pt.kind == SpecialKind::boundary_node)) {
                    lp.pt.position.imag(R(0));
                }
                lp.owner = to;
            }
            next.push_back(std::move(lp));
        }
        pts = std::move(next);
        for (int k = 0; k < nc; ++k) {
            if (owner[k] == from) owner[k] = to;
        }
    }
    std::sort(cfg.nodal.begin(), cfg.nodal.end());
    std::map<int, Piece<R>> pieces;
    for (int k = 0; k < nc; ++k) {
        auto& pc = pieces[owner[k]];
        pc.kind = tree.components[owner[k]].kind;
        pc.components.push_back(k);
    }
    for (const auto& lp : pts) pieces[lp.owner].points.push_back(lp.pt);
    for (auto& [o, pc] : pieces) {
        std::sort(pc.points.begin(), pc.points.end(), special_less<R>);
        cfg.pieces.push_back(std::move(pc));
    }
    std::sort(cfg.pieces.begin(), cfg.pieces.end(), [](const Piece<R>& a, const Piece<R>& b) { return a.label() < b.label(); });
    return cfg;
}

namespace {

template <class R>
void require_separated(const std::vector<cplx<R>>& gauge, const std::string& where) {
    using std::abs;
    for (std::size_t a = 0; a < gauge.size(); ++a) {
        for (std::size_t b = a + 1; b < gauge.size(); ++b) {
            if (!(abs(gauge[a] - gauge[b]) >= separation_floor<R>())) {
                throw DegenerateGaugeError("normalize: gauge points collide in " + where);
            }
        }
    }
}

template <class R>
void push_complex(PieceCoords<R>& pc, const std::string& name, const cplx<R>& z) {
    pc.names.push_back(name + ".re");
    pc.values.push_back(z.real());
    pc.names.push_back(name + ".im");
    pc.values.push_back(z.imag());
}

template <class R>
PieceCoords<R> normalize_sphere(const Piece<R>& piece) {
    PieceCoords<R> pc;
    pc.kind = ComponentKind::sphere;
    pc.label = piece.label();
    const auto& P = piece.points;
    if (P.size() < 3) throw DegenerateGaugeError("normalize: sphere piece with fewer than 3 special points");
    require_separated<R>({P[0].position, P[1].position, P[2].position}, pc.label);
    for (std::size_t k = 3; k < P.size(); ++k) {
        push_complex(pc, P[k].label, cross_ratio(P[0].position, P[1].position, P[2].position, P[k].position));
    }
    return pc;
}

template <class R>
PieceCoords<R> normalize_disk(const Piece<R>& piece) {
    using std::abs;
    using std::atanh;
    using std::cosh;
    using std::sinh;
    PieceCoords<R> pc;
    pc.kind = ComponentKind::disk;
    pc.label = piece.label();
    std::vector<const SpecialPoint<R>*> B, I;
    for (const auto& p : piece.points) {
        if (p.kind == SpecialKind::boundary_marked || p.kind == SpecialKind::boundary_node) {
            B.push_back(&p);
        } else {
            I.push_back(&p);
        }
    }
    const cplx<R> one(R(1), R(0));
    if (B.size() >= 3) {
        const R b1 = B[0]->position.real(), b2 = B[1]->position.real(), b3 = B[2]->position.real();
        require_separated<R>({B[0]->position, B[1]->position, B[2]->position}, pc.label);
        const bool preserving = (b2 - b1) * (b3 - b2) * (b3 - b1) > 0;
        auto g = [&](const cplx<R>& x) {
            const cplx<R> w = cross_ratio(cplx<R>(b1, R(0)), cplx<R>(b2, R(0)), cplx<R>(b3, R(0)), x);
            if (is_inf(w.real())) return cplx<R>(R(-1), R(0));
            const cplx<R> y = w / (R(2) - w);
            return preserving ? y : std::conj(y);
        };
        for (std::size_t k = 3; k < B.size(); ++k) {
            pc.names.push_back(B[k]->label);
            pc.values.push_back(g(B[k]->position).real());
        }
        for (const auto* p : I) push_complex(pc, p->label, g(p->position));
        return pc;
    }
    if (B.size() == 2 && !I.empty()) {
        const R b1 = B[0]->position.real(), b2 = B[1]->position.real();
        require_separated<R>({B[0]->position, B[1]->position}, pc.label);
        const R alpha = R(2) / (b2 - b1);
        const R beta = R(-1) - alpha * b1;
        auto affine = [&](const cplx<R>& x) {
            const cplx<R> y = alpha * x + beta;
            return alpha > 0 ? y : std::conj(y);
        };
        const cplx<R> w1 = affine(I[0]->position);
        const R m2 = std::norm(w1);
        const R t = atanh(R(-2) * w1.real() / (m2 + 1)) / 2;
        const R ch = cosh(t), sh = sinh(t);
        auto flow = [&](const cplx<R>& z) { return (z * ch + sh) / (z * sh + ch); };
        pc.names.push_back(I[0]->label + ".im");
        pc.values.push_back(flow(w1).imag());
        for (std::size_t k = 1; k < I.size(); ++k) push_complex(pc, I[k]->label, flow(affine(I[k]->position)));
        return pc;
    }
    if (B.size() == 1 && !I.empty()) {
        const cplx<R> b(B[0]->position.real(), R(0));
        auto h = [&](const cplx<R>& x) { return -one / (x - b); };
        const cplx<R> w1 = h(I[0]->position);
        if (!(w1.imag() > 0)) throw DegenerateGaugeError("normalize: interior gauge point not in the upper half plane");
        if (!(abs(I[0]->position - b) >= separation_floor<R>())) {
            throw DegenerateGaugeError("normalize: gauge points collide in " + pc.label);
        }
        for (std::size_t k = 1; k < I.size(); ++k) {
            push_complex(pc, I[k]->label, (h(I[k]->position) - w1.real()) / w1.imag());
        }
        return pc;
    }
    throw DegenerateGaugeError("normalize: unstable disk piece " + pc.label);
}

}  // namespace

template <class R>
ModuliCoords<R> normalize(const Configuration<R>& config) {
    ModuliCoords<R> mc;
    mc.type = config.type();
    for (const auto& p : config.pieces) {
        mc.pieces.push_back(p.kind == ComponentKind::sphere ? normalize_sphere(p) : normalize_disk(p));
    }
    return mc;
}

Configuration<double> plumb(const ChartCenter& center, const NodeParams& params) {
    params.validate();
    GluingParams<double> g{params.boundary, params.interior};
    return plumb<double>(center, center.center_v(), g);
}

ModuliCoords<double> chart_map_Phi(const ChartCenter& center, const std::vector<double>& v, const NodeParams& params) {
    params.validate();
    if (params.cutoff != center.cutoff) throw DomainError("chart_map_Phi: cutoff differs from the chart center's");
    GluingParams<double> g{params.boundary, params.interior};
    return chart_map<double>(center, v, g);
}

ModuliCoords<double> chart_map_Psi(const ChartCenter& center, const std::vector<double>& v, const DoubleLogCoords& d) {
    d.validate();
    if (d.cutoff != center.cutoff) throw DomainError("chart_map_Psi: cutoff differs from the chart center's");
    // Evaluate through log coordinates in multiprecision so that tiny gluing
    // parameters do not underflow.
    std::vector<mp_real> bT, iT, ith, vm;
    for (double s : d.boundary) bT.push_back(log_from_double_corner(mp_real(s)));
    for (const auto& phi : d.interior) {
        iT.push_back(log_from_double_corner(mp_real(std::abs(phi))));
        ith.push_back(phi == cplx<double>() ? mp_real(0) : mp_real(std::arg(phi)));
    }
    for (double x : v) vm.emplace_back(x);
    const auto mc = chart_map<mp_real>(center, vm, gluing_from_log(bT, iT, ith));
    ModuliCoords<double> out;
    out.type = mc.type;
    for (const auto& p : mc.pieces) {
        PieceCoords<double> q;
        q.label = p.label;
        q.kind = p.kind;
        q.names = p.names;
        for (const auto& x : p.values) q.values.push_back(to_double(x));
        out.pieces.push_back(std::move(q));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built-in centers

namespace {

MarkedPoint bmark(int index, int comp, double x) { return {true, index, comp, {x, 0.0}}; }
MarkedPoint imark(int index, int comp, cplx<double> z) { return {false, index, comp, z}; }

Node node(NodeKind kind, int parent, int child, cplx<double> ppos, cplx<double> cpos) {
    Node n;
    n.kind = kind;
    n.parent = parent;
    n.child = child;
    n.parent_position = ppos;
    n.child_position = cpos;
    return n;
}

}  // namespace

std::vector<std::string> builtin_center_names() {
    return {"two-sphere", "two-sphere-5", "sphere-chain", "disk-3", "disk-4",
            "disk-1-1",   "disk-2-1",     "disk-1-2",     "mixed-2-2"};
}

ChartCenter builtin_center(const std::string& name) {
    using CK = ComponentKind;
    using NK = NodeKind;
    const cplx<double> I(0.0, 1.0);
    ChartCenter c;
    c.name = name;
    auto& t = c.tree;
    if (name == "two-sphere" || name == "two-sphere-5") {
        t.components = {{CK::sphere, "A"}, {CK::sphere, "B"}};
        t.marked = {imark(0, 0, 1.0), imark(1, 0, -1.0), imark(2, 1, 1.0), imark(3, 1, -1.0)};
        if (name == "two-sphere-5") {
            auto m = imark(4, 1, 0.5 * I);
            m.free_re = m.free_im = true;
            t.marked.push_back(m);
        }
        t.nodes = {node(NK::interior, 0, 1, 0.0, 0.0)};
    } else if (name == "sphere-chain") {
        t.components = {{CK::sphere, "A"}, {CK::sphere, "B"}, {CK::sphere, "C"}};
        t.marked = {imark(0, 0, 1.0), imark(1, 0, -1.0), imark(2, 1, 1.0), imark(3, 2, 1.0), imark(4, 2, -1.0)};
        t.nodes = {node(NK::interior, 0, 1, 0.0, 0.0), node(NK::interior, 1, 2, -1.0, 0.0)};
    } else if (name == "disk-3") {
        t.components = {{CK::disk, "A"}};
        t.marked = {bmark(0, 0, -1.0), bmark(1, 0, 0.0), bmark(2, 0, 1.0)};
    } else if (name == "disk-4") {
        // b1, b2 sit on the bubble; after smoothing the boundary order is b0 < b1 < b2 < b3.
        t.components = {{CK::disk, "A"}, {CK::disk, "B"}};
        t.marked = {bmark(0, 0, -1.0), bmark(3, 0, 1.0), bmark(1, 1, 1.0), bmark(2, 1, -1.0)};
        t.nodes = {node(NK::boundary, 0, 1, 0.0, 0.0)};
    } else if (name == "disk-1-1") {
        t.components = {{CK::disk, "A"}};
        t.marked = {bmark(0, 0, 0.0), imark(0, 0, I)};
    } else if (name == "disk-2-1") {
        t.components = {{CK::disk, "A"}, {CK::disk, "B"}};
        t.marked = {bmark(0, 0, -1.0), bmark(1, 0, 1.0), imark(0, 1, I)};
        t.nodes = {node(NK::boundary, 0, 1, 0.0, 0.0)};
    } else if (name == "disk-1-2") {
        t.components = {{CK::disk, "A"}, {CK::sphere, "B"}};
        t.marked = {bmark(0, 0, 0.0), imark(0, 1, 1.0), imark(1, 1, -1.0)};
        t.nodes = {node(NK::interior, 0, 1, I, 0.0)};
    } else if (name == "mixed-2-2") {
        t.components = {{CK::disk, "A"}, {CK::disk, "B"}, {CK::sphere, "C"}};
        t.marked = {bmark(0, 0, -1.0), bmark(1, 0, 1.0), imark(0, 2, 1.0), imark(1, 2, -1.0)};
        t.nodes = {node(NK::boundary, 0, 1, 0.0, 0.0), node(NK::interior, 1, 2, I, 0.0)};
    } else {
        throw DomainError("unknown built-in center '" + name + "'");
    }
    return c;
}

// ---------------------------------------------------------------------------

#define CORNERLOG_INSTANTIATE(R)                                                                              \
    template cplx<R> CoordFamily::apply<R>(const cplx<R>&) const;                                             \
    template cplx<R> CoordFamily::invert<R>(const cplx<R>&) const;                                            \
    template struct Piece<R>;                                                                                 \
    template struct Configuration<R>;                                                                         \
    template struct ModuliCoords<R>;                                                                          \
    template GluingParams<R> gluing_from_log<R>(const std::vector<R>&, const std::vector<R>&,                 \
                                                const std::vector<R>&);                                       \
    template cplx<R> cross_ratio<R>(const cplx<R>&, const cplx<R>&, const cplx<R>&, const cplx<R>&);          \
    template Configuration<R> plumb<R>(const ChartCenter&, const std::vector<R>&, const GluingParams<R>&);    \
    template ModuliCoords<R> normalize<R>(const Configuration<R>&);

CORNERLOG_INSTANTIATE(double)
CORNERLOG_INSTANTIATE(mp_real)

#undef CORNERLOG_INSTANTIATE

}  // namespace cornerlog
