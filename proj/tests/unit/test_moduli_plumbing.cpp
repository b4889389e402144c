#include "cornerlog/moduli_plumbing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cornerlog;

namespace {

using C = cplx<double>;

bool has_violation(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v) {
        if (s.find(needle) != std::string::npos) return true;
    }
    return false;
}

C point(const Configuration<double>& cfg, const std::string& label) {
    for (const auto& pc : cfg.pieces) {
        for (const auto& p : pc.points) {
            if (p.label == label) return p.position;
        }
    }
    throw std::runtime_error("no point " + label);
}

Configuration<double> disk_config(const std::vector<double>& boundary, const std::vector<C>& interior) {
    Piece<double> pc;
    pc.kind = ComponentKind::disk;
    for (std::size_t k = 0; k < boundary.size(); ++k) {
        pc.points.push_back({SpecialKind::boundary_marked, "b" + std::to_string(k), {boundary[k], 0.0}});
    }
    for (std::size_t k = 0; k < interior.size(); ++k) {
        pc.points.push_back({SpecialKind::interior_marked, "i" + std::to_string(k), interior[k]});
    }
    Configuration<double> cfg;
    cfg.pieces.push_back(pc);
    return cfg;
}

Configuration<double> sphere_config(const std::vector<C>& pts) {
    Piece<double> pc;
    pc.kind = ComponentKind::sphere;
    for (std::size_t k = 0; k < pts.size(); ++k) pc.points.push_back({SpecialKind::interior_marked, "i" + std::to_string(k), pts[k]});
    Configuration<double> cfg;
    cfg.pieces.push_back(pc);
    return cfg;
}

// Real Moebius map preserving the upper half plane.
C real_moebius(double a, double b, double c, double d, C x) { return (a * x + b) / (c * x + d); }

}  // namespace

TEST(Validate, MinimalDiskIsStable) { EXPECT_TRUE(validate(builtin_center("disk-3").tree).empty()); }

TEST(Validate, BuiltinsAreStable) {
    for (const auto& n : builtin_center_names()) EXPECT_TRUE(validate(builtin_center(n).tree).empty()) << n;
}

TEST(Validate, UnstableSphere) {
    auto t = builtin_center("two-sphere").tree;
    t.marked.pop_back();
    EXPECT_TRUE(has_violation(validate(t), "unstable sphere"));
}

TEST(Validate, InteriorNodeBetweenDisks) {
    auto t = builtin_center("disk-4").tree;
    t.nodes[0].kind = NodeKind::interior;
    const auto v = validate(t);
    EXPECT_TRUE(has_violation(v, "interior node joins two disks"));
    EXPECT_TRUE(has_violation(v, "interior node at disk boundary"));
}

TEST(Validate, BoundaryFamilyMustBeReal) {
    auto t = builtin_center("disk-4").tree;
    t.nodes[0].child_family.lambda = {1.0, 0.5};
    EXPECT_TRUE(has_violation(validate(t), "real positive lambda"));
}

TEST(CoordFamily, InverseAndRadius) {
    CoordFamily f;
    f.lambda = {2.0, 0.3};
    f.a1 = {0.3, 0.0};
    f.a2 = {0.05, -0.02};
    const C u(0.2, -0.1);
    EXPECT_LT(std::abs(f.invert(f.apply(u)) - u), 1e-14);
    CoordFamily g;
    g.a1 = {0.3, 0.0};
    EXPECT_NEAR(g.max_radius(), 1.0 / 0.6, 1e-15);
    EXPECT_LT(std::abs(g.invert(g.apply(u)) - u), 1e-15);
    EXPECT_EQ(CoordFamily{}.validity_radius(), 4.0);
}

TEST(Plumb, TwoSpheres) {
    const auto c = builtin_center("two-sphere");
    NodeParams p;
    p.interior = {{0.1, 0.02}};
    const auto cfg = plumb(c, p);
    ASSERT_EQ(cfg.pieces.size(), 1u);
    EXPECT_LT(std::abs(point(cfg, "i2") - p.interior[0]), 1e-16);
    EXPECT_LT(std::abs(point(cfg, "i3") + p.interior[0]), 1e-16);
    EXPECT_EQ(point(cfg, "i0"), C(1.0, 0.0));
}

TEST(Plumb, AllZeroKeepsTheCenter) {
    for (const auto& n : builtin_center_names()) {
        const auto c = builtin_center(n);
        NodeParams p;
        p.boundary.assign(c.tree.boundary_node_count(), 0.0);
        p.interior.assign(c.tree.interior_node_count(), {0.0, 0.0});
        const auto cfg = plumb(c, p);
        EXPECT_EQ(cfg.pieces.size(), c.tree.components.size()) << n;
        EXPECT_EQ(cfg.nodal.size(), c.tree.nodes.size());
        for (const auto& m : c.tree.marked) {
            EXPECT_EQ(point(cfg, (m.boundary ? "b" : "i") + std::to_string(m.index)), m.position);
        }
    }
}

TEST(Plumb, BoundaryNodeTransport) {
    ChartCenter c;
    c.tree.components = {{ComponentKind::disk, "A"}, {ComponentKind::disk, "B"}};
    c.tree.marked = {{true, 0, 0, {1.0, 0.0}}, {true, 1, 0, {-1.0, 0.0}}, {true, 2, 1, {1.0, 0.0}}};
    Node n;
    n.kind = NodeKind::boundary;
    n.parent = 0;
    n.child = 1;
    c.tree.nodes = {n};
    NodeParams p;
    p.boundary = {0.1};
    const auto cfg = plumb(c, p);
    EXPECT_NEAR(point(cfg, "b2").real(), -0.1, 1e-16);
    EXPECT_EQ(point(cfg, "b2").imag(), 0.0);
}

TEST(Plumb, RangeErrorOutsideFamilyRadius) {
    auto c = builtin_center("two-sphere");
    c.tree.nodes[0].child_family.radius = 0.5;
    NodeParams p;
    p.interior = {{0.1, 0.0}};
    EXPECT_THROW(plumb(c, p), RangeError);
}

TEST(CrossRatio, Values) {
    const C s(0.1, 0.0);
    const C expect = std::pow((1.0 - s) / (1.0 + s), 2);
    EXPECT_LT(std::abs(cross_ratio<double>(1.0, -1.0, s, -s) - expect), 1e-15);
    const C inf(infinity<double>(), 0.0);
    const C w(0.3, 0.7);
    EXPECT_LT(std::abs(cross_ratio<double>(0.0, 1.0, inf, w) - (w - 1.0) / w), 1e-15);
    EXPECT_THROW(cross_ratio<double>(1.0, 1.0, 1.0, 2.0), DegenerateGaugeError);
}

TEST(CrossRatio, MoebiusInvariance) {
    const C z1(0.3, 0.1), z2(-1.0, 0.4), z3(2.0, -0.5), z4(0.1, 1.1);
    const C a(1.2, 0.3), b(-0.4, 0.2), c(0.5, -0.1), d(0.9, 0.7);
    auto g = [&](C z) { return (a * z + b) / (c * z + d); };
    EXPECT_LT(std::abs(cross_ratio(g(z1), g(z2), g(z3), g(z4)) - cross_ratio(z1, z2, z3, z4)), 1e-13);
}

TEST(Normalize, AlreadyNormalDisk) {
    const auto mc = normalize(disk_config({-1.0, 0.0, 1.0, 0.4}, {}));
    ASSERT_EQ(mc.flatten().size(), 1u);
    EXPECT_NEAR(mc.flatten()[0], 0.4, 1e-15);
    const auto half = normalize(disk_config({-2.0, 0.0, 2.0, 0.8}, {}));
    EXPECT_NEAR(half.flatten()[0], 0.4, 1e-15);
}

TEST(Normalize, GaugeIndependence) {
    const std::vector<double> b = {-0.7, 0.2, 1.3, 2.1};
    const std::vector<C> in = {{0.3, 0.8}, {-0.4, 0.2}};
    const auto ref = normalize(disk_config(b, in)).flatten();
    for (auto [a, bb, c, d] : std::vector<std::array<double, 4>>{{2, 1, 0, 1}, {1, 0.3, -0.2, 1}, {0.5, -1, 0.1, 2}}) {
        std::vector<double> b2;
        std::vector<C> in2;
        for (double x : b) b2.push_back(real_moebius(a, bb, c, d, x).real());
        for (C z : in) in2.push_back(real_moebius(a, bb, c, d, z));
        const auto got = normalize(disk_config(b2, in2)).flatten();
        ASSERT_EQ(got.size(), ref.size());
        for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], ref[k], 1e-12);
    }
    // two boundary points: the interior coordinate is invariant as well
    const auto r2 = normalize(disk_config({-0.5, 1.5}, {{0.3, 0.4}, {1.0, 2.0}})).flatten();
    std::vector<C> moved;
    for (C z : std::vector<C>{{0.3, 0.4}, {1.0, 2.0}}) moved.push_back(real_moebius(1, 0.3, -0.2, 1, z));
    const auto g2 = normalize(disk_config({real_moebius(1, 0.3, -0.2, 1, -0.5).real(), real_moebius(1, 0.3, -0.2, 1, 1.5).real()},
                                          moved))
                        .flatten();
    for (std::size_t k = 0; k < r2.size(); ++k) EXPECT_NEAR(g2[k], r2[k], 1e-12);
    // one boundary point
    const auto r1 = normalize(disk_config({0.2}, {{0.3, 0.4}, {1.0, 2.0}})).flatten();
    moved.clear();
    for (C z : std::vector<C>{{0.3, 0.4}, {1.0, 2.0}}) moved.push_back(real_moebius(2, 0.3, 0.1, 1, z));
    const auto g1 = normalize(disk_config({real_moebius(2, 0.3, 0.1, 1, 0.2).real()}, moved)).flatten();
    for (std::size_t k = 0; k < r1.size(); ++k) EXPECT_NEAR(g1[k], r1[k], 1e-12);
}

TEST(Normalize, SphereGaugeIndependence) {
    const std::vector<C> pts = {{1, 0}, {-1, 0}, {0.2, 0.1}, {0.5, -0.7}, {-2, 1}};
    const auto ref = normalize(sphere_config(pts)).flatten();
    const C a(1.2, 0.3), b(-0.4, 0.2), c(0.5, -0.1), d(0.9, 0.7);
    std::vector<C> moved;
    for (C z : pts) moved.push_back((a * z + b) / (c * z + d));
    const auto got = normalize(sphere_config(moved)).flatten();
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], ref[k], 1e-12);
}

TEST(Normalize, DegenerateGauge) {
    EXPECT_THROW(normalize(disk_config({0.0, 1e-12, 1.0}, {})), DegenerateGaugeError);
    EXPECT_THROW(normalize(disk_config({0.0, 1.0}, {})), DegenerateGaugeError);
}

TEST(ChartMap, TwoSphereClosedForm) {
    const auto c = builtin_center("two-sphere");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> rad(1e-6, 0.13), ang(0.0, two_pi<double>());
    for (int k = 0; k < 100; ++k) {
        NodeParams p;
        p.interior = {std::polar(rad(rng), ang(rng))};
        const auto v = chart_map_Phi(c, {}, p).flatten();
        const C expect = std::pow((1.0 - p.interior[0]) / (1.0 + p.interior[0]), 2);
        EXPECT_LT(std::abs(C(v[0], v[1]) - expect), 1e-12);
    }
    NodeParams p;
    p.interior = {{0.1, 0.0}};
    EXPECT_NEAR(chart_map_Phi(c, {}, p).flatten()[0], 0.66942148760330578, 1e-12);
}

TEST(ChartMap, RescaledFamilyMatchesRescaledParameter) {
    auto q = builtin_center("two-sphere-5");
    const auto p = builtin_center("two-sphere-5");
    q.tree.nodes[0].child_family.lambda = {std::exp(1.0), 0.0};
    NodeParams sq;
    sq.interior = {{0.05, 0.03}};
    NodeParams sp = sq;
    sp.interior[0] /= std::exp(1.0);
    const auto a = chart_map_Phi(q, q.center_v(), sq).flatten();
    const auto b = chart_map_Phi(p, p.center_v(), sp).flatten();
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
}

TEST(ChartMap, FamilyIndependentAtCenter) {
    for (const auto& n : builtin_center_names()) {
        auto c = builtin_center(n);
        const auto plain = c;
        for (auto& nd : c.tree.nodes) {
            nd.parent_family.lambda = {2.0, 0.0};
            nd.child_family.a1 = {0.3, 0.0};
        }
        NodeParams z;
        z.boundary.assign(c.tree.boundary_node_count(), 0.0);
        z.interior.assign(c.tree.interior_node_count(), {0.0, 0.0});
        EXPECT_EQ(chart_map_Phi(c, c.center_v(), z).flatten(), chart_map_Phi(plain, plain.center_v(), z).flatten()) << n;
    }
}

TEST(ChartMap, PsiMatchesPhi) {
    const auto d4 = builtin_center("disk-4");
    DoubleLogCoords d;
    d.boundary = {1.0 / std::log(10.0)};
    NodeParams p;
    p.boundary = {std::exp(-10.0)};
    const auto a = chart_map_Psi(d4, {}, d).flatten(), b = chart_map_Phi(d4, {}, p).flatten();
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k] / b[k], 1.0, 1e-12);

    const auto ts = builtin_center("two-sphere");
    DoubleLogCoords e;
    e.interior = {std::polar(1.0 / std::log(10.0), 1.0)};
    NodeParams q;
    q.interior = {std::exp(-10.0) * std::polar(1.0, -1.0)};
    const auto x = chart_map_Psi(ts, {}, e).flatten(), y = chart_map_Phi(ts, {}, q).flatten();
    for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(x[k], y[k], 1e-12);

    DoubleLogCoords zero;
    zero.interior = {{0.0, 0.0}};
    NodeParams pz;
    pz.interior = {{0.0, 0.0}};
    EXPECT_EQ(chart_map_Psi(ts, {}, zero).type, chart_map_Phi(ts, {}, pz).type);
}

TEST(ChartMap, DimensionsMatchTheChart) {
    for (const auto& n : builtin_center_names()) {
        const auto c = builtin_center(n);
        NodeParams p;
        p.boundary.assign(c.tree.boundary_node_count(), 0.01);
        p.interior.assign(c.tree.interior_node_count(), {0.01, 0.004});
        const auto mc = chart_map_Phi(c, c.center_v(), p);
        const std::size_t expect = c.free_dimension() + c.tree.boundary_node_count() + 2 * c.tree.interior_node_count();
        EXPECT_EQ(mc.flatten().size(), expect) << n;
    }
}

TEST(Plumb, BubbleConformalClassSurvivesNonlinearFamilies) {
    auto c = builtin_center("two-sphere-5");
    c.tree.nodes[0].parent_family.a1 = {0.3, 0.0};
    c.tree.nodes[0].child_family.a1 = {0.3, 0.0};
    // on the bubble, the node sits at w = 0
    const C v = c.tree.marked[4].position;
    const C nodal = cross_ratio<double>({1.0, 0.0}, {-1.0, 0.0}, v, {0.0, 0.0});
    double prev = 1.0;
    for (double s : {1e-2, 1e-4, 1e-6}) {
        NodeParams p;
        p.interior = {std::polar(s, 0.4)};
        const auto cfg = plumb(c, p);
        // seen from the bubble, the far point i0 converges to the node
        const C smoothed = cross_ratio(point(cfg, "i2"), point(cfg, "i3"), point(cfg, "i4"), point(cfg, "i0"));
        const double d = std::abs(smoothed - nodal);
        EXPECT_LT(d, 10 * s) << s;
        EXPECT_LT(d, prev);
        prev = d;
    }
}
