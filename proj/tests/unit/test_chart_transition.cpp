#include "cornerlog/chart_transition.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cornerlog;

namespace {

LogChartPoint log_point(const std::vector<double>& v, const std::vector<double>& bT, const std::vector<double>& iT,
                        const std::vector<double>& ith) {
    LogChartPoint L;
    for (double x : v) L.v.emplace_back(x);
    for (double x : bT) L.boundary_T.emplace_back(x);
    for (double x : iT) L.interior_T.emplace_back(x);
    for (double x : ith) L.interior_theta.emplace_back(x);
    return L;
}

}  // namespace

TEST(Transition, IdenticalCentersGiveIdentity) {
    const auto pr = builtin_pair("two-sphere-5:identical");
    const auto [v, d] = chart_transition(pr.p, pr.q, DoubleLogCoords{{}, {std::polar(0.4, 1.1)}}, {0.1, 0.45});
    EXPECT_NEAR(v[0], 0.1, 1e-15);
    EXPECT_NEAR(v[1], 0.45, 1e-15);
    EXPECT_NEAR(std::abs(d.interior[0] - std::polar(0.4, 1.1)), 0.0, 1e-15);
}

TEST(Transition, RescaledFamilyMatchesClosedForm) {
    const auto pr = builtin_pair("mixed-2-2:rescale");
    const auto inv_e = RescaleFactor::positive(std::exp(-1.0));
    for (double s : {0.3, 0.45, 0.6}) {
        for (double m : {0.25, 0.4}) {
            DoubleLogCoords d;
            d.boundary = {s};
            d.interior = {std::polar(m, 2.0)};
            const auto [v, dp] = chart_transition(pr.p, pr.q, d, {});
            EXPECT_NEAR(dp.boundary[0], rescale_corner_double(s, inv_e), 1e-9);
            EXPECT_LT(std::abs(dp.interior[0] - rescale_double_log(d.interior[0], inv_e)), 1e-9);
        }
    }
}

TEST(Transition, UnsmoothedNodesStayExactlyZero) {
    const auto pr = builtin_pair("mixed-2-2:nonlinear");
    DoubleLogCoords d;
    d.boundary = {0.0};
    d.interior = {std::polar(0.35, 0.4)};
    auto [v, dp] = chart_transition(pr.p, pr.q, d, {});
    EXPECT_EQ(dp.boundary[0], 0.0);
    EXPECT_NE(dp.interior[0], cplx<double>(0.0, 0.0));
    d.boundary = {0.4};
    d.interior = {{0.0, 0.0}};
    std::tie(v, dp) = chart_transition(pr.p, pr.q, d, {});
    EXPECT_EQ(dp.interior[0], cplx<double>(0.0, 0.0));
    EXPECT_GT(dp.boundary[0], 0.0);
}

TEST(Transition, RotatedFamilyShiftsTheAngle) {
    const auto pr = builtin_pair("two-sphere:rotate");
    ChartTransition tr(pr.p, pr.q);
    const auto sol = tr.solve(log_point({}, {}, {12.0}, {0.3}));
    EXPECT_NEAR(to_double(sol.interior_theta[0]), 1.0, 1e-12);
    EXPECT_NEAR(to_double(sol.interior_delta[0]), 0.0, 1e-12);
}

TEST(Transition, NonlinearPairConvergesAndCaps) {
    const auto pr = builtin_pair("mixed-2-2:nonlinear");
    ChartTransition tr(pr.p, pr.q);
    const auto a = tr.solve(log_point({}, {10.0}, {12.0}, {0.5}));
    EXPECT_LT(a.residual, 1e-40);
    EXPECT_GT(std::abs(to_double(a.boundary_delta[0])), 1e-12);  // an O(r) correction, not zero
    const auto b = tr.solve(log_point({}, {40.0}, {40.0}, {0.5}));
    const auto c = tr.solve(log_point({}, {500.0}, {1e9}, {0.5}));
    EXPECT_EQ(b.boundary_delta[0], c.boundary_delta[0]);
    EXPECT_EQ(b.interior_theta[0], c.interior_theta[0]);
}

TEST(Transition, RejectsMismatchedCenters) {
    EXPECT_THROW(ChartTransition(builtin_center("two-sphere"), builtin_center("disk-4")), NoOverlapError);
    const auto pr = builtin_pair("two-sphere:identical");
    ChartTransition tr(pr.p, pr.q);
    EXPECT_THROW(tr.solve(log_point({}, {}, {1.0}, {0.0})), DomainError);
    EXPECT_THROW(builtin_pair("two-sphere:bogus"), DomainError);
}

TEST(Transition, FlatLayoutRoundTrip) {
    const auto c = builtin_center("mixed-2-2");
    const std::vector<mp_real> x = {mp_real("0.4"), mp_real("0.1"), mp_real("-0.2")};
    for (auto pres : {Presentation::single_log, Presentation::double_log}) {
        const auto y = flat_from_log_point(c, pres, log_point_from_flat(c, pres, x));
        for (std::size_t k = 0; k < x.size(); ++k) EXPECT_LT(to_double(abs(y[k] - x[k])), 1e-60);
    }
}
