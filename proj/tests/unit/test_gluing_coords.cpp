#include "cornerlog/gluing_coords.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cornerlog;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double rel(cplx<double> a, cplx<double> b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Admissible log-coordinate sample: T in (-log c + margin, 100].
double random_T(std::mt19937_64& rng, double lo = 3.0, double hi = 100.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

TEST(ToLog, BoundaryValue) {
    NodeParams p;
    p.boundary = {std::exp(-10.0)};
    const auto L = to_log(p);
    ASSERT_EQ(L.boundary.size(), 1u);
    EXPECT_NEAR(L.boundary[0], 10.0, 1e-13);
}

TEST(ToLog, UnsmoothedNodesGoToInfinity) {
    NodeParams p;
    p.boundary = {0.0};
    p.interior = {{0.0, 0.0}};
    const auto L = to_log(p);
    EXPECT_TRUE(std::isinf(L.boundary[0]));
    EXPECT_TRUE(std::isinf(L.interior[0].T));
    EXPECT_FALSE(L.interior[0].theta.has_value());
}

TEST(ToLog, InteriorAngleIsMinusArgument) {
    NodeParams p;
    p.interior = {std::exp(-10.0) * std::polar(1.0, -1.0)};
    const auto L = to_log(p);
    EXPECT_NEAR(L.interior[0].T, 10.0, 1e-13);
    EXPECT_NEAR(*L.interior[0].theta, 1.0, 1e-13);
}

TEST(ToLog, RejectsOutOfRange) {
    NodeParams p;
    p.boundary = {0.5};
    EXPECT_THROW(to_log(p), DomainError);
    p.boundary = {-1e-3};
    EXPECT_THROW(to_log(p), DomainError);
    p.boundary = {};
    p.interior = {{0.2, 0.0}};
    EXPECT_THROW(to_log(p), DomainError);
    p.interior = {};
    p.cutoff = 1.0;
    EXPECT_THROW(to_log(p), DomainError);
}

TEST(FromLog, Values) {
    LogCoords L;
    L.boundary = {10.0, infinity<double>()};
    L.interior = {{10.0, pi<double>()}};
    const auto p = from_log(L);
    EXPECT_LT(rel(p.boundary[0], std::exp(-10.0)), 1e-14);
    EXPECT_EQ(p.boundary[1], 0.0);
    EXPECT_LT(rel(p.interior[0], {-std::exp(-10.0), 0.0}), 1e-14);
}

TEST(SingleLog, Values) {
    NodeParams p;
    p.boundary = {std::exp(-10.0), 0.0};
    p.interior = {{std::exp(-10.0), 0.0}};
    const auto c = to_single_log(p);
    EXPECT_NEAR(c.boundary[0], 0.1, 1e-15);
    EXPECT_EQ(c.boundary[1], 0.0);
    EXPECT_NEAR(c.interior[0].real(), 0.1, 1e-15);
    EXPECT_NEAR(c.interior[0].imag(), 0.0, 1e-15);
}

TEST(DoubleLog, Values) {
    NodeParams p;
    p.boundary = {std::exp(-10.0)};
    p.interior = {std::exp(-10.0) * std::polar(1.0, -1.0), {0.0, 0.0}};
    const auto d = to_double_log(p);
    EXPECT_NEAR(d.boundary[0], 0.43429448190325176, 1e-15);
    EXPECT_LT(rel(d.interior[0], std::polar(1.0 / std::log(10.0), 1.0)), 1e-14);
    EXPECT_EQ(d.interior[1], cplx<double>(0.0, 0.0));
}

TEST(DoubleLog, SigmaWithPositiveArgumentGivesConjugateAngle) {
    // theta = -arg sigma, so sigma = e^{-10} e^{+i} lands on phi = e^{-i}/log 10.
    NodeParams p;
    p.interior = {std::exp(-10.0) * std::polar(1.0, 1.0)};
    const auto d = to_double_log(p);
    EXPECT_LT(rel(d.interior[0], std::polar(1.0 / std::log(10.0), -1.0)), 1e-14);
}

TEST(DoubleLog, RejectsLargeCutoff) {
    NodeParams p;
    p.cutoff = 0.5;
    EXPECT_THROW(to_double_log(p), DomainError);
    EXPECT_THROW(double_log_radius(0.5), DomainError);
}

TEST(DoubleLog, Inverse) {
    DoubleLogCoords d;
    d.boundary = {1.0 / std::log(10.0), 0.0};
    d.interior = {{0.3, 0.0}, {0.0, 0.0}};
    const auto p = from_double_log(d);
    EXPECT_LT(rel(p.boundary[0], std::exp(-10.0)), 1e-13);
    EXPECT_EQ(p.boundary[1], 0.0);
    EXPECT_LT(rel(p.interior[0], {std::exp(-std::exp(1.0 / 0.3)), 0.0}), 1e-12);
    EXPECT_EQ(p.interior[1], cplx<double>(0.0, 0.0));
}

TEST(Ranges, DefaultCutoff) {
    EXPECT_NEAR(single_log_radius(kDefaultCutoff), 0.5, 1e-15);
    EXPECT_NEAR(double_log_radius(kDefaultCutoff), 1.0 / std::log(2.0), 1e-15);
    EXPECT_NEAR(log_lower_bound(kDefaultCutoff), 2.0, 1e-15);
}

TEST(RescaleLog, Values) {
    LogCoords L;
    L.boundary = {10.0, infinity<double>()};
    L.interior = {{10.0, 0.5}};
    auto out = rescale_log(L, {NodeKind::boundary, 0}, RescaleFactor::positive(std::exp(1.0)));
    EXPECT_NEAR(out.boundary[0], 9.0, 1e-14);
    out = rescale_log(L, {NodeKind::boundary, 1}, RescaleFactor::positive(2.0));
    EXPECT_TRUE(std::isinf(out.boundary[1]));
    out = rescale_log(L, {NodeKind::interior, 0}, RescaleFactor::positive(1.0));
    EXPECT_EQ(out.interior[0].T, 10.0);
    EXPECT_EQ(*out.interior[0].theta, 0.5);
    out = rescale_log(L, {NodeKind::interior, 0}, RescaleFactor(std::polar(std::exp(1.0), 0.2)));
    EXPECT_NEAR(out.interior[0].T, 9.0, 1e-14);
    EXPECT_NEAR(*out.interior[0].theta, 0.3, 1e-14);
}

TEST(RescaleLog, Errors) {
    LogCoords L;
    L.boundary = {2.5};
    EXPECT_THROW(rescale_log(L, {NodeKind::boundary, 0}, RescaleFactor::positive(std::exp(1.0))), RangeError);
    EXPECT_THROW(rescale_log(L, {NodeKind::boundary, 0}, RescaleFactor({0.0, 1.0})), DomainError);
    EXPECT_THROW(RescaleFactor::positive(-1.0), DomainError);
    EXPECT_THROW(RescaleFactor({0.0, 0.0}), DomainError);
}

TEST(ClosedForms, Values) {
    const auto e = RescaleFactor::positive(std::exp(1.0));
    EXPECT_NEAR(rescale_single_log({0.1, 0.0}, e).real(), 1.0 / 9.0, 1e-15);
    EXPECT_EQ(rescale_single_log({0.0, 0.0}, RescaleFactor::positive(5.0)), cplx<double>(0.0, 0.0));
    EXPECT_EQ(rescale_single_log({0.3, 0.1}, RescaleFactor::positive(1.0)), cplx<double>(0.3, 0.1));
    EXPECT_NEAR(rescale_corner(0.1, e), 1.0 / 9.0, 1e-15);
    EXPECT_EQ(rescale_corner(0.0, e), 0.0);
    EXPECT_EQ(rescale_corner(0.25, RescaleFactor::positive(1.0)), 0.25);
    EXPECT_EQ(rescale_double_log({0.0, 0.0}, RescaleFactor::positive(7.0)), cplx<double>(0.0, 0.0));
    const cplx<double> phi = std::polar(1.0 / std::log(10.0), 0.4);
    EXPECT_NEAR(std::abs(rescale_double_log(phi, e)), 1.0 / std::log(9.0), 1e-14);
    EXPECT_EQ(rescale_double_log({0.2, 0.0}, RescaleFactor::positive(1.0)), cplx<double>(0.2, 0.0));
    EXPECT_EQ(rescale_corner_double(0.0, e), 0.0);
    EXPECT_NEAR(rescale_corner_double(1.0 / std::log(10.0), e), 1.0 / std::log(9.0), 1e-14);
    EXPECT_EQ(rescale_corner_double(0.3, RescaleFactor::positive(1.0)), 0.3);
}

TEST(ClosedForms, RangeErrors) {
    EXPECT_THROW(rescale_single_log({0.5, 0.0}, RescaleFactor::positive(std::exp(2.0))), RangeError);
    EXPECT_THROW(rescale_corner(0.6, RescaleFactor::positive(std::exp(2.0))), RangeError);
    EXPECT_THROW(rescale_double_log({2.0, 0.0}, RescaleFactor::positive(std::exp(3.0))), RangeError);
    EXPECT_THROW(rescale_single_log({0.1, 0.0}, RescaleFactor({0.0, 2.0})), DomainError);
}

TEST(Properties, RoundTrips) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(0.0, two_pi<double>());
    for (int k = 0; k < 1000; ++k) {
        NodeParams p;
        p.boundary = {std::exp(-random_T(rng))};
        p.interior = {std::exp(-random_T(rng)) * std::polar(1.0, ang(rng))};
        const auto a = from_log(to_log(p));
        const auto b = from_single_log(to_single_log(p));
        const auto c = from_double_log(to_double_log(p));
        for (const auto* q : {&a, &b, &c}) {
            EXPECT_LT(rel(q->boundary[0], p.boundary[0]), 1e-12);
            EXPECT_LT(rel(q->interior[0], p.interior[0]), 1e-12);
        }
    }
}

TEST(Properties, ClosedFormsMatchLogComposition) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0.0, two_pi<double>());
    std::uniform_real_distribution<double> la(-3.0, 3.0);
    int checked = 0;
    while (checked < 1000) {
        const double T = random_T(rng, 6.0);
        const double theta = ang(rng);
        const double a = la(rng);
        if (T - a <= 2.5) continue;
        const auto lambda = RescaleFactor::positive(std::exp(a));
        LogCoords L;
        L.boundary = {T};
        L.interior = {{T, theta}};
        const auto Lp = rescale_log(L, {NodeKind::interior, 0}, lambda);
        const auto Lb = rescale_log(L, {NodeKind::boundary, 0}, lambda);
        const auto s1 = single_log_from_log(L), s2 = single_log_from_log(Lp), s3 = single_log_from_log(Lb);
        const auto d1 = double_log_from_log(L), d2 = double_log_from_log(Lp), d3 = double_log_from_log(Lb);
        EXPECT_LT(rel(rescale_single_log(s1.interior[0], lambda), s2.interior[0]), 1e-12);
        EXPECT_LT(rel(rescale_corner(s1.boundary[0], lambda), s3.boundary[0]), 1e-12);
        EXPECT_LT(rel(rescale_double_log(d1.interior[0], lambda), d2.interior[0]), 1e-12);
        EXPECT_LT(rel(rescale_corner_double(d1.boundary[0], lambda), d3.boundary[0]), 1e-12);
        ++checked;
    }
}

TEST(Properties, Monotone) {
    double prev_t = -1.0, prev_s = -1.0;
    for (int k = 0; k <= 200; ++k) {
        NodeParams p;
        p.boundary = {kDefaultCutoff * k / 201.0};
        const double t = to_single_log(p).boundary[0];
        const double s = to_double_log(p).boundary[0];
        EXPECT_GT(t, prev_t);
        EXPECT_GT(s, prev_s);
        prev_t = t;
        prev_s = s;
    }
}

TEST(Properties, RotationEquivariance) {
    const auto lambda = RescaleFactor::positive(3.0);
    for (double alpha : {0.3, 1.7, 4.0}) {
        const cplx<double> rot = std::polar(1.0, alpha);
        const cplx<double> rho(0.12, -0.05), phi(0.2, 0.15);
        EXPECT_LT(rel(rescale_single_log(rot * rho, lambda), rot * rescale_single_log(rho, lambda)), 1e-14);
        EXPECT_LT(rel(rescale_double_log(rot * phi, lambda), rot * rescale_double_log(phi, lambda)), 1e-14);
    }
}

TEST(Properties, GroupLaw) {
    const auto l1 = RescaleFactor::positive(1.7), l2 = RescaleFactor::positive(0.6);
    const auto l12 = RescaleFactor::positive(1.7 * 0.6);
    for (double x : {0.02, 0.1, 0.2}) {
        EXPECT_LT(rel(rescale_corner(rescale_corner(x, l2), l1), rescale_corner(x, l12)), 1e-12);
        EXPECT_LT(rel(rescale_corner_double(rescale_corner_double(x, l2), l1), rescale_corner_double(x, l12)), 1e-12);
        const cplx<double> z = std::polar(x, 0.9);
        EXPECT_LT(rel(rescale_single_log(rescale_single_log(z, l2), l1), rescale_single_log(z, l12)), 1e-12);
        EXPECT_LT(rel(rescale_double_log(rescale_double_log(z, l2), l1), rescale_double_log(z, l12)), 1e-12);
    }
}
