#include <gtest/gtest.h>

#include <cmath>

#include "polywave/cone_kernel.hpp"
#include "polywave/error.hpp"

using namespace polywave;

TEST(GeometricTerms, Enumeration) {
    EXPECT_TRUE(geometric_terms({1.0}).empty());
    const auto half = geometric_terms({0.5});
    ASSERT_EQ(half.size(), 1u);
    EXPECT_EQ(half[0].y, M_PI);
    EXPECT_TRUE(half[0].at_endpoint);
    const auto third = geometric_terms({1.0 / 3.0});
    ASSERT_EQ(third.size(), 1u);
    EXPECT_NEAR(third[0].y, 2.0 * M_PI / 3.0, 1e-15);
    EXPECT_FALSE(third[0].at_endpoint);
    EXPECT_EQ(geometric_terms({0.1}).size(), 5u);
    EXPECT_THROW(geometric_terms({0.0}), InputError);
}

TEST(DiffractionKernel, ClosedFormCases) {
    for (double y : {0.0, 0.5, 3.0}) EXPECT_EQ(diffraction_kernel({1.0}, y), 0.0);
    EXPECT_NEAR(diffraction_kernel({2.0}, 0.0), 1.0 / (4.0 * M_PI), 1e-15);
    EXPECT_THROW(diffraction_kernel({2.0}, -1.0), InputError);
    // Decay like exp(-y / rho) for rho = 3/2.
    const double k20 = diffraction_kernel({1.5}, 20.0), k30 = diffraction_kernel({1.5}, 30.0);
    EXPECT_NEAR(std::log(k20 / k30), 10.0 / 1.5, 1e-4);
    EXPECT_TRUE(non_diffractive({1.0 / 3.0}));
    EXPECT_FALSE(non_diffractive({0.4}));
}

TEST(DiffractionIntegral, VanishesExactlyForInverseIntegers) {
    for (double rho : {1.0, 0.5, 1.0 / 3.0})
        for (double r : {0.0, 0.1, 2.0}) EXPECT_EQ(diffraction_integral({rho}, r, 0.3), 0.0);
}

TEST(DiffractionIntegral, ConvergesForWideCone) {
    const auto rep = diffraction_integral_report({1.5}, 0.0, 1.0);
    EXPECT_LE(rep.error, 1e-10);
    EXPECT_GT(rep.y_max, 10.0);
    EXPECT_TRUE(std::isfinite(rep.value));
    // At r = 0 the integral is the plain kernel integral, checked by a fine trapezoid sum.
    double sum = 0.0;
    const double h = 1e-3;
    for (int i = 0; i <= 200000; ++i) {
        const double w = i == 0 || i == 200000 ? 0.5 : 1.0;
        sum += w * h * diffraction_kernel({1.5}, i * h);
    }
    EXPECT_NEAR(rep.value, sum, 1e-7);
}

TEST(DiffractionIntegral, DampedByDistance) {
    const ConeParams c{0.75};
    // r^2 / 2t = 10 against r^2 / 2t = 1 at t = 1.
    EXPECT_LT(std::abs(diffraction_integral(c, std::sqrt(20.0), 1.0)), std::abs(diffraction_integral(c, std::sqrt(2.0), 1.0)));
}

TEST(DiagonalHeat, FlatPlaneAndRightAngle) {
    for (double t : {0.01, 1.0})
        for (double r : {0.0, 0.3, 5.0}) {
            EXPECT_NEAR(cone_diagonal_heat({1.0}, r, t), 1.0 / (4.0 * M_PI * t), 1e-12 / t);
            const double half = (0.5 + std::exp(-r * r / t)) / (2.0 * M_PI * t);
            EXPECT_NEAR(cone_diagonal_heat({0.5}, r, t), half, 1e-12 * half);
        }
}

TEST(DiagonalHeat, AveragedRuleMatchesImageKernel) {
    // The cone of angle pi is the plane modulo z -> -z, so its diagonal kernel
    // is (1/4 pi t)(1 + exp(-r^2/t)), i.e. a bracket of (1 + exp(-r^2/t)) / 2.
    for (double s : {0.1, 1.0, 4.0}) {
        const double b = cone_bracket({0.5}, std::sqrt(s), 1.0, PointMassRule::averaged);
        EXPECT_NEAR(b, 0.5 + 0.5 * std::exp(-s), 1e-15);
    }
}

TEST(DiagonalHeat, DependsOnRSquaredOverT) {
    for (double rho : {0.3, 0.5, 0.75, 1.5, 2.5})
        for (double r : {0.05, 0.4, 1.0}) {
            const ConeParams c{rho};
            EXPECT_EQ(cone_bracket(c, r, 0.2), cone_bracket(c, 2.0 * r, 0.8));
            EXPECT_GT(cone_diagonal_heat(c, r, 0.2), 0.0);
        }
}

TEST(DiagonalHeat, FarFromTipApproachesPlane) {
    for (double rho : {0.3, 0.75, 1.5, 3.0}) {
        const double v = cone_diagonal_heat({rho}, 10.0, 0.5);
        EXPECT_NEAR(v * 4.0 * M_PI * 0.5, 1.0, 1e-10);
    }
}

TEST(DiagonalHeat, RejectsNonpositiveTime) {
    EXPECT_THROW(cone_diagonal_heat({0.5}, 0.1, 0.0), InputError);
    EXPECT_THROW(cone_diagonal_heat({0.5}, 0.1, -1.0), InputError);
}
