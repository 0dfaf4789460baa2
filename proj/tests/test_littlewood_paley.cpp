#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "polywave/littlewood_paley.hpp"
#include "support.hpp"

using namespace polywave;
using Eigen::Index;

TEST(Bump, SupportAndTelescoping) {
    const MultiplierProfile beta = make_bump();
    EXPECT_EQ(beta(0.2), 0.0);
    EXPECT_EQ(beta(4.5), 0.0);
    EXPECT_EQ(beta(0.25), 0.0);
    EXPECT_EQ(beta(1.0), 0.0);
    double sum = 0.0;
    for (int k = 1; k <= 60; ++k) sum += beta(std::ldexp(10.0, -k));
    EXPECT_NEAR(sum, 1.0, 1e-12);
    // Only adjacent scales overlap: at zeta = 2 the pieces k = 1, 2, 3 carry all the mass.
    EXPECT_NEAR(beta_k(1, 2.0) + beta_k(2, 2.0) + beta_k(3, 2.0), 1.0, 1e-15);
    EXPECT_EQ(beta_k(4, 2.0), 0.0);
}

TEST(Bump, NonnegativeAndSmooth) {
    double prev = bump(0.25);
    for (int i = 1; i <= 20000; ++i) {
        const double z = 0.25 + 0.75 * i / 20000.0;
        const double b = bump(z);
        EXPECT_GE(b, 0.0);
        EXPECT_LE(std::abs(b - prev), 1e-3);
        prev = b;
    }
    EXPECT_DOUBLE_EQ(bump(0.5), 1.0);
}

TEST(Dyadic, PartitionOfUnity) {
    for (double z : {0.0, 0.1, 1.0, 7.0, 300.0, 12345.678}) {
        double sum = 0.0;
        for (int k = 0; k <= 40; ++k) sum += dyadic_profile(k)(z);
        EXPECT_NEAR(sum, 1.0, 1e-12) << z;
    }
    EXPECT_EQ(beta_k(0, 0.1), 1.0);
    for (int k = 1; k <= 10; ++k) EXPECT_EQ(beta_k(k, std::ldexp(1.0, k)), bump(1.0));
    EXPECT_THROW(dyadic_profile(-1), InputError);
}

TEST(Dyadic, WidenedPieces) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const int k = i % 10;
        const double z = std::ldexp(4.0 * u(rng), k - 1);
        EXPECT_EQ(widened_k(k, z) * beta_k(k, z), beta_k(k, z));
        EXPECT_LE(widened_k(k, z), 1.0 + 1e-15);
    }
    for (double z : {0.1, 0.4, 0.7, 1.3, 2.5}) EXPECT_EQ(widened_k(0, z), beta_k(0, z) + beta_k(1, z));
}

TEST(Dyadic, ProjectorsSeparatedByThreeBandsAreOrthogonal) {
    const SpectralBasis& b = test::square().basis;
    const SpectralState f = make_state(b, test::random_coeffs(b.count(), 8));
    const int top = top_band(b);
    for (int k = 0; k <= top; ++k)
        for (int l = k + 3; l <= top; ++l)
            EXPECT_EQ(project_band(b, project_band(b, f, k), l).coeffs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dyadic, ReconstructionFromBands) {
    const SpectralBasis& b = test::square().basis;
    const SpectralState f = make_state(b, test::random_coeffs(b.count(), 9));
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(b.count());
    for (int k = 0; k <= top_band(b); ++k) sum += project_band(b, f, k).coeffs;
    EXPECT_LE((sum - f.coeffs).cwiseAbs().maxCoeff(), 1e-14 * f.coeffs.cwiseAbs().maxCoeff());
    EXPECT_EQ(project_band(b, f, top_band(b) + 1).coeffs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Rademacher, Values) {
    EXPECT_EQ(rademacher(0, 0.25), 1);
    EXPECT_EQ(rademacher(0, 0.75), -1);
    EXPECT_EQ(rademacher(0, 1.3), rademacher(0, 0.3));
    EXPECT_EQ(rademacher(2, 1.0 / 8.0), rademacher(0, 0.5));
    EXPECT_EQ(rademacher(2, 1.0 / 8.0), 1);
    EXPECT_EQ(rademacher(0, -0.25), -1);
}

TEST(Randomized, ThetaZeroIsOneAndBoundedByThree) {
    const MultiplierProfile f0 = randomized_profile(0.0, 12);
    for (double z : {0.0, 0.3, 1.0, 17.0, 1000.0}) EXPECT_NEAR(f0(z), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(f0.valid_up_to, std::ldexp(1.0, 11));
    for (int j = 0; j < 64; ++j)
        for (bool widened : {false, true}) {
            const MultiplierProfile f = randomized_profile(j / 64.0, 12, widened);
            for (int i = 0; i <= 400; ++i) {
                const double z = std::ldexp(1.0, -3) * std::pow(2.0, 13.0 * i / 400.0);
                EXPECT_LE(std::abs(f(z)), 3.0 + 1e-12);
            }
        }
    EXPECT_GE(kmax_for(100.0), 8);
    EXPECT_GE(std::ldexp(1.0, kmax_for(100.0) - 1), 100.0);
}

TEST(Mihlin, ConstantAndDilationInvariance) {
    MultiplierProfile one{[](double) { return 1.0; }};
    EXPECT_DOUBLE_EQ(mihlin_norm(one, 2), 1.0);
    EXPECT_NEAR(mihlin_norm(dyadic_profile(3), 2), mihlin_norm(dyadic_profile(8), 2), 1e-10);
    EXPECT_GT(mihlin_norm(dyadic_profile(3), 2), 1.0);
}

TEST(Mihlin, DerivativesOfAGaussianInLogScale) {
    // f = exp(-4 s^2) with s = log zeta: sup |f| = 1, sup |f'| = sqrt(8/e), sup |f''| = 8.
    MultiplierProfile smooth{[](double z) { return std::exp(-4.0 * std::pow(std::log(z), 2)); }};
    EXPECT_DOUBLE_EQ(mihlin_norm(smooth, 0), 1.0);
    EXPECT_NEAR(mihlin_norm(smooth, 1), std::sqrt(8.0 / std::exp(1.0)), 1e-6);
    EXPECT_NEAR(mihlin_norm(smooth, 2), 8.0, 1e-5);
}

TEST(Mihlin, SupOverThetaStable) {
    const double a = mihlin_sup_over_theta(6, 10, 2), b = mihlin_sup_over_theta(7, 10, 2);
    EXPECT_LT(std::abs(a / b - 1.0), 0.01);
}

TEST(SquareFunction, SingleModeScalar) {
    const auto& fx = test::square();
    const LqQuadrature quad(fx.mesh);
    for (Index j = 1; j < static_cast<Index>(fx.basis.trusted_count); j += 5) {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(fx.basis.count());
        c[j] = 1.0;
        const SquareFunction s = squarefunction(fx.basis, quad, make_state(fx.basis, c), 4.0);
        double sq = 0.0;
        for (int k = 0; k <= 20; ++k) sq += std::pow(beta_k(k, fx.basis.frequencies[j]), 2);
        const double scalar = std::sqrt(sq);
        EXPECT_GE(scalar, 1.0 / std::sqrt(3.0));
        EXPECT_LE(scalar, 1.0);
        const Eigen::VectorXd expect = scalar * fx.basis.modes.col(j).cwiseAbs();
        EXPECT_LE((s.field - expect).cwiseAbs().maxCoeff(), 1e-12 * expect.maxCoeff());
        EXPECT_NEAR(s.ratio, scalar, 1e-12);
    }
}

TEST(SquareFunction, ZeroStateAndBadExponent) {
    const auto& fx = test::square();
    const LqQuadrature quad(fx.mesh);
    const SpectralState zero = make_state(fx.basis, Eigen::VectorXcd::Zero(fx.basis.count()));
    EXPECT_THROW(squarefunction(fx.basis, quad, zero, 4.0), InputError);
    const SpectralState f = make_state(fx.basis, test::random_coeffs(fx.basis.count(), 1));
    EXPECT_THROW(squarefunction(fx.basis, quad, f, 1.0), InputError);
    EXPECT_THROW(squarefunction(fx.basis, quad, f, INFINITY), InputError);
}

TEST(SquareFunction, RandomStatesStayInABand) {
    const auto& fx = test::square();
    const LqQuadrature quad(fx.mesh);
    const double cut = 0.5 * fx.basis.max_trusted_frequency();
    const auto r = squarefunction_ensemble(fx.basis, quad, 4.0, cut, 16, 3);
    ASSERT_EQ(r.size(), 16u);
    for (double x : r) {
        EXPECT_GT(x, 0.3);
        EXPECT_LT(x, 1.5);
    }
    EXPECT_EQ(r, squarefunction_ensemble(fx.basis, quad, 4.0, cut, 16, 3));
}

TEST(SquareFunction, DualityBound) {
    // |<a1, a2>| <= ||S a1||_q ||S~ a2||_q' with S~ built from the widened pieces.
    const auto& fx = test::square();
    const SpectralBasis& b = fx.basis;
    const LqQuadrature quad(fx.mesh);
    const Index n = static_cast<Index>(b.trusted_count);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Eigen::VectorXcd c1 = test::random_coeffs(b.count(), 100 + seed), c2 = test::random_coeffs(b.count(), 200 + seed);
        c1.tail(b.count() - n).setZero();
        c2.tail(b.count() - n).setZero();
        const SpectralState a1 = make_state(b, c1), a2 = make_state(b, c2);
        const double q = 4.0, qd = 4.0 / 3.0;
        std::vector<Eigen::VectorXcd> p1, p2;
        cplx pairing = 0.0;
        for (int k = 0; k <= top_band(b); ++k) {
            const SpectralState u1 = project_band(b, a1, k);
            SpectralState u2 = a2;
            for (Index j = 0; j < b.count(); ++j) u2.coeffs[j] *= widened_k(k, b.frequencies[j]);
            pairing += u2.coeffs.dot(u1.coeffs);
            p1.push_back(evaluate_on_mesh(b, u1));
            p2.push_back(evaluate_on_mesh(b, u2));
        }
        const cplx direct = c2.dot(c1);
        EXPECT_LE(std::abs(pairing - direct), 1e-10 * std::abs(direct) + 1e-10);
        const double s1 = std::pow(quad.integral_of_sum_squares(p1, q), 1.0 / q);
        const double s2 = std::pow(quad.integral_of_sum_squares(p2, qd), 1.0 / qd);
        EXPECT_LE(std::abs(direct), s1 * s2 * (1.0 + 1e-6));
    }
}

TEST(Khintchine, SingleFunctionAndPair) {
    for (double q : {1.0, 2.0, 3.0, 4.0, 7.5}) EXPECT_DOUBLE_EQ(rademacher_sum_norm({1.0}, q), 1.0);
    EXPECT_NEAR(rademacher_sum_norm({1.0, 1.0}, 2.0), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(rademacher_sum_norm({1.0, 1.0}, 4.0), std::pow(8.0, 0.25), 1e-15);
}

TEST(Khintchine, MatchesBruteForceIntegration) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    std::vector<double> b(6);
    for (double& x : b) x = g(rng);
    // Midpoints of 2^12 cells sample every constant piece of G.
    double sum = 0.0;
    const int cells = 1 << 12;
    for (int i = 0; i < cells; ++i) {
        const double theta = (i + 0.5) / cells;
        double G = 0.0;
        for (std::size_t m = 0; m < b.size(); ++m) G += b[m] * rademacher(static_cast<int>(m), theta);
        sum += std::pow(std::abs(G), 3.0) / cells;
    }
    EXPECT_NEAR(rademacher_sum_norm(b, 3.0), std::cbrt(sum), 1e-12);
}

TEST(Khintchine, ReportOrdering) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> samples(20);
    for (auto& s : samples) {
        s.resize(2 + rng() % 10);
        for (double& x : s) x = g(rng);
    }
    for (double q : {1.5, 4.0}) {
        const KhintchineReport r = khintchine_check(samples, q);
        EXPECT_GT(r.c_lower, 0.0);
        EXPECT_LE(r.c_lower, r.c_upper);
        EXPECT_EQ(r.samples, samples.size());
        if (q > 2.0) EXPECT_GE(r.c_lower, 1.0);
        else EXPECT_LE(r.c_upper, 1.0);
    }
    EXPECT_THROW(khintchine_check({{}}, 4.0), InputError);
}

TEST(Profiles, TextForm) {
    EXPECT_EQ(parse_profile("beta k=3")(6.0), beta_k(3, 6.0));
    EXPECT_EQ(parse_profile("widened k=2")(1.5), widened_k(2, 1.5));
    EXPECT_EQ(parse_profile("bump")(0.6), bump(0.6));
    EXPECT_EQ(parse_profile("one")(42.0), 1.0);
    const MultiplierProfile f = parse_profile("ftheta theta=0.40625 kmax=12");
    const MultiplierProfile g = randomized_profile(0.40625, 12);
    for (double z : {0.3, 3.0, 30.0, 300.0}) EXPECT_EQ(f(z), g(z));
    EXPECT_THROW(parse_profile("gamma k=1"), InputError);
    EXPECT_THROW(parse_profile("beta"), InputError);
}
