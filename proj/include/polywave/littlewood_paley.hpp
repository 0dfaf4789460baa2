#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "polywave/spectral.hpp"

namespace polywave {

/// Smooth cutoff: 1 on [0, 1/2], 0 on [1, inf), built from exp(-1/x).
double cutoff(double zeta);
/// beta(zeta) = cutoff(zeta) - cutoff(2 zeta), supported in (1/4, 1).
double bump(double zeta);
/// beta_k(zeta) = beta(2^-k zeta) for k >= 1 and beta_0 = cutoff, so that the
/// pieces sum to one on [0, inf). Band k >= 1 lives on (2^(k-2), 2^k).
double beta_k(int k, double zeta);
/// beta_(k-1) + beta_k + beta_(k+1), with beta_(-1) = 0.
double widened_k(int k, double zeta);

MultiplierProfile make_bump();
MultiplierProfile dyadic_profile(int k);
MultiplierProfile widened_profile(int k);

/// r_m(theta) = r_0(2^m theta), r_0 = +1 on [0, 1/2] and -1 on (1/2, 1), period 1.
int rademacher(int m, double theta);

/// F_theta(zeta) = sum_{k=0}^{kmax} r_k(theta) beta_k(zeta) (beta_k replaced by
/// the widened pieces when `widened`). Frequencies are the argument throughout;
/// the sum is a full partition only up to 2^(kmax-1), which is `valid_up_to`.
MultiplierProfile randomized_profile(double theta, int kmax, bool widened = false);

/// Smallest kmax whose randomized profile covers frequencies up to lambda.
int kmax_for(double lambda);

struct MihlinOptions {
    /// Grid points per octave. The grid is anchored at integer multiples of
    /// 1/points_per_octave in log2(zeta), so dilation by 2^k shifts it exactly.
    int points_per_octave = 2048;
    /// log2 range used when the profile support is unbounded.
    double log2_lo = -6.0;
    double log2_hi = 24.0;
};

/// sup over 0 <= n <= N and the grid of |(zeta d/dzeta)^n F(zeta)|, with
/// derivatives by 5-point central differences in log zeta.
double mihlin_norm(const MultiplierProfile& F, int N, const MihlinOptions& options = {});

/// Largest mihlin_norm(F_theta, N) over the dyadic grid theta = j / 2^depth.
double mihlin_sup_over_theta(int depth, int kmax, int N, bool widened = false, const MihlinOptions& options = {});

/// Coefficients of beta_k(sqrt Delta) a.
SpectralState project_band(const SpectralBasis& basis, const SpectralState& state, int k);
/// Highest band with a nonzero piece on the basis frequencies.
int top_band(const SpectralBasis& basis);
/// Indices j < limit with beta_k(lambda_j) > 0.
std::vector<Eigen::Index> band_modes(const SpectralBasis& basis, int k, std::size_t limit);

struct SquareFunction {
    Eigen::VectorXd field; ///< (sum_k |u_k|^2)^(1/2) at the vertices
    double norm_s = 0.0;   ///< ||S a||_q
    double norm_a = 0.0;   ///< ||a||_q
    double ratio = 0.0;
};

/// Square function of the Littlewood-Paley pieces and the ratio ||S a||_q / ||a||_q.
/// The L^q norms use the same quadrature nodes for S a and a. Throws InputError
/// for a zero state or q outside (1, inf).
SquareFunction squarefunction(const SpectralBasis& basis, const LqQuadrature& quad, const SpectralState& state,
                              double q);

/// Ratios over random states with complex Gaussian coefficients on the trusted
/// modes of frequency at most `cutoff`.
std::vector<double> squarefunction_ensemble(const SpectralBasis& basis, const LqQuadrature& quad, double q,
                                            double cutoff, int samples, std::uint64_t seed);

struct KhintchineReport {
    double q = 0.0;
    double c_lower = 0.0; ///< min over samples of ||G||_q / ||G||_2
    double c_upper = 0.0; ///< max over samples of ||G||_q / ||G||_2
    std::size_t samples = 0;
};

/// ||sum_m b_m r_m||_{L^q[0,1]}, exact: the sum is constant on the 2^M dyadic
/// intervals of [0, 1] (M = length of b, at most 26).
double rademacher_sum_norm(const std::vector<double>& b, double q);

/// Empirical Khintchine constants over a set of coefficient sequences. Verifies
/// ||G||_2 = ||b||_2 for each sample; throws InputError on an empty sequence and
/// NumericalError if the L^2 identity fails.
KhintchineReport khintchine_check(const std::vector<std::vector<double>>& samples, double q);

/// Text form of the profiles: `beta k=3`, `widened k=3`, `bump`, `one`,
/// `ftheta theta=0.40625 kmax=12` (optionally `widened=1`).
MultiplierProfile parse_profile(const std::string& text);

/// CSV writer for squarefunction ratios: surface, q, cutoff, sample_id, ratio.
void write_squarefunction_csv(std::ostream& out, const std::string& surface, double q, double cutoff,
                              const std::vector<double>& ratios);

} // namespace polywave
