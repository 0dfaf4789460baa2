#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "polywave/spectral.hpp"

namespace polywave {

/// Exponents with 2/p + 2/q = 1, p > 2.
struct AdmissiblePair {
    double p = 4.0;
    double q = 4.0;

    static AdmissiblePair from_p(double p);
    /// Throws InputError naming the violated identity.
    void validate() const;
};

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    int samples = 33; ///< node count including both ends

    void validate() const;
    double node(int i) const { return t_start + (t_end - t_start) * i / (samples - 1); }
};

/// Composite Simpson weights for n >= 4 equally spaced nodes of spacing h (an
/// odd interval count closes with the 3/8 rule).
std::vector<double> simpson_weights(int n, double h);

/// c_j -> exp(-i t lambda_j^2) c_j.
SpectralState propagate(const SpectralBasis& basis, const SpectralState& f, double t);

/// Node count for a time interval of length `length` when the modulus |u|^q of
/// a solution built from eigenvalues spanning `spread` (max - min of lambda^2)
/// has to be resolved: at most `radians_per_step` of the fastest oscillation per
/// step, never fewer than `min_nodes`. Always odd.
struct TimeResolution {
    int min_nodes = 33;
    double radians_per_step = 0.5;
};
int nodes_for(double length, double spread, double q, const TimeResolution& res = {});

/// Integrals over [t0, t1] of ||u_s(t)||_q^p for a batch of solutions whose
/// initial coefficients (columns of `coeffs`) live on modes [first, first + rows).
/// One synthesis per time node serves all samples.
std::vector<double> lp_time_integrals(const SpectralBasis& basis, const LqQuadrature& quad, Eigen::Index first,
                                      const Eigen::MatrixXcd& coeffs, AdmissiblePair pair, double t0, double t1,
                                      int nodes);

/// (int ||u(t)||_q^p dt)^(1/p) over the grid by composite Simpson.
double lplq_norm(const SpectralBasis& basis, const LqQuadrature& quad, const SpectralState& f, AdmissiblePair pair,
                 const TimeGrid& grid);

enum class EnsembleKind {
    gaussian,  ///< complex standard normal coefficients on the band
    localized, ///< band pieces of point masses at random vertices
    mixed      ///< alternating gaussian and localized samples
};

struct Ensemble {
    int samples = 32;
    std::uint64_t seed = 7;
    EnsembleKind kind = EnsembleKind::mixed;
    TimeResolution resolution;
};

EnsembleKind parse_ensemble_kind(const std::string& name);
const char* ensemble_kind_name(EnsembleKind kind);

/// Trusted modes in band k as a contiguous index range [first, first + count).
struct ModeRange {
    Eigen::Index first = 0;
    Eigen::Index count = 0;
};
ModeRange band_range(const SpectralBasis& basis, int k);

/// Random initial data on a mode range: one column per sample. Localized
/// samples put c_j = beta_k(lambda_j) phi_j(x0) with x0 a random vertex (k < 0
/// uses weight 1).
Eigen::MatrixXcd ensemble_data(const SpectralBasis& basis, ModeRange range, int k, const Ensemble& ensemble);

struct SampleResult {
    double ratio = 0.0;
    double norm_lplq = 0.0;
    double norm_data = 0.0; ///< L^2 or H^(1/p) norm of the data, per experiment
    EnsembleKind kind = EnsembleKind::gaussian;
};

/// ||u_k||_{L^p([0, 2^-k]; L^q)} / ||u_k(0)||_{L^2} for each sample. Throws
/// InputError if band k holds no trusted frequency.
std::vector<SampleResult> dyadic_experiment(const SpectralBasis& basis, const LqQuadrature& quad, int k,
                                            AdmissiblePair pair, const Ensemble& ensemble);

/// ||u_k||_{L^p([-T, T]; L^q)} / (2^(k/p) ||u_k(0)||_{L^2}), accumulated over the
/// dyadic intervals [2^-k m, 2^-k (m + 1)] that tile [-T, T] (the last one
/// clipped when T is not a multiple of 2^-k).
std::vector<SampleResult> dyadic_strichartz(const SpectralBasis& basis, const LqQuadrature& quad, int k,
                                            AdmissiblePair pair, double T, const Ensemble& ensemble);

/// ||u||_{L^p([-T, T]; L^q)} / ||f||_{H^(1/p)}. Throws InputError for zero data.
double strichartz_ratio(const SpectralBasis& basis, const LqQuadrature& quad, const SpectralState& f,
                        AdmissiblePair pair, double T, const TimeResolution& res = {});

/// Strichartz ratios over data spread across bands 0..K with equal L^2 energy
/// per band (gaussian samples), or localized at a random vertex with the
/// frequency profile sum_{k <= K} beta_k (localized samples).
std::vector<SampleResult> mixed_band_strichartz(const SpectralBasis& basis, const LqQuadrature& quad, int K,
                                                AdmissiblePair pair, double T, const Ensemble& ensemble);

/// Solution of (D_t + Delta) u = F sampled at strictly monotone `times`, with
/// `forcing[n]` the coefficients of F at times[n]. Integrating-factor form
/// c(t) = e^(-i t mu) (c(t0) e^(i t0 mu) + i int e^(i s mu) F(s) ds), the
/// integral by the trapezoid rule on the interaction-picture integrand.
std::vector<SpectralState> duhamel(const SpectralBasis& basis, const SpectralState& f,
                                   const std::vector<SpectralState>& forcing, const std::vector<double>& times);
std::vector<SpectralState> duhamel(const SpectralBasis& basis, const SpectralState& f,
                                   const std::vector<SpectralState>& forcing, const TimeGrid& grid);

/// sum_k 2^(2k/p) ||u_k(0)||^2 over all bands, for the Sobolev aggregation check.
double band_sobolev_sum(const SpectralBasis& basis, const SpectralState& f, double p);

struct StrichartzRow {
    int k = 0;
    double T = 0.0;
    int sample_id = 0;
    SampleResult result;
};

/// surface, bc, p, q, k, T, sample_id, seed, ratio, norm_lplq, norm_h_s
void write_strichartz_csv(std::ostream& out, const std::string& surface, const std::string& bc, AdmissiblePair pair,
                          std::uint64_t seed, const std::vector<StrichartzRow>& rows);

/// Least-squares slope of log(values) against ks.
double log_slope(const std::vector<int>& ks, const std::vector<double>& values);

} // namespace polywave
