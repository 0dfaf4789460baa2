#include "polywave/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "polywave/csv.hpp"
#include "polywave/littlewood_paley.hpp"

namespace polywave {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// exp(-i t mu), shared by propagate and duhamel so both round identically.
inline cplx phase(double t, double mu) { return {std::cos(t * mu), -std::sin(t * mu)}; }

void require_match(const SpectralBasis& basis, const SpectralState& s) {
    if (s.coeffs.size() != basis.count()) throw InputError("state does not match the basis");
}

double spread_of(const SpectralBasis& basis, Index first, Index count) {
    if (count == 0) return 0.0;
    return basis.eigenvalues[first + count - 1] - basis.eigenvalues[first];
}

} // namespace

AdmissiblePair AdmissiblePair::from_p(double p) {
    AdmissiblePair a{p, 2.0 * p / (p - 2.0)};
    a.validate();
    return a;
}

void AdmissiblePair::validate() const {
    if (!(p > 2.0)) throw InputError("admissible pair needs p > 2 (got p = " + format_number(p) + ")");
    if (!(q >= 2.0) || std::isinf(q)) throw InputError("admissible pair needs finite q >= 2 (got q = " + format_number(q) + ")");
    const double gap = 2.0 / p + 2.0 / q - 1.0;
    if (std::abs(gap) > 1e-12)
        throw InputError("pair (p, q) = (" + format_number(p) + ", " + format_number(q) +
                         ") violates 2/p + 2/q = 1 (off by " + format_number(gap) + ")");
}

void TimeGrid::validate() const {
    if (!(t_start < t_end)) throw InputError("time grid needs t_start < t_end");
    if (samples < 9) throw InputError("time grid needs at least 9 samples");
}

std::vector<double> simpson_weights(int n, double h) {
    if (n < 4) throw InputError("Simpson rule needs at least 4 nodes");
    std::vector<double> w(n, 0.0);
    const int intervals = n - 1;
    const int simpson_end = intervals % 2 == 0 ? n - 1 : n - 4; // last node of the 1/3 part
    for (int i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (intervals % 2 == 1) {
        const int s = n - 4;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    return w;
}

SpectralState propagate(const SpectralBasis& basis, const SpectralState& f, double t) {
    require_match(basis, f);
    SpectralState out = f;
    for (Index j = 0; j < basis.count(); ++j) out.coeffs[j] = phase(t, basis.eigenvalues[j]) * f.coeffs[j];
    return out;
}

int nodes_for(double length, double spread, double q, const TimeResolution& res) {
    const double omega = std::ceil(q / 2.0) * spread;
    const double steps = std::ceil(length * omega / res.radians_per_step);
    int n = std::max(res.min_nodes, static_cast<int>(std::min(steps, 1e7)) + 1);
    if (n % 2 == 0) ++n;
    return n;
}

std::vector<double> lp_time_integrals(const SpectralBasis& basis, const LqQuadrature& quad, Index first,
                                      const Eigen::MatrixXcd& coeffs, AdmissiblePair pair, double t0, double t1,
                                      int nodes) {
    pair.validate();
    const Index m = coeffs.rows(), S = coeffs.cols();
    if (first < 0 || first + m > basis.count()) throw InputError("mode range outside the basis");
    if (static_cast<std::size_t>(basis.vertex_count()) != quad.vertex_count())
        throw InputError("quadrature mesh does not match the basis");
    const auto phi = basis.modes.middleCols(first, m);
    const VectorXd mu = basis.eigenvalues.segment(first, m);
    const auto w = simpson_weights(nodes, (t1 - t0) / (nodes - 1));
    std::vector<double> out(S, 0.0);
    MatrixXd B(m, 2 * S), U(basis.vertex_count(), 2 * S);
    for (int n = 0; n < nodes; ++n) {
        const double t = n == nodes - 1 ? t1 : t0 + (t1 - t0) * n / (nodes - 1);
        for (Index j = 0; j < m; ++j) {
            const cplx e = phase(t, mu[j]);
            for (Index s = 0; s < S; ++s) {
                const cplx z = e * coeffs(j, s);
                B(j, s) = z.real();
                B(j, S + s) = z.imag();
            }
        }
        U.noalias() = phi * B;
        for (Index s = 0; s < S; ++s) {
            const double I = quad.integral(U.col(s).data(), U.col(S + s).data(), pair.q);
            out[s] += w[n] * std::pow(I, pair.p / pair.q);
        }
    }
    return out;
}

double lplq_norm(const SpectralBasis& basis, const LqQuadrature& quad, const SpectralState& f, AdmissiblePair pair,
                 const TimeGrid& grid) {
    require_match(basis, f);
    grid.validate();
    const auto I = lp_time_integrals(basis, quad, 0, f.coeffs, pair, grid.t_start, grid.t_end, grid.samples);
    return std::pow(I[0], 1.0 / pair.p);
}

EnsembleKind parse_ensemble_kind(const std::string& name) {
    if (name == "gaussian") return EnsembleKind::gaussian;
    if (name == "localized") return EnsembleKind::localized;
    if (name == "mixed") return EnsembleKind::mixed;
    throw InputError("unknown ensemble kind '" + name + "' (gaussian, localized, mixed)");
}

const char* ensemble_kind_name(EnsembleKind kind) {
    switch (kind) {
    case EnsembleKind::gaussian: return "gaussian";
    case EnsembleKind::localized: return "localized";
    case EnsembleKind::mixed: return "mixed";
    }
    return "?";
}

ModeRange band_range(const SpectralBasis& basis, int k) {
    ModeRange r;
    const auto idx = band_modes(basis, k, basis.trusted_count);
    if (idx.empty()) return r;
    r.first = idx.front();
    r.count = idx.back() - idx.front() + 1;
    return r;
}

namespace {

EnsembleKind sample_kind(const Ensemble& e, int s) {
    if (e.kind != EnsembleKind::mixed) return e.kind;
    return s % 2 == 0 ? EnsembleKind::gaussian : EnsembleKind::localized;
}

/// Coefficients phi_j(x0) w_j on the range, for a random vertex where they do not all vanish.
Eigen::VectorXcd localized_column(const SpectralBasis& basis, ModeRange range, const VectorXd& weight,
                                  std::mt19937_64& rng) {
    std::uniform_int_distribution<Index> pick(0, basis.vertex_count() - 1);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const Index v = pick(rng);
        Eigen::VectorXcd c(range.count);
        for (Index j = 0; j < range.count; ++j) c[j] = weight[j] * basis.modes(v, range.first + j);
        if (c.norm() > 0.0) return c;
    }
    throw NumericalError("evolution", "could not find a vertex where the band does not vanish");
}

Eigen::VectorXcd gaussian_column(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Eigen::VectorXcd c(n);
    for (Index j = 0; j < n; ++j) {
        const double re = normal(rng);
        c[j] = cplx(re, normal(rng));
    }
    return c;
}

} // namespace

Eigen::MatrixXcd ensemble_data(const SpectralBasis& basis, ModeRange range, int k, const Ensemble& e) {
    if (e.samples <= 0) throw InputError("ensemble needs at least one sample");
    if (range.count == 0) throw InputError("ensemble on an empty mode range");
    std::mt19937_64 rng(e.seed);
    VectorXd weight(range.count);
    for (Index j = 0; j < range.count; ++j) weight[j] = k >= 0 ? beta_k(k, basis.frequencies[range.first + j]) : 1.0;
    Eigen::MatrixXcd C(range.count, e.samples);
    for (int s = 0; s < e.samples; ++s)
        C.col(s) = sample_kind(e, s) == EnsembleKind::gaussian ? gaussian_column(range.count, rng)
                                                               : localized_column(basis, range, weight, rng);
    return C;
}

std::vector<SampleResult> dyadic_experiment(const SpectralBasis& basis, const LqQuadrature& quad, int k,
                                            AdmissiblePair pair, const Ensemble& ensemble) {
    pair.validate();
    const ModeRange range = band_range(basis, k);
    if (range.count == 0) throw InputError("band " + std::to_string(k) + " holds no trusted frequency");
    const Eigen::MatrixXcd C = ensemble_data(basis, range, k, ensemble);
    const double L = std::ldexp(1.0, -k);
    const int nodes = nodes_for(L, spread_of(basis, range.first, range.count), pair.q, ensemble.resolution);
    const auto I = lp_time_integrals(basis, quad, range.first, C, pair, 0.0, L, nodes);
    std::vector<SampleResult> out(C.cols());
    for (Index s = 0; s < C.cols(); ++s) {
        out[s].norm_lplq = std::pow(I[s], 1.0 / pair.p);
        out[s].norm_data = C.col(s).norm();
        out[s].ratio = out[s].norm_lplq / out[s].norm_data;
        out[s].kind = sample_kind(ensemble, static_cast<int>(s));
    }
    return out;
}

std::vector<SampleResult> dyadic_strichartz(const SpectralBasis& basis, const LqQuadrature& quad, int k,
                                            AdmissiblePair pair, double T, const Ensemble& ensemble) {
    pair.validate();
    if (!(T > 0.0)) throw InputError("dyadic_strichartz: T must be positive");
    const ModeRange range = band_range(basis, k);
    if (range.count == 0) throw InputError("band " + std::to_string(k) + " holds no trusted frequency");
    const Eigen::MatrixXcd C = ensemble_data(basis, range, k, ensemble);
    const double L = std::ldexp(1.0, -k);
    const double spread = spread_of(basis, range.first, range.count);
    std::vector<double> total(C.cols(), 0.0);
    const long m_lo = static_cast<long>(std::floor(-T / L)), m_hi = static_cast<long>(std::ceil(T / L));
    for (long m = m_lo; m < m_hi; ++m) {
        const double a = std::max(m * L, -T), b = std::min((m + 1) * L, T);
        if (!(b > a)) continue;
        const int nodes = nodes_for(b - a, spread, pair.q, ensemble.resolution);
        const auto I = lp_time_integrals(basis, quad, range.first, C, pair, a, b, nodes);
        for (std::size_t s = 0; s < I.size(); ++s) total[s] += I[s];
    }
    std::vector<SampleResult> out(C.cols());
    const double loss = std::pow(2.0, k / pair.p);
    for (Index s = 0; s < C.cols(); ++s) {
        out[s].norm_lplq = std::pow(total[s], 1.0 / pair.p);
        out[s].norm_data = C.col(s).norm();
        out[s].ratio = out[s].norm_lplq / (loss * out[s].norm_data);
        out[s].kind = sample_kind(ensemble, static_cast<int>(s));
    }
    return out;
}

double strichartz_ratio(const SpectralBasis& basis, const LqQuadrature& quad, const SpectralState& f,
                        AdmissiblePair pair, double T, const TimeResolution& res) {
    require_match(basis, f);
    pair.validate();
    if (!(T > 0.0)) throw InputError("strichartz_ratio: T must be positive");
    Index first = -1, last = -1;
    for (Index j = 0; j < f.coeffs.size(); ++j)
        if (f.coeffs[j] != cplx(0.0)) {
            if (first < 0) first = j;
            last = j;
        }
    const double hs = sobolev_norm(basis, f, 1.0 / pair.p);
    if (first < 0 || !(hs > 0.0)) throw InputError("strichartz_ratio: zero data");
    const Index m = last - first + 1;
    const int nodes = nodes_for(2.0 * T, spread_of(basis, first, m), pair.q, res);
    const auto I = lp_time_integrals(basis, quad, first, f.coeffs.segment(first, m), pair, -T, T, nodes);
    return std::pow(I[0], 1.0 / pair.p) / hs;
}

std::vector<SampleResult> mixed_band_strichartz(const SpectralBasis& basis, const LqQuadrature& quad, int K,
                                                AdmissiblePair pair, double T, const Ensemble& e) {
    pair.validate();
    if (K < 0) throw InputError("mixed_band_strichartz: K must be nonnegative");
    if (!(T > 0.0)) throw InputError("mixed_band_strichartz: T must be positive");
    if (e.samples <= 0) throw InputError("ensemble needs at least one sample");
    // Modes with a nonzero piece in some band k <= K: lambda < 2^K.
    const double top = std::ldexp(1.0, K);
    Index count = 0;
    while (count < static_cast<Index>(basis.trusted_count) && basis.frequencies[count] < top) ++count;
    if (count == 0) throw InputError("no trusted modes below 2^K");
    const ModeRange range{0, count};
    VectorXd envelope(count);
    for (Index j = 0; j < count; ++j) envelope[j] = cutoff(std::ldexp(basis.frequencies[j], -K));

    std::mt19937_64 rng(e.seed);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(count, e.samples);
    for (int s = 0; s < e.samples; ++s) {
        if (sample_kind(e, s) == EnsembleKind::localized) {
            C.col(s) = localized_column(basis, range, envelope, rng);
            continue;
        }
        for (int k = 0; k <= K; ++k) {
            Eigen::VectorXcd piece = gaussian_column(count, rng);
            for (Index j = 0; j < count; ++j) piece[j] *= beta_k(k, basis.frequencies[j]);
            const double n = piece.norm();
            if (n > 0.0) C.col(s) += piece / n;
        }
    }
    const int nodes = nodes_for(2.0 * T, spread_of(basis, 0, count), pair.q, e.resolution);
    const auto I = lp_time_integrals(basis, quad, 0, C, pair, -T, T, nodes);
    std::vector<SampleResult> out(e.samples);
    const double s_exp = 1.0 / pair.p;
    for (int s = 0; s < e.samples; ++s) {
        double hs = 0.0;
        for (Index j = 0; j < count; ++j)
            hs += std::pow(1.0 + std::max(basis.eigenvalues[j], 0.0), s_exp) * std::norm(C(j, s));
        out[s].norm_lplq = std::pow(I[s], 1.0 / pair.p);
        out[s].norm_data = std::sqrt(hs);
        out[s].ratio = out[s].norm_lplq / out[s].norm_data;
        out[s].kind = sample_kind(e, s);
    }
    return out;
}

std::vector<SpectralState> duhamel(const SpectralBasis& basis, const SpectralState& f,
                                   const std::vector<SpectralState>& forcing, const std::vector<double>& times) {
    require_match(basis, f);
    if (times.size() < 2) throw InputError("duhamel: need at least two time nodes");
    if (forcing.size() != times.size())
        throw InputError("duhamel: " + std::to_string(forcing.size()) + " forcing samples for " +
                         std::to_string(times.size()) + " time nodes");
    const double dir = times[1] > times[0] ? 1.0 : -1.0;
    for (std::size_t n = 1; n < times.size(); ++n)
        if (!((times[n] - times[n - 1]) * dir > 0.0)) throw InputError("duhamel: times must be strictly monotone");
    for (const auto& F : forcing) require_match(basis, F);

    const Index m = basis.count();
    const double t0 = times[0];
    // Interaction picture: v(t) = e^(i t mu) c(t), v' = i e^(i t mu) F(t).
    Eigen::VectorXcd v0(m), integral = Eigen::VectorXcd::Zero(m), g_prev(m);
    for (Index j = 0; j < m; ++j) {
        const double mu = basis.eigenvalues[j];
        v0[j] = std::conj(phase(t0, mu)) * f.coeffs[j];
        g_prev[j] = std::conj(phase(t0, mu)) * forcing[0].coeffs[j];
    }
    const cplx I(0.0, 1.0);
    std::vector<SpectralState> out;
    out.reserve(times.size());
    for (std::size_t n = 0; n < times.size(); ++n) {
        const double t = times[n];
        if (n > 0) {
            const double h = t - times[n - 1];
            for (Index j = 0; j < m; ++j) {
                const cplx g = std::conj(phase(t, basis.eigenvalues[j])) * forcing[n].coeffs[j];
                integral[j] += 0.5 * h * (g_prev[j] + g);
                g_prev[j] = g;
            }
        }
        SpectralState s = f;
        for (Index j = 0; j < m; ++j) s.coeffs[j] = phase(t, basis.eigenvalues[j]) * (v0[j] + I * integral[j]);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SpectralState> duhamel(const SpectralBasis& basis, const SpectralState& f,
                                   const std::vector<SpectralState>& forcing, const TimeGrid& grid) {
    grid.validate();
    std::vector<double> times(grid.samples);
    for (int i = 0; i < grid.samples; ++i) times[i] = grid.node(i);
    return duhamel(basis, f, forcing, times);
}

double band_sobolev_sum(const SpectralBasis& basis, const SpectralState& f, double p) {
    require_match(basis, f);
    double sum = 0.0;
    for (int k = 0; k <= top_band(basis); ++k)
        sum += std::pow(2.0, 2.0 * k / p) * project_band(basis, f, k).coeffs.squaredNorm();
    return sum;
}

void write_strichartz_csv(std::ostream& out, const std::string& surface, const std::string& bc, AdmissiblePair pair,
                          std::uint64_t seed, const std::vector<StrichartzRow>& rows) {
    CsvWriter w(out, "strichartz", 1,
                {"surface", "bc", "p", "q", "k", "T", "sample_id", "seed", "ratio", "norm_lplq", "norm_h_s"});
    for (const auto& r : rows)
        w.row({surface, bc, pair.p, pair.q, static_cast<std::int64_t>(r.k), r.T, static_cast<std::int64_t>(r.sample_id),
               static_cast<std::int64_t>(seed), r.result.ratio, r.result.norm_lplq, r.result.norm_data});
}

double log_slope(const std::vector<int>& ks, const std::vector<double>& values) {
    if (ks.size() != values.size() || ks.size() < 2) throw InputError("log_slope: need at least two points");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (!(values[i] > 0.0)) throw InputError("log_slope: values must be positive");
        mx += ks[i] / n;
        my += std::log(values[i]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        sxy += (ks[i] - mx) * (std::log(values[i]) - my);
        sxx += (ks[i] - mx) * (ks[i] - mx);
    }
    return sxy / sxx;
}

} // namespace polywave
