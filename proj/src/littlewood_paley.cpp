#include "polywave/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "polywave/csv.hpp"

namespace polywave {

namespace {

double smooth_step(double x) {
    const auto s = [](double y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; };
    const double a = s(x), b = s(1.0 - x);
    return a / (a + b);
}

std::string fmt(const char* head, int k) { return std::string(head) + " k=" + std::to_string(k); }

} // namespace

double cutoff(double zeta) {
    if (zeta <= 0.5) return 1.0;
    if (zeta >= 1.0) return 0.0;
    return smooth_step(2.0 * (1.0 - zeta));
}

double bump(double zeta) { return cutoff(zeta) - cutoff(2.0 * zeta); }

double beta_k(int k, double zeta) {
    if (k < 0) return 0.0;
    if (k == 0) return cutoff(zeta);
    return bump(std::ldexp(zeta, -k));
}

double widened_k(int k, double zeta) { return beta_k(k - 1, zeta) + beta_k(k, zeta) + beta_k(k + 1, zeta); }

MultiplierProfile make_bump() { return {bump, 0.25, 1.0, INFINITY, "bump"}; }

MultiplierProfile dyadic_profile(int k) {
    if (k < 0) throw InputError("dyadic_profile: k must be nonnegative");
    const double lo = k == 0 ? 0.0 : std::ldexp(1.0, k - 2);
    return {[k](double z) { return beta_k(k, z); }, lo, std::ldexp(1.0, k), INFINITY, fmt("beta", k)};
}

MultiplierProfile widened_profile(int k) {
    if (k < 0) throw InputError("widened_profile: k must be nonnegative");
    const double lo = k <= 1 ? 0.0 : std::ldexp(1.0, k - 3);
    return {[k](double z) { return widened_k(k, z); }, lo, std::ldexp(1.0, k + 1), INFINITY, fmt("widened", k)};
}

int rademacher(int m, double theta) {
    if (m < 0) throw InputError("rademacher: m must be nonnegative");
    double x = theta - std::floor(theta);
    x = std::ldexp(x, m);
    x -= std::floor(x);
    return x <= 0.5 ? 1 : -1;
}

MultiplierProfile randomized_profile(double theta, int kmax, bool widened) {
    if (kmax < 1) throw InputError("randomized_profile: kmax must be at least 1");
    std::vector<int> signs(kmax + 1);
    for (int k = 0; k <= kmax; ++k) signs[k] = rademacher(k, theta);
    MultiplierProfile p;
    p.eval = [signs, kmax, widened](double z) {
        double sum = 0.0;
        for (int k = 0; k <= kmax; ++k) {
            const double piece = widened ? widened_k(k, z) : beta_k(k, z);
            if (piece != 0.0) sum += signs[k] * piece;
        }
        return sum;
    };
    p.support_lo = 0.0;
    p.support_hi = std::ldexp(1.0, widened ? kmax + 1 : kmax);
    p.valid_up_to = std::ldexp(1.0, kmax - 1);
    std::ostringstream label;
    label << "ftheta theta=" << format_number(theta) << " kmax=" << kmax << (widened ? " widened=1" : "");
    p.label = label.str();
    return p;
}

int kmax_for(double lambda) {
    int k = 1;
    while (std::ldexp(1.0, k - 1) < lambda) ++k;
    return k;
}

double mihlin_norm(const MultiplierProfile& F, int N, const MihlinOptions& opt) {
    if (N < 0) throw InputError("mihlin_norm: N must be nonnegative");
    if (opt.points_per_octave < 8) throw InputError("mihlin_norm: grid too coarse");
    const int ppo = opt.points_per_octave;
    // Grid index i <-> zeta = 2^(i / ppo); pad by a few octaves around the support.
    double lo = opt.log2_lo, hi = opt.log2_hi;
    if (F.support_lo > 0.0) lo = std::max(lo, std::floor(std::log2(F.support_lo)) - 2.0);
    if (std::isfinite(F.support_hi)) hi = std::min(hi, std::ceil(std::log2(F.support_hi)) + 2.0);
    if (std::isfinite(F.valid_up_to)) hi = std::min(hi, std::floor(std::log2(F.valid_up_to)));
    if (!(hi > lo)) throw InputError("mihlin_norm: empty evaluation range for " + F.label);
    const long i0 = static_cast<long>(std::floor(lo * ppo)), i1 = static_cast<long>(std::ceil(hi * ppo));
    const long n = i1 - i0 + 1;
    std::vector<double> f(n);
    for (long i = 0; i < n; ++i) {
        const long idx = i0 + i;
        const long oct = idx >= 0 ? idx / ppo : -((-idx + ppo - 1) / ppo);
        const long rem = idx - oct * ppo;
        const double zeta = std::ldexp(std::exp2(static_cast<double>(rem) / ppo), static_cast<int>(oct));
        f[i] = F(zeta);
    }
    const double h = std::log(2.0) / ppo;
    double sup = 0.0;
    for (double v : f) sup = std::max(sup, std::abs(v));
    std::vector<double> prev = f;
    for (int order = 1; order <= N; ++order) {
        std::vector<double> next(n, 0.0);
        // Each application loses two points at either end.
        for (long i = 2; i + 2 < n; ++i) {
            if (order == 2)
                next[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h);
            else
                next[i] = (-prev[i + 2] + 8.0 * prev[i + 1] - 8.0 * prev[i - 1] + prev[i - 2]) / (12.0 * h);
        }
        const long margin = 2 * order;
        for (long i = margin; i + margin < n; ++i) {
            if (!std::isfinite(next[i]))
                throw NumericalError("littlewood_paley", "non-finite derivative estimate for " + F.label);
            sup = std::max(sup, std::abs(next[i]));
        }
        prev = std::move(next);
    }
    return sup;
}

double mihlin_sup_over_theta(int depth, int kmax, int N, bool widened, const MihlinOptions& opt) {
    if (depth < 0 || depth > 20) throw InputError("mihlin_sup_over_theta: depth out of range");
    double sup = 0.0;
    for (long j = 0; j < (1L << depth); ++j)
        sup = std::max(sup, mihlin_norm(randomized_profile(std::ldexp(static_cast<double>(j), -depth), kmax, widened),
                                        N, opt));
    return sup;
}

SpectralState project_band(const SpectralBasis& basis, const SpectralState& state, int k) {
    if (state.coeffs.size() != basis.count()) throw InputError("state does not match the basis");
    SpectralState out = state;
    for (Eigen::Index j = 0; j < basis.count(); ++j) out.coeffs[j] *= beta_k(k, basis.frequencies[j]);
    return out;
}

int top_band(const SpectralBasis& basis) {
    const double top = basis.count() ? basis.frequencies[basis.count() - 1] : 0.0;
    int k = 0;
    while (std::ldexp(1.0, k - 1) < top) ++k; // band k starts at 2^(k-2)
    return k;
}

std::vector<Eigen::Index> band_modes(const SpectralBasis& basis, int k, std::size_t limit) {
    std::vector<Eigen::Index> out;
    const auto n = std::min<Eigen::Index>(basis.count(), static_cast<Eigen::Index>(limit));
    for (Eigen::Index j = 0; j < n; ++j)
        if (beta_k(k, basis.frequencies[j]) > 0.0) out.push_back(j);
    return out;
}

SquareFunction squarefunction(const SpectralBasis& basis, const LqQuadrature& quad, const SpectralState& state,
                              double q) {
    if (!(q > 1.0) || std::isinf(q)) throw InputError("squarefunction: q must lie in (1, inf)");
    if (state.coeffs.size() != basis.count()) throw InputError("state does not match the basis");
    if (state.coeffs.cwiseAbs().maxCoeff() == 0.0) throw InputError("squarefunction: ratio undefined for zero data");
    // Frequencies are sorted, so each band and the data support are index ranges;
    // synthesize only over those columns.
    const Eigen::Index n = basis.count();
    Eigen::Index lo = 0, hi = n;
    while (state.coeffs[lo] == cplx(0.0)) ++lo;
    while (state.coeffs[hi - 1] == cplx(0.0)) --hi;
    auto synthesize = [&](const Eigen::VectorXcd& c, Eigen::Index a, Eigen::Index b) {
        const auto cols = basis.modes.middleCols(a, b - a);
        Eigen::VectorXcd out(basis.vertex_count());
        out.real() = cols * c.segment(a, b - a).real();
        out.imag() = cols * c.segment(a, b - a).imag();
        return out;
    };
    std::vector<Eigen::VectorXcd> pieces;
    for (int k = 0; k <= top_band(basis); ++k) {
        Eigen::Index a = lo, b = hi;
        while (a < b && beta_k(k, basis.frequencies[a]) == 0.0) ++a;
        while (b > a && beta_k(k, basis.frequencies[b - 1]) == 0.0) --b;
        if (a == b) continue;
        const SpectralState uk = project_band(basis, state, k);
        if (uk.coeffs.segment(a, b - a).cwiseAbs().maxCoeff() > 0.0) pieces.push_back(synthesize(uk.coeffs, a, b));
    }
    SquareFunction out;
    out.field = Eigen::VectorXd::Zero(basis.vertex_count());
    for (const auto& p : pieces) out.field += p.cwiseAbs2();
    out.field = out.field.cwiseSqrt();
    out.norm_s = std::pow(quad.integral_of_sum_squares(pieces, q), 1.0 / q);
    out.norm_a = quad.norm(synthesize(state.coeffs, lo, hi), q);
    out.ratio = out.norm_s / out.norm_a;
    return out;
}

std::vector<double> squarefunction_ensemble(const SpectralBasis& basis, const LqQuadrature& quad, double q,
                                            double cutoff_frequency, int samples, std::uint64_t seed) {
    if (samples <= 0) throw InputError("squarefunction_ensemble: samples must be positive");
    std::vector<Eigen::Index> active;
    for (std::size_t j = 0; j < basis.trusted_count; ++j)
        if (basis.frequencies[static_cast<Eigen::Index>(j)] <= cutoff_frequency)
            active.push_back(static_cast<Eigen::Index>(j));
    if (active.empty()) throw InputError("squarefunction_ensemble: no trusted modes below the cutoff");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> ratios;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis.count());
        for (Eigen::Index j : active) {
            const double re = normal(rng);
            c[j] = cplx(re, normal(rng));
        }
        ratios.push_back(squarefunction(basis, quad, make_state(basis, std::move(c)), q).ratio);
    }
    return ratios;
}

double rademacher_sum_norm(const std::vector<double>& b, double q) {
    if (b.empty()) throw InputError("khintchine: empty coefficient sequence");
    if (b.size() > 26) throw InputError("khintchine: at most 26 coefficients");
    if (!(q >= 1.0)) throw InputError("khintchine: q must be at least 1");
    const int M = static_cast<int>(b.size());
    const long cells = 1L << M;
    double sum = 0.0;
    for (long j = 0; j < cells; ++j) {
        const double theta = (static_cast<double>(j) + 0.5) / static_cast<double>(cells);
        double g = 0.0;
        for (int m = 0; m < M; ++m) g += b[m] * rademacher(m, theta);
        sum += std::pow(std::abs(g), q);
    }
    return std::pow(sum / static_cast<double>(cells), 1.0 / q);
}

KhintchineReport khintchine_check(const std::vector<std::vector<double>>& samples, double q) {
    if (samples.empty()) throw InputError("khintchine: no samples");
    KhintchineReport r;
    r.q = q;
    r.c_lower = INFINITY;
    r.c_upper = 0.0;
    for (const auto& b : samples) {
        double l2 = 0.0;
        for (double v : b) l2 += v * v;
        l2 = std::sqrt(l2);
        const double g2 = rademacher_sum_norm(b, 2.0);
        if (std::abs(g2 - l2) > 1e-12 * std::max(l2, 1.0))
            throw NumericalError("littlewood_paley", "Rademacher sums are not orthonormal in L^2");
        if (l2 == 0.0) continue;
        const double ratio = rademacher_sum_norm(b, q) / g2;
        r.c_lower = std::min(r.c_lower, ratio);
        r.c_upper = std::max(r.c_upper, ratio);
        ++r.samples;
    }
    if (r.samples == 0) throw InputError("khintchine: all samples are zero");
    return r;
}

MultiplierProfile parse_profile(const std::string& text) {
    std::istringstream in(text);
    std::string head;
    in >> head;
    double theta = 0.0;
    int k = -1, kmax = -1, widened = 0;
    std::string kv;
    while (in >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InputError("profile: expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        try {
            if (key == "k") k = std::stoi(value);
            else if (key == "kmax") kmax = std::stoi(value);
            else if (key == "theta") theta = std::stod(value);
            else if (key == "widened") widened = std::stoi(value);
            else throw InputError("profile: unknown key '" + key + "'");
        } catch (const std::logic_error&) {
            throw InputError("profile: bad value in '" + kv + "'");
        }
    }
    if (head == "one") return {[](double) { return 1.0; }, 0.0, INFINITY, INFINITY, "one"};
    if (head == "bump") return make_bump();
    if (head == "beta") return dyadic_profile(k);
    if (head == "widened") return widened_profile(k);
    if (head == "ftheta") return randomized_profile(theta, kmax, widened != 0);
    throw InputError("profile: unknown profile '" + head + "'");
}

void write_squarefunction_csv(std::ostream& out, const std::string& surface, double q, double cutoff_frequency,
                              const std::vector<double>& ratios) {
    CsvWriter w(out, "squarefunction", 1, {"surface", "q", "cutoff", "sample_id", "ratio"});
    for (std::size_t i = 0; i < ratios.size(); ++i)
        w.row({surface, q, cutoff_frequency, static_cast<std::int64_t>(i), ratios[i]});
}

} // namespace polywave
