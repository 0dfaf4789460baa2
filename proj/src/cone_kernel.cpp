#include "polywave/cone_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polywave/error.hpp"

namespace polywave {

namespace {

constexpr double kGaussNodes[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                   -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
constexpr double kGaussWeights[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                     0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};

void check_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("heat kernel needs t > 0");
}

/// Integrand of the diffraction term in terms of s = r^2 / t.
double integrand(const ConeParams& cone, double s, double y) {
    return std::exp(-(1.0 + std::cosh(y)) * s / 2.0) * diffraction_kernel(cone, y);
}

double panel(const ConeParams& cone, double s, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) sum += kGaussWeights[i] * integrand(cone, s, mid + half * kGaussNodes[i]);
    return half * sum;
}

QuadratureReport diffraction_in_s(const ConeParams& cone, double s, double tolerance) {
    QuadratureReport rep;
    if (non_diffractive(cone)) return rep;
    const double w0 = std::min(1.0, cone.rho);
    // Tail cut: the integrand is decreasing in y, so stop once it is negligible
    // against what has been accumulated.
    double partial = 0.0, y = 0.0;
    for (int n = 0; n < 100000; ++n) {
        partial += panel(cone, s, y, y + w0);
        y += w0;
        const double f = std::abs(integrand(cone, s, y));
        if (f == 0.0 || f < 1e-16 * std::abs(partial)) break;
    }
    rep.y_max = y;
    const int panels0 = static_cast<int>(std::lround(y / w0));
    double previous = partial;
    for (int level = 1; level <= 14; ++level) {
        const long panels = static_cast<long>(panels0) << level;
        const double w = rep.y_max / static_cast<double>(panels);
        double sum = 0.0;
        for (long p = 0; p < panels; ++p) sum += panel(cone, s, p * w, (p + 1) * w);
        rep.refinements = level;
        rep.error = std::abs(sum - previous);
        rep.value = sum;
        if (rep.error < tolerance) return rep;
        previous = sum;
    }
    std::ostringstream msg;
    msg << "diffraction integral did not converge (rho = " << cone.rho << ", r^2/t = " << s << ", achieved error "
        << rep.error << ")";
    throw NumericalError("cone_kernel", msg.str());
}

double bracket_in_s(const ConeParams& cone, double s, PointMassRule rule) {
    double sum = 0.5;
    for (const auto& g : geometric_terms(cone)) {
        const double w = g.at_endpoint && rule == PointMassRule::averaged ? 0.5 : 1.0;
        sum += w * std::exp(-(1.0 - std::cos(g.y)) * s / 2.0);
    }
    return sum - diffraction_in_s(cone, s, 1e-10).value;
}

} // namespace

void ConeParams::validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InputError("cone radius rho must be positive");
}

std::vector<GeometricTerm> geometric_terms(const ConeParams& cone) {
    cone.validate();
    std::vector<GeometricTerm> out;
    for (long m = 1;; ++m) {
        const double frac = 2.0 * cone.rho * static_cast<double>(m); // y / pi
        if (frac > 1.0 + 1e-12) break;
        const bool end = std::abs(frac - 1.0) <= 1e-12;
        out.push_back({end ? M_PI : frac * M_PI, end});
    }
    return out;
}

bool non_diffractive(const ConeParams& cone) {
    cone.validate();
    const double inv = 1.0 / cone.rho;
    return std::abs(inv - std::round(inv)) <= 1e-12 * std::max(1.0, inv);
}

double diffraction_kernel(const ConeParams& cone, double y) {
    if (!(y >= 0.0)) throw InputError("diffraction kernel needs y >= 0");
    if (non_diffractive(cone)) return 0.0;
    const double a = M_PI / cone.rho;
    return std::sin(a) / (std::cosh(y / cone.rho) - std::cos(a)) / (2.0 * M_PI * cone.rho);
}

QuadratureReport diffraction_integral_report(const ConeParams& cone, double r, double t, double tolerance) {
    check_time(t);
    if (!(r >= 0.0)) throw InputError("radius must be nonnegative");
    return diffraction_in_s(cone, r * r / t, tolerance);
}

double diffraction_integral(const ConeParams& cone, double r, double t) {
    return diffraction_integral_report(cone, r, t).value;
}

double cone_bracket(const ConeParams& cone, double r, double t, PointMassRule rule) {
    check_time(t);
    if (!(r >= 0.0)) throw InputError("radius must be nonnegative");
    return bracket_in_s(cone, r * r / t, rule);
}

double cone_diagonal_heat(const ConeParams& cone, double r, double t, PointMassRule rule) {
    return cone_bracket(cone, r, t, rule) / (2.0 * M_PI * t);
}

} // namespace polywave
