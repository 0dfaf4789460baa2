#pragma once

#include <vector>

namespace polywave {

/// Flat cone with cross-section circumference 2 pi rho.
struct ConeParams {
    double rho = 1.0;

    void validate() const;
};

/// Point masses of the cosine kernel that fall in (0, pi]: y = m 2 pi rho, m >= 1.
struct GeometricTerm {
    double y = 0.0;
    bool at_endpoint = false; ///< y == pi (up to rounding of m 2 rho == 1)
};

std::vector<GeometricTerm> geometric_terms(const ConeParams& cone);

/// True when 1/rho is an integer (to 1e-12), where sin(pi/rho) vanishes and the
/// diffraction term is identically zero.
bool non_diffractive(const ConeParams& cone);

/// (1 / 2 pi rho) sin(pi/rho) / (cosh(y/rho) - cos(pi/rho)), defined as 0 when
/// sin(pi/rho) = 0. Throws InputError for y < 0.
double diffraction_kernel(const ConeParams& cone, double y);

struct QuadratureReport {
    double value = 0.0;
    double error = 0.0;   ///< difference between the last two refinements
    double y_max = 0.0;   ///< truncation point of the tail
    int refinements = 0;
};

/// int_0^inf exp(-(1 + cosh y) r^2 / 2t) diffraction_kernel(y) dy by composite
/// 8-point Gauss-Legendre panels of width min(1, rho), halved until two
/// successive results agree to `tolerance` (absolute). Throws NumericalError
/// when the refinement budget is exhausted.
QuadratureReport diffraction_integral_report(const ConeParams& cone, double r, double t, double tolerance = 1e-10);
double diffraction_integral(const ConeParams& cone, double r, double t);

/// How a point mass sitting exactly at y = pi is counted when integrated
/// against the indicator of [0, pi]. `display` gives it full weight, as in the
/// summed formula; `averaged` gives it half weight (the average of the one-sided
/// limits, as for the point mass at 0, which produces the 1/2 term).
enum class PointMassRule { display, averaged };

/// On-diagonal heat kernel of the cone at radius r:
/// (1 / 2 pi t) [1/2 + sum_k w_k exp(-(1 - cos y_k) r^2 / 2t) - diffraction_integral].
double cone_diagonal_heat(const ConeParams& cone, double r, double t, PointMassRule rule = PointMassRule::display);

/// The bracket alone; it depends on (rho, r^2 / t) only.
double cone_bracket(const ConeParams& cone, double r, double t, PointMassRule rule = PointMassRule::display);

} // namespace polywave
