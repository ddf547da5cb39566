#pragma once

#include <cmath>
#include <optional>

#include "gpelab/errors.hpp"
#include "gpelab/special.hpp"

namespace gpelab {

/// Amplitude prefactor [d(d-2)]^{(d-2)/4} of the algebraic soliton.
inline double bubble_amplitude(int d) {
    if (d < 3) throw DomainError("bubble_amplitude: requires d >= 3");
    const double dd = static_cast<double>(d);
    return std::pow(dd * (dd - 2.0), 0.25 * (dd - 2.0));
}

/// U_eps(r) = eps^{(d-2)/2} [d(d-2)]^{(d-2)/4} (eps^2 + r^2)^{-(d-2)/2}.
inline double bubble_eval(int d, double eps, double r) {
    if (d < 3) throw DomainError("bubble_eval: requires d >= 3");
    if (!(eps > 0.0)) throw DomainError("bubble_eval: requires eps > 0");
    const double s = 0.5 * (static_cast<double>(d) - 2.0);
    return std::pow(eps, s) * bubble_amplitude(d) * std::pow(eps * eps + r * r, -s);
}

/// d/dr of bubble_eval.
inline double bubble_deriv(int d, double eps, double r) {
    if (d < 3) throw DomainError("bubble_deriv: requires d >= 3");
    if (!(eps > 0.0)) throw DomainError("bubble_deriv: requires eps > 0");
    const double s = 0.5 * (static_cast<double>(d) - 2.0);
    return std::pow(eps, s) * bubble_amplitude(d) * (-2.0 * s * r) *
           std::pow(eps * eps + r * r, -s - 1.0);
}

/// Closed-form norms of the unit-scale bubble U = U_{eps=1}.  Norms that are
/// infinite for the given dimension are left unset rather than NaN, because the
/// asymptotic laws branch on exactly these finiteness thresholds.
struct BubbleConstants {
    int d = 0;
    std::optional<double> norm_L2_sq;    // ||U||_{L^2}^2, finite iff d >= 5
    std::optional<double> norm_xU_sq;    // || |x| U ||_{L^2}^2, finite iff d >= 7
    std::optional<double> norm_L3_cubed_d4;  // ||U||_{L^3(R^4)}^3, d = 4 only
    std::optional<double> norm_L73_d5;       // ||U||_{L^{7/3}(R^5)}^{7/3}, d = 5 only
    double sobolev_S = 0.0;
};

/// |S^{d-1}| int_0^inf U^k r^{a} dr in closed form, or nullopt when divergent.
inline std::optional<double> bubble_moment(int d, double k, double a) {
    const double amp = std::pow(bubble_amplitude(d), k);
    const double b = 0.5 * k * (static_cast<double>(d) - 2.0);
    try {
        return amp * sphere_measure(d) * power_integral(a, b);
    } catch (const DivergenceError&) {
        return std::nullopt;
    }
}

/// Best Sobolev constant via S^{d/2} = ||U||_{L^{2d/(d-2)}}^{2d/(d-2)}.
inline double sobolev_constant(int d) {
    if (d < 3) throw DomainError("sobolev_constant: requires d >= 3");
    const double dd = static_cast<double>(d);
    const double q = 2.0 * dd / (dd - 2.0);
    const auto mass = bubble_moment(d, q, dd - 1.0);
    if (!mass) throw Error("sobolev_constant: critical norm unexpectedly divergent");
    return std::pow(*mass, 2.0 / dd);
}

inline BubbleConstants bubble_constants(int d) {
    if (d < 3) throw DomainError("bubble_constants: requires d >= 3");
    const double dd = static_cast<double>(d);
    BubbleConstants out;
    out.d = d;
    out.norm_L2_sq = bubble_moment(d, 2.0, dd - 1.0);
    out.norm_xU_sq = bubble_moment(d, 2.0, dd + 1.0);
    if (d == 4) out.norm_L3_cubed_d4 = bubble_moment(4, 3.0, 3.0);
    if (d == 5) out.norm_L73_d5 = bubble_moment(5, 7.0 / 3.0, 4.0);
    out.sobolev_S = sobolev_constant(d);
    return out;
}

}  // namespace gpelab
