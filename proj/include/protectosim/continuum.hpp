#pragma once

// Gaussian-continuum analytics.  For large environments the discrete field
// spectrum is replaced by a Gaussian spectral density of width s_d; every
// observable then reduces to a one-dimensional weighted integral, or to a
// closed form where that integral is a convolution of Gaussians.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "protectosim/errors.hpp"
#include "protectosim/geometry.hpp"
#include "protectosim/mixture.hpp"
#include "protectosim/quadrature.hpp"

namespace protectosim::continuum {

/// Gaussian distribution of environment fields, width s_d in units of B0.
struct SpectralDensity {
    double s_d;

    explicit SpectralDensity(double s_d_) : s_d(s_d_) {
        if (!(s_d >= 0.0))
            throw std::invalid_argument("SpectralDensity: s_d must be non-negative");
    }
};

/// w(b) = exp(-b^2 / 2 s_d^2) / sqrt(2 pi s_d^2).  s_d = 0 is rejected;
/// callers use the delta-function short circuit instead.
inline double spectral_density(double b_tilde, double s_d) {
    if (!(s_d > 0.0))
        throw ZeroWidth("spectral_density: s_d must be positive");
    return gaussian_pdf(b_tilde, 0.0, s_d);
}

namespace detail {

inline int oscillation_panels(double s_d, double omega0_T) {
    // One subdivision per oscillation period of cos(omega0_T sqrt(1+b^2))
    // across the integration window, clamped to something sane.
    const double periods = 24.0 * s_d * omega0_T / two_pi;
    return std::clamp(static_cast<int>(std::ceil(periods)), 64, 8192);
}

} // namespace detail

/// Disturbance probability with the oscillatory term dropped:
/// (1/2) integral w(b) sin^2(theta(b)) db.  This is the long-measurement
/// limit; s_d = 0 short-circuits to (1/2) sin^2(theta(0)).
inline double p1_weak(double s_d, const MeasurementGeometry& g, double rel_tol = 1e-8) {
    if (!(s_d >= 0.0))
        throw std::invalid_argument("p1_weak: s_d must be non-negative");
    if (s_d == 0.0)
        return 0.5 * sin2_theta(g, 0.0);
    return integrate_gaussian_weighted(
        [&](double b) { return 0.5 * sin2_theta(g, b); }, s_d, rel_tol, 1e-13);
}

/// Full disturbance probability at finite measurement time:
/// (1/2) integral w(b) sin^2(theta(b)) [1 - Gamma(b) cos(omega0_T sqrt(1+b^2))] db.
/// The oscillatory part is integrated adaptively with the subdivision scale
/// set by omega0_T.
inline double p1_full(double s_d, const MeasurementGeometry& g, double omega0_T,
                      double sigma_p, double rel_tol = 1e-8) {
    if (!(s_d >= 0.0))
        throw std::invalid_argument("p1_full: s_d must be non-negative");
    if (!(omega0_T > 0.0))
        throw std::invalid_argument("p1_full: omega0_T must be positive");
    auto overlap_at = [&](double b) {
        return wavepacket_overlap(pointer_shift(g, b), sigma_p);
    };
    if (s_d == 0.0)
        return 0.5 * sin2_theta(g, 0.0) * (1.0 - overlap_at(0.0) * std::cos(omega0_T));
    const double smooth = p1_weak(s_d, g, rel_tol);
    auto oscillatory = [&](double b) {
        return gaussian_pdf(b, 0.0, s_d) * 0.5 * sin2_theta(g, b) * overlap_at(b) *
               std::cos(omega0_T * std::sqrt(1.0 + b * b));
    };
    const double osc = integrate_adaptive(oscillatory, -12.0 * s_d, 12.0 * s_d, 1e-12,
                                          rel_tol, detail::oscillation_panels(s_d, omega0_T));
    return smooth - osc;
}

/// p1_full with cos(2 Omega T) replaced by its analytic average over
/// omega0_T in [omega0_T, omega0_T + 2*pi]; the deterministic counterpart of
/// the long-measurement limit.
inline double p1_full_phase_averaged(double s_d, const MeasurementGeometry& g,
                                     double omega0_T, double sigma_p,
                                     double rel_tol = 1e-8) {
    if (!(s_d >= 0.0))
        throw std::invalid_argument("p1_full_phase_averaged: s_d must be non-negative");
    if (!(omega0_T > 0.0))
        throw std::invalid_argument("p1_full_phase_averaged: omega0_T must be positive");
    auto window_avg = [&](double b) {
        const double s = std::sqrt(1.0 + b * b);
        return (std::sin(s * (omega0_T + two_pi)) - std::sin(s * omega0_T)) / (two_pi * s);
    };
    auto overlap_at = [&](double b) {
        return wavepacket_overlap(pointer_shift(g, b), sigma_p);
    };
    if (s_d == 0.0)
        return 0.5 * sin2_theta(g, 0.0) * (1.0 - overlap_at(0.0) * window_avg(0.0));
    const double smooth = p1_weak(s_d, g, rel_tol);
    auto oscillatory = [&](double b) {
        return gaussian_pdf(b, 0.0, s_d) * 0.5 * sin2_theta(g, b) * overlap_at(b) *
               window_avg(b);
    };
    const double osc = integrate_adaptive(oscillatory, -12.0 * s_d, 12.0 * s_d, 1e-12,
                                          rel_tol, detail::oscillation_panels(s_d, omega0_T));
    return smooth - osc;
}

struct PointerMoments {
    double mean;
    double variance;
};

/// Moments of the final pointer-momentum distribution in the weak regime:
/// the convolution of the initial packet with the distribution of linearised
/// environment kicks.  mean = cos(gamma),
/// variance = sigma_p^2 + (s_d cos(eta) sin(gamma))^2.
inline PointerMoments pointer_moments(double s_d, const MeasurementGeometry& g,
                                      double sigma_p) {
    if (!(s_d >= 0.0))
        throw std::invalid_argument("pointer_moments: s_d must be non-negative");
    if (!(sigma_p >= 0.0))
        throw std::invalid_argument("pointer_moments: sigma_p must be non-negative");
    const double widening = s_d * std::cos(g.eta) * std::sin(g.gamma);
    return {std::cos(g.gamma), sigma_p * sigma_p + widening * widening};
}

/// Final pointer-momentum density on a grid, via two routes that must agree:
/// direct quadrature of the kick-averaged packet, and the closed-form
/// Gaussian with pointer_moments parameters.  Inputs outside the validated
/// weak regime (s_d <= 0.35, xi <= 0.1) attach a warning; the computation
/// still proceeds.
struct PointerDensity {
    std::vector<double> quadrature;
    std::vector<double> closed_form;
    PointerMoments moments;
    std::string warning;
};

inline PointerDensity pointer_density(double s_d, const MeasurementGeometry& g,
                                      double sigma_p, std::span<const double> grid) {
    if (!(s_d >= 0.0))
        throw std::invalid_argument("pointer_density: s_d must be non-negative");
    if (!(sigma_p > 0.0))
        throw std::invalid_argument("pointer_density: sigma_p must be positive");
    PointerDensity out;
    out.moments = pointer_moments(s_d, g, sigma_p);
    if (s_d > 0.35 || g.xi > 0.1)
        out.warning = "outside validated weak regime (s_d <= 0.35, xi <= 0.1); "
                      "linearised pointer density may be inaccurate";
    const double sigma_total = std::sqrt(out.moments.variance);
    out.closed_form.reserve(grid.size());
    out.quadrature.reserve(grid.size());
    for (double p : grid)
        out.closed_form.push_back(gaussian_pdf(p, out.moments.mean, sigma_total));
    const double cg = std::cos(g.gamma);
    const double kick = std::cos(g.eta) * std::sin(g.gamma);
    if (s_d == 0.0) {
        // delta-function environment: the packet is just shifted
        for (double p : grid)
            out.quadrature.push_back(gaussian_pdf(p, cg, sigma_p));
        return out;
    }
    for (double p : grid) {
        out.quadrature.push_back(integrate_gaussian_weighted(
            [&](double b) { return gaussian_pdf(p, cg + b * kick, sigma_p); }, s_d, 1e-8,
            1e-10));
    }
    return out;
}

/// Pointer density without the weak-regime approximations: exact branch
/// weights cos^2(theta/2), sin^2(theta/2) and the non-linearised shift.
/// Provided to quantify the error of the linearised route.
inline std::vector<double> pointer_density_exact_weights(double s_d,
                                                         const MeasurementGeometry& g,
                                                         double sigma_p,
                                                         std::span<const double> grid) {
    if (!(s_d >= 0.0))
        throw std::invalid_argument("pointer_density_exact_weights: s_d must be non-negative");
    if (!(sigma_p > 0.0))
        throw std::invalid_argument("pointer_density_exact_weights: sigma_p must be positive");
    auto both_packets = [&](double p, double b) {
        const EffectiveField f = effective_field(g, b);
        const double up = 0.5 * (1.0 + f.r[2]);
        const double down = 0.5 * (1.0 - f.r[2]);
        const double shift = pointer_shift(g, b);
        return up * gaussian_pdf(p, shift, sigma_p) + down * gaussian_pdf(p, -shift, sigma_p);
    };
    std::vector<double> out;
    out.reserve(grid.size());
    if (s_d == 0.0) {
        for (double p : grid)
            out.push_back(both_packets(p, 0.0));
        return out;
    }
    for (double p : grid)
        out.push_back(integrate_gaussian_weighted(
            [&](double b) { return both_packets(p, b); }, s_d, 1e-8, 1e-10));
    return out;
}

/// Probability of the un-reversed pointer shift when the environment fields
/// act along the protection axis: P+ = (1/2)[1 + erf(1 / (sqrt(2) s_d))].
/// s_d = 0 is the no-environment limit, P+ = 1.
inline double zaxis_success_probability(double s_d) {
    if (!(s_d >= 0.0))
        throw std::invalid_argument("zaxis_success_probability: s_d must be non-negative");
    if (s_d == 0.0)
        return 1.0;
    return 0.5 * (1.0 + std::erf(1.0 / (std::sqrt(2.0) * s_d)));
}

/// Pointer state for protection-axis environment fields: a two-component
/// mixture at +-cos(gamma), both components keeping the initial width (no
/// broadening occurs in this regime).
struct ZaxisPointerState {
    double p_plus;
    PointerMixture mixture;
    double mean; // (2 P+ - 1) cos(gamma)
    std::vector<double> values;
};

inline ZaxisPointerState zaxis_pointer_density(double s_d, double gamma, double sigma_p,
                                               std::span<const double> grid) {
    if (!(gamma >= 0.0 && gamma <= pi))
        throw std::invalid_argument("zaxis_pointer_density: gamma must lie in [0, pi]");
    if (!(sigma_p > 0.0))
        throw std::invalid_argument("zaxis_pointer_density: sigma_p must be positive");
    ZaxisPointerState state;
    state.p_plus = zaxis_success_probability(s_d);
    const double cg = std::cos(gamma);
    state.mixture.components = {{state.p_plus, cg, sigma_p},
                                {1.0 - state.p_plus, -cg, sigma_p}};
    state.mean = (2.0 * state.p_plus - 1.0) * cg;
    state.values = state.mixture.evaluate(grid);
    return state;
}

/// First-order net-field magnitude for protection-axis environment fields:
/// chi ~= |1 + b| + xi cos(gamma) sign(1 + b).  The pointer shift keeps its
/// size but reverses sign when b < -1.  b = -1 exactly is the measure-zero
/// point where the leading term vanishes; it is returned flagged rather than
/// thrown.
struct ZaxisChiExpansion {
    double chi_approx;
    int shift_sign; // +1, -1, or 0 at the singular point
    bool singular;
};

inline ZaxisChiExpansion zaxis_chi_expansion(double xi, double gamma, double b_tilde) {
    if (!(xi >= 0.0))
        throw std::invalid_argument("zaxis_chi_expansion: xi must be non-negative");
    if (b_tilde == -1.0)
        return {0.0, 0, true};
    const int sign = (1.0 + b_tilde) > 0.0 ? 1 : -1;
    return {std::abs(1.0 + b_tilde) + xi * std::cos(gamma) * sign, sign, false};
}

/// Parameters of a generic protective qubit measurement: coupling kappa(t) =
/// zeta/T to an arbitrary pointer operator with variable value k, a qubit of
/// frequency omega0, and a pointer packet of width sigma_ell in the variable
/// conjugate to k.  env_strength is the typical environment energy scale.
struct GeneralQubitConfig {
    double zeta;
    double omega0;       // rad/s
    double T;            // s
    double k;            // pointer-operator variable value
    double sigma_ell;    // width of the conjugate-variable packet
    double env_strength; // typical energy scale of the environment coupling
    double gamma;        // measured-observable polar angle
    double eta;          // measured-observable azimuthal angle
};

/// Dimensionless reduction of the general measurement.  The pointer shift
/// and variance are the Stern-Gerlach expressions with mu*beta replaced by
/// zeta; dimensionless_variance is the exact shared closed form so the two
/// settings can be compared bit for bit.
struct GeneralQubitMap {
    double xi;
    double b_tilde_scale; // environment scale over qubit splitting: the s_d equivalent
    double shift;         // pointer shift in the conjugate variable, zeta*cos(gamma)
    double variance;      // final packet variance in the conjugate variable
    double dimensionless_variance;
    bool regime_violation; // omega0*T too small for a weak measurement
};

inline GeneralQubitMap general_qubit_map(const GeneralQubitConfig& c) {
    if (!(c.zeta > 0.0))
        throw std::invalid_argument("general_qubit_map: zeta must be positive");
    if (!(c.omega0 > 0.0) || !(c.T > 0.0))
        throw std::invalid_argument("general_qubit_map: omega0 and T must be positive");
    if (!(c.sigma_ell > 0.0))
        throw std::invalid_argument("general_qubit_map: sigma_ell must be positive");
    if (!(c.env_strength >= 0.0))
        throw std::invalid_argument("general_qubit_map: env_strength must be non-negative");
    if (!(c.k * c.zeta >= 0.0))
        throw std::invalid_argument("general_qubit_map: derived xi would be negative");
    GeneralQubitMap m;
    m.xi = 2.0 * c.zeta * c.k / (hbar * c.omega0 * c.T);
    m.b_tilde_scale = c.env_strength / (hbar * c.omega0);
    m.regime_violation = !(c.omega0 * c.T > 10.0);
    const MeasurementGeometry geom(c.gamma, c.eta, m.xi);
    m.shift = c.zeta * std::cos(c.gamma);
    m.dimensionless_variance =
        pointer_moments(m.b_tilde_scale, geom, c.sigma_ell / c.zeta).variance;
    m.variance = c.zeta * c.zeta * m.dimensionless_variance;
    return m;
}

} // namespace protectosim::continuum
