#pragma once

// Dimensionless field geometry for a protectively measured qubit.
//
// Conventions used throughout: momenta are expressed in units of mu*beta,
// magnetic fields in units of the protection field B0, and accumulated phases
// as the dimensionless product omega0*T.  The protection field points along
// +z; an environment field b_tilde points along +x unless a function says
// otherwise.  All functions here are pure closed forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "protectosim/constants.hpp"
#include "protectosim/errors.hpp"

namespace protectosim {

/// Orientation (polar angle gamma, azimuthal angle eta) and relative strength
/// xi of the measurement field.  xi >= 1 lies outside the validated
/// weak-measurement regime; construction succeeds but the condition is
/// flagged so callers can warn.
struct MeasurementGeometry {
    double gamma;
    double eta;
    double xi;
    bool outside_weak_regime;

    MeasurementGeometry(double gamma_, double eta_, double xi_)
        : gamma(gamma_), eta(eta_), xi(xi_), outside_weak_regime(!(xi_ < 1.0)) {
        if (!(gamma >= 0.0 && gamma <= pi))
            throw std::invalid_argument("MeasurementGeometry: gamma must lie in [0, pi]");
        if (!(eta >= 0.0 && eta < two_pi))
            throw std::invalid_argument("MeasurementGeometry: eta must lie in [0, 2*pi)");
        if (!(xi >= 0.0))
            throw std::invalid_argument("MeasurementGeometry: xi must be non-negative");
    }
};

/// Net field acting on the qubit for one environment field value: magnitude
/// factor chi (in units of B0) and direction, both as angles and as a unit
/// vector r.
struct EffectiveField {
    double chi;
    double theta;
    double phi;
    std::array<double, 3> r;
};

/// Initial Gaussian pointer packet in dimensionless momentum.
struct GaussianPointer {
    double center;
    double width;

    GaussianPointer(double center_, double width_) : center(center_), width(width_) {
        if (!(width > 0.0))
            throw std::invalid_argument("GaussianPointer: width must be positive");
    }

    /// Probability density |Phi(p)|^2.
    double density(double p) const {
        const double z = (p - center) / width;
        return std::exp(-0.5 * z * z) / (width * std::sqrt(two_pi));
    }
};

/// Unit vector of the measurement axis m.
inline std::array<double, 3> measurement_axis(const MeasurementGeometry& g) {
    return {std::cos(g.eta) * std::sin(g.gamma),
            std::sin(g.eta) * std::sin(g.gamma),
            std::cos(g.gamma)};
}

namespace detail {

// chi^2 for an environment field b_tilde along x.
inline double chi_squared(const MeasurementGeometry& g, double b_tilde) {
    return 1.0 + b_tilde * b_tilde + g.xi * g.xi +
           2.0 * b_tilde * g.xi * std::cos(g.eta) * std::sin(g.gamma) +
           2.0 * g.xi * std::cos(g.gamma);
}

inline constexpr double degenerate_chi_squared = 1e-24; // chi < 1e-12

} // namespace detail

/// Net field (protection + measurement + environment) for one environment
/// field value.  Throws DegenerateField when the three contributions cancel
/// (reachable only for xi >= 1).  phi = 0 by convention on the polar axis.
inline EffectiveField effective_field(const MeasurementGeometry& g, double b_tilde) {
    const double chi2 = detail::chi_squared(g, b_tilde);
    if (!(chi2 > detail::degenerate_chi_squared))
        throw DegenerateField("effective_field: net field vanishes, direction undefined");
    EffectiveField f;
    f.chi = std::sqrt(chi2);
    f.r = {(g.xi * std::cos(g.eta) * std::sin(g.gamma) + b_tilde) / f.chi,
           (g.xi * std::sin(g.eta) * std::sin(g.gamma)) / f.chi,
           (1.0 + g.xi * std::cos(g.gamma)) / f.chi};
    f.theta = std::acos(std::clamp(f.r[2], -1.0, 1.0));
    f.phi = (f.r[0] == 0.0 && f.r[1] == 0.0) ? 0.0 : std::atan2(f.r[1], f.r[0]);
    return f;
}

/// First-order pointer shift in units of mu*beta:
/// (cos(gamma) + b_tilde cos(eta) sin(gamma)) / sqrt(1 + b_tilde^2).
/// Equal to the expectation value of sigma.m in the upper eigenstate of the
/// environment-modified qubit Hamiltonian.
inline double pointer_shift(const MeasurementGeometry& g, double b_tilde) {
    return (std::cos(g.gamma) + b_tilde * std::cos(g.eta) * std::sin(g.gamma)) /
           std::sqrt(1.0 + b_tilde * b_tilde);
}

/// sin^2 of the net-field polar angle; equals 1 - r_z^2.
inline double sin2_theta(const MeasurementGeometry& g, double b_tilde) {
    const double chi2 = detail::chi_squared(g, b_tilde);
    if (!(chi2 > detail::degenerate_chi_squared))
        throw DegenerateField("sin2_theta: net field vanishes, direction undefined");
    const double sg = std::sin(g.gamma);
    const double num = g.xi * g.xi * sg * sg + b_tilde * b_tilde +
                       2.0 * b_tilde * g.xi * std::cos(g.eta) * sg;
    return std::clamp(num / chi2, 0.0, 1.0);
}

/// Amplitude overlap of two Gaussian packets of common width centred at
/// +delta_p and -delta_p: exp(-delta_p^2 / (2 width^2)).
inline double wavepacket_overlap(double delta_p, double width) {
    if (!(width > 0.0))
        throw std::invalid_argument("wavepacket_overlap: width must be positive");
    const double z = delta_p / width;
    return std::exp(-0.5 * z * z);
}

/// Upper bound on the disturbance probability from the measurement field
/// alone: xi^2 sin^2(gamma) / (1 + xi^2 + 2 xi cos(gamma)).
inline double disturbance_bound(double xi, double gamma) {
    if (!(xi >= 0.0))
        throw std::invalid_argument("disturbance_bound: xi must be non-negative");
    const double sg = std::sin(gamma);
    const double denom = 1.0 + xi * xi + 2.0 * xi * std::cos(gamma);
    // denom vanishes only at xi = 1, gamma = pi, where the continuous limit
    // of the bound is 1.
    if (denom < 1e-300)
        return 1.0;
    return xi * xi * sg * sg / denom;
}

struct DisturbanceBoundMax {
    double value;
    double gamma_star;
};

/// Maximum of disturbance_bound over the measurement orientation, found by
/// golden-section search (the bound is unimodal in gamma on [0, pi]).  The
/// maximiser sits at cos(gamma*) = -min(xi, 1/xi), where the bound evaluates
/// to min(xi^2, 1).
inline DisturbanceBoundMax disturbance_bound_max(double xi) {
    if (!(xi >= 0.0))
        throw std::invalid_argument("disturbance_bound_max: xi must be non-negative");
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = pi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = disturbance_bound(xi, c);
    double fd = disturbance_bound(xi, d);
    for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = disturbance_bound(xi, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = disturbance_bound(xi, d);
        }
    }
    const double g = 0.5 * (a + b);
    return {disturbance_bound(xi, g), g};
}

} // namespace protectosim
