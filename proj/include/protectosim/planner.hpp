#pragma once

// SI-unit planning of Stern-Gerlach-type protective measurement runs: oven
// beam kinematics, spatial displacement through the measurement region, and
// the dimensionless handoff (xi, s_d) to the distribution math, which lives
// entirely in the continuum module.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protectosim/constants.hpp"
#include "protectosim/errors.hpp"
#include "protectosim/geometry.hpp"
#include "protectosim/io/config.hpp"
#include "protectosim/io/csv.hpp"

namespace protectosim::planner {

struct ApparatusParams {
    double mu;     // magnetic moment, J/T
    double grad_B; // measurement-field gradient, T/m
    double d;      // measurement-region length, m
    double T_oven; // source temperature, K
    double B0;     // protection field, T
    double mass;   // atomic mass, kg
    double gamma;  // measurement-axis polar angle, rad

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string("ApparatusParams: ") + name +
                                            " must be positive");
        };
        positive(mu, "mu");
        positive(grad_B, "grad_B");
        positive(d, "d");
        positive(T_oven, "T_oven");
        positive(B0, "B0");
        positive(mass, "mass");
        if (!(gamma >= 0.0 && gamma <= pi))
            throw std::invalid_argument("ApparatusParams: gamma must lie in [0, pi]");
    }
};

/// Atomic masses in kg (natural-abundance averages).
inline std::optional<double> species_mass(std::string_view name) {
    struct SpeciesEntry {
        std::string_view name;
        double mass;
    };
    static constexpr SpeciesEntry table[] = {
        {"K", 6.4923e-26},  {"K-39", 6.4923e-26},  {"Na", 3.8175e-26},
        {"Na-23", 3.8175e-26}, {"Rb", 1.4432e-25}, {"Rb-87", 1.4432e-25},
        {"Cs", 2.2069e-25}, {"Cs-133", 2.2069e-25},
    };
    for (const auto& e : table)
        if (e.name == name)
            return e.mass;
    return std::nullopt;
}

/// Most probable speed of the oven beam, sqrt(2 k_B T / m).
inline double most_probable_speed(double T_oven, double mass) {
    if (!(T_oven > 0.0) || !(mass > 0.0))
        throw std::invalid_argument("most_probable_speed: inputs must be positive");
    return std::sqrt(2.0 * k_boltzmann * T_oven / mass);
}

/// Spatial displacement through the measurement region.  extra_field_ratio is
/// the environment field in units of B0 acting along x; to first order it
/// scales the deflecting force by (cos(gamma) + b sin(gamma)).
inline double displacement(const ApparatusParams& p, double extra_field_ratio) {
    p.validate();
    const double factor = std::cos(p.gamma) + extra_field_ratio * std::sin(p.gamma);
    return p.mu * p.grad_B * factor * p.d * p.d / (4.0 * k_boltzmann * p.T_oven);
}

/// Dimensionless measurement strength xi = |grad B| d / B0.
inline double field_parameter_xi(const ApparatusParams& p) {
    p.validate();
    return p.grad_B * p.d / p.B0;
}

struct PlanReport {
    double speed;             // m/s
    double transit_time;      // s
    double displacement_0;    // m, no environment
    double displacement_env;  // m, at b = s_d
    double spread;            // m, 1-sigma width of the displacement distribution
    double xi;
    double disturbance_bound; // maximised over the measurement orientation
    double bound_gamma_star;  // orientation attaining that maximum, rad
    double rel_change_linear; // spread / displacement_0 (= s_d tan(gamma))
    double rel_change_full;   // same with the non-linearised shift factor
    double s_d;
};

inline PlanReport plan(const ApparatusParams& p, double s_d) {
    p.validate();
    if (!(s_d >= 0.0))
        throw std::invalid_argument("plan: s_d must be non-negative");
    PlanReport r;
    r.s_d = s_d;
    r.speed = most_probable_speed(p.T_oven, p.mass);
    r.transit_time = p.d / r.speed;
    r.displacement_0 = displacement(p, 0.0);
    r.displacement_env = displacement(p, s_d);
    r.spread = std::abs(r.displacement_env - r.displacement_0);
    r.xi = field_parameter_xi(p);
    const auto bound = disturbance_bound_max(r.xi);
    r.disturbance_bound = bound.value;
    r.bound_gamma_star = bound.gamma_star;
    const double cg = std::cos(p.gamma);
    const double sg = std::sin(p.gamma);
    if (r.displacement_0 != 0.0) {
        r.rel_change_linear = r.spread / r.displacement_0;
        r.rel_change_full = (cg + s_d * sg) / (std::sqrt(1.0 + s_d * s_d) * cg) - 1.0;
    } else {
        // gamma = pi/2: no unperturbed displacement, relative change undefined
        r.rel_change_linear = std::numeric_limits<double>::quiet_NaN();
        r.rel_change_full = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

/// Parameter-file keys: mu, grad_B, d, T_oven, B0, mass_or_species,
/// gamma_deg, s_d (optional, default 0).
inline ApparatusParams apparatus_from_config(const io::KeyValueConfig& cfg) {
    cfg.require_known({"mu", "grad_B", "d", "T_oven", "B0", "mass_or_species",
                       "gamma_deg", "s_d"});
    ApparatusParams p;
    p.mu = cfg.get_double("mu");
    p.grad_B = cfg.get_double("grad_B");
    p.d = cfg.get_double("d");
    p.T_oven = cfg.get_double("T_oven");
    p.B0 = cfg.get_double("B0");
    const std::string mass_or_species = cfg.get_string("mass_or_species");
    {
        char* end = nullptr;
        const double numeric = std::strtod(mass_or_species.c_str(), &end);
        if (end != mass_or_species.c_str() && *end == '\0') {
            p.mass = numeric;
        } else if (const auto m = species_mass(mass_or_species)) {
            p.mass = *m;
        } else {
            throw ConfigError(cfg.source() + ": unknown species '" + mass_or_species +
                              "' for key 'mass_or_species'");
        }
    }
    p.gamma = cfg.get_double("gamma_deg") * pi / 180.0;
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(cfg.source() + ": " + e.what());
    }
    return p;
}

inline std::vector<std::string> plan_csv_header() {
    return {"speed_m_per_s",  "transit_time_s",      "displacement0_m",
            "displacement_env_m", "spread_m",        "xi",
            "disturbance_bound_max", "bound_gamma_star_rad", "rel_change_linear",
            "rel_change_full", "s_d"};
}

inline std::vector<double> plan_csv_row(const PlanReport& r) {
    return {r.speed,          r.transit_time,     r.displacement_0,
            r.displacement_env, r.spread,         r.xi,
            r.disturbance_bound, r.bound_gamma_star, r.rel_change_linear,
            r.rel_change_full, r.s_d};
}

inline std::string format_plan_report(const ApparatusParams& p, const PlanReport& r) {
    char buf[256];
    std::string out;
    auto line = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof(buf), fmt, args...);
        out += buf;
        out += '\n';
    };
    line("%s", "Stern-Gerlach protective measurement plan");
    line("  apparatus: mu=%.4g J/T  grad_B=%.4g T/m  d=%.4g m  T_oven=%.4g K  B0=%.4g T",
         p.mu, p.grad_B, p.d, p.T_oven, p.B0);
    line("             mass=%.5g kg  gamma=%.6g rad  s_d=%.4g", p.mass, p.gamma, r.s_d);
    line("  beam speed (most probable)    %.4g m/s", r.speed);
    line("  transit time                  %.4g s", r.transit_time);
    line("  displacement, no environment  %.4g mm", r.displacement_0 * 1e3);
    line("  displacement at b = s_d       %.4g mm", r.displacement_env * 1e3);
    line("  displacement spread (1 sd)    %.4g mm", r.spread * 1e3);
    if (std::isfinite(r.rel_change_linear))
        line("  relative change               %.3g%% linearised, %.3g%% full shift factor",
             100.0 * r.rel_change_linear, 100.0 * r.rel_change_full);
    line("  measurement strength xi       %.4g (%s)", r.xi,
         r.xi < 1.0 ? "weak-measurement regime" : "OUTSIDE weak-measurement regime");
    line("  disturbance bound             %.4g at gamma = %.4g rad (worst orientation)",
         r.disturbance_bound, r.bound_gamma_star);
    return out;
}

} // namespace protectosim::planner
