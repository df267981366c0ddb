#pragma once

// Builders for the named figure datasets emitted by the CLI:
//   fig1  disturbance probability vs environment strength (plus inset range)
//   fig2  initial vs shifted pointer packet without an environment
//   fig3  environment-broadened pointer densities, weak coupling
//   fig4  two-peaked pointer densities for protection-axis environment fields
// Default grids are 400 points per curve; momentum ranges cover every plotted
// component to five widths.

#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "protectosim/continuum.hpp"
#include "protectosim/errors.hpp"
#include "protectosim/geometry.hpp"
#include "protectosim/io/curves.hpp"

namespace protectosim::figures {

struct Figure {
    std::string name;
    io::CurveSet curves;
};

using OverrideList = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline double parse_number(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw InvalidOverride("override '" + key + "' is not a number: '" + value + "'");
    return v;
}

inline std::vector<double> parse_number_list(const std::string& key,
                                             const std::string& value) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const auto comma = value.find(',', pos);
        const std::string token =
            value.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!token.empty())
            out.push_back(parse_number(key, token));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    if (out.empty())
        throw InvalidOverride("override '" + key + "' is an empty list");
    return out;
}

inline int parse_points(const std::string& key, const std::string& value) {
    const double v = parse_number(key, value);
    const int n = static_cast<int>(v);
    if (double(n) != v || n < 2 || n > 100000)
        throw InvalidOverride("override '" + key + "' must be an integer in [2, 100000]");
    return n;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

inline std::string sd_label(double sd) { return "sd=" + io::format_double(sd); }

[[noreturn]] inline void reject_key(std::string_view figure, const std::string& key) {
    throw InvalidOverride("figure " + std::string(figure) + " does not accept override '" +
                          key + "'");
}

} // namespace detail

inline std::vector<Figure> build(std::string_view id, const OverrideList& overrides = {}) {
    if (id == "fig1") {
        double xi = 0.1, gamma = pi / 2, eta = 0.0;
        int points = 400;
        for (const auto& [key, value] : overrides) {
            if (key == "xi")
                xi = detail::parse_number(key, value);
            else if (key == "gamma")
                gamma = detail::parse_number(key, value);
            else if (key == "eta")
                eta = detail::parse_number(key, value);
            else if (key == "points")
                points = detail::parse_points(key, value);
            else
                detail::reject_key(id, key);
        }
        const MeasurementGeometry geom(gamma, eta, xi);
        auto curve = [&](double lo, double hi) {
            io::CurveSet c;
            c.title = "State disturbance vs environment strength";
            c.x_label = "s_d";
            c.y_label = "P1";
            c.x = detail::linspace(lo, hi, points);
            io::CurveSet::Series s;
            s.label = "P1";
            s.y.reserve(c.x.size());
            for (double sd : c.x)
                s.y.push_back(continuum::p1_weak(sd, geom));
            c.series.push_back(std::move(s));
            return c;
        };
        return {{"fig1", curve(0.0, 3.0)}, {"fig1_inset", curve(0.0, 0.35)}};
    }

    if (id == "fig2") {
        double sigma_p = 0.03, shift = 0.1;
        int points = 400;
        for (const auto& [key, value] : overrides) {
            if (key == "sigma_p")
                sigma_p = detail::parse_number(key, value);
            else if (key == "shift")
                shift = detail::parse_number(key, value);
            else if (key == "points")
                points = detail::parse_points(key, value);
            else
                detail::reject_key(id, key);
        }
        if (!(sigma_p > 0.0))
            throw InvalidOverride("override 'sigma_p' must be positive");
        io::CurveSet c;
        c.title = "Pointer packet before and after the measurement";
        c.x_label = "p_tilde";
        c.y_label = "density";
        c.x = detail::linspace(std::min(0.0, shift) - 5.0 * sigma_p,
                               std::max(0.0, shift) + 5.0 * sigma_p, points);
        io::CurveSet::Series initial{"initial", {}};
        io::CurveSet::Series shifted{"shifted", {}};
        for (double p : c.x) {
            initial.y.push_back(gaussian_pdf(p, 0.0, sigma_p));
            shifted.y.push_back(gaussian_pdf(p, shift, sigma_p));
        }
        c.series = {std::move(initial), std::move(shifted)};
        return {{"fig2", std::move(c)}};
    }

    if (id == "fig3") {
        double xi = 0.1, gamma = pi / 4, eta = 0.0, sigma_p = 0.03;
        std::vector<double> sd_list = {0.05, 0.1, 0.2};
        int points = 400;
        for (const auto& [key, value] : overrides) {
            if (key == "xi")
                xi = detail::parse_number(key, value);
            else if (key == "gamma")
                gamma = detail::parse_number(key, value);
            else if (key == "eta")
                eta = detail::parse_number(key, value);
            else if (key == "sigma_p")
                sigma_p = detail::parse_number(key, value);
            else if (key == "sd")
                sd_list = detail::parse_number_list(key, value);
            else if (key == "points")
                points = detail::parse_points(key, value);
            else
                detail::reject_key(id, key);
        }
        if (!(sigma_p > 0.0))
            throw InvalidOverride("override 'sigma_p' must be positive");
        const MeasurementGeometry geom(gamma, eta, xi);
        double sigma_max = sigma_p;
        for (double sd : sd_list)
            sigma_max = std::max(
                sigma_max, std::sqrt(continuum::pointer_moments(sd, geom, sigma_p).variance));
        const double mean = std::cos(gamma);
        io::CurveSet c;
        c.title = "Environment-broadened pointer densities";
        c.x_label = "p_tilde";
        c.y_label = "density";
        c.x = detail::linspace(std::min(-5.0 * sigma_p, mean - 5.0 * sigma_max),
                               mean + 5.0 * sigma_max, points);
        io::CurveSet::Series initial{"initial", {}};
        for (double p : c.x)
            initial.y.push_back(gaussian_pdf(p, 0.0, sigma_p));
        c.series.push_back(std::move(initial));
        for (double sd : sd_list) {
            const auto m = continuum::pointer_moments(sd, geom, sigma_p);
            io::CurveSet::Series s{detail::sd_label(sd), {}};
            const double width = std::sqrt(m.variance);
            for (double p : c.x)
                s.y.push_back(gaussian_pdf(p, m.mean, width));
            c.series.push_back(std::move(s));
        }
        return {{"fig3", std::move(c)}};
    }

    if (id == "fig4") {
        double gamma = pi / 4, sigma_p = 0.03;
        std::vector<double> sd_list = {0.5, 1.0, 2.0};
        int points = 400;
        for (const auto& [key, value] : overrides) {
            if (key == "gamma")
                gamma = detail::parse_number(key, value);
            else if (key == "sigma_p")
                sigma_p = detail::parse_number(key, value);
            else if (key == "sd")
                sd_list = detail::parse_number_list(key, value);
            else if (key == "points")
                points = detail::parse_points(key, value);
            else
                detail::reject_key(id, key);
        }
        if (!(sigma_p > 0.0))
            throw InvalidOverride("override 'sigma_p' must be positive");
        const double cg = std::cos(gamma);
        io::CurveSet c;
        c.title = "Pointer densities for protection-axis environment fields";
        c.x_label = "p_tilde";
        c.y_label = "density";
        c.x = detail::linspace(-std::abs(cg) - 5.0 * sigma_p, std::abs(cg) + 5.0 * sigma_p,
                               points);
        for (double sd : sd_list) {
            const auto state = continuum::zaxis_pointer_density(sd, gamma, sigma_p, c.x);
            c.series.push_back({detail::sd_label(sd), state.values});
        }
        return {{"fig4", std::move(c)}};
    }

    throw UnknownFigure("unknown figure id '" + std::string(id) +
                        "'; expected fig1, fig2, fig3 or fig4");
}

} // namespace protectosim::figures
