#pragma once

// Gaussian mixtures over the dimensionless pointer momentum.  Densities are
// kept in closed form and evaluated on caller-supplied grids; the pointer is
// never discretised internally.

#include <cmath>
#include <span>
#include <vector>

#include "protectosim/quadrature.hpp"

namespace protectosim {

struct GaussianComponent {
    double weight;
    double center;
    double width;
};

struct PointerMixture {
    std::vector<GaussianComponent> components;

    double total_weight() const {
        double acc = 0.0;
        for (const auto& c : components)
            acc += c.weight;
        return acc;
    }

    double pdf(double p) const {
        double acc = 0.0;
        for (const auto& c : components)
            acc += c.weight * gaussian_pdf(p, c.center, c.width);
        return acc;
    }

    std::vector<double> evaluate(std::span<const double> grid) const {
        std::vector<double> out;
        out.reserve(grid.size());
        for (double p : grid)
            out.push_back(pdf(p));
        return out;
    }

    double mean() const {
        double acc = 0.0;
        for (const auto& c : components)
            acc += c.weight * c.center;
        return acc;
    }

    double variance() const {
        const double m = mean();
        double acc = 0.0;
        for (const auto& c : components)
            acc += c.weight * (c.width * c.width + c.center * c.center);
        return acc - m * m;
    }
};

} // namespace protectosim
