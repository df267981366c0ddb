#pragma once

// Labeled curve bundles sharing one x grid, plus their CSV emission.

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "protectosim/errors.hpp"
#include "protectosim/io/csv.hpp"

namespace protectosim::io {

struct CurveSet {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    struct Series {
        std::string label;
        std::vector<double> y;
    };
    std::vector<Series> series;

    void validate() const {
        if (x.size() < 2)
            throw std::invalid_argument("CurveSet: need at least two x samples");
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!std::isfinite(x[i]))
                throw std::invalid_argument("CurveSet: non-finite x value");
            if (i > 0 && !(x[i] > x[i - 1]))
                throw std::invalid_argument("CurveSet: x must be strictly increasing");
        }
        if (series.empty())
            throw std::invalid_argument("CurveSet: need at least one series");
        for (const auto& s : series) {
            if (s.y.size() != x.size())
                throw std::invalid_argument("CurveSet: series '" + s.label +
                                            "' length does not match x grid");
            for (double v : s.y)
                if (!std::isfinite(v))
                    throw std::invalid_argument("CurveSet: non-finite value in series '" +
                                                s.label + "'");
        }
    }
};

inline void write_curves_csv(const std::filesystem::path& path, const CurveSet& curves) {
    curves.validate();
    std::vector<std::string> header;
    header.push_back(curves.x_label.empty() ? "x" : curves.x_label);
    for (const auto& s : curves.series)
        header.push_back(s.label);
    std::vector<std::vector<double>> rows;
    rows.reserve(curves.x.size());
    for (std::size_t i = 0; i < curves.x.size(); ++i) {
        std::vector<double> row;
        row.reserve(1 + curves.series.size());
        row.push_back(curves.x[i]);
        for (const auto& s : curves.series)
            row.push_back(s.y[i]);
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

} // namespace protectosim::io
