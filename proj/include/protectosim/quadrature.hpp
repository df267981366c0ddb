#pragma once

// Gauss-Hermite rules (weight exp(-x^2)) and adaptive Gauss-Kronrod
// integration.  The Gaussian-weighted front end evaluates two Hermite rules
// of different order as a consistency check and falls back to the adaptive
// routine when the rule under-resolves the integrand (features narrower than
// the node spacing, or oscillations).

#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "protectosim/constants.hpp"
#include "protectosim/errors.hpp"

namespace protectosim {

inline double gaussian_pdf(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(two_pi));
}

/// Nodes and weights for integrals of the form
///     integral exp(-x^2) f(x) dx  ~=  sum_i w_i f(x_i),
/// exact for polynomials up to degree 2n-1.  Nodes are the eigenvalues of
/// the symmetric tridiagonal Jacobi matrix (Golub-Welsch), polished by one
/// round of Newton on the orthonormal recurrence, which also yields the
/// weights from the derivative at each root.
class GaussHermiteRule {
public:
    explicit GaussHermiteRule(int n) {
        if (n < 1)
            throw std::invalid_argument("GaussHermiteRule: order must be >= 1");
        if (n > 512)
            throw std::invalid_argument(
                "GaussHermiteRule: the recurrence overflows for orders this large");
        nodes_.assign(std::size_t(n), 0.0);
        weights_.assign(std::size_t(n), 0.0);

        Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd sub(n - 1 > 0 ? n - 1 : 0);
        for (int j = 1; j < n; ++j)
            sub[j - 1] = std::sqrt(0.5 * j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw QuadratureFailure("GaussHermiteRule: Jacobi eigenvalue solve failed");

        const double pim4 = std::pow(pi, -0.25);
        // evaluate p_n and its derivative sqrt(2n) p_{n-1} at z
        auto recurrence = [&](double z, double& value, double& derivative) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt(double(j - 1) / j) * p3;
            }
            value = p1;
            derivative = std::sqrt(2.0 * n) * p2;
        };

        for (int i = 0; i < n; ++i) {
            double z = solver.eigenvalues()[i];
            double value = 0.0, derivative = 1.0;
            for (int polish = 0; polish < 4; ++polish) {
                recurrence(z, value, derivative);
                const double step = value / derivative;
                z -= step;
                if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z)))
                    break;
            }
            recurrence(z, value, derivative);
            nodes_[std::size_t(i)] = z;
            weights_[std::size_t(i)] = 2.0 / (derivative * derivative);
        }
        // enforce exact symmetry of the rule
        for (int i = 0; i < n / 2; ++i) {
            const std::size_t lo = std::size_t(i), hi = std::size_t(n - 1 - i);
            const double node = 0.5 * (nodes_[hi] - nodes_[lo]);
            nodes_[hi] = node;
            nodes_[lo] = -node;
            const double w = 0.5 * (weights_[lo] + weights_[hi]);
            weights_[lo] = weights_[hi] = w;
        }
        if (n % 2)
            nodes_[std::size_t(n / 2)] = 0.0;
    }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> nodes_, weights_;
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss; standard abscissae/weights.
struct GkEstimate {
    double integral;
    double error;
};

inline GkEstimate gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
    static constexpr double xgk[8] = {
        0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
        0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
    static constexpr double wgk[8] = {
        0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
        0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
    static constexpr double wg[4] = {
        0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resg = wg[3] * fc;
    double resk = wgk[7] * fc;
    for (int j = 0; j < 3; ++j) {
        const double x = h * xgk[2 * j + 1];
        const double sum = f(c - x) + f(c + x);
        resg += wg[j] * sum;
        resk += wgk[2 * j + 1] * sum;
    }
    for (int j = 0; j < 4; ++j) {
        const double x = h * xgk[2 * j];
        const double sum = f(c - x) + f(c + x);
        resk += wgk[2 * j] * sum;
    }
    return {resk * h, std::abs((resk - resg) * h)};
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f on [a, b].  The interval is first
/// split into initial_panels equal pieces (callers seed this from the
/// oscillation scale of the integrand), then the panel with the largest error
/// estimate is bisected until the accumulated error satisfies
/// max(abs_tol, rel_tol * |integral|).  Throws QuadratureFailure when the
/// evaluation budget runs out first.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double abs_tol, double rel_tol, int initial_panels = 8,
                                 long max_evals = 4000000L) {
    if (!(b > a))
        throw std::invalid_argument("integrate_adaptive: requires b > a");
    initial_panels = std::max(1, initial_panels);

    struct Panel {
        double a, b, integral, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    std::priority_queue<Panel> queue;
    double total = 0.0, total_err = 0.0;
    long evals = 0;

    const double width = (b - a) / initial_panels;
    for (int i = 0; i < initial_panels; ++i) {
        const double lo = a + i * width;
        const double hi = (i + 1 == initial_panels) ? b : lo + width;
        const auto est = detail::gauss_kronrod_15(f, lo, hi);
        evals += 15;
        queue.push({lo, hi, est.integral, est.error});
        total += est.integral;
        total_err += est.error;
    }

    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (evals >= max_evals || queue.empty())
            throw QuadratureFailure("integrate_adaptive: tolerance unreachable within budget");
        const Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw QuadratureFailure("integrate_adaptive: interval too small to bisect");
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        evals += 30;
        total += left.integral + right.integral - worst.integral;
        total_err += left.error + right.error - worst.error;
        queue.push({worst.a, mid, left.integral, left.error});
        queue.push({mid, worst.b, right.integral, right.error});
    }
    return total;
}

/// integral N(0, s_d^2)(b) f(b) db.  Hermite rules of order 100 and 200 act
/// as a cross-check; when they disagree beyond tolerance the integral is
/// redone adaptively on [-12 s_d, 12 s_d] (the weight's mass outside is
/// below 1e-31).
inline double integrate_gaussian_weighted(const std::function<double(double)>& f, double s_d,
                                          double rel_tol = 1e-8, double abs_tol = 1e-12) {
    if (!(s_d > 0.0))
        throw ZeroWidth("integrate_gaussian_weighted: s_d must be positive");
    static const GaussHermiteRule coarse(100);
    static const GaussHermiteRule fine(200);
    const double scale = std::sqrt(2.0) * s_d;
    const double norm = 1.0 / std::sqrt(pi);
    auto apply = [&](const GaussHermiteRule& rule) {
        double acc = 0.0;
        const auto& x = rule.nodes();
        const auto& w = rule.weights();
        for (std::size_t i = 0; i < x.size(); ++i)
            acc += w[i] * f(scale * x[i]);
        return norm * acc;
    };
    const double lo = apply(coarse);
    const double hi = apply(fine);
    if (std::abs(hi - lo) <= std::max(abs_tol, rel_tol * std::abs(hi)))
        return hi;
    auto weighted = [&](double x) { return gaussian_pdf(x, 0.0, s_d) * f(x); };
    return integrate_adaptive(weighted, -12.0 * s_d, 12.0 * s_d, abs_tol, rel_tol, 64);
}

} // namespace protectosim
