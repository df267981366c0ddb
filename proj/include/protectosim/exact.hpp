#pragma once

// Exact branch-resolved evolution of qubit x pointer x N-spin environment.
//
// The environment operator is diagonal in the product basis of single-spin
// x-eigenstates, so the evolved state splits into 2^N independent branches,
// each of which sees a static net field.  The reduced spin state, the
// disturbance probability and the pointer mixture are assembled from
// closed-form branch quantities; there is no Hilbert-space truncation, which
// makes this engine the brute-force reference for the continuum analytics.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "protectosim/errors.hpp"
#include "protectosim/geometry.hpp"
#include "protectosim/mixture.hpp"
#include "protectosim/rng.hpp"

namespace protectosim::exact {

// 2^16 branches keep the full branch table well under 100 MB.
inline constexpr int default_branch_cap = 16;

namespace detail {

inline void check_cap(std::size_t n_spins, int cap) {
    if (cap < 0 || cap > 30)
        throw std::invalid_argument("environment cap must lie in [0, 30]");
    if (n_spins > static_cast<std::size_t>(cap))
        throw CapExceeded("environment of " + std::to_string(n_spins) +
                          " spins exceeds cap of " + std::to_string(cap));
}

} // namespace detail

/// Environment field value for every joint eigenstate of the bath: bit k_i of
/// the pattern selects the sign of coupling i, and the diagonal eigenvalue is
/// mapped to a field along +x with the sign convention b = -eps.  An empty
/// coupling list is the environment-free case and yields the single value 0.
inline std::vector<double> environment_eigenvalues(std::span<const double> couplings,
                                                   int cap = default_branch_cap) {
    detail::check_cap(couplings.size(), cap);
    const std::size_t n = couplings.size();
    std::vector<double> fields(std::size_t{1} << n);
    for (std::size_t pattern = 0; pattern < fields.size(); ++pattern) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += (pattern >> i & 1u) ? couplings[i] : -couplings[i];
        fields[pattern] = acc;
    }
    return fields;
}

/// Product state with every bath spin balanced between its two x-eigenstates:
/// all 2^N amplitudes equal 2^(-N/2).
inline std::vector<std::complex<double>> uniform_superposition_amplitudes(
    int n_spins, int cap = default_branch_cap) {
    if (n_spins < 0)
        throw std::invalid_argument("uniform_superposition_amplitudes: negative spin count");
    detail::check_cap(static_cast<std::size_t>(n_spins), cap);
    const std::size_t count = std::size_t{1} << n_spins;
    return std::vector<std::complex<double>>(count, std::complex<double>(
        std::pow(2.0, -0.5 * n_spins), 0.0));
}

/// Couplings drawn i.i.d. uniform on [-a, a] with a = s_d sqrt(3/N), so the
/// branch-field variance over random sign patterns matches s_d^2.
inline std::vector<double> matched_couplings(double s_d, int n_spins, RngStream& rng) {
    if (n_spins < 1)
        throw std::invalid_argument("matched_couplings: need at least one spin");
    if (!(s_d >= 0.0))
        throw std::invalid_argument("matched_couplings: s_d must be non-negative");
    const double a = s_d * std::sqrt(3.0 / n_spins);
    std::vector<double> g(n_spins);
    for (auto& v : g)
        v = -a + 2.0 * a * rng.next_double();
    return g;
}

/// Discrete N-spin bath: dimensionless couplings plus the complex amplitudes
/// of the initial bath state over the 2^N product eigenbasis.
struct DiscreteEnvironment {
    std::vector<double> couplings;
    std::vector<std::complex<double>> amplitudes;

    DiscreteEnvironment(std::vector<double> couplings_,
                        std::vector<std::complex<double>> amplitudes_,
                        int cap = default_branch_cap)
        : couplings(std::move(couplings_)), amplitudes(std::move(amplitudes_)) {
        detail::check_cap(couplings.size(), cap);
        const std::size_t expected = std::size_t{1} << couplings.size();
        if (amplitudes.size() != expected)
            throw std::invalid_argument("DiscreteEnvironment: amplitude count must be 2^N");
        double norm = 0.0;
        for (const auto& c : amplitudes)
            norm += std::norm(c);
        if (std::abs(norm - 1.0) > 1e-10)
            throw std::invalid_argument("DiscreteEnvironment: amplitudes are not normalised");
    }

    static DiscreteEnvironment uniform(std::vector<double> couplings,
                                       int cap = default_branch_cap) {
        auto amps = uniform_superposition_amplitudes(static_cast<int>(couplings.size()), cap);
        return DiscreteEnvironment(std::move(couplings), std::move(amps), cap);
    }

    std::size_t spins() const { return couplings.size(); }
};

/// One term of the evolved total state: the environment field it sees, the
/// resulting net field, accumulated precession phase, pointer shift and
/// packet overlap.
struct Branch {
    std::size_t index;
    double b_tilde;
    EffectiveField field;
    double omega_T;       // Omega_n T = (omega0 T / 2) sqrt(1 + b^2)
    double delta_p;       // pointer shift in units of mu*beta
    double gamma_overlap; // overlap of the two shifted packets
};

struct BranchSet {
    std::vector<Branch> items;
    double omega0_T;
    double sigma_p;
};

inline BranchSet branches(const DiscreteEnvironment& env, const MeasurementGeometry& g,
                          double omega0_T, double sigma_p) {
    if (!(omega0_T > 0.0))
        throw std::invalid_argument("branches: omega0_T must be positive");
    if (!(sigma_p > 0.0))
        throw std::invalid_argument("branches: sigma_p must be positive");
    const auto fields = environment_eigenvalues(env.couplings);
    BranchSet set;
    set.omega0_T = omega0_T;
    set.sigma_p = sigma_p;
    set.items.reserve(fields.size());
    for (std::size_t n = 0; n < fields.size(); ++n) {
        const double b = fields[n];
        Branch br;
        br.index = n;
        br.b_tilde = b;
        br.field = effective_field(g, b);
        br.omega_T = 0.5 * omega0_T * std::sqrt(1.0 + b * b);
        br.delta_p = pointer_shift(g, b);
        br.gamma_overlap = wavepacket_overlap(br.delta_p, sigma_p);
        set.items.push_back(br);
    }
    return set;
}

/// 2x2 reduced spin density matrix in the computational basis.
struct SpinDensity {
    std::complex<double> m00, m01, m10, m11;

    std::complex<double> trace() const { return m00 + m11; }

    /// Population of the orthogonal state |1>.
    double p1() const { return m11.real(); }

    /// Largest entrywise deviation from Hermiticity.
    double hermiticity_defect() const {
        double d = std::abs(m01 - std::conj(m10));
        d = std::max(d, std::abs(m00.imag()));
        return std::max(d, std::abs(m11.imag()));
    }

    /// Eigenvalues of the Hermitian part, ascending.
    std::array<double, 2> eigenvalues() const {
        const double a = m00.real();
        const double d = m11.real();
        const double half_tr = 0.5 * (a + d);
        const double disc = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m01));
        return {half_tr - disc, half_tr + disc};
    }
};

namespace detail {

inline void check_alignment(const BranchSet& set,
                            std::span<const std::complex<double>> amplitudes) {
    if (set.items.size() != amplitudes.size())
        throw std::invalid_argument("branch list and amplitudes are not index-aligned");
}

// Average of cos(omega0_T * s) over one 2*pi window of omega0_T starting at
// window_start, with s = sqrt(1 + b^2).
inline double window_averaged_cos(double window_start, double b_tilde) {
    const double s = std::sqrt(1.0 + b_tilde * b_tilde);
    return (std::sin(s * (window_start + two_pi)) - std::sin(s * window_start)) /
           (two_pi * s);
}

} // namespace detail

/// Reduced spin state after tracing out pointer and environment: per branch,
/// the populations of the two net-field eigenstates plus coherences damped by
/// the packet overlap and rotating at twice the branch precession phase.
inline SpinDensity spin_density(const BranchSet& set,
                                std::span<const std::complex<double>> amplitudes) {
    detail::check_alignment(set, amplitudes);
    std::complex<double> acc[2][2] = {};
    for (const Branch& br : set.items) {
        const double weight = std::norm(amplitudes[br.index]);
        if (weight == 0.0)
            continue;
        const double half = 0.5 * br.field.theta;
        const double c = std::cos(half);
        const double s = std::sin(half);
        const std::complex<double> phase = std::polar(1.0, br.field.phi);
        const std::complex<double> up[2] = {c, s * phase};   // |r+>
        const std::complex<double> down[2] = {s, -c * phase}; // |r->
        const std::complex<double> osc = std::polar(1.0, 2.0 * br.omega_T);
        const double overlap = br.gamma_overlap;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                std::complex<double> term =
                    c * c * up[a] * std::conj(up[b]) + s * s * down[a] * std::conj(down[b]) +
                    overlap * c * s *
                        (osc * up[a] * std::conj(down[b]) +
                         std::conj(osc) * down[a] * std::conj(up[b]));
                acc[a][b] += weight * term;
            }
        }
    }
    return {acc[0][0], acc[0][1], acc[1][0], acc[1][1]};
}

/// Probability of finding the qubit in |1> at the end of the measurement,
/// from the closed-form branch sum.  Equals spin_density(...).p1().
inline double disturbance_probability(const BranchSet& set,
                                      std::span<const std::complex<double>> amplitudes) {
    detail::check_alignment(set, amplitudes);
    double acc = 0.0;
    for (const Branch& br : set.items) {
        const double st = std::sin(br.field.theta);
        acc += std::norm(amplitudes[br.index]) * st * st *
               (1.0 - br.gamma_overlap * std::cos(2.0 * br.omega_T));
    }
    return 0.5 * acc;
}

/// Same quantity averaged analytically over omega0_T in
/// [window_start, window_start + 2*pi]; this removes the oscillatory term
/// deterministically, realising the long-measurement regime.  The default
/// window starts at the branch set's own omega0_T.
inline double disturbance_probability_phase_averaged(
    const BranchSet& set, std::span<const std::complex<double>> amplitudes) {
    detail::check_alignment(set, amplitudes);
    double acc = 0.0;
    for (const Branch& br : set.items) {
        const double st = std::sin(br.field.theta);
        const double averaged = detail::window_averaged_cos(set.omega0_T, br.b_tilde);
        acc += std::norm(amplitudes[br.index]) * st * st *
               (1.0 - br.gamma_overlap * averaged);
    }
    return 0.5 * acc;
}

/// Reduced pointer state: every branch contributes one packet shifted by
/// +delta_p with weight cos^2(theta/2) and one shifted by -delta_p with
/// weight sin^2(theta/2), all of the initial width.
inline PointerMixture pointer_mixture(const BranchSet& set,
                                      std::span<const std::complex<double>> amplitudes) {
    detail::check_alignment(set, amplitudes);
    PointerMixture mix;
    mix.components.reserve(2 * set.items.size());
    for (const Branch& br : set.items) {
        const double weight = std::norm(amplitudes[br.index]);
        const double up = 0.5 * (1.0 + br.field.r[2]);   // cos^2(theta/2)
        const double down = 0.5 * (1.0 - br.field.r[2]); // sin^2(theta/2)
        mix.components.push_back({weight * up, br.delta_p, set.sigma_p});
        mix.components.push_back({weight * down, -br.delta_p, set.sigma_p});
    }
    return mix;
}

} // namespace protectosim::exact
