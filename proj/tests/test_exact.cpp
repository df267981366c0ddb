#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "protectosim/continuum.hpp"
#include "protectosim/exact.hpp"
#include "protectosim/geometry.hpp"
#include "protectosim/rng.hpp"

using namespace protectosim;
using exact::Branch;
using exact::BranchSet;
using exact::DiscreteEnvironment;

namespace {

// Independent enumeration of the field spectrum: recursive sign expansion
// instead of bit arithmetic.
void enumerate_fields(const std::vector<double>& couplings, std::size_t i, double acc,
                      std::vector<double>& out) {
    if (i == couplings.size()) {
        out.push_back(acc);
        return;
    }
    enumerate_fields(couplings, i + 1, acc - couplings[i], out);
    enumerate_fields(couplings, i + 1, acc + couplings[i], out);
}

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

double uniform(RngStream& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.next_double();
}

// Kolmogorov-Smirnov distance between the uniformly weighted atoms in
// `fields` and a centred Gaussian of width sd.
double ks_distance(std::vector<double> fields, double sd) {
    std::sort(fields.begin(), fields.end());
    const double n = double(fields.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const double cdf = 0.5 * (1.0 + std::erf(fields[i] / (std::sqrt(2.0) * sd)));
        worst = std::max(worst, std::abs(cdf - double(i) / n));
        worst = std::max(worst, std::abs(cdf - double(i + 1) / n));
    }
    return worst;
}

} // namespace

TEST_CASE("environment field spectrum enumerates every sign pattern") {
    CHECK(sorted(exact::environment_eigenvalues(std::vector<double>{0.5})) ==
          std::vector<double>{-0.5, 0.5});
    CHECK(sorted(exact::environment_eigenvalues(std::vector<double>{0.5, 0.5})) ==
          std::vector<double>{-1.0, 0.0, 0.0, 1.0});
    const auto zeros = exact::environment_eigenvalues(std::vector<double>{0.0, 0.0, 0.0});
    REQUIRE(zeros.size() == 8);
    for (double b : zeros)
        CHECK(b == 0.0);
    // empty environment: the single zero field
    CHECK(exact::environment_eigenvalues(std::vector<double>{}) == std::vector<double>{0.0});

    RngStream rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> couplings;
        for (int i = 0; i < 6; ++i)
            couplings.push_back(uniform(rng, -0.3, 0.3));
        std::vector<double> expected;
        enumerate_fields(couplings, 0, 0.0, expected);
        const auto got = sorted(exact::environment_eigenvalues(couplings));
        const auto want = sorted(expected);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            REQUIRE(got[i] == Catch::Approx(want[i]).margin(1e-14));
    }
}

TEST_CASE("full-cap environment stays exact") {
    RngStream rng(1);
    const MeasurementGeometry g{pi / 2, 0.0, 0.1};
    const auto env =
        DiscreteEnvironment::uniform(exact::matched_couplings(0.2, 16, rng));
    const auto set = exact::branches(env, g, 200 * pi, 0.03);
    REQUIRE(set.items.size() == 65536);
    const auto rho = exact::spin_density(set, env.amplitudes);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
    CHECK(std::abs(rho.p1() - exact::disturbance_probability(set, env.amplitudes)) < 1e-10);
}

TEST_CASE("environment cap bounds the enumeration") {
    CHECK_THROWS_AS(exact::environment_eigenvalues(std::vector<double>(17, 0.1)),
                    CapExceeded);
    CHECK_THROWS_AS(exact::environment_eigenvalues(std::vector<double>(20, 0.1)),
                    CapExceeded);
    CHECK_THROWS_AS(exact::uniform_superposition_amplitudes(17), CapExceeded);
    CHECK_NOTHROW(exact::environment_eigenvalues(std::vector<double>(17, 0.1), 17));
}

TEST_CASE("uniform superposition amplitudes") {
    const auto one = exact::uniform_superposition_amplitudes(1);
    REQUIRE(one.size() == 2);
    CHECK(one[0].real() == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

    const auto three = exact::uniform_superposition_amplitudes(3);
    REQUIRE(three.size() == 8);
    double norm = 0.0;
    for (const auto& c : three) {
        CHECK(c.real() == Catch::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-15));
        norm += std::norm(c);
    }
    CHECK(norm == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("matched couplings reproduce the requested field variance") {
    RngStream rng(99);
    const double sd = 0.2;
    const int n = 12;
    double acc = 0.0;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) {
        double sum_sq = 0.0;
        for (double g : exact::matched_couplings(sd, n, rng))
            sum_sq += g * g;
        acc += sum_sq; // variance of the field over sign patterns for this draw
    }
    CHECK(acc / draws == Catch::Approx(sd * sd).epsilon(0.03));
}

TEST_CASE("discrete environment validates amplitudes") {
    CHECK_THROWS_AS(DiscreteEnvironment({0.1}, {{1.0, 0.0}, {1.0, 0.0}}),
                    std::invalid_argument); // not normalised
    CHECK_THROWS_AS(DiscreteEnvironment({0.1}, {{1.0, 0.0}}),
                    std::invalid_argument); // wrong count
    CHECK_NOTHROW(DiscreteEnvironment::uniform({0.1, 0.2}));
}

TEST_CASE("branches carry the per-branch closed forms") {
    const MeasurementGeometry g{pi / 3, 0.0, 0.1};
    const double omega0_T = 200 * pi;

    SECTION("decoupled spin acts like no environment") {
        const auto env = DiscreteEnvironment::uniform({0.0});
        const auto set = exact::branches(env, g, omega0_T, 0.03);
        REQUIRE(set.items.size() == 2);
        const auto free_field = effective_field(g, 0.0);
        for (const Branch& br : set.items) {
            CHECK(br.b_tilde == 0.0);
            CHECK(br.field.theta == Catch::Approx(free_field.theta).margin(1e-15));
        }
    }

    SECTION("pointer shift is even in the field when cos(eta) = 0") {
        const MeasurementGeometry g2{pi / 3, pi / 2, 0.0};
        const auto env = DiscreteEnvironment::uniform({0.2});
        const auto set = exact::branches(env, g2, omega0_T, 0.03);
        REQUIRE(set.items.size() == 2);
        const double expected = std::cos(pi / 3) / std::sqrt(1.04);
        for (const Branch& br : set.items)
            CHECK(br.delta_p == Catch::Approx(expected).epsilon(1e-12));
    }

    SECTION("two spins give the four sign combinations") {
        const auto env = DiscreteEnvironment::uniform({0.1, 0.3});
        const auto set = exact::branches(env, g, omega0_T, 0.03);
        std::vector<double> fields;
        for (const Branch& br : set.items)
            fields.push_back(br.b_tilde);
        const auto want = std::vector<double>{-0.4, -0.2, 0.2, 0.4};
        const auto got = sorted(fields);
        for (std::size_t i = 0; i < 4; ++i)
            REQUIRE(got[i] == Catch::Approx(want[i]).margin(1e-14));
    }

    SECTION("precession phase follows the net field magnitude") {
        const auto env = DiscreteEnvironment::uniform({0.1, 0.3, 0.25});
        const auto set = exact::branches(env, g, omega0_T, 0.03);
        for (const Branch& br : set.items) {
            REQUIRE(br.omega_T ==
                    Catch::Approx(0.5 * omega0_T * std::sqrt(1.0 + br.b_tilde * br.b_tilde))
                        .epsilon(1e-12));
            REQUIRE(br.gamma_overlap ==
                    Catch::Approx(wavepacket_overlap(br.delta_p, 0.03)).epsilon(1e-12));
        }
    }
}

TEST_CASE("spin density: nothing acts, nothing changes") {
    const MeasurementGeometry g{0.7, 0.3, 0.0};
    const auto env = DiscreteEnvironment::uniform({0.0, 0.0});
    const auto set = exact::branches(env, g, 50.0, 0.03);
    const auto rho = exact::spin_density(set, env.amplitudes);
    CHECK(std::abs(rho.m00 - 1.0) < 1e-14);
    CHECK(std::abs(rho.m01) < 1e-14);
    CHECK(std::abs(rho.m10) < 1e-14);
    CHECK(std::abs(rho.m11) < 1e-14);
}

TEST_CASE("spin density is a physical state and matches the direct formula") {
    RngStream rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + int(rng.next_double() * 5.99);
        const double sd = uniform(rng, 0.0, 1.0);
        std::vector<double> couplings = exact::matched_couplings(sd + 0.01, n, rng);
        const MeasurementGeometry g{uniform(rng, 0.0, pi), uniform(rng, 0.0, 6.28),
                                    uniform(rng, 0.0, 0.5)};
        const double omega0_T = uniform(rng, 1.0, 700.0);
        const double sigma_p = uniform(rng, 0.01, 0.2);
        const auto env = DiscreteEnvironment::uniform(std::move(couplings));
        const auto set = exact::branches(env, g, omega0_T, sigma_p);
        const auto rho = exact::spin_density(set, env.amplitudes);

        REQUIRE(std::abs(rho.trace() - 1.0) < 1e-10);
        REQUIRE(rho.hermiticity_defect() < 1e-10);
        const auto eig = rho.eigenvalues();
        REQUIRE(eig[0] > -1e-10);
        REQUIRE(eig[1] < 1.0 + 1e-10);

        // two derivations of the disturbance probability
        const double p1_matrix = rho.p1();
        const double p1_formula = exact::disturbance_probability(set, env.amplitudes);
        REQUIRE(std::abs(p1_matrix - p1_formula) < 1e-10);
    }
}

TEST_CASE("disturbance probability: decoupled environment gives zero") {
    const MeasurementGeometry g{0.9, 0.0, 0.0};
    const auto env = DiscreteEnvironment::uniform({0.0, 0.0, 0.0});
    const auto set = exact::branches(env, g, 100.0, 0.03);
    CHECK(exact::disturbance_probability(set, env.amplitudes) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("disturbance probability saturates its orientation bound") {
    // no environment, full packet overlap, precession phase at its worst
    const MeasurementGeometry g{pi / 2, 0.0, 0.3};
    const auto env = DiscreteEnvironment::uniform({});
    const auto set = exact::branches(env, g, pi, 0.03); // cos(omega0_T) = -1
    // at gamma = pi/2 the pointer shift vanishes, so the overlap is exactly 1
    CHECK(set.items[0].gamma_overlap == 1.0);
    CHECK(exact::disturbance_probability(set, env.amplitudes) ==
          Catch::Approx(disturbance_bound(0.3, pi / 2)).epsilon(1e-12));
}

TEST_CASE("environment-free reduction over a duration sweep") {
    const MeasurementGeometry g{pi / 2, 0.0, 0.1};
    const double sigma_p = 0.03;
    const auto env = DiscreteEnvironment::uniform({});
    const double s2t = sin2_theta(g, 0.0);
    const double overlap = wavepacket_overlap(pointer_shift(g, 0.0), sigma_p);
    for (int i = 1; i <= 100; ++i) {
        const double omega0_T = i * (4.0 * pi / 100.0);
        const auto set = exact::branches(env, g, omega0_T, sigma_p);
        const double expected = 0.5 * s2t * (1.0 - overlap * std::cos(omega0_T));
        REQUIRE(std::abs(exact::disturbance_probability(set, env.amplitudes) - expected) <
                1e-10);
    }
}

TEST_CASE("phase-averaged disturbance removes the oscillation deterministically") {
    const MeasurementGeometry g{pi / 2, 0.0, 0.1};
    const auto env = DiscreteEnvironment::uniform({});
    const auto set = exact::branches(env, g, 200 * pi, 0.03);
    // without an environment the window average of the oscillation is zero
    CHECK(exact::disturbance_probability_phase_averaged(set, env.amplitudes) ==
          Catch::Approx(0.5 * sin2_theta(g, 0.0)).margin(1e-10));
}

TEST_CASE("discrete field spectra drift towards the Gaussian with system size") {
    const double sd = 0.2;
    const int draws = 16;
    std::map<int, double> avg_ks;
    for (int n : {8, 10, 12}) {
        double acc = 0.0;
        for (int i = 0; i < draws; ++i) {
            RngStream rng(501, std::uint64_t(n) * 1000 + std::uint64_t(i));
            const auto couplings = exact::matched_couplings(sd, n, rng);
            acc += ks_distance(exact::environment_eigenvalues(couplings), sd);
        }
        avg_ks[n] = acc / draws;
    }
    CHECK(avg_ks[10] < avg_ks[8]);
    CHECK(avg_ks[12] < avg_ks[10]);
}

TEST_CASE("pointer mixture moments approach the continuum closed forms") {
    // Conditioned on the un-reversed branch (the reversed packets carry
    // weight ~ b^2/4 and are excluded from the linearised continuum result),
    // the exact mixture moments match the convolution closed forms with an
    // error growing with the environment strength.
    const MeasurementGeometry g{pi / 4, 0.0, 0.1};
    const double sigma_p = 0.03;
    auto deviations = [&](double sd) {
        double mean_acc = 0.0, var_acc = 0.0;
        const int draws = 20;
        for (int draw = 0; draw < draws; ++draw) {
            RngStream rng(606, std::uint64_t(draw) + std::uint64_t(sd * 1e4) * 101);
            const auto env =
                DiscreteEnvironment::uniform(exact::matched_couplings(sd, 12, rng));
            const auto set = exact::branches(env, g, 200 * pi, sigma_p);
            const auto mix = exact::pointer_mixture(set, env.amplitudes);
            double w_sum = 0.0, first = 0.0, second = 0.0;
            for (std::size_t i = 0; i < mix.components.size(); i += 2) {
                const auto& c = mix.components[i]; // even entries: un-reversed
                w_sum += c.weight;
                first += c.weight * c.center;
                second += c.weight * (c.width * c.width + c.center * c.center);
            }
            const double mean = first / w_sum;
            mean_acc += mean;
            var_acc += second / w_sum - mean * mean;
        }
        return std::pair{mean_acc / draws, var_acc / draws};
    };
    const auto closed = [&](double sd) {
        return continuum::pointer_moments(sd, g, sigma_p);
    };
    const auto [m05, v05] = deviations(0.05);
    CHECK(std::abs(m05 - closed(0.05).mean) / closed(0.05).mean < 0.01);
    CHECK(std::abs(v05 - closed(0.05).variance) / closed(0.05).variance < 0.05);
    const auto [m10, v10] = deviations(0.1);
    CHECK(std::abs(m10 - closed(0.1).mean) / closed(0.1).mean < 0.01);
    CHECK(std::abs(v10 - closed(0.1).variance) / closed(0.1).variance < 0.05);
    const auto [m20, v20] = deviations(0.2);
    CHECK(std::abs(m20 - closed(0.2).mean) / closed(0.2).mean < 0.03);
    CHECK(std::abs(v20 - closed(0.2).variance) / closed(0.2).variance < 0.15);
    // the linearisation error grows with the environment strength
    CHECK(std::abs(m20 - closed(0.2).mean) > std::abs(m05 - closed(0.05).mean));
}

TEST_CASE("pointer mixture structure") {
    SECTION("total weight is one for random environments") {
        RngStream rng(321);
        for (int trial = 0; trial < 1000; ++trial) {
            const int n = 1 + int(rng.next_double() * 6.99);
            const MeasurementGeometry g{uniform(rng, 0.0, pi), uniform(rng, 0.0, 6.28),
                                        uniform(rng, 0.0, 0.6)};
            const auto env =
                DiscreteEnvironment::uniform(exact::matched_couplings(0.3, n, rng));
            const auto set = exact::branches(env, g, 100.0, 0.05);
            const auto mix = exact::pointer_mixture(set, env.amplitudes);
            REQUIRE(mix.components.size() == 2 * set.items.size());
            REQUIRE(std::abs(mix.total_weight() - 1.0) < 1e-10);
        }
    }

    SECTION("single branch splits into the two shifted packets") {
        const MeasurementGeometry g{pi / 3, 0.0, 0.2};
        const auto env = DiscreteEnvironment::uniform({});
        const auto set = exact::branches(env, g, 100.0, 0.03);
        const auto mix = exact::pointer_mixture(set, env.amplitudes);
        REQUIRE(mix.components.size() == 2);
        const auto field = effective_field(g, 0.0);
        const double dp = pointer_shift(g, 0.0);
        CHECK(mix.components[0].weight ==
              Catch::Approx(0.5 * (1.0 + field.r[2])).epsilon(1e-12));
        CHECK(mix.components[0].center == Catch::Approx(dp).epsilon(1e-12));
        CHECK(mix.components[1].weight ==
              Catch::Approx(0.5 * (1.0 - field.r[2])).epsilon(1e-12));
        CHECK(mix.components[1].center == Catch::Approx(-dp).epsilon(1e-12));
        CHECK(mix.components[0].width == 0.03);
    }

    SECTION("axis-aligned measurement keeps a single effective packet") {
        const MeasurementGeometry g{0.0, 0.0, 0.1};
        const auto env = DiscreteEnvironment::uniform({});
        const auto set = exact::branches(env, g, 100.0, 0.03);
        const auto mix = exact::pointer_mixture(set, env.amplitudes);
        CHECK(mix.components[0].weight == Catch::Approx(1.0).margin(1e-10));
        CHECK(mix.components[0].center == Catch::Approx(1.0).margin(1e-12));
        CHECK(mix.components[1].weight == Catch::Approx(0.0).margin(1e-10));
    }
}
