// protectosim command line: figure-data generation, cross-engine validation,
// Monte Carlo ensembles, experiment planning and parameter sweeps.
//
// Exit codes: 0 success and passing checks, 1 failed checks, 2 usage or
// configuration errors.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "protectosim/protectosim.hpp"

namespace fs = std::filesystem;
using namespace protectosim;

namespace {

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string token =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!token.empty())
            out.push_back(io::parse_double_strict(token, what));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    if (out.empty())
        throw ConfigError(what + ": empty list");
    return out;
}

struct FigureArgs {
    std::string id;
    std::string out = ".";
    std::string format = "csv";
    std::vector<std::string> sets;
};

int run_figure(const FigureArgs& args) {
    figures::OverrideList overrides;
    for (const std::string& kv : args.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw InvalidOverride("--set expects key=value, got '" + kv + "'");
        overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const auto figs = figures::build(args.id, overrides);
    fs::create_directories(args.out);
    for (const auto& fig : figs) {
        if (args.format == "csv" || args.format == "both") {
            const fs::path path = fs::path(args.out) / (fig.name + ".csv");
            io::write_curves_csv(path, fig.curves);
            std::cout << "wrote " << path.string() << "\n";
        }
        if (args.format == "svg" || args.format == "both") {
            const fs::path path = fs::path(args.out) / (fig.name + ".svg");
            io::write_curves_svg(path, fig.curves);
            std::cout << "wrote " << path.string() << "\n";
        }
    }
    return 0;
}

struct ValidateArgs {
    int n = 12;
    std::string sd_csv = "0.1,0.2,0.35,1.0";
    std::uint64_t seed = 1;
    int draws = 20;
    double xi = 0.1;
    double gamma = pi / 2;
    double eta = 0.0;
    double sigma_p = 0.03;
    double omega0_T = 200.0 * pi;
    double tol = 0.01;
};

int run_validate(const ValidateArgs& args) {
    const auto sd_list = parse_double_list(args.sd_csv, "--sd");
    if (args.draws < 1)
        throw ConfigError("--draws must be >= 1");
    const MeasurementGeometry geom(args.gamma, args.eta, args.xi);
    std::printf("cross-engine validation: N=%d spins, %d coupling draws, seed=%llu\n",
                args.n, args.draws, static_cast<unsigned long long>(args.seed));
    std::printf("%8s %14s %14s %12s\n", "s_d", "exact(avg)", "continuum", "|diff|");
    double worst = 0.0;
    for (std::size_t si = 0; si < sd_list.size(); ++si) {
        const double sd = sd_list[si];
        double acc = 0.0;
        for (int draw = 0; draw < args.draws; ++draw) {
            RngStream rng(args.seed, si * 1000003ull + static_cast<std::uint64_t>(draw));
            std::vector<double> couplings;
            if (sd == 0.0)
                couplings.assign(static_cast<std::size_t>(args.n), 0.0);
            else
                couplings = exact::matched_couplings(sd, args.n, rng);
            const auto env = exact::DiscreteEnvironment::uniform(std::move(couplings));
            const auto set = exact::branches(env, geom, args.omega0_T, args.sigma_p);
            acc += exact::disturbance_probability_phase_averaged(set, env.amplitudes);
        }
        const double exact_p1 = acc / args.draws;
        const double continuum_p1 = continuum::p1_weak(sd, geom);
        const double diff = std::abs(exact_p1 - continuum_p1);
        worst = std::max(worst, diff);
        std::printf("%8g %14.8f %14.8f %12.3e\n", sd, exact_p1, continuum_p1, diff);
    }
    const bool ok = worst <= args.tol;
    std::printf("%s: worst |diff| = %.3e (tolerance %g)\n", ok ? "PASS" : "FAIL", worst,
                args.tol);
    return ok ? 0 : 1;
}

struct FileArgs {
    std::string path;
    std::string out = ".";
};

int run_ensemble(const FileArgs& args) {
    const auto cfg = io::KeyValueConfig::parse_file(args.path);
    cfg.require_known({"runs", "seed", "s_d", "gamma", "eta", "xi", "sigma_p", "bins",
                       "range_lo", "range_hi"});
    const MeasurementGeometry geom(cfg.get_double_or("gamma", pi / 4),
                                   cfg.get_double_or("eta", 0.0),
                                   cfg.get_double_or("xi", 0.1));
    const double s_d = cfg.get_double_or("s_d", 0.2);
    const double sigma_p = cfg.get_double_or("sigma_p", 0.03);
    if (cfg.has("range_lo") != cfg.has("range_hi"))
        throw ConfigError(cfg.source() + ": range_lo and range_hi must be given together");
    const auto [auto_lo, auto_hi] = ensemble::EnsembleConfig::default_range(geom, sigma_p, s_d);
    const ensemble::EnsembleConfig run_cfg{
        cfg.get_u64_or("runs", 100000),
        cfg.get_u64_or("seed", 1),
        s_d,
        geom,
        sigma_p,
        cfg.get_int_or("bins", 80),
        cfg.get_double_or("range_lo", auto_lo),
        cfg.get_double_or("range_hi", auto_hi),
    };
    const auto rep = ensemble::run_ensemble(run_cfg);

    fs::create_directories(args.out);
    const fs::path hist_path = fs::path(args.out) / "ensemble_hist.csv";
    {
        const std::vector<std::string> header = {"bin_lo", "bin_hi", "count"};
        std::vector<std::vector<double>> rows;
        rows.reserve(rep.counts.size() + 2);
        const double inf = std::numeric_limits<double>::infinity();
        rows.push_back({-inf, rep.bin_edges.front(), double(rep.underflow)});
        for (std::size_t i = 0; i < rep.counts.size(); ++i)
            rows.push_back({rep.bin_edges[i], rep.bin_edges[i + 1], double(rep.counts[i])});
        rows.push_back({rep.bin_edges.back(), inf, double(rep.overflow)});
        io::write_csv(hist_path, header, rows);
    }

    std::string status;
    if (!rep.checks_evaluated)
        status = "skipped";
    else if (std::abs(rep.z_mean) <= 3.0 && std::abs(rep.z_variance) <= 3.0)
        status = "passed";
    else
        status = "failed";

    std::string summary;
    auto kv = [&](const std::string& k, const std::string& v) {
        summary += k + "=" + v + "\n";
    };
    kv("runs", std::to_string(rep.runs));
    kv("seed", std::to_string(rep.seed));
    kv("s_d", io::format_double(s_d));
    kv("gamma", io::format_double(geom.gamma));
    kv("eta", io::format_double(geom.eta));
    kv("xi", io::format_double(geom.xi));
    kv("sigma_p", io::format_double(sigma_p));
    kv("sample_mean", io::format_double(rep.sample_mean));
    kv("sample_variance", io::format_double(rep.sample_variance));
    kv("analytic_mean", io::format_double(rep.analytic.mean));
    kv("analytic_variance", io::format_double(rep.analytic.variance));
    kv("z_mean", io::format_double(rep.z_mean));
    kv("z_variance", io::format_double(rep.z_variance));
    kv("checks", status);
    const fs::path summary_path = fs::path(args.out) / "ensemble_summary.txt";
    io::atomic_write_text(summary_path, summary);

    std::cout << "wrote " << hist_path.string() << "\n";
    std::cout << "wrote " << summary_path.string() << "\n";
    std::printf("sample mean %.6g (analytic %.6g), z = %.3f\n", rep.sample_mean,
                rep.analytic.mean, rep.z_mean);
    std::printf("sample variance %.6g (analytic %.6g), z = %.3f\n", rep.sample_variance,
                rep.analytic.variance, rep.z_variance);
    if (!rep.checks_evaluated) {
        std::cout << "agreement checks skipped (too few runs for meaningful statistics)\n";
        return 0;
    }
    std::printf("agreement checks %s (|z| <= 3)\n", status.c_str());
    return status == "passed" ? 0 : 1;
}

int run_plan(const FileArgs& args) {
    const auto cfg = io::KeyValueConfig::parse_file(args.path);
    const auto params = planner::apparatus_from_config(cfg);
    const double s_d = cfg.get_double_or("s_d", 0.0);
    const auto report = planner::plan(params, s_d);

    fs::create_directories(args.out);
    const fs::path csv_path = fs::path(args.out) / "plan.csv";
    io::write_csv(csv_path, planner::plan_csv_header(), {planner::plan_csv_row(report)});
    const fs::path txt_path = fs::path(args.out) / "plan.txt";
    const std::string text = planner::format_plan_report(params, report);
    io::atomic_write_text(txt_path, text);

    std::cout << text;
    std::cout << "wrote " << csv_path.string() << "\n";
    std::cout << "wrote " << txt_path.string() << "\n";
    return 0;
}

// Sweep spec: quantity = p1 | variance | p_plus; the keys sd, gamma, eta, xi
// become grid axes when written as comma lists or start:stop:step ranges;
// single values fix the parameter.  sigma_p is always a fixed scalar.
struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

std::vector<double> parse_axis_values(const std::string& key, const std::string& value,
                                      const std::string& source) {
    if (value.find(':') != std::string::npos) {
        const auto first = value.find(':');
        const auto second = value.find(':', first + 1);
        if (second == std::string::npos)
            throw ConfigError(source + ": key '" + key + "' range must be start:stop:step");
        const double start = io::parse_double_strict(value.substr(0, first), key);
        const double stop = io::parse_double_strict(value.substr(first + 1, second - first - 1), key);
        const double step = io::parse_double_strict(value.substr(second + 1), key);
        if (!(step > 0.0))
            throw ConfigError(source + ": key '" + key + "' range step must be positive");
        if ((stop - start) / step > 2e6)
            throw GridTooLarge(source + ": key '" + key + "' range has too many points");
        std::vector<double> out;
        for (double v = start; v <= stop + 0.5 * step; v += step)
            out.push_back(v);
        return out;
    }
    return parse_double_list(value, key);
}

int run_sweep(const FileArgs& args) {
    const auto cfg = io::KeyValueConfig::parse_file(args.path);
    cfg.require_known({"quantity", "sd", "gamma", "eta", "xi", "sigma_p"});
    const std::string quantity = cfg.get_string("quantity");
    if (quantity != "p1" && quantity != "variance" && quantity != "p_plus")
        throw ConfigError(cfg.source() + ": quantity must be p1, variance or p_plus");

    double fixed_sd = 0.2, fixed_gamma = pi / 2, fixed_eta = 0.0, fixed_xi = 0.1;
    const double sigma_p = cfg.get_double_or("sigma_p", 0.03);
    std::vector<SweepAxis> axes;
    for (const auto& entry : cfg.entries()) {
        if (entry.key == "quantity" || entry.key == "sigma_p")
            continue;
        const bool is_axis = entry.value.find(',') != std::string::npos ||
                             entry.value.find(':') != std::string::npos;
        if (is_axis) {
            auto values = parse_axis_values(entry.key, entry.value, cfg.source());
            if (values.empty())
                throw EmptyGrid(cfg.source() + ": axis '" + entry.key + "' has no points");
            axes.push_back({entry.key, std::move(values)});
        } else {
            const double v = cfg.get_double(entry.key);
            if (entry.key == "sd")
                fixed_sd = v;
            else if (entry.key == "gamma")
                fixed_gamma = v;
            else if (entry.key == "eta")
                fixed_eta = v;
            else
                fixed_xi = v;
        }
    }
    if (axes.empty())
        throw EmptyGrid(cfg.source() + ": sweep defines no grid axis "
                        "(write at least one of sd/gamma/eta/xi as a list or range)");
    double total = 1;
    for (const auto& axis : axes)
        total *= double(axis.values.size());
    if (total > 1e6)
        throw GridTooLarge(cfg.source() + ": grid has " + std::to_string(total) +
                           " points; the limit is 1e6");

    std::vector<std::string> header;
    for (const auto& axis : axes)
        header.push_back(axis.name);
    header.push_back(quantity);

    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(total));
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        double sd = fixed_sd, gamma = fixed_gamma, eta = fixed_eta, xi = fixed_xi;
        std::vector<double> row;
        row.reserve(axes.size() + 1);
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const double v = axes[a].values[idx[a]];
            row.push_back(v);
            if (axes[a].name == "sd")
                sd = v;
            else if (axes[a].name == "gamma")
                gamma = v;
            else if (axes[a].name == "eta")
                eta = v;
            else
                xi = v;
        }
        double value;
        if (quantity == "p_plus") {
            value = continuum::zaxis_success_probability(sd);
        } else {
            const MeasurementGeometry geom(gamma, eta, xi);
            value = quantity == "p1" ? continuum::p1_weak(sd, geom)
                                     : continuum::pointer_moments(sd, geom, sigma_p).variance;
        }
        row.push_back(value);
        rows.push_back(std::move(row));

        // row-major advance: last axis fastest
        std::size_t a = axes.size();
        while (a > 0) {
            --a;
            if (++idx[a] < axes[a].values.size())
                break;
            idx[a] = 0;
            if (a == 0)
                goto done;
        }
    }
done:
    fs::create_directories(args.out);
    const fs::path path = fs::path(args.out) / "sweep.csv";
    io::write_csv(path, header, rows);
    std::cout << "wrote " << path.string() << " (" << rows.size() << " points)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"protectosim: protective qubit measurements under spin-environment noise"};
    app.require_subcommand(1);

    FigureArgs fig_args;
    auto* fig = app.add_subcommand("figure", "emit a named figure dataset as CSV/SVG");
    fig->add_option("id", fig_args.id, "figure id: fig1, fig2, fig3 or fig4")->required();
    fig->add_option("--out", fig_args.out, "output directory");
    fig->add_option("--format", fig_args.format, "csv, svg or both")
        ->check(CLI::IsMember({"csv", "svg", "both"}));
    fig->add_option("--set", fig_args.sets, "override a figure parameter, key=value");

    ValidateArgs val_args;
    auto* val = app.add_subcommand(
        "validate", "compare the exact finite-environment engine against the continuum model");
    val->add_option("--n", val_args.n, "environment spin count");
    val->add_option("--sd", val_args.sd_csv, "comma list of spectral-density widths");
    val->add_option("--seed", val_args.seed, "RNG seed for coupling draws");
    val->add_option("--draws", val_args.draws, "coupling draws per width");
    val->add_option("--xi", val_args.xi, "measurement strength");
    val->add_option("--gamma", val_args.gamma, "measurement polar angle, rad");
    val->add_option("--eta", val_args.eta, "measurement azimuthal angle, rad");
    val->add_option("--sigma-p", val_args.sigma_p, "pointer packet width");
    val->add_option("--omega0-t", val_args.omega0_T, "dimensionless measurement duration");
    val->add_option("--tol", val_args.tol, "maximum tolerated |difference|");

    FileArgs ens_args;
    auto* ens = app.add_subcommand("ensemble", "run a Monte Carlo pointer-readout ensemble");
    ens->add_option("config", ens_args.path, "key=value config file")->required();
    ens->add_option("--out", ens_args.out, "output directory");

    FileArgs plan_args;
    auto* pln = app.add_subcommand("plan", "Stern-Gerlach experiment planner");
    pln->add_option("params", plan_args.path, "key=value parameter file")->required();
    pln->add_option("--out", plan_args.out, "output directory");

    FileArgs sweep_args;
    auto* swp = app.add_subcommand("sweep", "scan a scalar quantity over a parameter grid");
    swp->add_option("spec", sweep_args.path, "key=value sweep specification")->required();
    swp->add_option("--out", sweep_args.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fig->parsed())
            return run_figure(fig_args);
        if (val->parsed())
            return run_validate(val_args);
        if (ens->parsed())
            return run_ensemble(ens_args);
        if (pln->parsed())
            return run_plan(plan_args);
        if (swp->parsed())
            return run_sweep(sweep_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
