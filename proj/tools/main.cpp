#include "modscat/experiment.hpp"
#include "modscat/io.hpp"
#include "modscat/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace modscat;

namespace {

const char* kRunScript = R"(set datafile separator ','
set key autotitle columnhead
set logscale xy
set xlabel 't'
set multiplot layout 1,2
plot '%D/results/timeseries.csv' using 1:5 with linespoints title '|u|_inf'
plot '%D/results/bootstrap.csv' using 1:2 with linespoints title 'H^1', '' using 1:3 with linespoints, '' using 1:4 with linespoints
unset multiplot
pause -1
)";

const char* kExpandScript = R"(set datafile separator ','
set key autotitle columnhead
set multiplot layout 1,2
set xlabel 'xi'
plot '%D/results/coeff_w10.csv' using 1:2 with lines title 'Re w10', '' using 1:3 with lines title 'Im w10', \
     '%D/results/coeff_w11.csv' using 1:2 with lines title 'Re w11', '' using 1:3 with lines title 'Im w11'
set logscale xy
set xlabel 't'
plot '%D/results/remainder.csv' using 1:2 with linespoints, '' using 1:3 with linespoints
unset multiplot
pause -1
)";

const char* kOracleScript = R"(set datafile separator ','
set key autotitle columnhead
set logscale xy
set xlabel 't'
plot '%D' using 1:(abs($5)) with points title 'order 0 residual', '' using 1:(abs($6)) with points title 'order 1 residual'
pause -1
)";

std::string fill(std::string s, const std::string& dir) {
    for (std::size_t p; (p = s.find("%D")) != std::string::npos;) s.replace(p, 2, dir);
    return s;
}

int exit_code(const Error& e) { return e.code() == Errc::config ? 2 : 3; }

int cmd_simulate(const std::string& config, const std::string& out, bool reuse, bool gnuplot) {
    ExperimentConfig cfg = load_experiment(config);
    fs::path root = out.empty() ? runs_root() : fs::path(out);
    RunOutput r = simulate(cfg, root, reuse);
    if (gnuplot) {
        std::cout << fill(kRunScript, r.dir.string());
        return 0;
    }
    std::cout << r.dir.string() << (r.from_cache ? " (cached)" : "") << "\n";
    for (const auto& s : r.trajectory.snaps)
        if (s.alias.x_fraction > cfg.solver.alias_threshold || s.alias.xi_fraction > cfg.solver.alias_threshold) {
            std::cerr << "warning: aliasing monitor above threshold at t=" << s.t << "\n";
            break;
        }
    return 0;
}

int cmd_oracle(const std::string& config, const std::string& out, bool gnuplot) {
    ExperimentConfig cfg = load_experiment(config);
    if (gnuplot) {
        std::cout << fill(kOracleScript, out.empty() ? "oracle.csv" : out);
        return 0;
    }
    std::vector<RVec> rows;
    for (const auto& r : run_oracle(cfg.oracle))
        rows.push_back({r.t, r.xi, r.value.real(), r.value.imag(), r.residual0, r.residual1});
    const std::vector<std::string> header{"t", "xi", "re", "im", "residual_order0", "residual_order1"};
    if (!out.empty()) {
        write_csv(out, header, rows);
        return 0;
    }
    std::cout << "t,xi,re,im,residual_order0,residual_order1\n";
    for (const auto& r : rows)
        std::cout << fmt17(r[0]) << ',' << fmt17(r[1]) << ',' << fmt17(r[2]) << ',' << fmt17(r[3]) << ','
                  << fmt17(r[4]) << ',' << fmt17(r[5]) << '\n';
    return 0;
}

int cmd_expand(const std::string& target, const std::string& config, const std::string& out, bool gnuplot) {
    fs::path dir;
    ExperimentConfig cfg;
    Trajectory tr;
    if (!target.empty()) {
        dir = target;
        cfg = load_experiment(dir / "config.ini");
        tr = load_trajectory(cfg, dir);
    } else if (!config.empty()) {
        cfg = load_experiment(config);
        RunOutput r = simulate(cfg, runs_root(), true);
        dir = r.dir;
        tr = std::move(r.trajectory);
    } else {
        throw Error(Errc::config, "expand: give a run directory or --config");
    }
    fs::path dest = out.empty() ? dir : fs::path(out);
    if (gnuplot) {
        std::cout << fill(kExpandScript, dest.string());
        return 0;
    }
    ExpansionOutput e = expand(cfg, tr);
    emit_expansion(e, cfg, dest);
    std::cout << (dest / "expansion.json").string() << "\n"
              << "remainder slopes: order0 " << e.rate0.exponent << ", order1 " << e.rate1.exponent << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, const std::string& presets, const std::string& out, unsigned threads,
               const std::string& fixture, bool quiet) {
    VerifyOptions opt;
    opt.presets_dir = presets.empty() ? default_presets_dir() : fs::path(presets);
    opt.runs_root = out.empty() ? runs_root() : fs::path(out);
    opt.threads = threads;
    if (!fixture.empty()) {
        if (fixture != "flip-w11") throw Error(Errc::config, "unknown fixture '" + fixture + "'");
        opt.flip_w11_sign = true;
    }
    if (!quiet) opt.log = &std::cerr;
    auto rows = run_suite(suite, opt);
    std::cout << format_table(rows);
    bool ok = !rows.empty();
    for (const auto& r : rows) ok = ok && r.pass;
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modified scattering lab for 1D NLS with power nonlinearities"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(build_id()));

    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string config, out, suite = "all", presets, fixture, target;
    bool gnuplot = false, fresh = false, quiet = false;

    auto* sim = app.add_subcommand("simulate", "integrate a configured run into <root>/<hash>");
    sim->add_option("--config", config, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "run-directory root (default: $MODSCAT_RUNS_DIR or ./runs)");
    sim->add_flag("--fresh", fresh, "ignore a cached run directory");
    sim->add_flag("--gnuplot-script", gnuplot, "print a gnuplot script for the run's CSV files");

    auto* orc = app.add_subcommand("oracle", "direct vs stationary-phase evaluation of the cubic term");
    orc->add_option("--config", config, "experiment config with an [oracle] section")->required()->check(CLI::ExistingFile);
    orc->add_option("--out", out, "CSV path (default: stdout)");
    orc->add_flag("--gnuplot-script", gnuplot, "print a gnuplot script for the CSV");

    auto* exp = app.add_subcommand("expand", "extract scattering data and order-1 coefficients");
    exp->add_option("run_dir", target, "finished run directory");
    exp->add_option("--config", config, "config to run (or reuse) instead of a run directory");
    exp->add_option("--out", out, "output directory (default: the run directory)");
    exp->add_flag("--gnuplot-script", gnuplot, "print a gnuplot script for the coefficient CSVs");

    auto* ver = app.add_subcommand("verify", "run acceptance suites and print a pass/fail table");
    std::vector<std::string> choices = suite_names();
    choices.push_back("all");
    ver->add_option("--suite", suite, "suite name or 'all'")->check(CLI::IsMember(choices));
    ver->add_option("--presets", presets, "preset directory");
    ver->add_option("--out", out, "run-directory root");
    ver->add_option("--threads", threads, "worker pool size for independent runs")->check(CLI::PositiveNumber);
    ver->add_flag("--quiet", quiet, "no progress log on stderr");
    ver->add_option("--fixture", fixture)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sim) return cmd_simulate(config, out, !fresh, gnuplot);
        if (*orc) return cmd_oracle(config, out, gnuplot);
        if (*exp) return cmd_expand(target, config, out, gnuplot);
        if (*ver) return cmd_verify(suite, presets, out, threads, fixture, quiet);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
