#include "modscat/experiment.hpp"
#include "modscat/config.hpp"
#include "modscat/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#ifndef MODSCAT_BUILD_ID
#define MODSCAT_BUILD_ID "unknown"
#endif

namespace modscat {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const char* build_id() { return MODSCAT_BUILD_ID; }

GridSpec ExperimentConfig::grid() const {
    return GridSpec(n, half_width > 0.0 ? half_width : 20.0 * width);
}

namespace {

std::string join(const RVec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt17(v[i]);
    return s;
}

std::string b(bool v) { return v ? "true" : "false"; }

} // namespace

std::vector<std::pair<std::string, std::string>> ExperimentConfig::canonical() const {
    GridSpec g = grid();
    return {
        {"nonlinearity.lambdas", join(nl.lambdas)},
        {"initial.family", family},
        {"initial.amplitude", fmt17(amplitude)},
        {"initial.width", fmt17(width)},
        {"initial.table", table},
        {"grid.n", std::to_string(g.n)},
        {"grid.half_width", fmt17(g.L)},
        {"time.T", fmt17(solver.T)},
        {"time.dt_base", fmt17(solver.dt_base)},
        {"time.ratio", fmt17(solver.ratio)},
        {"time.checkpoints", join(solver.checkpoints)},
        {"time.richardson", b(solver.richardson_check)},
        {"monitor.alias_threshold", fmt17(solver.alias_threshold)},
        {"expansion.order", std::to_string(order)},
        {"expansion.extraction_window", fmt17(extraction.window_fraction)},
        {"expansion.fit_window", fmt17(fit.window_fraction)},
        {"expansion.nuisance", b(fit.nuisance)},
        {"expansion.three_basis", b(fit.three_basis)},
        {"oracle.n", std::to_string(oracle.n)},
        {"oracle.half_width", fmt17(oracle.half_width)},
        {"oracle.amplitude", fmt17(oracle.amplitude)},
        {"oracle.decay", fmt17(oracle.decay)},
        {"oracle.t_list", join(oracle.t_list)},
        {"oracle.xi_samples", join(oracle.xi_samples)},
        {"oracle.doubling_t_max", fmt17(oracle.doubling_t_max)},
    };
}

std::string ExperimentConfig::hash() const {
    // FNV-1a, 64 bit, over the entries that change the trajectory.
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& [k, v] : canonical()) {
        if (k.rfind("expansion.", 0) == 0 || k.rfind("oracle.", 0) == 0) continue;
        for (char c : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_experiment(const std::string& text, const std::string& source) {
    ConfigFile cf = ConfigFile::parse(text, source);
    ExperimentConfig c;
    c.source = source;

    RVec lam = cf.get_list("nonlinearity", "lambdas", {0.0});
    if (lam.size() > 4) cf.fail("nonlinearity", "lambdas", "at most 4 coefficients (d <= 4)");
    c.nl.lambdas = lam;

    c.family = cf.get_string("initial", "family", c.family);
    if (c.family != "gaussian" && c.family != "tabulated")
        cf.fail("initial", "family", "expected gaussian or tabulated");
    c.amplitude = cf.get_double("initial", "amplitude", c.amplitude);
    if (c.amplitude < 0.0 || c.amplitude > 0.5) cf.fail("initial", "amplitude", "must be in [0, 0.5]");
    c.width = cf.get_double("initial", "width", c.width);
    if (!(c.width > 0.0)) cf.fail("initial", "width", "must be positive");
    c.table = cf.get_string("initial", "table", "");
    if (c.family == "tabulated" && c.table.empty()) cf.fail("initial", "table", "tabulated data needs a table path");
    if (!c.table.empty() && fs::path(c.table).is_relative())
        c.table = (fs::path(source).parent_path() / c.table).string();

    long long n = cf.get_int("grid", "n", static_cast<long long>(c.n));
    if (n < 16 || (n & (n - 1)) != 0) cf.fail("grid", "n", "must be a power of two >= 16");
    c.n = static_cast<std::size_t>(n);
    c.half_width = cf.get_double("grid", "half_width", 0.0);
    if (c.half_width < 0.0) cf.fail("grid", "half_width", "must be positive");
    GridSpec g = c.grid();
    if (c.family == "gaussian" && c.width < 8.0 * g.dx())
        cf.fail("initial", "width", "under-resolved: need width >= 8 dx = " + fmt17(8.0 * g.dx()));

    c.solver.T = cf.get_double("time", "T", 100.0);
    if (!(c.solver.T >= 1.0)) cf.fail("time", "T", "must be >= 1");
    c.solver.dt_base = cf.get_double("time", "dt_base", c.solver.dt_base);
    if (!(c.solver.dt_base > 0.0) || c.solver.dt_base > 0.01) cf.fail("time", "dt_base", "must be in (0, 0.01]");
    c.solver.ratio = cf.get_double("time", "ratio", c.solver.ratio);
    if (!(c.solver.ratio > 1.0)) cf.fail("time", "ratio", "must exceed 1");
    c.solver.checkpoints = cf.get_list("time", "checkpoints", {});
    c.solver.richardson_check = cf.get_bool("time", "richardson", false);
    c.solver.alias_threshold = cf.get_double("monitor", "alias_threshold", c.solver.alias_threshold);

    c.order = static_cast<int>(cf.get_int("expansion", "order", 1));
    if (c.order < 0 || c.order > 1) cf.fail("expansion", "order", "must be 0 or 1");
    c.extraction.window_fraction = cf.get_double("expansion", "extraction_window", 0.1);
    c.fit.window_fraction = cf.get_double("expansion", "fit_window", 0.1);
    for (const char* k : {"extraction_window", "fit_window"}) {
        double v = k[0] == 'e' ? c.extraction.window_fraction : c.fit.window_fraction;
        if (!(v > 0.0 && v < 1.0)) cf.fail("expansion", k, "must be in (0, 1)");
    }
    c.fit.nuisance = cf.get_bool("expansion", "nuisance", true);
    c.fit.three_basis = cf.get_bool("expansion", "three_basis", false);

    long long on = cf.get_int("oracle", "n", static_cast<long long>(c.oracle.n));
    if (on < 16 || (on & (on - 1)) != 0) cf.fail("oracle", "n", "must be a power of two >= 16");
    c.oracle.n = static_cast<std::size_t>(on);
    c.oracle.half_width = cf.get_double("oracle", "half_width", c.oracle.half_width);
    if (!(c.oracle.half_width > 0.0)) cf.fail("oracle", "half_width", "must be positive");
    c.oracle.amplitude = cf.get_double("oracle", "amplitude", c.oracle.amplitude);
    c.oracle.decay = cf.get_double("oracle", "decay", c.oracle.decay);
    if (!(c.oracle.decay > 0.0)) cf.fail("oracle", "decay", "must be positive");
    c.oracle.t_list = cf.get_list("oracle", "t_list", c.oracle.t_list);
    for (double t : c.oracle.t_list)
        if (!(t >= 1.0)) cf.fail("oracle", "t_list", "times must be >= 1");
    c.oracle.xi_samples = cf.get_list("oracle", "xi_samples", c.oracle.xi_samples);
    c.oracle.doubling_t_max = cf.get_double("oracle", "doubling_t_max", c.oracle.doubling_t_max);

    cf.reject_unused();
    return c;
}

ExperimentConfig load_experiment(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config, path.string() + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment(ss.str(), path.string());
}

fs::path runs_root() {
    const char* env = std::getenv("MODSCAT_RUNS_DIR");
    return env && *env ? fs::path(env) : fs::path("runs");
}

fs::path run_dir(const ExperimentConfig& cfg, const fs::path& root) { return root / cfg.hash(); }

namespace {

SpatialField read_table(const std::string& path, const GridSpec& g) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config, path + ": cannot open initial-data table");
    SpatialField f(g);
    std::string line;
    std::size_t j = 0;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, re, im;
        if (!(ls >> x >> re >> im))
            throw Error(Errc::config, path + ":" + std::to_string(ln) + ": expected x, re, im");
        if (j >= g.n) throw Error(Errc::config, path + ": more rows than grid nodes");
        if (std::abs(x - g.x(j)) > 1e-9 * std::max(1.0, g.L))
            throw Error(Errc::config, path + ":" + std::to_string(ln) + ": x does not match grid node " +
                                          std::to_string(j));
        f.values[j++] = cplx(re, im);
    }
    if (j != g.n) throw Error(Errc::config, path + ": table has " + std::to_string(j) + " rows, grid has " +
                                                std::to_string(g.n));
    return f;
}

ordered_json config_json(const ExperimentConfig& cfg) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : cfg.canonical()) j[k] = v;
    return j;
}

std::vector<fs::path> snapshot_files(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".bin") out.push_back(e.path());
    return out;
}

} // namespace

SimulationState initial_state(const ExperimentConfig& cfg, InitialNorms* norms) {
    GridSpec g = cfg.grid();
    if (cfg.family == "tabulated") return initial_data_tabulated(read_table(cfg.table, g), norms);
    return initial_data_gaussian(cfg.amplitude, cfg.width, g, norms);
}

Trajectory load_trajectory(const ExperimentConfig& cfg, const fs::path& dir) {
    std::vector<fs::path> files = snapshot_files(dir / "snapshots");
    std::vector<std::pair<double, SimulationState>> states;
    for (const auto& p : files) {
        SimulationState s = state_of(read_snapshot(p));
        states.emplace_back(s.t, std::move(s));
    }
    std::sort(states.begin(), states.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    auto times = output_times(cfg.solver);
    if (states.size() != times.size())
        throw Error(Errc::io, dir.string() + ": expected " + std::to_string(times.size()) + " snapshots, found " +
                                  std::to_string(states.size()));
    Trajectory tr;
    tr.grid = cfg.grid();
    tr.nl = cfg.nl;
    tr.cfg = cfg.solver;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (std::abs(states[i].first - times[i]) > 1e-12 * times[i])
            throw Error(Errc::io, dir.string() + ": snapshot times do not match the configuration");
        if (!(states[i].second.u.grid == tr.grid)) throw Error(Errc::io, dir.string() + ": grid mismatch");
        tr.snaps.push_back(make_snapshot(states[i].second, cfg.nl));
        const auto& a = tr.snaps.back().alias;
        if (a.x_fraction > cfg.solver.alias_threshold || a.xi_fraction > cfg.solver.alias_threshold)
            tr.alias_flag = true;
    }
    return tr;
}

Trajectory resume(const ExperimentConfig& cfg, const fs::path& snapshot, const SnapshotSink& sink) {
    SnapshotRecord rec = read_snapshot(snapshot);
    if (rec.lambdas != cfg.nl.lambdas) throw Error(Errc::invalid_argument, "resume: nonlinearity mismatch");
    SimulationState s = state_of(rec);
    if (!(s.u.grid == cfg.grid())) throw Error(Errc::invalid_argument, "resume: grid mismatch");
    return run(s, cfg.solver, cfg.nl, sink);
}

RunOutput simulate(const ExperimentConfig& cfg, const fs::path& root, bool reuse) {
    RunOutput out;
    out.dir = run_dir(cfg, root);
    const fs::path summary = out.dir / "summary.json";
    if (reuse && fs::exists(summary)) {
        try {
            out.trajectory = load_trajectory(cfg, out.dir);
            out.from_cache = true;
            return out;
        } catch (const Error&) {
            // Incomplete or stale directory: fall through and recompute.
        }
    }
    std::error_code ec;
    fs::remove_all(out.dir, ec);
    fs::create_directories(out.dir / "snapshots");
    fs::create_directories(out.dir / "results");

    auto wall0 = std::chrono::steady_clock::now();
    InitialNorms norms;
    SimulationState s0 = initial_state(cfg, &norms);
    Trajectory tr = run(s0, cfg.solver, cfg.nl, [&](const Snapshot& sn) {
        SimulationState st{sn.t, sn.u, sn.chi, sn.step_count};
        write_snapshot(record_of(st, cfg.nl), out.dir / "snapshots" / snapshot_filename(sn.t));
    });
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    std::vector<RVec> series, boot;
    RVec alphas = default_alphas(1, cfg.nl.degree());
    for (const auto& sn : tr.snaps) {
        series.push_back({sn.t, static_cast<double>(sn.step_count), sn.conserved.mass, sn.conserved.energy,
                          sup_norm(sn.u.values), std::sqrt(sn.t) * sup_norm(sn.u.values), sn.alias.x_fraction,
                          sn.alias.xi_fraction});
        BootstrapReport br = bootstrap_report(sn, alphas);
        RVec row{br.t, br.h1_norm};
        row.insert(row.end(), br.weighted_scaled.begin(), br.weighted_scaled.end());
        row.insert(row.end(), br.w_sup.begin(), br.w_sup.end());
        row.push_back(br.decay);
        boot.push_back(row);
    }
    write_csv(out.dir / "results" / "timeseries.csv",
              {"t", "steps", "mass", "energy", "sup_u", "decay", "alias_x", "alias_xi"}, series);
    write_csv(out.dir / "results" / "bootstrap.csv",
              {"t", "h1", "wx0", "wx1", "wx2", "wx3", "wsup0", "wsup1", "wsup2", "decay"}, boot);

    const auto& first = tr.snaps.front();
    const auto& last = tr.snaps.back();
    double sup_decay = 0.0;
    for (const auto& sn : tr.snaps) sup_decay = std::max(sup_decay, std::sqrt(sn.t) * sup_norm(sn.u.values));
    ordered_json j;
    j["build_id"] = build_id();
    j["config_hash"] = cfg.hash();
    j["config"] = config_json(cfg);
    j["snapshots"] = tr.snaps.size();
    j["t_final"] = last.t;
    j["step_count"] = last.step_count;
    j["initial_u1_h10"] = norms.u1_h10;
    j["initial_f1_h03"] = norms.f1_h03;
    j["mass_drift_rel"] = first.conserved.mass > 0 ? std::abs(last.conserved.mass / first.conserved.mass - 1.0) : 0.0;
    j["energy_drift_rel"] =
        first.conserved.energy != 0 ? std::abs(last.conserved.energy / first.conserved.energy - 1.0) : 0.0;
    j["sup_decay"] = sup_decay;
    j["alias_flag"] = tr.alias_flag;
    if (cfg.solver.richardson_check) j["richardson_ratio"] = tr.richardson_ratio;
    write_text(out.dir / "config.ini", [&] {
        std::string s;
        for (const auto& [k, v] : cfg.canonical()) s += k + " = " + v + "\n";
        return s;
    }());
    write_text(summary, j.dump(2) + "\n");

    // Timestamps live outside the data files so reruns stay byte-identical.
    ordered_json meta;
    meta["finished_unix"] = static_cast<long long>(std::time(nullptr));
    meta["wall_seconds"] = wall;
    write_text(out.dir / "metadata.json", meta.dump(2) + "\n");

    out.trajectory = std::move(tr);
    return out;
}

ExpansionOutput expand(const ExperimentConfig& cfg, const Trajectory& tr, const AppendixOptions& aopt) {
    ExpansionOutput e;
    e.sd = extract_scattering_data(tr, cfg.extraction);
    if (e.sd.unconverged) throw Error(Errc::unconverged, "expand: scattering data flagged unconverged");
    e.coeffs = appendix_coeffs(e.sd, cfg.nl.lambda(1), cfg.nl.lambda(2), aopt);
    e.fit = fit_order1(tr, e.sd, cfg.fit);
    const double T = tr.snaps.back().t;
    const double t_lo = std::max(100.0, T / 10.0);
    for (const auto& sn : tr.snaps) {
        if (sn.t < t_lo * (1.0 - 1e-12)) continue;
        MaskedField a0 = u_asymptotic(e.sd, nullptr, sn.t, tr.grid, 0);
        MaskedField a1 = u_asymptotic(e.sd, &e.coeffs, sn.t, tr.grid, 1);
        e.t.push_back(sn.t);
        e.err_order0.push_back(masked_sup_diff(sn.u.values, a0.field.values, a0.mask));
        e.err_order1.push_back(masked_sup_diff(sn.u.values, a1.field.values, a1.mask));
    }
    if (e.t.size() >= 2) {
        e.rate0 = fit_rate(e.t, e.err_order0);
        e.rate1 = fit_rate(e.t, e.err_order1);
    }
    return e;
}

namespace {
ordered_json rate_json(const RateFit& r) {
    return {{"exponent", r.exponent}, {"prefactor", r.prefactor}, {"r_squared", r.r_squared},
            {"t_min", r.t_min}, {"t_max", r.t_max}, {"points", r.points}};
}
} // namespace

void emit_expansion(const ExpansionOutput& e, const ExperimentConfig& cfg, const fs::path& dir) {
    const fs::path res = dir / "results";
    write_field_csv(res / "coeff_w00.csv", e.sd.w00);
    std::vector<RVec> np;
    for (std::size_t k = 0; k < e.sd.w00.grid.n; ++k) np.push_back({e.sd.w00.grid.xi(k), e.sd.nu[k], e.sd.phi[k]});
    write_csv(res / "coeff_nu_phi.csv", {"xi", "nu", "phi"}, np);
    const std::pair<const char*, const SpectralField*> fields[] = {
        {"w10", &e.coeffs.w10}, {"w11", &e.coeffs.w11}, {"w12", &e.coeffs.w12}, {"f10", &e.coeffs.f10},
        {"f11", &e.coeffs.f11}, {"f12", &e.coeffs.f12}, {"u10", &e.coeffs.u10}, {"u11", &e.coeffs.u11},
        {"u12", &e.coeffs.u12}, {"w10_emp", &e.fit.w10_emp}, {"w11_emp", &e.fit.w11_emp}};
    for (const auto& [name, f] : fields) write_field_csv(res / (std::string("coeff_") + name + ".csv"), *f);
    write_field_csv(res / "coeff_F10.csv", SpectralField(e.sd.w00.grid, e.coeffs.F10));
    std::vector<RVec> rem;
    for (std::size_t i = 0; i < e.t.size(); ++i) rem.push_back({e.t[i], e.err_order0[i], e.err_order1[i]});
    write_csv(res / "remainder.csv", {"t", "err_order0", "err_order1"}, rem);

    auto mask = interior_window(e.sd.w00);
    ordered_json j;
    j["build_id"] = build_id();
    j["config_hash"] = cfg.hash();
    j["config"] = config_json(cfg);
    j["extraction_error"] = e.sd.extraction_error;
    j["phi_error"] = e.sd.phi_error;
    j["w00_fit_condition"] = e.sd.fit_condition;
    j["fit_condition"] = e.fit.condition;
    j["fit_samples"] = e.fit.samples;
    j["fit_residual_rate"] = rate_json(e.fit.residual_rate);
    j["w10_rel_distance"] = relative_sup_distance(e.fit.w10_emp.values, e.coeffs.w10.values, mask);
    j["w11_rel_distance"] = relative_sup_distance(e.fit.w11_emp.values, e.coeffs.w11.values, mask);
    if (e.t.size() >= 2) {
        j["remainder_order0"] = rate_json(e.rate0);
        j["remainder_order1"] = rate_json(e.rate1);
    }
    write_text(dir / "expansion.json", j.dump(2) + "\n");
}

SpectralField oracle_profile(const OracleConfig& oc) {
    GridSpec g(oc.n, oc.half_width);
    SpectralField f(g);
    for (std::size_t k = 0; k < g.n; ++k) {
        double xi = g.xi(k);
        f.values[k] = oc.amplitude * std::exp(-oc.decay * xi * xi);
    }
    return f;
}

std::vector<OracleRow> run_oracle(const OracleConfig& oc) {
    SpectralField f = oracle_profile(oc);
    SpectralField p0 = stationary_coeff(f, 1, 0);
    SpectralField p1 = stationary_coeff(f, 1, 1);
    std::vector<OracleRow> rows;
    for (double t : oc.t_list) {
        OracleResult d = direct_p1({f, t, 1, oc.xi_samples});
        for (std::size_t i = 0; i < d.xi.size(); ++i) {
            auto k = static_cast<std::size_t>(std::lround(d.xi[i] / f.grid.dxi()) + static_cast<long>(f.grid.n / 2));
            cplx r0 = d.value[i] - p0.values[k] / t;
            cplx r1 = r0 - p1.values[k] / (t * t);
            rows.push_back({t, d.xi[i], d.value[i], std::abs(r0), std::abs(r1)});
        }
    }
    return rows;
}

} // namespace modscat
