#include "conical/run.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace conical {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json manifest_stub(const RunConfig& cfg, const std::string& subcommand) {
    json m;
    m["tool"] = "conical";
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["config_hash"] = fnv1a_hex(cfg.raw_json);
    m["seed"] = cfg.seed;
    return m;
}

void write_manifest(const fs::path& dir, json m, double wall_ms,
                    const std::string& error = "") {
    m["wall_time_ms"] = wall_ms;
    if (!error.empty()) m["error"] = error;
    std::ofstream out(dir / "manifest.json");
    out << m.dump(2) << "\n";
}

void write_complex_binary(const fs::path& path, const std::vector<cplx>& values) {
    // Raw little-endian complex64: float32 (re, im) pairs.
    std::ofstream out(path, std::ios::binary);
    for (const auto& v : values) {
        const float re = float(v.real()), im = float(v.imag());
        out.write(reinterpret_cast<const char*>(&re), sizeof re);
        out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

void write_real_binary(const fs::path& path, const std::vector<double>& values) {
    std::ofstream out(path, std::ios::binary);
    for (double v : values) {
        const float f = float(v);
        out.write(reinterpret_cast<const char*>(&f), sizeof f);
    }
}

json axes_json(const std::vector<AxisSpec>& axes) {
    json out = json::array();
    for (const auto& a : axes) out.push_back({{"lo", a.lo}, {"hi", a.hi}, {"n", a.n}});
    return out;
}

std::vector<AxisSpec> axes_for_eps(const RunConfig& cfg, double eps) {
    if (cfg.auto_grid) return refine_axes_for_eps(cfg.axes, eps, cfg.xi_max);
    return cfg.axes;
}

double first_eps(const RunConfig& cfg) {
    if (cfg.eps_list.empty()) throw ConfigError("eps_list must not be empty for this subcommand");
    return cfg.eps_list.front();
}

// --- subcommands ---

void run_trajectory(const RunConfig& cfg, const fs::path& dir) {
    if (!cfg.trajectory) throw ConfigError("/trajectory: block required for this subcommand");
    const auto& tc = *cfg.trajectory;
    const auto& pot = *cfg.potential;

    FlowOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    const FlowResult res = flow_map(pot, tc.start, tc.t_final, opt);

    std::ofstream csv(dir / "trajectory.csv");
    csv << "t";
    for (std::size_t i = 0; i < pot.dim(); ++i) csv << ",x" << i;
    for (std::size_t i = 0; i < pot.dim(); ++i) csv << ",xi" << i;
    csv << ",g_norm,H\n";
    for (std::size_t s = 0; s < tc.samples; ++s) {
        const double t = tc.t_final * double(s) / double(tc.samples - 1);
        const PhasePoint p = res.trajectory.eval(t);
        csv << fmt(t);
        for (double v : p.x) csv << ',' << fmt(v);
        for (double v : p.xi) csv << ',' << fmt(v);
        csv << ',' << fmt(pot.g_norm(p.x)) << ',' << fmt(energy(pot, p)) << "\n";
    }

    json side;
    side["tau"] = res.trajectory.tau ? json(*res.trajectory.tau) : json();
    side["near_singular"] = res.trajectory.near_singular;
    side["min_g_norm"] = res.trajectory.min_g_norm;
    side["crossings"] = json::array();
    for (const auto& ev : res.trajectory.crossings) {
        json e;
        e["t_cross"] = ev.t_cross;
        e["x"] = ev.point.x;
        e["xi"] = ev.point.xi;
        e["omega0"] = ev.omega0;
        e["generic"] = ev.generic;
        side["crossings"].push_back(std::move(e));
    }
    std::ofstream sidecar(dir / "crossings.json");
    sidecar << side.dump(2) << "\n";
}

void run_evolve(const RunConfig& cfg, const fs::path& dir) {
    const double eps = first_eps(cfg);
    const auto axes = axes_for_eps(cfg, eps);
    const WavefunctionGrid psi0 = make_initial_state(cfg.initial, axes, eps);
    std::vector<double> snaps = cfg.time.snapshots;
    if (snaps.empty()) snaps = {cfg.time.t_final};
    const EvolveResult ev = evolve(*cfg.potential, psi0, cfg.time.t_final, cfg.time.dt, snaps);

    json m;
    m["eps"] = eps;
    m["axes"] = axes_json(axes);
    m["dtype"] = "complex64";
    m["times"] = ev.times;
    m["norm_drift"] = ev.norm_drift;
    m["energy_drift_rel"] = ev.energy_drift_rel;
    m["files"] = json::array();
    for (std::size_t i = 0; i < ev.snapshots.size(); ++i) {
        const std::string name = "psi_" + std::to_string(i) + ".bin";
        write_complex_binary(dir / name, ev.snapshots[i].values);
        m["files"].push_back(name);
    }
    std::ofstream out(dir / "snapshots.json");
    out << m.dump(2) << "\n";
}

void run_wigner(const RunConfig& cfg, const fs::path& dir) {
    // Reads the snapshot manifest written by `evolve` in the same out dir.
    const fs::path manifest_path = dir / "snapshots.json";
    std::ifstream in(manifest_path);
    if (!in)
        throw ConfigError("wigner needs the snapshots.json manifest produced by evolve in --out");
    json m = json::parse(in);

    std::vector<AxisSpec> axes;
    for (const auto& a : m["axes"])
        axes.push_back({a["lo"], a["hi"], a["n"]});
    const double eps = m["eps"];

    std::ofstream csv(dir / "pairings.csv");
    csv << "t,symbol,value\n";
    json wm;
    wm["eps"] = eps;
    wm["dtype"] = "float32";
    wm["fields"] = json::array();
    for (std::size_t i = 0; i < m["files"].size(); ++i) {
        WavefunctionGrid psi;
        psi.axes = axes;
        psi.eps = eps;
        psi.values.resize(psi.total());
        std::ifstream bin(dir / std::string(m["files"][i]), std::ios::binary);
        for (auto& v : psi.values) {
            float re = 0, im = 0;
            bin.read(reinterpret_cast<char*>(&re), sizeof re);
            bin.read(reinterpret_cast<char*>(&im), sizeof im);
            v = cplx(re, im);
        }
        const PhaseSpaceField w = wigner_transform(psi);
        const std::string name = "wigner_" + std::to_string(i) + ".bin";
        write_real_binary(dir / name, w.values);
        json f;
        f["file"] = name;
        f["t"] = double(m["times"][i]);
        f["x_axes"] = axes_json(w.x_axes);
        f["xi_axes"] = axes_json(w.xi_axes);
        wm["fields"].push_back(std::move(f));
        for (const auto& a : cfg.symbols)
            csv << fmt(double(m["times"][i])) << ',' << a.id << ',' << fmt(pair_symbol(a, w))
                << "\n";
    }
    std::ofstream out(dir / "wigner.json");
    out << wm.dump(2) << "\n";
}

int run_egorov(const RunConfig& cfg, const fs::path& dir) {
    if (cfg.symbols.empty()) throw ConfigError("/symbols: required for egorov-check");
    EgorovOptions opt;
    opt.axes = cfg.axes;
    opt.n_particles = cfg.egorov.n_particles;
    opt.dt = cfg.time.dt;
    opt.seed = cfg.seed;
    opt.threads = cfg.threads;
    opt.xi_max = cfg.auto_grid ? cfg.xi_max : 0.0;
    const EgorovResult res =
        egorov_gap(*cfg.potential, cfg.initial, cfg.symbols, cfg.egorov.t, cfg.eps_list, opt);

    std::ofstream csv(dir / "egorov.csv");
    csv << "eps,symbol,quantum,classical,gap\n";
    for (const auto& row : res.rows)
        for (std::size_t s = 0; s < cfg.symbols.size(); ++s)
            csv << fmt(row.eps) << ',' << cfg.symbols[s].id << ',' << fmt(row.quantum[s]) << ','
                << fmt(row.classical[s]) << ','
                << fmt(std::abs(row.quantum[s] - row.classical[s])) << "\n";

    bool pass = true;
    json checks = json::array();
    const auto& cr = cfg.egorov.criteria;
    if (cr.min_slope) {
        const bool ok = res.slope >= *cr.min_slope;
        checks.push_back({{"name", "min_slope"},
                          {"threshold", *cr.min_slope},
                          {"value", res.slope},
                          {"pass", ok}});
        pass = pass && ok;
    }
    if (cr.monotone && res.rows.size() >= 2) {
        bool ok = true;
        for (std::size_t i = 1; i < res.rows.size(); ++i) {
            const bool eps_dec = res.rows[i].eps < res.rows[i - 1].eps;
            const bool gap_dec = res.rows[i].gap < res.rows[i - 1].gap;
            ok = ok && (gap_dec == eps_dec);
        }
        checks.push_back({{"name", "monotone_decrease"}, {"pass", ok}});
        pass = pass && ok;
    }
    if (cr.final_ratio_max && res.rows.size() >= 2) {
        const double ratio = res.rows.back().gap / res.rows.front().gap;
        const bool ok = ratio <= *cr.final_ratio_max;
        checks.push_back({{"name", "final_ratio"},
                          {"threshold", *cr.final_ratio_max},
                          {"value", ratio},
                          {"pass", ok}});
        pass = pass && ok;
    }

    json summary;
    summary["slope"] = res.slope;
    summary["rows"] = json::array();
    for (const auto& row : res.rows)
        summary["rows"].push_back({{"eps", row.eps}, {"gap", row.gap}});
    summary["checks"] = checks;
    summary["pass"] = pass;
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << "\n";
    return pass ? kOk : kCheckFailed;
}

void run_two_microlocal(const RunConfig& cfg, const fs::path& dir) {
    if (!cfg.potential->g_field().is_canonical() || cfg.potential->codim() != 1 ||
        cfg.potential->dim() != 1)
        throw ConfigError(
            "/potential/g: two-microlocal diagnostics need the canonical coordinate family "
            "with d = 1, p = 1");
    std::ofstream csv(dir / "two_microlocal.csv");
    csv << "eps,R,delta,inner,outer,bulk\n";
    for (double eps : cfg.eps_list) {
        const auto axes = axes_for_eps(cfg, eps);
        const WavefunctionGrid psi = make_initial_state(cfg.initial, axes, eps);
        for (double R : cfg.diagnostics.R_list)
            for (double delta : cfg.diagnostics.delta_list) {
                if (R * eps >= delta / 2.0) continue;  // outside the scale ordering
                const SplitObservable s =
                    split_observable(cfg.diagnostics.probe, psi, R, delta);
                csv << fmt(eps) << ',' << fmt(R) << ',' << fmt(delta) << ',' << fmt(s.inner)
                    << ',' << fmt(s.outer) << ',' << fmt(s.bulk) << "\n";
            }
    }
}

}  // namespace

int run_subcommand(const RunConfig& cfg, const std::string& subcommand) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = cfg.out_dir;
    fs::create_directories(dir);
    json m = manifest_stub(cfg, subcommand);

    auto elapsed = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    try {
        int code = kOk;
        if (subcommand == "trajectory") {
            run_trajectory(cfg, dir);
        } else if (subcommand == "evolve") {
            run_evolve(cfg, dir);
        } else if (subcommand == "wigner") {
            run_wigner(cfg, dir);
        } else if (subcommand == "egorov-check") {
            code = run_egorov(cfg, dir);
        } else if (subcommand == "two-microlocal") {
            run_two_microlocal(cfg, dir);
        } else {
            throw ConfigError("unknown subcommand: " + subcommand);
        }
        write_manifest(dir, std::move(m), elapsed());
        return code;
    } catch (const ConfigError& e) {
        write_manifest(dir, std::move(m), elapsed(), e.what());
        return kConfigError;
    } catch (const NumericalError& e) {
        write_manifest(dir, std::move(m), elapsed(), e.what());
        return kNumericalError;
    }
}

}  // namespace conical
