#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conical/run.hpp"

using namespace conical;
namespace fs = std::filesystem;

namespace {

std::string minimal_abs_config(const std::string& out_dir, const std::string& extra = "") {
    std::ostringstream os;
    os << R"({
      "potential": {
        "dim": 1, "codim": 1,
        "w": {"kind": "const", "c": 1.0},
        "V0": {"kind": "const", "c": 0.0},
        "g": "coordinates",
        "box": [[-2.0, 2.0]]
      },
      "grid": {"n": 256, "pad_fraction": 0.3, "xi_max": 2.0},
      "initial": {"kind": "coherent", "q": [-1.0], "p": [1.0]},
      "time": {"t_final": 0.2, "snapshots": [0.2]},
      "eps_list": [0.03125],
      "trajectory": {"x": [-1.0], "xi": [1.0], "t_final": 2.0, "samples": 101},
      "seed": 7,
      "out_dir": ")"
       << out_dir << "\"" << extra << "\n}";
    return os.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("load_config minimal valid") {
    auto cfg = parse_config_json(minimal_abs_config("/tmp/conical_test_cfg"));
    CHECK(cfg.potential->dim() == 1);
    CHECK(cfg.eps_list.size() == 1);
    CHECK(cfg.axes[0].n == 256);
    // Padded by 30%.
    CHECK(cfg.axes[0].lo == doctest::Approx(-2.6));
    CHECK(cfg.axes[0].hi == doctest::Approx(2.6));
}

TEST_CASE("load_config reports all violations with paths") {
    // Missing potential block entirely.
    try {
        parse_config_json(R"({"initial": {"kind": "coherent", "q": [0.0], "p": [0.0]}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        bool has_potential_path = false;
        for (const auto& v : e.violations)
            if (v.find("/potential") != std::string::npos) has_potential_path = true;
        CHECK(has_potential_path);
    }

    // Resolution rule violation names the rule and is collected alongside
    // other violations.
    const std::string bad = R"({
      "potential": {"dim": 1, "codim": 1,
        "w": {"kind": "const", "c": 1.0}, "V0": {"kind": "const", "c": 0.0},
        "g": "coordinates", "box": [[-2.0, 2.0]]},
      "grid": {"n": 64, "xi_max": 3.0},
      "initial": {"kind": "coherent", "q": [-1.0], "p": [1.0]},
      "eps_list": [0.001],
      "trajectory": {"x": [-1.0], "xi": [0.5, 0.5], "t_final": 1.0}
    })";
    try {
        parse_config_json(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        bool resolution = false, coherent = false, traj = false;
        for (const auto& v : e.violations) {
            if (v.find("grid resolution rule") != std::string::npos) resolution = true;
            if (v.find("coherent width rule") != std::string::npos) coherent = true;
            if (v.find("/trajectory/xi") != std::string::npos) traj = true;
        }
        CHECK(resolution);
        CHECK(coherent);
        CHECK(traj);
    }
}

TEST_CASE("trajectory subcommand artifacts and determinism") {
    const fs::path dir_a = "/tmp/conical_run_a", dir_b = "/tmp/conical_run_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    auto cfg_a = parse_config_json(minimal_abs_config(dir_a.string()));
    auto cfg_b = parse_config_json(minimal_abs_config(dir_b.string()));
    CHECK(run_subcommand(cfg_a, "trajectory") == kOk);
    CHECK(run_subcommand(cfg_b, "trajectory") == kOk);

    const std::string csv_a = slurp(dir_a / "trajectory.csv");
    CHECK(csv_a == slurp(dir_b / "trajectory.csv"));
    CHECK(!csv_a.empty());

    // Sidecar records the crossing near sqrt(3) - 1.
    const std::string side = slurp(dir_a / "crossings.json");
    CHECK(side.find("0.73205080756") != std::string::npos);
    CHECK(side.find("\"generic\": true") != std::string::npos);
}

TEST_CASE("evolve then wigner pipeline") {
    const fs::path dir = "/tmp/conical_run_ev";
    fs::remove_all(dir);
    auto cfg = parse_config_json(minimal_abs_config(
        dir.string(),
        R"(, "symbols": {"centers": [{"q": [-0.8], "p": [1.0]}], "width": 0.25})"));
    CHECK(run_subcommand(cfg, "evolve") == kOk);
    CHECK(fs::exists(dir / "snapshots.json"));
    CHECK(fs::exists(dir / "psi_0.bin"));

    CHECK(run_subcommand(cfg, "wigner") == kOk);
    CHECK(fs::exists(dir / "wigner_0.bin"));
    const std::string pair_csv = slurp(dir / "pairings.csv");
    CHECK(pair_csv.find("gauss_0") != std::string::npos);
}

TEST_CASE("egorov summary carries a slope field") {
    const fs::path dir = "/tmp/conical_run_eg";
    fs::remove_all(dir);
    // Free particle, two eps values, tiny run.
    const std::string cfg_text = R"({
      "potential": {"dim": 1, "codim": 1,
        "w": {"kind": "const", "c": 0.0}, "V0": {"kind": "const", "c": 0.0},
        "g": "coordinates", "box": [[-3.0, 3.0]], "expects_crossings": false},
      "grid": {"n": 256, "xi_max": 2.0},
      "initial": {"kind": "coherent", "q": [-1.0], "p": [1.0]},
      "eps_list": [0.0625, 0.03125],
      "symbols": {"centers": [{"q": [-0.8], "p": [1.0]}], "width": 0.3},
      "egorov": {"t": 0.2, "n_particles": 4000},
      "seed": 5,
      "out_dir": ")" + dir.string() + R"("
    })";
    auto cfg = parse_config_json(cfg_text);
    CHECK(run_subcommand(cfg, "egorov-check") == kOk);
    const std::string summary = slurp(dir / "summary.json");
    CHECK(summary.find("\"slope\"") != std::string::npos);
    CHECK(slurp(dir / "egorov.csv").find("eps,symbol,quantum,classical,gap") == 0);
}

TEST_CASE("two-microlocal requires the canonical coordinate family") {
    const fs::path dir = "/tmp/conical_run_tm_guard";
    fs::remove_all(dir);
    const std::string cfg_text = R"({
      "potential": {"dim": 1, "codim": 1,
        "w": {"kind": "const", "c": 1.0}, "V0": {"kind": "const", "c": 0.0},
        "g": [{"kind": "poly", "terms": [{"c": 1.0, "k": [1]}, {"c": 0.2, "k": [2]}]}],
        "box": [[-1.0, 1.0]]},
      "grid": {"n": 256, "xi_max": 1.5},
      "initial": {"kind": "coherent", "q": [0.0], "p": [1.0]},
      "eps_list": [0.03125],
      "out_dir": ")" + dir.string() + R"("
    })";
    auto cfg = parse_config_json(cfg_text);
    CHECK(run_subcommand(cfg, "two-microlocal") == kConfigError);
}

TEST_CASE("non-generic start maps to the numerical exit code") {
    const fs::path dir = "/tmp/conical_run_ng";
    fs::remove_all(dir);
    const std::string cfg_text = R"({
      "potential": {"dim": 1, "codim": 1,
        "w": {"kind": "const", "c": -1.0}, "V0": {"kind": "const", "c": 0.0},
        "g": "coordinates", "box": [[-2.0, 2.0]], "expects_crossings": false},
      "grid": {"n": 256, "xi_max": 2.0},
      "initial": {"kind": "coherent", "q": [0.0], "p": [0.0]},
      "eps_list": [0.03125],
      "trajectory": {"x": [0.0], "xi": [0.0], "t_final": 1.0},
      "out_dir": ")" + dir.string() + R"("
    })";
    auto cfg = parse_config_json(cfg_text);
    CHECK(run_subcommand(cfg, "trajectory") == kNumericalError);
    const std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("error") != std::string::npos);
}
