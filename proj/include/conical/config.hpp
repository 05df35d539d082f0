#ifndef CONICAL_CONFIG_HPP
#define CONICAL_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "conical/microlocal.hpp"
#include "conical/transport.hpp"

namespace conical {

struct TrajectoryConfig {
    PhasePoint start;
    double t_final = 1.0;
    std::size_t samples = 400;
};

struct TimeConfig {
    double t_final = 0.0;
    double dt = 0.0;  // 0: dt_max rule
    std::vector<double> snapshots;
};

struct EgorovCriteria {
    std::optional<double> min_slope;
    bool monotone = false;
    std::optional<double> final_ratio_max;
};

struct EgorovConfig {
    double t = 0.0;
    std::size_t n_particles = 20000;
    EgorovCriteria criteria;
};

struct DiagnosticsConfig {
    std::vector<double> R_list{8.0};
    std::vector<double> delta_list{0.2};
    std::vector<double> tube_radii{0.2, 0.1, 0.05};
    double y_max = 0.0;
    TwoMicrolocalSymbol probe;
};

struct RunConfig {
    std::shared_ptr<ConicalPotential> potential;
    Box declared_box;          // before padding
    double pad_fraction = 0.3;
    std::vector<AxisSpec> axes;  // padded grid, base resolution
    bool auto_grid = false;      // refine n per eps by the resolution rule
    double xi_max = 0.0;
    InitialStateSpec initial;
    TimeConfig time;
    std::vector<double> eps_list;
    std::vector<SymbolSpec> symbols;
    std::optional<TrajectoryConfig> trajectory;
    EgorovConfig egorov;
    DiagnosticsConfig diagnostics;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 1;
    std::string raw_json;  // for the manifest hash
};

// Parses and validates; throws ConfigError carrying every violation found.
RunConfig load_config(const std::string& path);
RunConfig parse_config_json(const std::string& text);

}  // namespace conical

#endif
