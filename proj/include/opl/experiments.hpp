#pragma once

// Experiment drivers behind the CLI subcommands. Each driver simulates from
// an ExperimentConfig, writes CSV/PGM/PBM outputs plus a resolved config
// copy into the output directory, and returns the measured quantities for
// programmatic use. All drivers are deterministic in (config, seed).

#include <filesystem>
#include <string>
#include <vector>

#include "opl/config.hpp"
#include "opl/imaging.hpp"
#include "opl/solver.hpp"

namespace opl {

// Resolves image.source ("synthetic:<name>" or a PGM path) at the config
// raster size; a file source overrides the configured width/height.
GrayImage load_input_image(const ExperimentConfig& cfg);

// Grid with zero bias built from the config's device/topology sections.
Grid build_from_config(const ExperimentConfig& cfg);

// Edge detection with the configured scheme; threshold < 0 keeps the
// configured value.
EdgeMap detect_edges(const Grid& grid, const ExperimentConfig& cfg, double threshold = -1.0);

// Per-node coloring of a fault map: level 0 where no incident device is
// perturbed, otherwise the mean |log2| of the initial-state multipliers
// scaled into [1, 15].
GrayImage render_fault_map(const Grid& grid, const FaultMap& map);

struct SingleNodeResult {
    double center_voltage = 0.0;           // V, at t_end
    double neighbor_mean_voltage = 0.0;    // ring-1 mean
    double peripheral_mean_voltage = 0.0;  // ring-2 mean
    std::vector<int> node_rings;           // BFS distance from the center node
    TraceSet traces;
};

// Only the center node is biased (at v_max); every other node is grounded.
SingleNodeResult run_single_node(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir);

struct SmoothResult {
    GrayImage input;
    GrayImage smoothed;
    GrayImage noisy_input;     // populated when noise.sigma > 0
    GrayImage noisy_smoothed;
    double mismatch = 0.0;     // clean-smoothed vs noisy-smoothed
    double max_identity_error = 0.0;
};

SmoothResult run_smooth(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct EdgesResult {
    GrayImage input;
    GrayImage smoothed;
    EdgeMap edges;
    EdgeMap prewitt_map;
    EdgeMap sobel_map;
    double iou_vs_prewitt = 0.0;
    double iou_vs_sobel = 0.0;
    double max_identity_error = 0.0;
};

EdgesResult run_edges(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct LightResult {
    EdgeMap nominal_reference;  // nominal condition at t_end
    // fixed_threshold mode: first time each condition's map reaches the IoU
    // target against the reference; negative when never reached.
    double t_bright = -1.0;
    double t_nominal = -1.0;
    double t_dark = -1.0;
    // fixed_time mode: maps at the per-condition thresholds at t_end.
    EdgeMap bright_map;
    EdgeMap dark_map;
    double iou_bright = 0.0;  // vs the nominal reference
    double iou_dark = 0.0;
    double max_identity_error = 0.0;  // nominal and fixed-time condition runs
};

LightResult run_light(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct FaultCase {
    TopologyKind topology;
    double yield = 1.0;
    double edge_iou_vs_ideal = 1.0;
    double smooth_mismatch_vs_ideal = 0.0;
    EdgeMap edges;
};

struct FaultResult {
    std::vector<FaultCase> cases;  // hex then rect, yields 1.0 / 0.75 / 0.5
    double max_identity_error = 0.0;

    const FaultCase& find(TopologyKind topology, double yield) const;
};

FaultResult run_fault(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace opl
