// Command-line runner for the retina-grid experiments. Every subcommand
// loads a key-value config file, runs deterministically, and writes its
// outputs plus a resolved config copy into the output directory.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "opl/experiments.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override the config seed");
}

opl::ExperimentConfig load(const CommonArgs& args, opl::ExperimentConfig base) {
    opl::ExperimentConfig cfg = opl::load_config(args.config_path, std::move(base));
    if (args.seed) cfg.seed = *args.seed;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memristive retina-grid simulator"};
    app.require_subcommand(1);

    CommonArgs single_args, smooth_args, edges_args, light_args, fault_args;
    CLI::App* single = app.add_subcommand(
        "single-node", "bias one center node and trace the settling of its neighborhood");
    add_common(single, single_args);
    CLI::App* smooth = app.add_subcommand("smooth", "adaptive smoothing of a grayscale image");
    add_common(smooth, smooth_args);
    CLI::App* edges =
        app.add_subcommand("edges", "memristance-threshold edge detection with baselines");
    add_common(edges, edges_args);
    CLI::App* light =
        app.add_subcommand("light", "edge detection under scaled light conditions");
    add_common(light, light_args);
    CLI::App* fault =
        app.add_subcommand("fault", "smoothing and edge detection under degraded device yield");
    add_common(fault, fault_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (single->parsed()) {
            const auto cfg = load(single_args, opl::ExperimentConfig::single_node_defaults());
            const auto result = opl::run_single_node(cfg, single_args.out_dir);
            std::printf("center %.4g mV, neighbors %.4g mV, peripheral %.4g mV\n",
                        result.center_voltage * 1e3, result.neighbor_mean_voltage * 1e3,
                        result.peripheral_mean_voltage * 1e3);
            std::printf("max nodal-identity error %.3g\n", result.traces.max_identity_error);
        } else if (smooth->parsed()) {
            const auto cfg = load(smooth_args, opl::ExperimentConfig::defaults());
            const auto result = opl::run_smooth(cfg, smooth_args.out_dir);
            if (cfg.noise_sigma > 0.0) {
                std::printf("clean-vs-noisy mismatch %.4g%%\n", result.mismatch * 100.0);
            }
            std::printf("max nodal-identity error %.3g\n", result.max_identity_error);
        } else if (edges->parsed()) {
            const auto cfg = load(edges_args, opl::ExperimentConfig::defaults());
            const auto result = opl::run_edges(cfg, edges_args.out_dir);
            std::printf("edge pixels %d, IoU vs prewitt %.3f, vs sobel %.3f\n",
                        result.edges.count(), result.iou_vs_prewitt, result.iou_vs_sobel);
        } else if (light->parsed()) {
            const auto cfg = load(light_args, opl::ExperimentConfig::light_defaults());
            const auto result = opl::run_light(cfg, light_args.out_dir);
            if (cfg.light_mode == "fixed_threshold") {
                std::printf("time to match: bright %.4g s, nominal %.4g s, dark %.4g s\n",
                            result.t_bright, result.t_nominal, result.t_dark);
            } else {
                std::printf("IoU vs nominal: bright %.3f, dark %.3f\n", result.iou_bright,
                            result.iou_dark);
            }
        } else if (fault->parsed()) {
            const auto cfg = load(fault_args, opl::ExperimentConfig::fault_defaults());
            const auto result = opl::run_fault(cfg, fault_args.out_dir);
            for (const auto& c : result.cases) {
                std::printf("%s yield %3.0f%%: edge IoU vs ideal %.3f, mismatch %.4g%%\n",
                            c.topology == opl::TopologyKind::Hexagonal ? "hex " : "rect",
                            c.yield * 100.0, c.edge_iou_vs_ideal,
                            c.smooth_mismatch_vs_ideal * 100.0);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
