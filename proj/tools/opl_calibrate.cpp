// Fits the dopant mobility so the single-node experiment settles to a target
// center voltage at t_end. The fitted value is frozen as the library default
// (see calibrated_mobility()); rerun this tool after changing device
// defaults.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>

#include "opl/experiments.hpp"

namespace {

double center_voltage(double mobility) {
    auto cfg = opl::ExperimentConfig::single_node_defaults();
    cfg.device.mobility = mobility;
    opl::Grid grid = opl::build_from_config(cfg);
    const opl::NodeId center{cfg.height / 2, cfg.width / 2};
    std::vector<double> bias(grid.node_count(), 0.0);
    bias[grid.node_index(center)] = cfg.v_max;
    opl::set_bias(grid, bias);
    const opl::TraceSet traces = opl::run(grid, cfg.sim);
    return traces.node_voltages.back()[grid.node_index(center)];
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fit dopant mobility to the single-node center-voltage endpoint"};
    double target_mv = 21.9;
    double lo = 1e-17, hi = 1e-10;
    int iterations = 60;
    app.add_option("--target-mv", target_mv, "center voltage at t_end, mV");
    app.add_option("--lo", lo, "lower mobility bracket");
    app.add_option("--hi", hi, "upper mobility bracket");
    app.add_option("--iters", iterations, "bisection iterations");
    CLI11_PARSE(app, argc, argv);

    const double target = target_mv * 1e-3;
    double f_lo = center_voltage(lo), f_hi = center_voltage(hi);
    std::printf("bracket: %.3e -> %.6g mV, %.3e -> %.6g mV\n", lo, f_lo * 1e3, hi, f_hi * 1e3);
    if ((f_lo - target) * (f_hi - target) > 0.0) {
        std::fprintf(stderr, "error: target not bracketed\n");
        return 1;
    }
    for (int i = 0; i < iterations; ++i) {
        const double mid = std::sqrt(lo * hi);  // bisect in log space
        const double f_mid = center_voltage(mid);
        if ((f_lo - target) * (f_mid - target) <= 0.0) {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
        std::printf("iter %2d: mobility %.12e  center %.6g mV\n", i, mid, f_mid * 1e3);
    }
    const double fitted = std::sqrt(lo * hi);
    std::printf("fitted mobility: %.12e (center %.6g mV)\n", fitted, center_voltage(fitted) * 1e3);
    return 0;
}
