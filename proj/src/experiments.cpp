#include "opl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "opl/synthetic.hpp"

namespace opl {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void prepare_out_dir(const ExperimentConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    write_text(out_dir / "config_resolved.txt", cfg.serialize());
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Topology topology_of(const ExperimentConfig& cfg) {
    return Topology{cfg.topology_kind, cfg.width, cfg.height};
}

// BFS graph distance from a start node over the grid adjacency.
std::vector<int> node_distances(const Topology& topology, NodeId start) {
    const int n = topology.width * topology.height;
    std::vector<int> dist(n, -1);
    std::deque<NodeId> queue{start};
    dist[start.row * topology.width + start.col] = 0;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        const int du = dist[u.row * topology.width + u.col];
        for (const NodeId& v : neighbors(topology, u)) {
            int& dv = dist[v.row * topology.width + v.col];
            if (dv < 0) {
                dv = du + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

void write_frames(const Grid& grid, const TraceSet& traces, double v_max,
                  const fs::path& dir) {
    fs::create_directories(dir);
    for (std::size_t k = 0; k < traces.times.size(); ++k) {
        const GrayImage frame = read_smoothed(traces.node_voltages[k], grid.topology.width,
                                              grid.topology.height, v_max);
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%05zu.pgm", k);
        write_pgm(frame, dir / name);
    }
}

struct ImageRun {
    Grid grid;
    TraceSet traces;
    GrayImage smoothed;
};

ImageRun simulate_image(const ExperimentConfig& cfg, const GrayImage& img,
                        FaultMap* fault_map = nullptr, const FaultSpec* fault_spec = nullptr) {
    ExperimentConfig sized = cfg;
    sized.width = img.width;
    sized.height = img.height;
    ImageRun result{build_from_config(sized), {}, {}};
    if (fault_spec) {
        FaultMap map = inject_faults(result.grid, *fault_spec);
        if (fault_map) *fault_map = std::move(map);
    }
    set_bias(result.grid, transcribe_to_bias(img, cfg.v_max));
    result.traces = run(result.grid, cfg.sim);
    result.smoothed = read_smoothed(result.traces.node_voltages.back(), img.width, img.height,
                                    cfg.v_max);
    return result;
}

}  // namespace

GrayImage load_input_image(const ExperimentConfig& cfg) {
    if (cfg.image_source.rfind("synthetic:", 0) == 0) {
        return make_synthetic(cfg.image_source.substr(10), cfg.width, cfg.height);
    }
    if (cfg.image_source == "none" || cfg.image_source.empty()) {
        throw std::invalid_argument("config: this experiment needs image.source");
    }
    return read_pgm(cfg.image_source);
}

Grid build_from_config(const ExperimentConfig& cfg) {
    cfg.validate();
    Grid grid = build_grid(topology_of(cfg), cfg.device, cfg.m_init, cfg.series_r);
    if (!cfg.output_grounded) grid.output_devices.clear();
    return grid;
}

EdgeMap detect_edges(const Grid& grid, const ExperimentConfig& cfg, double threshold) {
    if (cfg.edge_scheme == "output_band") {
        return detect_edges_output_band(grid, cfg.output_band);
    }
    FuseMajority spec = cfg.fuse_majority;
    if (threshold > 0.0) spec.threshold = threshold;
    return detect_edges_fuse_majority(grid, spec);
}

GrayImage render_fault_map(const Grid& grid, const FaultMap& map) {
    const int n = grid.node_count();
    std::vector<double> weight(n, 0.0);
    std::vector<int> touched(n, 0);
    auto mark = [&](NodeId node, double m_init_mult) {
        const int i = grid.node_index(node);
        weight[i] += std::abs(std::log2(m_init_mult));
        touched[i] += 1;
    };
    for (const FaultRecord& rec : map.records) {
        if (rec.kind == DeviceKind::Output) {
            mark(grid.node_at(rec.index), rec.m_init_mult);
        } else {
            mark(grid.fuses[rec.index].a, rec.m_init_mult);
            mark(grid.fuses[rec.index].b, rec.m_init_mult);
        }
    }
    GrayImage img = make_image(grid.topology.width, grid.topology.height, 0);
    const double full_scale = std::abs(std::log2(40.0));  // widest default multiplier
    for (int i = 0; i < n; ++i) {
        if (touched[i] == 0) continue;
        const double mean = weight[i] / touched[i];
        const long level = 1 + std::lround(14.0 * std::min(mean / full_scale, 1.0));
        img.levels[i] = static_cast<std::uint8_t>(std::clamp(level, 1L, 15L));
    }
    return img;
}

SingleNodeResult run_single_node(const ExperimentConfig& cfg, const fs::path& out_dir) {
    prepare_out_dir(cfg, out_dir);
    Grid grid = build_from_config(cfg);
    if (cfg.width < 5 || cfg.height < 5) {
        throw std::invalid_argument("single-node experiment needs at least a 5x5 raster");
    }
    const NodeId center{cfg.height / 2, cfg.width / 2};
    std::vector<double> bias(grid.node_count(), 0.0);
    bias[grid.node_index(center)] = cfg.v_max;
    set_bias(grid, bias);

    SingleNodeResult result;
    result.traces = run(grid, cfg.sim);
    result.node_rings = node_distances(grid.topology, center);

    const std::vector<double>& v = result.traces.node_voltages.back();
    double ring_sum[3] = {0, 0, 0};
    int ring_count[3] = {0, 0, 0};
    for (int i = 0; i < grid.node_count(); ++i) {
        if (result.node_rings[i] >= 0 && result.node_rings[i] <= 2) {
            ring_sum[result.node_rings[i]] += v[i];
            ring_count[result.node_rings[i]] += 1;
        }
    }
    result.center_voltage = ring_sum[0];
    result.neighbor_mean_voltage = ring_sum[1] / std::max(1, ring_count[1]);
    result.peripheral_mean_voltage = ring_sum[2] / std::max(1, ring_count[2]);

    write_text(out_dir / "node_voltages.csv", result.traces.node_voltages_csv(grid));
    write_text(out_dir / "fuse_memristances.csv", result.traces.fuse_memristances_csv(grid));
    write_text(out_dir / "output_memristances.csv", result.traces.output_memristances_csv(grid));

    std::ostringstream classes;
    classes << "fuse,row_a,col_a,row_b,col_b,ring_a,ring_b,class\n";
    for (std::size_t f = 0; f < grid.fuses.size(); ++f) {
        const FuseBranch& branch = grid.fuses[f];
        const int ra = result.node_rings[grid.node_index(branch.a)];
        const int rb = result.node_rings[grid.node_index(branch.b)];
        classes << f << ',' << branch.a.row << ',' << branch.a.col << ',' << branch.b.row << ','
                << branch.b.col << ',' << ra << ',' << rb << ',' << std::min(ra, rb) << '-'
                << std::max(ra, rb) << '\n';
    }
    write_text(out_dir / "fuse_classes.csv", classes.str());

    std::ostringstream report;
    report << "quantity,value\n";
    report << "center_voltage_v," << fmt(result.center_voltage) << '\n';
    report << "neighbor_mean_voltage_v," << fmt(result.neighbor_mean_voltage) << '\n';
    report << "peripheral_mean_voltage_v," << fmt(result.peripheral_mean_voltage) << '\n';
    report << "max_identity_error," << fmt(result.traces.max_identity_error) << '\n';
    write_text(out_dir / "report.csv", report.str());
    return result;
}

SmoothResult run_smooth(const ExperimentConfig& cfg, const fs::path& out_dir) {
    prepare_out_dir(cfg, out_dir);
    SmoothResult result;
    result.input = load_input_image(cfg);
    write_pgm(result.input, out_dir / "input.pgm");

    ImageRun clean = simulate_image(cfg, result.input);
    result.smoothed = clean.smoothed;
    result.max_identity_error = clean.traces.max_identity_error;
    write_pgm(result.smoothed, out_dir / "smoothed.pgm");
    write_frames(clean.grid, clean.traces, cfg.v_max, out_dir / "frames");

    if (cfg.noise_sigma > 0.0) {
        result.noisy_input =
            add_gaussian_noise(result.input, cfg.noise_mu, cfg.noise_sigma, cfg.seed);
        write_pgm(result.noisy_input, out_dir / "noisy_input.pgm");
        ImageRun noisy = simulate_image(cfg, result.noisy_input);
        result.noisy_smoothed = noisy.smoothed;
        result.max_identity_error =
            std::max(result.max_identity_error, noisy.traces.max_identity_error);
        write_pgm(result.noisy_smoothed, out_dir / "noisy_smoothed.pgm");
        write_frames(noisy.grid, noisy.traces, cfg.v_max, out_dir / "frames_noisy");

        const MismatchResult mismatch = intensity_mismatch(result.smoothed, result.noisy_smoothed);
        result.mismatch = mismatch.fraction;
        write_pgm(mismatch.difference, out_dir / "difference.pgm");
    }

    std::ostringstream metrics;
    metrics << "quantity,value\n";
    metrics << "mismatch_fraction," << fmt(result.mismatch) << '\n';
    metrics << "max_identity_error," << fmt(result.max_identity_error) << '\n';
    write_text(out_dir / "metrics.csv", metrics.str());
    return result;
}

EdgesResult run_edges(const ExperimentConfig& cfg, const fs::path& out_dir) {
    prepare_out_dir(cfg, out_dir);
    EdgesResult result;
    result.input = load_input_image(cfg);
    write_pgm(result.input, out_dir / "input.pgm");

    ImageRun sim = simulate_image(cfg, result.input);
    result.smoothed = sim.smoothed;
    result.max_identity_error = sim.traces.max_identity_error;
    write_pgm(result.smoothed, out_dir / "smoothed.pgm");

    result.edges = detect_edges(sim.grid, cfg);
    result.prewitt_map = prewitt(result.input, cfg.gradient_threshold);
    result.sobel_map = sobel(result.input, cfg.gradient_threshold);
    result.iou_vs_prewitt = edge_iou(result.edges, result.prewitt_map);
    result.iou_vs_sobel = edge_iou(result.edges, result.sobel_map);

    write_pbm(result.edges, out_dir / "edges.pbm");
    write_pgm(render_edges(result.edges), out_dir / "edges_render.pgm");
    write_pbm(result.prewitt_map, out_dir / "prewitt.pbm");
    write_pbm(result.sobel_map, out_dir / "sobel.pbm");

    std::ostringstream iou;
    iou << "pair,iou\n";
    iou << "memristive_vs_prewitt," << fmt(result.iou_vs_prewitt) << '\n';
    iou << "memristive_vs_sobel," << fmt(result.iou_vs_sobel) << '\n';
    write_text(out_dir / "iou.csv", iou.str());
    return result;
}

namespace {

// Runs one light condition, recording the first instant whose edge map
// reaches the IoU target against `reference`. Records are taken at the
// config's record_every cadence up to t_max. Light conditions scale the
// stimulus amplitude: brighter scenes drive larger photoreceptor signals.
double time_to_match(const ExperimentConfig& cfg, const GrayImage& img, double light_scale,
                     const EdgeMap& reference, double t_max, EdgeMap* final_map) {
    ExperimentConfig sized = cfg;
    sized.width = img.width;
    sized.height = img.height;
    Grid grid = build_from_config(sized);
    set_bias(grid, transcribe_to_bias(img, cfg.v_max * light_scale));

    Simulator sim(grid, cfg.sim);
    const long steps = std::lround(t_max / cfg.sim.dt);
    const long stride = std::max(1L, std::lround(cfg.sim.record_every / cfg.sim.dt));
    double matched = -1.0;
    for (long k = 0; k <= steps; ++k) {
        if (k % stride == 0 || k == steps) {
            const double t = k * cfg.sim.dt;
            const EdgeMap map = detect_edges(grid, cfg);
            if (matched < 0.0 && edge_iou(map, reference) >= cfg.light_iou_target) {
                matched = t;
                if (final_map) *final_map = map;
                break;
            }
            if (k == steps && final_map) *final_map = map;
        }
        if (k < steps) sim.advance();
    }
    return matched;
}

}  // namespace

LightResult run_light(const ExperimentConfig& cfg, const fs::path& out_dir) {
    prepare_out_dir(cfg, out_dir);
    const GrayImage base = load_input_image(cfg);
    // exposure renderings of the scaled scenes, for inspection only
    write_pgm(base, out_dir / "input.pgm");
    write_pgm(scale_brightness(base, cfg.light_bright_scale), out_dir / "input_bright.pgm");
    write_pgm(scale_brightness(base, cfg.light_dark_scale), out_dir / "input_dark.pgm");

    LightResult result;
    ImageRun nominal = simulate_image(cfg, base);
    result.nominal_reference = detect_edges(nominal.grid, cfg);
    result.max_identity_error = nominal.traces.max_identity_error;
    write_pbm(result.nominal_reference, out_dir / "edges_nominal.pbm");

    if (cfg.light_mode == "fixed_time") {
        ExperimentConfig bright_cfg = cfg, dark_cfg = cfg;
        bright_cfg.v_max = cfg.v_max * cfg.light_bright_scale;
        dark_cfg.v_max = cfg.v_max * cfg.light_dark_scale;
        ImageRun bright_run = simulate_image(bright_cfg, base);
        ImageRun dark_run = simulate_image(dark_cfg, base);
        result.max_identity_error = std::max({result.max_identity_error,
                                              bright_run.traces.max_identity_error,
                                              dark_run.traces.max_identity_error});
        result.bright_map = detect_edges(bright_run.grid, cfg, cfg.light_threshold_bright);
        result.dark_map = detect_edges(dark_run.grid, cfg, cfg.light_threshold_dark);
        result.iou_bright = edge_iou(result.bright_map, result.nominal_reference);
        result.iou_dark = edge_iou(result.dark_map, result.nominal_reference);
        write_pbm(result.bright_map, out_dir / "edges_bright.pbm");
        write_pbm(result.dark_map, out_dir / "edges_dark.pbm");

        std::ostringstream iou;
        iou << "condition,threshold_ohm,iou_vs_nominal\n";
        iou << "bright," << fmt(cfg.light_threshold_bright) << ',' << fmt(result.iou_bright)
            << '\n';
        iou << "dark," << fmt(cfg.light_threshold_dark) << ',' << fmt(result.iou_dark) << '\n';
        write_text(out_dir / "iou.csv", iou.str());
        return result;
    }

    result.t_nominal =
        time_to_match(cfg, base, 1.0, result.nominal_reference, cfg.sim.t_end, nullptr);
    result.t_bright = time_to_match(cfg, base, cfg.light_bright_scale, result.nominal_reference,
                                    cfg.light_t_max, &result.bright_map);
    result.t_dark = time_to_match(cfg, base, cfg.light_dark_scale, result.nominal_reference,
                                  cfg.light_t_max, &result.dark_map);
    write_pbm(result.bright_map, out_dir / "edges_bright.pbm");
    write_pbm(result.dark_map, out_dir / "edges_dark.pbm");

    std::ostringstream times;
    times << "condition,time_to_match_s\n";
    times << "bright," << fmt(result.t_bright) << '\n';
    times << "nominal," << fmt(result.t_nominal) << '\n';
    times << "dark," << fmt(result.t_dark) << '\n';
    write_text(out_dir / "times.csv", times.str());
    return result;
}

const FaultCase& FaultResult::find(TopologyKind topology, double yield) const {
    for (const FaultCase& c : cases) {
        if (c.topology == topology && std::abs(c.yield - yield) < 1e-9) return c;
    }
    throw std::out_of_range("fault case not found");
}

FaultResult run_fault(const ExperimentConfig& cfg, const fs::path& out_dir) {
    prepare_out_dir(cfg, out_dir);
    const GrayImage img = load_input_image(cfg);
    write_pgm(img, out_dir / "input.pgm");

    FaultResult result;
    std::ostringstream table;
    table << "topology,yield,edge_iou_vs_ideal,smooth_mismatch_vs_ideal\n";

    for (TopologyKind topology : {TopologyKind::Hexagonal, TopologyKind::Rectangular}) {
        ExperimentConfig local = cfg;
        local.topology_kind = topology;
        const std::string prefix =
            topology == TopologyKind::Hexagonal ? "hex" : "rect";

        EdgeMap ideal_edges;
        GrayImage ideal_smoothed;
        for (double yield : {1.0, 0.75, 0.5}) {
            FaultSpec spec;
            spec.fraction_affected = 1.0 - yield;
            spec.r_on_range = cfg.fault_r_on;
            spec.r_off_range = cfg.fault_r_off;
            spec.m_init_range = cfg.fault_m_init;
            spec.seed = cfg.seed;

            FaultMap fault_map;
            ImageRun sim = simulate_image(local, img, &fault_map, &spec);
            result.max_identity_error =
                std::max(result.max_identity_error, sim.traces.max_identity_error);
            const EdgeMap edges = detect_edges(sim.grid, local);

            char yield_name[16];
            std::snprintf(yield_name, sizeof(yield_name), "%03d", int(std::lround(yield * 100)));
            const std::string tag = prefix + "_y" + yield_name;

            write_text(out_dir / ("fault_map_" + tag + ".csv"), fault_map.to_csv(sim.grid));
            write_pgm(render_fault_map(sim.grid, fault_map), out_dir / ("fault_map_" + tag + ".pgm"));
            write_pgm(sim.smoothed, out_dir / ("smoothed_" + tag + ".pgm"));
            write_pbm(edges, out_dir / ("edges_" + tag + ".pbm"));

            FaultCase fault_case;
            fault_case.topology = topology;
            fault_case.yield = yield;
            fault_case.edges = edges;
            if (yield == 1.0) {
                ideal_edges = edges;
                ideal_smoothed = sim.smoothed;
            } else {
                write_pgm(intensity_mismatch(sim.smoothed, ideal_smoothed).difference,
                          out_dir / ("diff_" + tag + ".pgm"));
            }
            fault_case.edge_iou_vs_ideal = edge_iou(edges, ideal_edges);
            fault_case.smooth_mismatch_vs_ideal =
                intensity_mismatch(sim.smoothed, ideal_smoothed).fraction;

            table << prefix << ',' << fmt(yield) << ',' << fmt(fault_case.edge_iou_vs_ideal)
                  << ',' << fmt(fault_case.smooth_mismatch_vs_ideal) << '\n';
            result.cases.push_back(std::move(fault_case));
        }
    }
    write_text(out_dir / "iou_table.csv", table.str());
    return result;
}

}  // namespace opl
