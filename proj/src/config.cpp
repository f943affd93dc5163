#include "opl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace opl {

double calibrated_mobility() {
    // Fitted by tools/opl_calibrate against the single-node reference
    // endpoint; see README.
    return 1.376514609025e-13;
}

double default_grid_mobility() {
    return 6e-16;
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    cfg.device.mobility = default_grid_mobility();
    cfg.device.window = WindowFunction::biolek(2.0);
    // The node equations carry series resistor and fuse terms only; the
    // output stage is grounded on demand for band-threshold detection.
    cfg.output_grounded = false;
    cfg.image_source = "synthetic:cartoon";
    cfg.fuse_majority.threshold = 1600.0;
    return cfg;
}

ExperimentConfig ExperimentConfig::light_defaults() {
    ExperimentConfig cfg = defaults();
    cfg.image_source = "synthetic:cube";
    cfg.v_max = 0.060;
    cfg.fuse_majority.threshold = 3000.0;
    cfg.sim.record_every = 0.25;
    return cfg;
}

ExperimentConfig ExperimentConfig::fault_defaults() {
    ExperimentConfig cfg = defaults();
    // Corner-rich tiles exercise the topology redundancy; the long run lets
    // boundary fuses commit regardless of their perturbed drift rates.
    cfg.image_source = "synthetic:tiles";
    cfg.width = 48;
    cfg.height = 48;
    cfg.v_max = 0.060;
    cfg.fuse_majority.threshold = 1000.0;  // on the change from baseline
    cfg.fuse_majority.relative = true;
    cfg.sim.t_end = 120.0;
    cfg.sim.record_every = 5.0;
    return cfg;
}

ExperimentConfig ExperimentConfig::single_node_defaults() {
    ExperimentConfig cfg = defaults();
    // Smallest raster with a full peripheral ring; its second ring lies on
    // the boundary like the reference study's small network.
    cfg.width = 5;
    cfg.height = 5;
    cfg.device.mobility = calibrated_mobility();
    cfg.device.window = WindowFunction::prodromakis(1.0, 1.0);
    cfg.image_source = "none";
    cfg.sim.record_every = 0.25;
    return cfg;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string window_name(WindowKind kind) {
    switch (kind) {
        case WindowKind::Rectangular: return "rectangular";
        case WindowKind::Biolek: return "biolek";
        case WindowKind::Prodromakis: return "prodromakis";
    }
    return "?";
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
    }
    if (pos != value.size()) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
    }
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
    }
    if (pos != value.size()) {
        throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": '" + value + "'");
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string ExperimentConfig::serialize() const {
    std::ostringstream out;
    out << "topology.kind = "
        << (topology_kind == TopologyKind::Hexagonal ? "hexagonal" : "rectangular") << '\n';
    out << "topology.width = " << width << '\n';
    out << "topology.height = " << height << '\n';
    out << "device.r_on = " << fmt(device.r_on) << '\n';
    out << "device.r_off = " << fmt(device.r_off) << '\n';
    out << "device.thickness = " << fmt(device.thickness) << '\n';
    out << "device.mobility = " << fmt(device.mobility) << '\n';
    out << "device.window = " << window_name(device.window.kind) << '\n';
    out << "device.window_p = " << fmt(device.window.p) << '\n';
    out << "device.window_j = " << fmt(device.window.j) << '\n';
    out << "device.m_init = " << fmt(m_init) << '\n';
    out << "grid.series_r = " << fmt(series_r) << '\n';
    out << "grid.output_grounded = " << (output_grounded ? "true" : "false") << '\n';
    out << "image.source = " << image_source << '\n';
    out << "image.v_max = " << fmt(v_max) << '\n';
    out << "sim.dt = " << fmt(sim.dt) << '\n';
    out << "sim.t_end = " << fmt(sim.t_end) << '\n';
    out << "sim.max_dx_per_step = " << fmt(sim.max_dx_per_step) << '\n';
    out << "sim.linear_tol = " << fmt(sim.linear_tol) << '\n';
    out << "sim.record_every = " << fmt(sim.record_every) << '\n';
    out << "edges.scheme = " << edge_scheme << '\n';
    out << "edges.threshold = " << fmt(fuse_majority.threshold) << '\n';
    out << "edges.min_count = " << fuse_majority.min_count << '\n';
    out << "edges.per_half = " << (fuse_majority.per_half ? "true" : "false") << '\n';
    out << "edges.relative = " << (fuse_majority.relative ? "true" : "false") << '\n';
    out << "edges.band_lo = " << fmt(output_band.lo) << '\n';
    out << "edges.band_hi = " << fmt(output_band.hi) << '\n';
    out << "edges.gradient_threshold = " << fmt(gradient_threshold) << '\n';
    out << "noise.mu = " << fmt(noise_mu) << '\n';
    out << "noise.sigma = " << fmt(noise_sigma) << '\n';
    out << "light.mode = " << light_mode << '\n';
    out << "light.bright_scale = " << fmt(light_bright_scale) << '\n';
    out << "light.dark_scale = " << fmt(light_dark_scale) << '\n';
    out << "light.iou_target = " << fmt(light_iou_target) << '\n';
    out << "light.t_max = " << fmt(light_t_max) << '\n';
    out << "light.threshold_bright = " << fmt(light_threshold_bright) << '\n';
    out << "light.threshold_dark = " << fmt(light_threshold_dark) << '\n';
    out << "fault.r_on_lo = " << fmt(fault_r_on.lo) << '\n';
    out << "fault.r_on_hi = " << fmt(fault_r_on.hi) << '\n';
    out << "fault.r_off_lo = " << fmt(fault_r_off.lo) << '\n';
    out << "fault.r_off_hi = " << fmt(fault_r_off.hi) << '\n';
    out << "fault.m_init_lo = " << fmt(fault_m_init.lo) << '\n';
    out << "fault.m_init_hi = " << fmt(fault_m_init.hi) << '\n';
    out << "seed = " << seed << '\n';
    return out.str();
}

void ExperimentConfig::validate() const {
    opl::validate(device);
    sim.validate();
    if (width < 2 || height < 2) {
        throw std::invalid_argument("config: topology must be at least 2x2");
    }
    if (m_init < device.r_on || m_init > device.r_off) {
        throw std::invalid_argument("config: m_init outside [r_on, r_off]");
    }
    if (!(series_r > 0.0)) throw std::invalid_argument("config: series_r must be positive");
    if (!(v_max > 0.0)) throw std::invalid_argument("config: v_max must be positive");
    if (edge_scheme == "fuse_majority") fuse_majority.validate();
    if (edge_scheme == "output_band") {
        output_band.validate();
        if (!output_grounded) {
            throw std::invalid_argument(
                "config: edges.scheme = output_band needs grid.output_grounded = true");
        }
    }
    if (noise_sigma < 0.0) throw std::invalid_argument("config: noise sigma must be >= 0");
    if (!(light_bright_scale > 0.0) || !(light_dark_scale > 0.0)) {
        throw std::invalid_argument("config: light scales must be positive");
    }
    if (!(light_iou_target > 0.0 && light_iou_target <= 1.0)) {
        throw std::invalid_argument("config: light iou_target must be in (0, 1]");
    }
}

namespace {

void apply(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "topology.kind") {
        if (value == "hexagonal") cfg.topology_kind = TopologyKind::Hexagonal;
        else if (value == "rectangular") cfg.topology_kind = TopologyKind::Rectangular;
        else throw std::invalid_argument("config: unknown topology '" + value + "'");
    } else if (key == "topology.width") {
        cfg.width = static_cast<int>(parse_int(key, value));
    } else if (key == "topology.height") {
        cfg.height = static_cast<int>(parse_int(key, value));
    } else if (key == "device.r_on") {
        cfg.device.r_on = parse_double(key, value);
    } else if (key == "device.r_off") {
        cfg.device.r_off = parse_double(key, value);
    } else if (key == "device.thickness") {
        cfg.device.thickness = parse_double(key, value);
    } else if (key == "device.mobility") {
        cfg.device.mobility = parse_double(key, value);
    } else if (key == "device.window") {
        if (value == "rectangular") cfg.device.window.kind = WindowKind::Rectangular;
        else if (value == "biolek") cfg.device.window.kind = WindowKind::Biolek;
        else if (value == "prodromakis") cfg.device.window.kind = WindowKind::Prodromakis;
        else throw std::invalid_argument("config: unknown window '" + value + "'");
    } else if (key == "device.window_p") {
        cfg.device.window.p = parse_double(key, value);
    } else if (key == "device.window_j") {
        cfg.device.window.j = parse_double(key, value);
    } else if (key == "device.m_init") {
        cfg.m_init = parse_double(key, value);
    } else if (key == "grid.series_r") {
        cfg.series_r = parse_double(key, value);
    } else if (key == "grid.output_grounded") {
        cfg.output_grounded = parse_bool(key, value);
    } else if (key == "image.source") {
        cfg.image_source = value;
    } else if (key == "image.v_max") {
        cfg.v_max = parse_double(key, value);
    } else if (key == "sim.dt") {
        cfg.sim.dt = parse_double(key, value);
    } else if (key == "sim.t_end") {
        cfg.sim.t_end = parse_double(key, value);
    } else if (key == "sim.max_dx_per_step") {
        cfg.sim.max_dx_per_step = parse_double(key, value);
    } else if (key == "sim.linear_tol") {
        cfg.sim.linear_tol = parse_double(key, value);
    } else if (key == "sim.record_every") {
        cfg.sim.record_every = parse_double(key, value);
    } else if (key == "edges.scheme") {
        if (value != "fuse_majority" && value != "output_band") {
            throw std::invalid_argument("config: unknown edge scheme '" + value + "'");
        }
        cfg.edge_scheme = value;
    } else if (key == "edges.threshold") {
        cfg.fuse_majority.threshold = parse_double(key, value);
    } else if (key == "edges.min_count") {
        cfg.fuse_majority.min_count = static_cast<int>(parse_int(key, value));
    } else if (key == "edges.per_half") {
        cfg.fuse_majority.per_half = parse_bool(key, value);
    } else if (key == "edges.relative") {
        cfg.fuse_majority.relative = parse_bool(key, value);
        cfg.output_band.relative = cfg.fuse_majority.relative;
    } else if (key == "edges.band_lo") {
        cfg.output_band.lo = parse_double(key, value);
    } else if (key == "edges.band_hi") {
        cfg.output_band.hi = parse_double(key, value);
    } else if (key == "edges.gradient_threshold") {
        cfg.gradient_threshold = parse_double(key, value);
    } else if (key == "noise.mu") {
        cfg.noise_mu = parse_double(key, value);
    } else if (key == "noise.sigma") {
        cfg.noise_sigma = parse_double(key, value);
    } else if (key == "light.mode") {
        if (value != "fixed_threshold" && value != "fixed_time") {
            throw std::invalid_argument("config: unknown light mode '" + value + "'");
        }
        cfg.light_mode = value;
    } else if (key == "light.bright_scale") {
        cfg.light_bright_scale = parse_double(key, value);
    } else if (key == "light.dark_scale") {
        cfg.light_dark_scale = parse_double(key, value);
    } else if (key == "light.iou_target") {
        cfg.light_iou_target = parse_double(key, value);
    } else if (key == "light.t_max") {
        cfg.light_t_max = parse_double(key, value);
    } else if (key == "light.threshold_bright") {
        cfg.light_threshold_bright = parse_double(key, value);
    } else if (key == "light.threshold_dark") {
        cfg.light_threshold_dark = parse_double(key, value);
    } else if (key == "fault.r_on_lo") {
        cfg.fault_r_on.lo = parse_double(key, value);
    } else if (key == "fault.r_on_hi") {
        cfg.fault_r_on.hi = parse_double(key, value);
    } else if (key == "fault.r_off_lo") {
        cfg.fault_r_off.lo = parse_double(key, value);
    } else if (key == "fault.r_off_hi") {
        cfg.fault_r_off.hi = parse_double(key, value);
    } else if (key == "fault.m_init_lo") {
        cfg.fault_m_init.lo = parse_double(key, value);
    } else if (key == "fault.m_init_hi") {
        cfg.fault_m_init.hi = parse_double(key, value);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
    ExperimentConfig cfg = base;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not 'key = value'");
        }
        apply(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), base);
}

}  // namespace opl
