#include "opl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace opl {

std::vector<NodeId> neighbors(const Topology& topology, NodeId n) {
    if (n.row < 0 || n.row >= topology.height || n.col < 0 || n.col >= topology.width) {
        throw std::out_of_range("neighbors: node outside the raster");
    }
    std::vector<NodeId> candidates;
    candidates.reserve(6);
    candidates.push_back({n.row, n.col - 1});
    candidates.push_back({n.row, n.col + 1});
    candidates.push_back({n.row - 1, n.col});
    candidates.push_back({n.row + 1, n.col});
    if (topology.kind == TopologyKind::Hexagonal) {
        const int dc = (n.row % 2 == 0) ? -1 : +1;  // odd-r offset
        candidates.push_back({n.row - 1, n.col + dc});
        candidates.push_back({n.row + 1, n.col + dc});
    }
    std::vector<NodeId> out;
    out.reserve(candidates.size());
    for (const NodeId& c : candidates) {
        if (c.row >= 0 && c.row < topology.height && c.col >= 0 && c.col < topology.width) {
            out.push_back(c);
        }
    }
    return out;
}

Grid build_grid(const Topology& topology, const MemristorParams& device_defaults,
                double m_init, double series_r) {
    if (topology.width < 2 || topology.height < 2) {
        throw std::invalid_argument("build_grid: width and height must be at least 2");
    }
    if (!(series_r > 0.0)) {
        throw std::invalid_argument("build_grid: series resistance must be positive");
    }
    validate(device_defaults);
    if (m_init < device_defaults.r_on || m_init > device_defaults.r_off) {
        throw std::invalid_argument("build_grid: m_init outside [r_on, r_off]");
    }

    Grid grid;
    grid.topology = topology;
    const int nodes = grid.node_count();
    grid.series_r.assign(nodes, series_r);
    grid.bias.assign(nodes, 0.0);
    grid.incident_fuses.resize(nodes);

    const double x_init = state_for_memristance(device_defaults, m_init);
    grid.output_devices.reserve(nodes);
    for (int i = 0; i < nodes; ++i) {
        // Output devices are oriented so a positive node voltage (current
        // into ground) drives the state toward the high-resistive end.
        grid.output_devices.push_back(Memristor{device_defaults, MemristorState{x_init, -1}});
    }

    for (int index = 0; index < nodes; ++index) {
        const NodeId n = grid.node_at(index);
        for (const NodeId& m : neighbors(topology, n)) {
            if (grid.node_index(m) <= index) continue;  // each unordered pair once
            const int fuse_index = static_cast<int>(grid.fuses.size());
            grid.fuses.push_back({n, m, make_fuse(device_defaults, m_init)});
            grid.incident_fuses[index].push_back(fuse_index);
            grid.incident_fuses[grid.node_index(m)].push_back(fuse_index);
        }
    }
    reset_baseline(grid);
    return grid;
}

void set_bias(Grid& grid, const std::vector<double>& volts) {
    if (static_cast<int>(volts.size()) != grid.node_count()) {
        throw std::invalid_argument("set_bias: bias vector length must equal node count");
    }
    grid.bias = volts;
}

void reset_baseline(Grid& grid) {
    grid.fuse_baseline.clear();
    grid.fuse_baseline.reserve(grid.fuses.size());
    for (const FuseBranch& f : grid.fuses) grid.fuse_baseline.push_back(fuse_memristance(f.fuse));
    grid.output_baseline.clear();
    grid.output_baseline.reserve(grid.output_devices.size());
    for (const Memristor& d : grid.output_devices) {
        grid.output_baseline.push_back(memristance(d.params, d.state));
    }
}

int device_count(const Grid& grid) {
    return 2 * static_cast<int>(grid.fuses.size()) +
           static_cast<int>(grid.output_devices.size());
}

namespace {

const char* kind_name(DeviceKind kind) {
    switch (kind) {
        case DeviceKind::FuseHalfA: return "fuse_half_a";
        case DeviceKind::FuseHalfB: return "fuse_half_b";
        case DeviceKind::Output: return "output";
    }
    return "?";
}

Memristor& device_ref(Grid& grid, DeviceKind kind, int index) {
    switch (kind) {
        case DeviceKind::FuseHalfA: return grid.fuses[index].fuse.a;
        case DeviceKind::FuseHalfB: return grid.fuses[index].fuse.b;
        case DeviceKind::Output: return grid.output_devices[index];
    }
    throw std::logic_error("device_ref: bad kind");
}

}  // namespace

std::string FaultMap::to_csv(const Grid& grid) const {
    std::ostringstream out;
    out << "device_id,kind,row_a,col_a,row_b,col_b,r_on_mult,r_off_mult,m_init_mult\n";
    const int fuse_count = static_cast<int>(grid.fuses.size());
    for (const FaultRecord& r : records) {
        int id = 0;
        NodeId a{}, b{};
        switch (r.kind) {
            case DeviceKind::FuseHalfA:
                id = 2 * r.index;
                a = grid.fuses[r.index].a;
                b = grid.fuses[r.index].b;
                break;
            case DeviceKind::FuseHalfB:
                id = 2 * r.index + 1;
                a = grid.fuses[r.index].a;
                b = grid.fuses[r.index].b;
                break;
            case DeviceKind::Output:
                id = 2 * fuse_count + r.index;
                a = b = grid.node_at(r.index);
                break;
        }
        out << id << ',' << kind_name(r.kind) << ',' << a.row << ',' << a.col << ',' << b.row
            << ',' << b.col << ',' << r.r_on_mult << ',' << r.r_off_mult << ',' << r.m_init_mult
            << '\n';
    }
    return out.str();
}

FaultMap inject_faults(Grid& grid, const FaultSpec& spec) {
    if (spec.fraction_affected < 0.0 || spec.fraction_affected > 1.0) {
        throw std::invalid_argument("inject_faults: fraction must be in [0, 1]");
    }
    for (const Interval& iv : {spec.r_on_range, spec.r_off_range, spec.m_init_range}) {
        if (!(iv.lo > 0.0) || !(iv.lo <= iv.hi)) {
            throw std::invalid_argument("inject_faults: ranges need 0 < lo <= hi");
        }
    }

    const int total = device_count(grid);
    const int affected = static_cast<int>(std::llround(spec.fraction_affected * total));

    std::mt19937_64 rng(spec.seed);

    // Partial Fisher-Yates over the device enumeration: fuse halves first
    // (2*fuse_index + half), then output devices.
    std::vector<int> ids(total);
    for (int i = 0; i < total; ++i) ids[i] = i;
    for (int i = 0; i < affected; ++i) {
        std::uniform_int_distribution<int> pick(i, total - 1);
        std::swap(ids[i], ids[pick(rng)]);
    }

    FaultMap map;
    map.records.reserve(affected);
    const int fuse_count = static_cast<int>(grid.fuses.size());
    for (int i = 0; i < affected; ++i) {
        const int id = ids[i];
        FaultRecord rec{};
        if (id < 2 * fuse_count) {
            rec.kind = (id % 2 == 0) ? DeviceKind::FuseHalfA : DeviceKind::FuseHalfB;
            rec.index = id / 2;
        } else {
            rec.kind = DeviceKind::Output;
            rec.index = id - 2 * fuse_count;
        }
        rec.r_on_mult = std::uniform_real_distribution<double>(spec.r_on_range.lo,
                                                               spec.r_on_range.hi)(rng);
        rec.r_off_mult = std::uniform_real_distribution<double>(spec.r_off_range.lo,
                                                                spec.r_off_range.hi)(rng);
        rec.m_init_mult = std::uniform_real_distribution<double>(spec.m_init_range.lo,
                                                                 spec.m_init_range.hi)(rng);

        Memristor& dev = device_ref(grid, rec.kind, rec.index);
        const double m_now = memristance(dev.params, dev.state);
        dev.params.r_on *= rec.r_on_mult;
        dev.params.r_off *= rec.r_off_mult;
        if (dev.params.r_on >= dev.params.r_off) {
            throw std::runtime_error("inject_faults: perturbation produced r_on >= r_off");
        }
        dev.state.x = state_for_memristance(dev.params, m_now * rec.m_init_mult, /*clamp=*/true);

        map.records.push_back(rec);
    }

    reset_baseline(grid);  // erratic initial states are the devices' own baseline
    std::sort(map.records.begin(), map.records.end(), [&](const FaultRecord& l, const FaultRecord& r) {
        const auto order = [&](const FaultRecord& f) {
            return f.kind == DeviceKind::Output ? 2 * fuse_count + f.index
                   : f.kind == DeviceKind::FuseHalfA ? 2 * f.index
                                                     : 2 * f.index + 1;
        };
        return order(l) < order(r);
    });
    return map;
}

}  // namespace opl
