#pragma once

// Retina-style resistive grid: one node per pixel of the input raster,
// memristive fuses between neighboring nodes, and per node a bias source
// behind a series resistor plus a single output memristor to ground.
//
// Hexagonal adjacency uses odd-r offset coordinates: odd rows are shifted
// half a cell to the right, so even-row nodes take their two diagonal
// neighbors from column c-1 and odd-row nodes from column c+1. Missing
// neighbors at the raster boundary are simply absent branches.

#include <cstdint>
#include <string>
#include <vector>

#include "opl/device.hpp"

namespace opl {

struct NodeId {
    int row = 0;
    int col = 0;

    friend bool operator==(const NodeId&, const NodeId&) = default;
};

enum class TopologyKind { Hexagonal, Rectangular };

struct Topology {
    TopologyKind kind = TopologyKind::Hexagonal;
    int width = 2;   // pixels
    int height = 2;  // pixels
};

// Neighbor enumeration order: west, east, north, south, then the two
// diagonal neighbors (north/south at col-1 on even rows, col+1 on odd rows).
// Rectangular grids stop after the first four. Out-of-raster candidates are
// dropped. Throws std::out_of_range for a node outside the raster.
std::vector<NodeId> neighbors(const Topology& topology, NodeId n);

struct FuseBranch {
    NodeId a;
    NodeId b;
    FuseState fuse;
};

struct Grid {
    Topology topology;
    std::vector<FuseBranch> fuses;          // deterministic row-major order
    std::vector<Memristor> output_devices;  // node-major; may be empty (no ground branch)
    std::vector<double> series_r;           // ohms, node-major
    std::vector<double> bias;               // volts, node-major
    std::vector<std::vector<int32_t>> incident_fuses;  // node index -> fuse indices
    // Memristances at the start of the run (refreshed by fault injection), the
    // baseline for change-based thresholding.
    std::vector<double> fuse_baseline;
    std::vector<double> output_baseline;

    int node_count() const { return topology.width * topology.height; }
    int node_index(NodeId n) const { return n.row * topology.width + n.col; }
    NodeId node_at(int index) const {
        return {index / topology.width, index % topology.width};
    }
};

// Builds the grid with every fuse half and every output device at the state
// solving M(x) = m_init. Branch order is row-major by the lower node with the
// documented neighbor order, so identical inputs give identical grids.
// Throws std::invalid_argument for m_init outside [r_on, r_off] or a
// degenerate topology.
Grid build_grid(const Topology& topology, const MemristorParams& device_defaults,
                double m_init, double series_r);

// Replaces the bias vector; device states are untouched.
// Throws std::invalid_argument on length mismatch.
void set_bias(Grid& grid, const std::vector<double>& volts);

struct Interval {
    double lo = 1.0;
    double hi = 1.0;
};

struct FaultSpec {
    double fraction_affected = 0.0;     // of individual memristors, in [0, 1]
    Interval r_on_range{0.5, 4.0};      // multiplier bounds
    Interval r_off_range{0.625, 1.25};
    Interval m_init_range{0.5, 40.0};
    std::uint64_t seed = 0;
};

// Individual memristors are addressed as fuse halves and output devices.
enum class DeviceKind { FuseHalfA, FuseHalfB, Output };

struct FaultRecord {
    DeviceKind kind;
    int index;  // fuse index for halves, node index for outputs
    double r_on_mult;
    double r_off_mult;
    double m_init_mult;
};

struct FaultMap {
    std::vector<FaultRecord> records;  // sorted by device enumeration order

    std::string to_csv(const Grid& grid) const;
};

// Perturbs a uniformly random subset of round(fraction * device_count)
// individual memristors: r_on, r_off, and the device's current memristance
// are each scaled by an independent uniform draw, then the state is
// recomputed from the perturbed memristance (clamped into the perturbed
// [r_on, r_off]). Deterministic for a given seed. Throws std::runtime_error
// if a perturbation produces r_on >= r_off.
FaultMap inject_faults(Grid& grid, const FaultSpec& spec);

// Total number of individual memristors: 2 per fuse plus the output devices.
int device_count(const Grid& grid);

// Recomputes the baseline memristances from the current device states.
void reset_baseline(Grid& grid);

}  // namespace opl
