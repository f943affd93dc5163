#pragma once

// Transient simulation by operator splitting: at each step the node
// voltages are solved from a sparse SPD nodal-analysis system with the
// memristances frozen, then every device state is advanced explicitly from
// the resulting branch currents. State dynamics are seconds-scale while the
// resistive network settles instantaneously, so no coupled nonlinear solve
// is needed.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <string>
#include <vector>

#include "opl/grid.hpp"

namespace opl {

struct SimConfig {
    double dt = 0.01;              // s
    double t_end = 30.0;           // s
    double max_dx_per_step = 0.01; // state-change clamp triggering dt subdivision
    double linear_tol = 1e-10;     // relative residual tolerance
    double record_every = 0.5;     // s, trace subsampling

    void validate() const;
};

struct LinearSystem {
    Eigen::SparseMatrix<double> conductance;  // SPD, ground eliminated
    Eigen::VectorXd injection;
};

// Reduced nodal analysis with the ground node eliminated. Each fuse is one
// branch of resistance M_a + M_b; the series resistor and the output device
// are branches to ground. Throws std::domain_error on a nonpositive
// memristance.
LinearSystem assemble_system(const Grid& grid);

// Direct sparse Cholesky solve with one iterative-refinement pass; checks
// ||G v - b||_inf <= tol * ||b||_inf and throws std::runtime_error (carrying
// the residual) otherwise.
Eigen::VectorXd solve_voltages(const LinearSystem& system, double tol = 1e-10);

// Largest per-node relative violation of the weighted-average form of the
// nodal equations, recomputed independently from branch memristances and
// neighbor voltages. This is the continuous regression check for the solve.
double weighted_average_error(const Grid& grid, const Eigen::VectorXd& v);

struct TraceSet {
    std::vector<double> times;
    std::vector<std::vector<double>> node_voltages;        // per time, node-major
    std::vector<std::vector<double>> fuse_memristances;    // per time, fuse order
    std::vector<std::vector<double>> output_memristances;  // per time, node-major
    double max_identity_error = 0.0;  // weighted-average check over all records

    std::string node_voltages_csv(const Grid& grid) const;
    std::string fuse_memristances_csv(const Grid& grid) const;
    std::string output_memristances_csv(const Grid& grid) const;
};

// One operator-splitting cycle: solve voltages, advance all device states by
// config.dt (internally subdivided so no single explicit increment moves any
// state by more than max_dx_per_step; voltages stay frozen within the
// cycle). Returns the voltages the states were advanced with.
Eigen::VectorXd step(Grid& grid, const SimConfig& config);

// Runs until t_end. Records at t = 0, every record_every seconds, and the
// final instant; each record holds voltages and memristances of the same
// instant. Deterministic for identical inputs.
TraceSet run(Grid& grid, const SimConfig& config);

// Incremental form of run() for callers that act on intermediate states:
// keeps the symbolic factorization across steps.
class Simulator {
  public:
    Simulator(Grid& grid, const SimConfig& config);

    // Advances one dt; returns the voltages used for the state update.
    const Eigen::VectorXd& advance();

    // Voltages consistent with the current (post-advance) device states.
    const Eigen::VectorXd& solve_now();

    double time() const { return time_; }
    Grid& grid() { return grid_; }

  private:
    Eigen::VectorXd solve_current();

    Grid& grid_;
    SimConfig config_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> cholesky_;
    bool analyzed_ = false;
    Eigen::VectorXd voltages_;
    double time_ = 0.0;
};

// Power delivered by all bias sources at the solved operating point;
// nonnegative for any resistive network.
double source_power(const Grid& grid, const Eigen::VectorXd& v);

}  // namespace opl
