#include "opl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace opl {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("sim config: dt must be positive");
    if (t_end < 0.0) throw std::invalid_argument("sim config: t_end must be nonnegative");
    if (!(max_dx_per_step > 0.0 && max_dx_per_step < 1.0)) {
        throw std::invalid_argument("sim config: max_dx_per_step must be in (0, 1)");
    }
    if (!(linear_tol > 0.0)) throw std::invalid_argument("sim config: linear_tol must be positive");
    if (!(record_every > 0.0)) {
        throw std::invalid_argument("sim config: record_every must be positive");
    }
}

LinearSystem assemble_system(const Grid& grid) {
    const int n = grid.node_count();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(4 * grid.fuses.size() + 2 * n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);

    for (int i = 0; i < n; ++i) {
        if (!(grid.series_r[i] > 0.0)) {
            throw std::domain_error("assemble_system: nonpositive series resistance");
        }
        double diag = 1.0 / grid.series_r[i];
        b[i] = grid.bias[i] / grid.series_r[i];
        if (!grid.output_devices.empty()) {
            const Memristor& out = grid.output_devices[i];
            const double m = memristance(out.params, out.state);
            if (!(m > 0.0)) throw std::domain_error("assemble_system: nonpositive memristance");
            diag += 1.0 / m;
        }
        triplets.emplace_back(i, i, diag);
    }

    for (const FuseBranch& branch : grid.fuses) {
        const double m = fuse_memristance(branch.fuse);
        if (!(m > 0.0)) throw std::domain_error("assemble_system: nonpositive memristance");
        const double g = 1.0 / m;
        const int ia = grid.node_index(branch.a);
        const int ib = grid.node_index(branch.b);
        triplets.emplace_back(ia, ia, g);
        triplets.emplace_back(ib, ib, g);
        triplets.emplace_back(ia, ib, -g);
        triplets.emplace_back(ib, ia, -g);
    }

    LinearSystem system;
    system.conductance.resize(n, n);
    system.conductance.setFromTriplets(triplets.begin(), triplets.end());
    system.injection = std::move(b);
    return system;
}

namespace {

void check_residual(const LinearSystem& system, const Eigen::VectorXd& v, double tol) {
    const double b_norm = system.injection.lpNorm<Eigen::Infinity>();
    const double residual =
        (system.conductance * v - system.injection).lpNorm<Eigen::Infinity>();
    if (residual > tol * std::max(b_norm, std::numeric_limits<double>::min())) {
        throw std::runtime_error("solve_voltages: residual " + std::to_string(residual) +
                                 " exceeds tolerance");
    }
}

}  // namespace

Eigen::VectorXd solve_voltages(const LinearSystem& system, double tol) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(system.conductance);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("solve_voltages: Cholesky factorization failed");
    }
    Eigen::VectorXd v = llt.solve(system.injection);
    v += llt.solve(system.injection - system.conductance * v);
    check_residual(system, v, tol);
    return v;
}

double weighted_average_error(const Grid& grid, const Eigen::VectorXd& v) {
    const int n = grid.node_count();
    std::vector<double> num(n, 0.0), den(n, 0.0);
    for (int i = 0; i < n; ++i) {
        num[i] = grid.bias[i] / grid.series_r[i];
        den[i] = 1.0 / grid.series_r[i];
        if (!grid.output_devices.empty()) {
            const Memristor& out = grid.output_devices[i];
            den[i] += 1.0 / memristance(out.params, out.state);
        }
    }
    for (const FuseBranch& branch : grid.fuses) {
        const double g = 1.0 / fuse_memristance(branch.fuse);
        const int ia = grid.node_index(branch.a);
        const int ib = grid.node_index(branch.b);
        num[ia] += g * v[ib];
        num[ib] += g * v[ia];
        den[ia] += g;
        den[ib] += g;
    }
    const double scale = std::max(v.lpNorm<Eigen::Infinity>(),
                                  std::numeric_limits<double>::min());
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double expected = num[i] / den[i];
        // relative per node, with an absolute floor at 1e-6 of the voltage
        // scale so nodes far below the solve's precision do not dominate
        const double err = std::abs(v[i] - expected) / std::max(std::abs(expected), 1e-6 * scale);
        worst = std::max(worst, err);
    }
    return worst;
}

double source_power(const Grid& grid, const Eigen::VectorXd& v) {
    double power = 0.0;
    for (int i = 0; i < grid.node_count(); ++i) {
        power += grid.bias[i] * (grid.bias[i] - v[i]) / grid.series_r[i];
    }
    return power;
}

namespace {

// Advances every device state by dt with the node voltages frozen. The step
// is subdivided so no explicit increment exceeds max_dx; branch currents are
// recomputed from the evolving memristances between increments.
void advance_states(Grid& grid, const Eigen::VectorXd& v, double dt, double max_dx) {
    const int n = grid.node_count();
    double remaining = dt;
    while (remaining > 0.0) {
        double max_rate = 0.0;
        std::vector<double> fuse_currents(grid.fuses.size());
        for (std::size_t f = 0; f < grid.fuses.size(); ++f) {
            const FuseBranch& branch = grid.fuses[f];
            const double i = (v[grid.node_index(branch.a)] - v[grid.node_index(branch.b)]) /
                             fuse_memristance(branch.fuse);
            fuse_currents[f] = i;
            const FuseState& fuse = branch.fuse;
            max_rate = std::max(max_rate, std::abs(state_derivative(fuse.a.params, fuse.a.state, i)));
            max_rate = std::max(max_rate, std::abs(state_derivative(fuse.b.params, fuse.b.state, i)));
        }
        std::vector<double> output_currents;
        if (!grid.output_devices.empty()) {
            output_currents.resize(n);
            for (int i = 0; i < n; ++i) {
                const Memristor& out = grid.output_devices[i];
                const double cur = v[i] / memristance(out.params, out.state);
                output_currents[i] = cur;
                max_rate = std::max(max_rate, std::abs(state_derivative(out.params, out.state, cur)));
            }
        }

        double h = remaining;
        if (max_rate * h > max_dx) h = max_dx / max_rate;

        for (std::size_t f = 0; f < grid.fuses.size(); ++f) {
            grid.fuses[f].fuse = fuse_step(grid.fuses[f].fuse, fuse_currents[f], h);
        }
        for (int i = 0; i < n && !grid.output_devices.empty(); ++i) {
            advance(grid.output_devices[i], output_currents[i], h);
        }
        remaining = (h == remaining) ? 0.0 : remaining - h;
    }
}

std::string series_csv(const std::vector<double>& times,
                       const std::vector<std::vector<double>>& rows,
                       const std::vector<std::string>& ids) {
    std::ostringstream out;
    out << "time";
    for (const std::string& id : ids) out << ',' << id;
    out << '\n';
    char buf[32];
    for (std::size_t t = 0; t < times.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "%.12g", times[t]);
        out << buf;
        for (double value : rows[t]) {
            std::snprintf(buf, sizeof(buf), "%.12g", value);
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

std::string node_label(NodeId n) {
    return "n" + std::to_string(n.row) + "_" + std::to_string(n.col);
}

}  // namespace

std::string TraceSet::node_voltages_csv(const Grid& grid) const {
    std::vector<std::string> ids;
    ids.reserve(grid.node_count());
    for (int i = 0; i < grid.node_count(); ++i) ids.push_back(node_label(grid.node_at(i)));
    return series_csv(times, node_voltages, ids);
}

std::string TraceSet::fuse_memristances_csv(const Grid& grid) const {
    std::vector<std::string> ids;
    ids.reserve(grid.fuses.size());
    for (const FuseBranch& f : grid.fuses) {
        ids.push_back("f" + std::to_string(f.a.row) + "_" + std::to_string(f.a.col) + "-" +
                      std::to_string(f.b.row) + "_" + std::to_string(f.b.col));
    }
    return series_csv(times, fuse_memristances, ids);
}

std::string TraceSet::output_memristances_csv(const Grid& grid) const {
    std::vector<std::string> ids;
    ids.reserve(grid.node_count());
    for (int i = 0; i < grid.node_count(); ++i) ids.push_back(node_label(grid.node_at(i)));
    return series_csv(times, output_memristances, ids);
}

Simulator::Simulator(Grid& grid, const SimConfig& config) : grid_(grid), config_(config) {
    config_.validate();
}

Eigen::VectorXd Simulator::solve_current() {
    LinearSystem system = assemble_system(grid_);
    if (!analyzed_) {
        cholesky_.analyzePattern(system.conductance);
        analyzed_ = true;
    }
    cholesky_.factorize(system.conductance);
    if (cholesky_.info() != Eigen::Success) {
        throw std::runtime_error("simulator: Cholesky factorization failed");
    }
    Eigen::VectorXd v = cholesky_.solve(system.injection);
    v += cholesky_.solve(system.injection - system.conductance * v);
    check_residual(system, v, config_.linear_tol);
    return v;
}

const Eigen::VectorXd& Simulator::advance() {
    voltages_ = solve_current();
    advance_states(grid_, voltages_, config_.dt, config_.max_dx_per_step);
    time_ += config_.dt;
    return voltages_;
}

const Eigen::VectorXd& Simulator::solve_now() {
    voltages_ = solve_current();
    return voltages_;
}

Eigen::VectorXd step(Grid& grid, const SimConfig& config) {
    Simulator sim(grid, config);
    return sim.advance();
}

TraceSet run(Grid& grid, const SimConfig& config) {
    config.validate();
    Simulator sim(grid, config);
    const long steps = std::lround(config.t_end / config.dt);
    const long stride = std::max(1L, std::lround(config.record_every / config.dt));

    TraceSet traces;
    auto record = [&](double t, const Eigen::VectorXd& v) {
        traces.times.push_back(t);
        traces.node_voltages.emplace_back(v.data(), v.data() + v.size());
        std::vector<double> fm;
        fm.reserve(grid.fuses.size());
        for (const FuseBranch& f : grid.fuses) fm.push_back(fuse_memristance(f.fuse));
        traces.fuse_memristances.push_back(std::move(fm));
        std::vector<double> om;
        om.reserve(grid.output_devices.size());
        for (const Memristor& d : grid.output_devices) om.push_back(memristance(d.params, d.state));
        traces.output_memristances.push_back(std::move(om));
        traces.max_identity_error =
            std::max(traces.max_identity_error, weighted_average_error(grid, v));
    };

    for (long k = 0; k < steps; ++k) {
        const Eigen::VectorXd& v = sim.solve_now();
        if (k % stride == 0) record(k * config.dt, v);
        advance_states(grid, v, config.dt, config.max_dx_per_step);
    }
    record(steps * config.dt, sim.solve_now());
    return traces;
}

}  // namespace opl
