#include "opl/device.hpp"

#include <algorithm>
#include <cmath>

namespace opl {

void validate(const MemristorParams& params) {
    if (!(params.r_on > 0.0) || !(params.r_on < params.r_off)) {
        throw std::invalid_argument("memristor params: need 0 < r_on < r_off");
    }
    if (!(params.thickness > 0.0) || !(params.mobility > 0.0)) {
        throw std::invalid_argument("memristor params: thickness and mobility must be positive");
    }
    switch (params.window.kind) {
        case WindowKind::Rectangular:
            break;
        case WindowKind::Biolek:
            if (!(params.window.p >= 1.0) || params.window.p != std::floor(params.window.p)) {
                throw std::invalid_argument("Biolek window: p must be a positive integer");
            }
            break;
        case WindowKind::Prodromakis:
            if (!(params.window.p > 0.0) || !(params.window.j > 0.0)) {
                throw std::invalid_argument("Prodromakis window: p and j must be positive");
            }
            break;
    }
}

double memristance(const MemristorParams& params, const MemristorState& state) {
    return params.r_on * state.x + params.r_off * (1.0 - state.x);
}

double state_for_memristance(const MemristorParams& params, double m, bool clamp) {
    if (m < params.r_on || m > params.r_off) {
        if (!clamp) {
            throw std::invalid_argument("memristance outside [r_on, r_off]");
        }
        m = std::clamp(m, params.r_on, params.r_off);
    }
    return (params.r_off - m) / (params.r_off - params.r_on);
}

double window_value(const MemristorParams& params, double x, double i) {
    switch (params.window.kind) {
        case WindowKind::Rectangular:
            if (x >= 1.0 && i > 0.0) return 0.0;
            if (x <= 0.0 && i < 0.0) return 0.0;
            return 1.0;
        case WindowKind::Biolek: {
            // stp(-i): 1 for i <= 0, 0 for i > 0
            const double stp = (i > 0.0) ? 0.0 : 1.0;
            return 1.0 - std::pow(x - stp, 2.0 * params.window.p);
        }
        case WindowKind::Prodromakis: {
            const double u = (x - 0.5) * (x - 0.5) + 0.75;
            return params.window.j * (1.0 - std::pow(u, params.window.p));
        }
    }
    return 0.0;
}

double state_derivative(const MemristorParams& params, const MemristorState& state, double i) {
    const double drift = params.mobility * params.r_on / (params.thickness * params.thickness);
    const double signed_i = state.polarity * i;
    return static_cast<double>(state.polarity) * drift * i *
           window_value(params, state.x, signed_i);
}

void advance(Memristor& device, double i, double dt) {
    const double dx = state_derivative(device.params, device.state, i) * dt;
    device.state.x = std::clamp(device.state.x + dx, 0.0, 1.0);
}

FuseState make_fuse(const MemristorParams& params, double m_init) {
    const double x = state_for_memristance(params, m_init);
    FuseState fuse;
    fuse.a = Memristor{params, MemristorState{x, +1}};
    fuse.b = Memristor{params, MemristorState{x, -1}};
    return fuse;
}

double fuse_memristance(const FuseState& fuse) {
    return memristance(fuse.a.params, fuse.a.state) + memristance(fuse.b.params, fuse.b.state);
}

FuseState fuse_step(FuseState fuse, double i, double dt) {
    advance(fuse.a, i, dt);
    advance(fuse.b, i, dt);
    return fuse;
}

}  // namespace opl
