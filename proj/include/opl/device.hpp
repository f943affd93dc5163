#pragma once

// Memristor device law and the anti-series memristive fuse.
//
// The device follows the linear-ionic-drift model: memristance moves
// between r_on (fully doped, x = 1) and r_off (undoped, x = 0) as charge
// flows, with a window function suppressing drift near the state
// boundaries. A fuse is two such devices in series with opposing
// polarities, which removes the polarity dependence of the composite.

#include <stdexcept>

namespace opl {

enum class WindowKind {
    Rectangular,  // hard saturation only
    Biolek,       // 1 - (x - stp(-i))^(2p)
    Prodromakis   // j * (1 - ((x - 0.5)^2 + 0.75)^p)
};

struct WindowFunction {
    WindowKind kind = WindowKind::Biolek;
    double p = 2.0;  // Biolek: positive integer; Prodromakis: positive real
    double j = 1.0;  // Prodromakis scale, unused otherwise

    static WindowFunction rectangular() { return {WindowKind::Rectangular, 0.0, 0.0}; }
    static WindowFunction biolek(double p) { return {WindowKind::Biolek, p, 0.0}; }
    static WindowFunction prodromakis(double p, double j) { return {WindowKind::Prodromakis, p, j}; }
};

struct MemristorParams {
    double r_on = 100.0;        // ohms, low-resistive state
    double r_off = 16000.0;     // ohms, high-resistive state
    double thickness = 1e-8;    // m, active-region thickness
    double mobility = 1e-14;    // m^2 V^-1 s^-1, dopant mobility
    WindowFunction window{};
};

// Throws std::invalid_argument if the parameter invariants are violated.
void validate(const MemristorParams& params);

struct MemristorState {
    double x = 0.0;     // normalized doped-region width, in [0, 1]
    int polarity = +1;  // +1 or -1, maps branch current to drift direction
};

struct Memristor {
    MemristorParams params;
    MemristorState state;
};

// M(x) = r_on * x + r_off * (1 - x); monotone decreasing in x.
double memristance(const MemristorParams& params, const MemristorState& state);

// Inverse of the memristance law. `m` outside [r_on, r_off] is clamped when
// `clamp` is true, otherwise rejected with std::invalid_argument.
double state_for_memristance(const MemristorParams& params, double m, bool clamp = false);

// Drift suppression factor for state x under (direction-resolved) current i.
double window_value(const MemristorParams& params, double x, double i);

// dx/dt = polarity * (mobility * r_on / thickness^2) * i * window.
double state_derivative(const MemristorParams& params, const MemristorState& state, double i);

// One explicit Euler step of a single device; state clamped to [0, 1].
void advance(Memristor& device, double i, double dt);

// Two devices of opposing polarity sharing one branch current. Halves start
// from identical nominal parameters; fault injection may perturb them apart.
struct FuseState {
    Memristor a;  // polarity +1
    Memristor b;  // polarity -1
};

// Builds a fuse with both halves at the state solving M(x) = m_init.
FuseState make_fuse(const MemristorParams& params, double m_init);

// Series total of both halves; in [r_on_a + r_on_b, r_off_a + r_off_b].
double fuse_memristance(const FuseState& fuse);

// Advances both halves by one explicit Euler step with the same current.
FuseState fuse_step(FuseState fuse, double i, double dt);

}  // namespace opl
