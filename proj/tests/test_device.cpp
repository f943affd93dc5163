#include <doctest.h>

#include <cmath>
#include <random>

#include "opl/device.hpp"

using namespace opl;

namespace {

MemristorParams nominal_params(WindowFunction window = WindowFunction::rectangular()) {
    MemristorParams p;
    p.r_on = 100.0;
    p.r_off = 16000.0;
    p.thickness = 1e-8;
    p.mobility = 1e-14;
    p.window = window;
    return p;
}

}  // namespace

TEST_CASE("memristance hits the doped and undoped limits exactly") {
    const MemristorParams p = nominal_params();
    CHECK(memristance(p, {1.0, +1}) == 100.0);
    CHECK(memristance(p, {0.0, +1}) == 16000.0);
}

TEST_CASE("memristance inversion reproduces the 200-ohm initial state") {
    const MemristorParams p = nominal_params();
    const double x = state_for_memristance(p, 200.0);
    CHECK(x == doctest::Approx(0.99371069182389937).epsilon(1e-14));
    CHECK(memristance(p, {x, +1}) == doctest::Approx(200.0).epsilon(1e-12));
    CHECK_THROWS_AS(state_for_memristance(p, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(state_for_memristance(p, 20000.0), std::invalid_argument);
    CHECK(state_for_memristance(p, 50.0, /*clamp=*/true) == 1.0);
}

TEST_CASE("memristance is monotone decreasing in x and bounded") {
    const MemristorParams p = nominal_params();
    double prev = memristance(p, {0.0, +1});
    for (int k = 1; k <= 100; ++k) {
        const double m = memristance(p, {k / 100.0, +1});
        CHECK(m < prev);
        CHECK(m >= p.r_on);
        CHECK(m <= p.r_off);
        prev = m;
    }
}

TEST_CASE("Biolek window values") {
    const MemristorParams p = nominal_params(WindowFunction::biolek(2.0));
    CHECK(window_value(p, 0.5, 1e-6) == doctest::Approx(0.9375).epsilon(1e-15));
    CHECK(window_value(p, 1.0, 1e-6) == 0.0);   // boundary suppression, positive drift
    CHECK(window_value(p, 0.0, -1e-6) == 0.0);  // and the mirrored boundary
    CHECK(window_value(p, 1.0, -1e-6) == doctest::Approx(1.0));
}

TEST_CASE("Prodromakis window values") {
    const MemristorParams p = nominal_params(WindowFunction::prodromakis(1.0, 1.0));
    CHECK(window_value(p, 0.5, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(window_value(p, 0.0, 1e-6) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(window_value(p, 1.0, 1e-6) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("rectangular window saturates only against the boundary") {
    const MemristorParams p = nominal_params();
    CHECK(window_value(p, 0.5, 1e-6) == 1.0);
    CHECK(window_value(p, 1.0, 1e-6) == 0.0);
    CHECK(window_value(p, 1.0, -1e-6) == 1.0);
    CHECK(window_value(p, 0.0, -1e-6) == 0.0);
    CHECK(window_value(p, 0.0, 1e-6) == 1.0);
}

TEST_CASE("state derivative magnitude and symmetry") {
    const MemristorParams p = nominal_params();
    const MemristorState s{0.5, +1};
    CHECK(state_derivative(p, s, 0.0) == 0.0);
    // drift constant mobility*r_on/thickness^2 = 1e4 per (A s)
    CHECK(state_derivative(p, s, 1e-6) == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(state_derivative(p, s, -1e-6) == doctest::Approx(-1e-2).epsilon(1e-12));
}

TEST_CASE("fuse memristance sums both halves") {
    const MemristorParams p = nominal_params();
    FuseState fuse = make_fuse(p, 200.0);
    CHECK(fuse_memristance(fuse) == doctest::Approx(400.0).epsilon(1e-12));
    CHECK(fuse.a.state.polarity == +1);
    CHECK(fuse.b.state.polarity == -1);

    fuse.a.state.x = 1.0;  // r_on
    fuse.b.state.x = 0.0;  // r_off
    CHECK(fuse_memristance(fuse) == 16100.0);

    // total is symmetric in the halves
    FuseState swapped = fuse;
    std::swap(swapped.a.state.x, swapped.b.state.x);
    CHECK(fuse_memristance(swapped) == fuse_memristance(fuse));
}

TEST_CASE("fuse_step leaves the fuse alone at zero current") {
    const MemristorParams p = nominal_params(WindowFunction::biolek(2.0));
    const FuseState fuse = make_fuse(p, 200.0);
    const FuseState after = fuse_step(fuse, 0.0, 0.5);
    CHECK(after.a.state.x == fuse.a.state.x);
    CHECK(after.b.state.x == fuse.b.state.x);
}

TEST_CASE("fuse polarity invariance over random current waveforms") {
    // Current sign must not matter for the composite: the anti-series halves
    // swap roles, so the total-memristance trajectories coincide.
    for (const WindowFunction window :
         {WindowFunction::rectangular(), WindowFunction::biolek(2.0),
          WindowFunction::prodromakis(1.0, 1.0)}) {
        const MemristorParams p = nominal_params(window);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> amp(-1e-4, 1e-4);
        for (int trial = 0; trial < 20; ++trial) {
            FuseState pos = make_fuse(p, 200.0);
            FuseState neg = pos;
            for (int k = 0; k < 200; ++k) {
                const double i = amp(rng);
                pos = fuse_step(pos, i, 0.01);
                neg = fuse_step(neg, -i, 0.01);
                const double m_pos = fuse_memristance(pos);
                const double m_neg = fuse_memristance(neg);
                CHECK(std::abs(m_pos - m_neg) <= 1e-12 * m_pos);
            }
        }
    }
}

TEST_CASE("rectangular-window drifts cancel while both halves stay interior") {
    const MemristorParams p = nominal_params();
    FuseState fuse = make_fuse(p, 8000.0);  // mid-range, far from both rails
    const double m0 = fuse_memristance(fuse);
    for (int k = 0; k < 10000; ++k) {
        fuse = fuse_step(fuse, 5e-7, 0.001);  // total drift ~0.05 in x
    }
    CHECK(fuse.a.state.x > 0.0);
    CHECK(fuse.a.state.x < 1.0);
    CHECK(fuse.b.state.x > 0.0);
    CHECK(fuse.b.state.x < 1.0);
    CHECK(std::abs(fuse_memristance(fuse) - m0) <= 1e-9 * m0);
}

TEST_CASE("near-LRS fuse drifts toward HRS under either current sign") {
    for (const WindowFunction window :
         {WindowFunction::biolek(2.0), WindowFunction::prodromakis(1.0, 1.0)}) {
        const MemristorParams p = nominal_params(window);
        for (const double sign : {1.0, -1.0}) {
            FuseState fuse = make_fuse(p, 200.0);
            double prev = fuse_memristance(fuse);
            for (int k = 0; k < 500; ++k) {
                fuse = fuse_step(fuse, sign * 5e-5, 0.01);
                const double m = fuse_memristance(fuse);
                CHECK(m >= prev - 1e-12 * prev);
                prev = m;
            }
            CHECK(prev > 400.0);  // strictly increased overall
        }
    }
}

TEST_CASE("state stays in [0,1] for every window under violent drive") {
    for (const WindowFunction window :
         {WindowFunction::rectangular(), WindowFunction::biolek(1.0),
          WindowFunction::prodromakis(2.0, 2.0)}) {
        const MemristorParams p = nominal_params(window);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> amp(-1e-2, 1e-2);
        FuseState fuse = make_fuse(p, 400.0);
        for (int k = 0; k < 2000; ++k) {
            fuse = fuse_step(fuse, amp(rng), 0.05);
            for (const MemristorState& s : {fuse.a.state, fuse.b.state}) {
                CHECK(s.x >= 0.0);
                CHECK(s.x <= 1.0);
            }
        }
    }
}

TEST_CASE("parameter validation rejects broken configurations") {
    MemristorParams p = nominal_params();
    CHECK_NOTHROW(validate(p));
    p.r_on = 20000.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p = nominal_params();
    p.thickness = 0.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p = nominal_params(WindowFunction::biolek(1.5));
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p = nominal_params(WindowFunction::prodromakis(0.0, 1.0));
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
}
