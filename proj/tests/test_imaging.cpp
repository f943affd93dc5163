#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "opl/imaging.hpp"
#include "opl/synthetic.hpp"

using namespace opl;

namespace {

MemristorParams nominal_params() {
    MemristorParams p;
    p.r_on = 100.0;
    p.r_off = 16000.0;
    p.window = WindowFunction::biolek(2.0);
    return p;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("transcription anchors and linear interpolation") {
    GrayImage img = make_image(4, 1);
    img.levels = {0, 5, 10, 15};
    const std::vector<double> bias = transcribe_to_bias(img, 0.030);
    CHECK(bias[0] == 0.0);
    CHECK(bias[1] == doctest::Approx(0.010).epsilon(1e-12));
    CHECK(bias[2] == doctest::Approx(0.020).epsilon(1e-12));
    CHECK(bias[3] == doctest::Approx(0.030).epsilon(1e-12));
}

TEST_CASE("transcription round-trips exactly on all 16 levels") {
    GrayImage img = make_image(16, 1);
    for (int c = 0; c < 16; ++c) img.at(0, c) = static_cast<std::uint8_t>(c);
    const GrayImage back = read_smoothed(transcribe_to_bias(img, 0.030), 16, 1, 0.030);
    CHECK(back == img);
}

TEST_CASE("readback rounds half away from zero and clamps") {
    // 21.9 mV on the 30 mV scale sits at 10.95 -> level 11
    const GrayImage img = read_smoothed({0.0219, -0.001, 0.045}, 3, 1, 0.030);
    CHECK(img.at(0, 0) == 11);
    CHECK(img.at(0, 1) == 0);
    CHECK(img.at(0, 2) == 15);
}

TEST_CASE("gaussian noise: identity, determinism, sample spread") {
    const GrayImage img = make_image(64, 64, 8);
    CHECK(add_gaussian_noise(img, 0.0, 0.0, 3) == img);
    const GrayImage a = add_gaussian_noise(img, 0.0, 0.3, 3);
    const GrayImage b = add_gaussian_noise(img, 0.0, 0.3, 3);
    CHECK(a == b);
    CHECK_FALSE(a == add_gaussian_noise(img, 0.0, 0.3, 4));

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < img.levels.size(); ++i) {
        const double d = (double(a.levels[i]) - double(img.levels[i])) / 15.0;
        sum += d;
        sum_sq += d * d;
    }
    const double n = double(img.levels.size());
    const double sd = std::sqrt(sum_sq / n - (sum / n) * (sum / n));
    CHECK(sd > 0.27);  // clamping at the rails eats a little of the spread
    CHECK(sd < 0.33);
}

TEST_CASE("pgm round trip in both encodings") {
    GrayImage img = make_cartoon(24, 18);
    const auto p5 = temp_file("opl_test_p5.pgm");
    const auto p2 = temp_file("opl_test_p2.pgm");
    write_pgm(img, p5, true);
    write_pgm(img, p2, false);
    CHECK(read_pgm(p5) == img);
    CHECK(read_pgm(p2) == img);
    std::filesystem::remove(p5);
    std::filesystem::remove(p2);
}

TEST_CASE("pgm reader quantizes maxval-255 input and rejects junk") {
    const auto path = temp_file("opl_test_255.pgm");
    {
        std::ofstream out(path);
        out << "P2\n# comment line\n2 2\n255\n0 31 128 255\n";
    }
    const GrayImage img = read_pgm(path);
    CHECK(img.at(0, 0) == 0);
    CHECK(img.at(0, 1) == 1);   // floor(31/16)
    CHECK(img.at(1, 0) == 8);
    CHECK(img.at(1, 1) == 15);
    std::filesystem::remove(path);

    const auto bad = temp_file("opl_test_bad.pgm");
    {
        std::ofstream out(bad);
        out << "P3\n2 2\n15\n0 0 0 0\n";
    }
    CHECK_THROWS_AS(read_pgm(bad), std::runtime_error);
    std::filesystem::remove(bad);
    CHECK_THROWS_AS(read_pgm(temp_file("opl_no_such_file.pgm")), std::runtime_error);
}

TEST_CASE("pbm output packs rows most-significant-bit first") {
    EdgeMap map{9, 2, {}};
    map.flags.assign(18, 0);
    map.flags[0] = 1;   // (0,0)
    map.flags[8] = 1;   // (0,8)
    map.flags[17] = 1;  // (1,8)
    const auto path = temp_file("opl_test.pbm");
    write_pbm(map, path);
    std::ifstream in(path, std::ios::binary);
    std::string header;
    std::getline(in, header);
    CHECK(header == "P4");
    std::getline(in, header);
    CHECK(header == "9 2");
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    CHECK(bytes[0] == 0x80);
    CHECK(bytes[1] == 0x80);
    CHECK(bytes[2] == 0x00);
    CHECK(bytes[3] == 0x80);
    std::filesystem::remove(path);
}

TEST_CASE("output-band detector on fresh and saturated grids") {
    Grid grid = build_grid({TopologyKind::Hexagonal, 4, 4}, nominal_params(), 200.0, 1000.0);
    const EdgeMap none = detect_edges_output_band(grid, {600.0, 2000.0});
    CHECK(none.count() == 0);
    const EdgeMap all = detect_edges_output_band(grid, {100.0, 16000.0});
    CHECK(all.count() == grid.node_count());

    // membership is inclusive on both ends: a band degenerate at the exact
    // device memristance still flags it
    grid.output_devices[3].state.x = 0.75;
    const double m3 = memristance(grid.output_devices[3].params, grid.output_devices[3].state);
    const EdgeMap lo_edge = detect_edges_output_band(grid, {m3, m3 + 1.0});
    const EdgeMap hi_edge = detect_edges_output_band(grid, {m3 - 1.0, m3});
    CHECK(lo_edge.flags[3] == 1);
    CHECK(hi_edge.flags[3] == 1);
    CHECK(lo_edge.count() == 1);
}

TEST_CASE("fuse-majority detector: fresh grid, impossible bound, boundary nodes") {
    Grid grid = build_grid({TopologyKind::Hexagonal, 5, 5}, nominal_params(), 200.0, 1000.0);
    CHECK(detect_edges_fuse_majority(grid, {1600.0, 3, false}).count() == 0);
    // every fuse exceeds a bound below 2*r_on, so min_count 1 flags everything
    CHECK(detect_edges_fuse_majority(grid, {150.0, 1, false}).count() == grid.node_count());

    // boundary nodes are evaluated over their actual incident fuses: the
    // (0,0) corner has only two, so min_count 3 can never flag it
    const EdgeMap map = detect_edges_fuse_majority(grid, {150.0, 3, false});
    CHECK_FALSE(map.at(0, 0));
    CHECK(map.at(0, 2));  // three incident fuses on this boundary node
    CHECK(map.at(2, 2));

    const EdgeMap six = detect_edges_fuse_majority(grid, {150.0, 6, false});
    CHECK_FALSE(six.at(0, 2));
    CHECK(six.at(2, 2));  // interior keeps all six
}

TEST_CASE("per-half fuse thresholding counts each device") {
    Grid grid = build_grid({TopologyKind::Hexagonal, 4, 4}, nominal_params(), 200.0, 1000.0);
    // totals are 400 but each half is 200: a 150-ohm per-half bound flags all
    CHECK(detect_edges_fuse_majority(grid, {150.0, 3, true}).count() == grid.node_count());
    CHECK(detect_edges_fuse_majority(grid, {250.0, 3, true}).count() == 0);
}

TEST_CASE("both detectors are monotone in their thresholds") {
    std::mt19937_64 rng(17);
    Grid grid = build_grid({TopologyKind::Hexagonal, 6, 6}, nominal_params(), 200.0, 1000.0);
    std::uniform_real_distribution<double> m_draw(200.0, 16000.0);
    std::uniform_real_distribution<double> fuse_draw(0.0, 1.0);
    for (Memristor& d : grid.output_devices) {
        d.state.x = state_for_memristance(d.params, m_draw(rng));
    }
    for (FuseBranch& f : grid.fuses) {
        f.fuse.a.state.x = fuse_draw(rng);
        f.fuse.b.state.x = fuse_draw(rng);
    }

    for (int trial = 0; trial < 20; ++trial) {
        const double t1 = m_draw(rng), t2 = m_draw(rng);
        const double lo = std::min(t1, t2), hi = std::max(t1, t2);
        // raising the fuse threshold never adds pixels
        const EdgeMap loose = detect_edges_fuse_majority(grid, {lo, 3, false});
        const EdgeMap tight = detect_edges_fuse_majority(grid, {hi, 3, false});
        for (std::size_t i = 0; i < loose.flags.size(); ++i) {
            CHECK(tight.flags[i] <= loose.flags[i]);
        }
        // widening the band never removes pixels
        const EdgeMap narrow = detect_edges_output_band(grid, {lo + 1.0, hi - 1.0});
        const EdgeMap wide = detect_edges_output_band(grid, {lo, hi});
        for (std::size_t i = 0; i < narrow.flags.size(); ++i) {
            CHECK(narrow.flags[i] <= wide.flags[i]);
        }
    }
}

TEST_CASE("prewitt and sobel on a hand-convolved vertical step") {
    GrayImage img = make_image(5, 5, 0);
    for (int r = 0; r < 5; ++r) {
        for (int c = 2; c < 5; ++c) img.at(r, c) = 15;
    }
    // columns adjacent to the step respond with |Gx| = 3 (prewitt) or 4
    // (sobel) on the [0,1] scale; everything else is flat
    const EdgeMap p = prewitt(img, 0.5);
    const EdgeMap s = sobel(img, 0.5);
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) {
            const bool expect = (c == 1 || c == 2);
            CHECK(p.at(r, c) == expect);
            CHECK(s.at(r, c) == expect);
        }
    }
    // kernel algebra: prewitt at t equals sobel at t*4/3 on axis-aligned steps
    const EdgeMap p_scaled = prewitt(img, 1.5);
    const EdgeMap s_scaled = sobel(img, 2.0);
    CHECK(p_scaled == s_scaled);

    CHECK(prewitt(make_image(5, 5, 7), 0.01).count() == 0);  // uniform image
}

TEST_CASE("intensity mismatch and its difference image") {
    GrayImage a = make_image(3, 2, 0);
    CHECK(intensity_mismatch(a, a).fraction == 0.0);
    const GrayImage dark = make_image(3, 2, 15);
    const MismatchResult full = intensity_mismatch(a, dark);
    CHECK(full.fraction == doctest::Approx(1.0));
    CHECK(full.difference.at(0, 0) == 15);
    CHECK_THROWS_AS(intensity_mismatch(a, make_image(2, 2, 0)), std::invalid_argument);
}

TEST_CASE("edge IoU set arithmetic") {
    EdgeMap a{4, 1, {1, 1, 0, 0}};
    EdgeMap b{4, 1, {1, 1, 1, 1}};
    EdgeMap c{4, 1, {0, 0, 1, 1}};
    EdgeMap empty{4, 1, {0, 0, 0, 0}};
    CHECK(edge_iou(a, a) == 1.0);
    CHECK(edge_iou(a, b) == doctest::Approx(0.5));  // subset of half the size
    CHECK(edge_iou(a, c) == 0.0);                   // disjoint
    CHECK(edge_iou(empty, empty) == 1.0);
    CHECK_THROWS_AS(edge_iou(a, EdgeMap{2, 1, {0, 0}}), std::invalid_argument);
}

TEST_CASE("brightness scaling stretches or compresses contrast") {
    GrayImage img = make_image(3, 1);
    img.levels = {7, 11, 15};
    const GrayImage brighter = scale_brightness(img, 2.0);
    // light intensity doubles: 8->16 (clamped to 15), 4->8, 0->0
    CHECK(brighter.levels[0] == 0);
    CHECK(brighter.levels[1] == 7);
    CHECK(brighter.levels[2] == 15);
    const GrayImage darker = scale_brightness(img, 0.5);
    CHECK(darker.levels[0] == 11);
    CHECK(darker.levels[1] == 13);
    CHECK(darker.levels[2] == 15);
    // blacks stay black under any scale
    CHECK(scale_brightness(img, 3.7).levels[2] == 15);
}

TEST_CASE("synthetic images are in range and carry their structure") {
    const GrayImage cartoon = make_cartoon(64, 64);
    const GrayImage cube = make_cube(64, 64);
    for (std::uint8_t v : cartoon.levels) CHECK(v <= 15);
    for (std::uint8_t v : cube.levels) CHECK(v <= 15);
    CHECK(cartoon.at(0, 0) == 5);  // mid-range background
    CHECK(cube.at(0, 0) == 0);

    const GrayImage step = make_step(16, 8, 3, 12, 1, 7);
    double left = 0.0, right = 0.0;
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) left += step.at(r, c);
        for (int c = 8; c < 16; ++c) right += step.at(r, c);
    }
    CHECK(right / 64.0 - left / 64.0 > 7.0);

    CHECK(make_synthetic("uniform:5", 8, 8).at(3, 3) == 5);
    CHECK_THROWS_AS(make_synthetic("nope", 8, 8), std::invalid_argument);
}

TEST_CASE("relative fuse thresholding measures change from the baseline") {
    Grid grid = build_grid({TopologyKind::Hexagonal, 4, 4}, nominal_params(), 200.0, 1000.0);
    // absolute mode sees the raised starting point, relative mode does not
    for (FuseBranch& f : grid.fuses) {
        f.fuse.a.state.x = state_for_memristance(f.fuse.a.params, 3000.0);
    }
    reset_baseline(grid);
    CHECK(detect_edges_fuse_majority(grid, {3000.0, 1, false, false}).count() ==
          grid.node_count());
    CHECK(detect_edges_fuse_majority(grid, {100.0, 1, false, true}).count() == 0);

    // drift one fuse by 500 ohms: only the relative map notices it against a
    // threshold below the starting point
    grid.fuses[0].fuse.b.state.x =
        state_for_memristance(grid.fuses[0].fuse.b.params, 700.0);
    const EdgeMap rel = detect_edges_fuse_majority(grid, {400.0, 1, false, true});
    CHECK(rel.count() == 2);  // both endpoints of the drifted fuse
    CHECK(rel.at(grid.fuses[0].a.row, grid.fuses[0].a.col));

    // relative output band
    Grid loaded = build_grid({TopologyKind::Hexagonal, 3, 3}, nominal_params(), 200.0, 1000.0);
    loaded.output_devices[4].state.x =
        state_for_memristance(loaded.output_devices[4].params, 1500.0);
    const EdgeMap band = detect_edges_output_band(loaded, {1000.0, 2000.0, true});
    CHECK(band.count() == 1);
    CHECK(band.at(1, 1));
}

TEST_CASE("tiles synthetic alternates flat squares") {
    const GrayImage tiles = make_tiles(16, 16, 4, 0, 12);
    CHECK(tiles.at(0, 0) == 0);
    CHECK(tiles.at(0, 4) == 12);
    CHECK(tiles.at(4, 0) == 12);
    CHECK(tiles.at(4, 4) == 0);
    CHECK(make_synthetic("tiles", 32, 32).width == 32);
}
