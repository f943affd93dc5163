#include <doctest.h>

#include "opl/config.hpp"

using namespace opl;

TEST_CASE("defaults are self-consistent") {
    CHECK_NOTHROW(ExperimentConfig::defaults().validate());
    CHECK_NOTHROW(ExperimentConfig::single_node_defaults().validate());
    CHECK_NOTHROW(ExperimentConfig::light_defaults().validate());
    CHECK_NOTHROW(ExperimentConfig::fault_defaults().validate());
    CHECK(ExperimentConfig::fault_defaults().fuse_majority.relative);
    CHECK_FALSE(ExperimentConfig::defaults().output_grounded);
    CHECK(ExperimentConfig::defaults().device.window.kind == WindowKind::Biolek);
    CHECK(ExperimentConfig::single_node_defaults().device.window.kind ==
          WindowKind::Prodromakis);
    CHECK(ExperimentConfig::defaults().device.mobility == default_grid_mobility());
    CHECK(ExperimentConfig::single_node_defaults().device.mobility == calibrated_mobility());
}

TEST_CASE("parser reads keys, comments, and blank lines") {
    const std::string text =
        "# run setup\n"
        "topology.kind = rectangular\n"
        "topology.width = 32\n"
        "\n"
        "device.r_on = 120.5   # inline comment\n"
        "device.window = prodromakis\n"
        "device.window_p = 1.5\n"
        "edges.scheme = output_band\n"
        "edges.per_half = true\n"
        "seed = 77\n";
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.topology_kind == TopologyKind::Rectangular);
    CHECK(cfg.width == 32);
    CHECK(cfg.height == 64);  // untouched default
    CHECK(cfg.device.r_on == 120.5);
    CHECK(cfg.device.window.kind == WindowKind::Prodromakis);
    CHECK(cfg.device.window.p == 1.5);
    CHECK(cfg.edge_scheme == "output_band");
    CHECK(cfg.fuse_majority.per_half);
    CHECK(cfg.seed == 77);
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse_config("no equals sign here\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("unknown.key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("device.r_on = banana\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("device.r_on = 1.5x\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("edges.per_half = maybe\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("topology.kind = triangular\n"), std::invalid_argument);
}

TEST_CASE("serialize/parse round trip preserves every field") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.topology_kind = TopologyKind::Rectangular;
    cfg.width = 48;
    cfg.height = 40;
    cfg.device.r_on = 101.25;
    cfg.device.mobility = 3.25e-14;
    cfg.device.window = WindowFunction::prodromakis(1.25, 0.75);
    cfg.m_init = 250.0;
    cfg.series_r = 1250.0;
    cfg.image_source = "synthetic:cartoon";
    cfg.v_max = 0.025;
    cfg.sim.dt = 0.02;
    cfg.sim.t_end = 12.5;
    cfg.edge_scheme = "output_band";
    cfg.output_band = {555.0, 2222.0};
    cfg.fuse_majority = {2750.0, 4, true};
    cfg.noise_sigma = 0.25;
    cfg.light_bright_scale = 1.75;
    cfg.fault_m_init = {0.25, 30.0};
    cfg.output_grounded = true;
    cfg.fuse_majority.relative = true;
    cfg.seed = 424242;

    const ExperimentConfig back = parse_config(cfg.serialize());
    CHECK(back.serialize() == cfg.serialize());
    CHECK(back.device.mobility == cfg.device.mobility);
    CHECK(back.fuse_majority.per_half == cfg.fuse_majority.per_half);
    CHECK(back.fuse_majority.relative == cfg.fuse_majority.relative);
    CHECK(back.output_grounded == cfg.output_grounded);
    CHECK(back.fault_m_init.hi == cfg.fault_m_init.hi);
}

TEST_CASE("validation catches cross-field violations") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.m_init = 5.0;  // below r_on
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ExperimentConfig::defaults();
    cfg.width = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ExperimentConfig::defaults();
    cfg.noise_sigma = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    // band detection without the grounded output stage is a config error
    cfg = ExperimentConfig::defaults();
    cfg.edge_scheme = "output_band";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.output_grounded = true;
    CHECK_NOTHROW(cfg.validate());
}
