#pragma once

// Procedural 16-level test images: a cartoon-like scene (large flat regions
// with clear outlines plus a fine-detail patch), a cube with three visible
// faces and face patterns at two contrast scales, a two-region step with
// mild texture, and uniform fills.

#include <cstdint>

#include "opl/imaging.hpp"

namespace opl {

GrayImage make_cartoon(int width, int height);
GrayImage make_cube(int width, int height);

// Checkerboard of flat tiles; corner-rich boundaries exercise the
// redundancy of the grid topologies.
GrayImage make_tiles(int width, int height, int tile, std::uint8_t lo, std::uint8_t hi);

// Left half at level_a, right half at level_b, each pixel jittered by an
// integer in [-texture, texture] (seeded, clamped to [0, 15]).
GrayImage make_step(int width, int height, std::uint8_t level_a, std::uint8_t level_b,
                    int texture = 0, std::uint64_t seed = 0);

// Resolves "synthetic:<name>" sources: cartoon, cube, tiles, step, uniform,
// uniform:<level>. Throws std::invalid_argument for an unknown name.
GrayImage make_synthetic(const std::string& name, int width, int height);

}  // namespace opl
