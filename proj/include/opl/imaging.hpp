#pragma once

// 16-level grayscale images, their transcription to node bias voltages and
// back, noise injection, the two memristance-threshold edge detectors,
// Prewitt/Sobel baselines, and comparison metrics. Level 0 is the highest
// light intensity; level 15 is dark and maps to the full bias voltage.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "opl/grid.hpp"

namespace opl {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> levels;  // row-major, each in [0, 15]

    std::uint8_t at(int row, int col) const { return levels[row * width + col]; }
    std::uint8_t& at(int row, int col) { return levels[row * width + col]; }
    int pixel_count() const { return width * height; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

GrayImage make_image(int width, int height, std::uint8_t fill = 0);

// PGM I/O. Written files use maxval 15 (binary P5 by default). Readers
// accept P2/P5 with maxval 15 (native) or 255 (quantized by v/16); other
// maxvals are rejected. Throws std::runtime_error on malformed input.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path, bool binary = true);

struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> flags;  // row-major, 0 or 1

    bool at(int row, int col) const { return flags[row * width + col] != 0; }
    int count() const;

    friend bool operator==(const EdgeMap&, const EdgeMap&) = default;
};

// PBM (P4, 1 = edge) and a PGM rendering (edge pixels dark).
void write_pbm(const EdgeMap& map, const std::filesystem::path& path);
GrayImage render_edges(const EdgeMap& map);

// V(pixel) = v_max * level / 15: level 0 grounds the node, level 15 applies
// the full (dark-pixel) bias.
std::vector<double> transcribe_to_bias(const GrayImage& img, double v_max);

// Inverse map with round-half-away-from-zero, clamped to [0, 15].
GrayImage read_smoothed(const std::vector<double>& voltages, int width, int height, double v_max);

// Additive Gaussian noise on the normalized [0, 1] intensity scale:
// level += round(15 * N(mu, sigma)), clamped. Deterministic under seed.
GrayImage add_gaussian_noise(const GrayImage& img, double mu, double sigma, std::uint64_t seed);

struct OutputBand {
    double lo = 600.0;  // ohms
    double hi = 2000.0;
    // Threshold the change from the device's initial memristance instead of
    // the absolute value; what fault injection leaves intact is each device's
    // transient response, not its starting point.
    bool relative = false;

    void validate() const;
};

struct FuseMajority {
    double threshold = 1600.0;  // ohms, on the fuse total by default
    int min_count = 3;
    bool per_half = false;   // compare each half instead of the series total
    bool relative = false;   // threshold the change from the run's baseline

    void validate() const;
};

// Scheme 1: pixel flagged iff lo <= output-device memristance <= hi (or the
// change from baseline when band.relative is set).
EdgeMap detect_edges_output_band(const Grid& grid, const OutputBand& band);

// Scheme 2: pixel flagged iff at least min_count incident fuses exceed the
// threshold (strictly; change from baseline when spec.relative). Boundary
// nodes are evaluated over their actual incident fuses.
EdgeMap detect_edges_fuse_majority(const Grid& grid, const FuseMajority& spec);

// Conventional 3x3 gradient baselines on the [0, 1]-normalized intensity
// with replicate-edge padding; flag where sqrt(Gx^2 + Gy^2) > threshold.
EdgeMap prewitt(const GrayImage& img, double threshold);
EdgeMap sobel(const GrayImage& img, double threshold);

struct MismatchResult {
    double fraction = 0.0;  // mean |level_a - level_b| / 15
    GrayImage difference;   // per-pixel absolute level difference
};

// Throws std::invalid_argument on dimension mismatch.
MismatchResult intensity_mismatch(const GrayImage& a, const GrayImage& b);

// Intersection over union of the flagged sets; 1.0 when both maps are empty.
// Throws std::invalid_argument on dimension mismatch.
double edge_iou(const EdgeMap& a, const EdgeMap& b);

// Light-condition transform: scales the light intensity (15 - level) by s
// and requantizes, so s > 1 brightens the scene and stretches contrast while
// s < 1 darkens and compresses it.
GrayImage scale_brightness(const GrayImage& img, double s);

}  // namespace opl
