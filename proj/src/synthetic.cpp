#include "opl/synthetic.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace opl {

namespace {

void fill_rect(GrayImage& img, int r0, int r1, int c0, int c1, std::uint8_t level) {
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, img.height);
    c1 = std::min(c1, img.width);
    for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) img.at(r, c) = level;
    }
}

}  // namespace

GrayImage make_cartoon(int width, int height) {
    if (width < 16 || height < 16) {
        throw std::invalid_argument("make_cartoon: raster too small");
    }
    // Mid-range tones keep additive noise roughly symmetric under clamping.
    GrayImage img = make_image(width, height, 5);
    const auto x = [&](double f) { return static_cast<int>(f * width); };
    const auto y = [&](double f) { return static_cast<int>(f * height); };

    // house body with two windows
    fill_rect(img, y(0.45), y(0.88), x(0.12), x(0.55), 12);
    fill_rect(img, y(0.55), y(0.68), x(0.18), x(0.28), 7);
    fill_rect(img, y(0.55), y(0.68), x(0.38), x(0.48), 7);
    // roof triangle
    const int roof_top = y(0.20), roof_base = y(0.45);
    const int apex = x(0.335);
    for (int r = roof_top; r < roof_base; ++r) {
        const double t = double(r - roof_top) / std::max(1, roof_base - roof_top);
        const int half = static_cast<int>(t * (x(0.55) - x(0.12)) / 2.0);
        fill_rect(img, r, r + 1, apex - half, apex + half + 1, 8);
    }
    // sun disk
    const int sr = y(0.18), sc = x(0.80), rad = std::min(width, height) / 10;
    for (int r = sr - rad; r <= sr + rad; ++r) {
        for (int c = sc - rad; c <= sc + rad; ++c) {
            if (r < 0 || r >= height || c < 0 || c >= width) continue;
            if ((r - sr) * (r - sr) + (c - sc) * (c - sc) <= rad * rad) img.at(r, c) = 7;
        }
    }
    // fine-detail patch: low-contrast hatching on a mid base
    const int pr0 = y(0.62), pr1 = y(0.92), pc0 = x(0.64), pc1 = x(0.95);
    fill_rect(img, pr0, pr1, pc0, pc1, 6);
    for (int r = pr0; r < pr1; ++r) {
        for (int c = pc0; c < pc1; ++c) {
            if ((r + c) % 3 == 0) img.at(r, c) = 7;
        }
    }
    // a few isolated darker specks inside the patch
    for (int r = pr0 + 2; r < pr1 - 1; r += 5) {
        for (int c = pc0 + 2; c < pc1 - 1; c += 7) img.at(r, c) = 8;
    }
    return img;
}

GrayImage make_cube(int width, int height) {
    if (width < 16 || height < 16) {
        throw std::invalid_argument("make_cube: raster too small");
    }
    GrayImage img = make_image(width, height, 0);
    const int lo_r = height / 8, hi_r = height - height / 8;
    const int lo_c = width / 8, hi_c = width - width / 8;
    const int top_split = lo_r + (hi_r - lo_r) * 3 / 10;
    const int mid_c = (lo_c + hi_c) / 2;

    // top face: tapered trapezoid, lightest tone
    for (int r = lo_r; r < top_split; ++r) {
        const int taper = top_split - 1 - r;
        fill_rect(img, r, r + 1, lo_c + taper, hi_c - taper, 8);
    }
    // two front faces, darker tones
    fill_rect(img, top_split, hi_r, lo_c, mid_c, 12);
    fill_rect(img, top_split, hi_r, mid_c, hi_c, 15);

    // top-face sticker grid: two-pixel lines at clear contrast to the face
    const int t_h = top_split - lo_r;
    for (int k = 1; k <= 2; ++k) {
        const int r = lo_r + k * t_h / 3;
        for (int rr = r; rr < r + 2 && rr < top_split; ++rr) {
            const int taper = top_split - 1 - rr;
            for (int c = lo_c + taper; c < hi_c - taper; ++c) img.at(rr, c) = 13;
        }
    }
    for (int k = 1; k <= 2; ++k) {
        const int c = lo_c + k * (hi_c - lo_c) / 3;
        for (int cc = c; cc < c + 2; ++cc) {
            for (int r = lo_r; r < top_split; ++r) {
                const int taper = top_split - 1 - r;
                if (cc >= lo_c + taper && cc < hi_c - taper) img.at(r, cc) = 13;
            }
        }
    }
    // front-face sticker lines: single-pixel, one level of contrast only
    const int f_h = hi_r - top_split;
    for (int k = 1; k <= 2; ++k) {
        const int r = top_split + k * f_h / 3;
        for (int c = lo_c; c < mid_c; ++c) img.at(r, c) = 13;
        for (int c = mid_c; c < hi_c; ++c) img.at(r, c) = 14;
    }
    for (int k = 1; k <= 2; ++k) {
        for (int r = top_split; r < hi_r; ++r) {
            img.at(r, lo_c + k * (mid_c - lo_c) / 3) = 13;
            img.at(r, mid_c + k * (hi_c - mid_c) / 3) = 14;
        }
    }
    return img;
}

GrayImage make_tiles(int width, int height, int tile, std::uint8_t lo, std::uint8_t hi) {
    if (tile < 2) throw std::invalid_argument("make_tiles: tile too small");
    GrayImage img = make_image(width, height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            img.at(r, c) = ((r / tile + c / tile) % 2 == 0) ? lo : hi;
        }
    }
    return img;
}

GrayImage make_step(int width, int height, std::uint8_t level_a, std::uint8_t level_b,
                    int texture, std::uint64_t seed) {
    if (level_a > 15 || level_b > 15) throw std::invalid_argument("make_step: level out of range");
    GrayImage img = make_image(width, height);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> jitter(-texture, texture);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const int base = (c < width / 2) ? level_a : level_b;
            const int j = texture > 0 ? jitter(rng) : 0;
            img.at(r, c) = static_cast<std::uint8_t>(std::clamp(base + j, 0, 15));
        }
    }
    return img;
}

GrayImage make_synthetic(const std::string& name, int width, int height) {
    if (name == "cartoon") return make_cartoon(width, height);
    if (name == "cube") return make_cube(width, height);
    if (name == "tiles") return make_tiles(width, height, std::max(4, width / 8), 0, 12);
    if (name == "step") return make_step(width, height, 3, 12, 1, 1);
    if (name == "uniform") return make_image(width, height, 8);
    if (name.rfind("uniform:", 0) == 0) {
        const int level = std::stoi(name.substr(8));
        if (level < 0 || level > 15) {
            throw std::invalid_argument("make_synthetic: uniform level out of range");
        }
        return make_image(width, height, static_cast<std::uint8_t>(level));
    }
    throw std::invalid_argument("make_synthetic: unknown image '" + name + "'");
}

}  // namespace opl
