#include "opl/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace opl {

GrayImage make_image(int width, int height, std::uint8_t fill) {
    if (width < 1 || height < 1) throw std::invalid_argument("make_image: empty raster");
    if (fill > 15) throw std::invalid_argument("make_image: level out of range");
    GrayImage img;
    img.width = width;
    img.height = height;
    img.levels.assign(static_cast<std::size_t>(width) * height, fill);
    return img;
}

namespace {

// Reads the next token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string token;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!std::isspace(c)) {
            token.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
                token.push_back(static_cast<char>(in.get()));
            }
            return token;
        }
    }
    throw std::runtime_error("pgm: unexpected end of file");
}

int next_int(std::istream& in) {
    const std::string token = next_token(in);
    try {
        return std::stoi(token);
    } catch (const std::exception&) {
        throw std::runtime_error("pgm: expected integer, got '" + token + "'");
    }
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("pgm: cannot open " + path.string());
    const std::string magic = next_token(in);
    if (magic != "P2" && magic != "P5") {
        throw std::runtime_error("pgm: unsupported magic '" + magic + "'");
    }
    const int width = next_int(in);
    const int height = next_int(in);
    const int maxval = next_int(in);
    if (width < 1 || height < 1) throw std::runtime_error("pgm: bad dimensions");
    if (maxval != 15 && maxval != 255) {
        throw std::runtime_error("pgm: maxval must be 15 or 255");
    }

    GrayImage img = make_image(width, height);
    const std::size_t pixels = img.levels.size();
    if (magic == "P5") {
        in.get();  // single whitespace after maxval
        std::vector<unsigned char> raw(pixels);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(pixels));
        if (static_cast<std::size_t>(in.gcount()) != pixels) {
            throw std::runtime_error("pgm: truncated pixel data");
        }
        for (std::size_t i = 0; i < pixels; ++i) {
            img.levels[i] = maxval == 15 ? raw[i] : static_cast<std::uint8_t>(raw[i] / 16);
        }
    } else {
        for (std::size_t i = 0; i < pixels; ++i) {
            const int v = next_int(in);
            if (v < 0 || v > maxval) throw std::runtime_error("pgm: sample out of range");
            img.levels[i] = maxval == 15 ? static_cast<std::uint8_t>(v)
                                         : static_cast<std::uint8_t>(v / 16);
        }
    }
    for (std::uint8_t v : img.levels) {
        if (v > 15) throw std::runtime_error("pgm: sample out of range");
    }
    return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pgm: cannot write " + path.string());
    if (binary) {
        out << "P5\n" << img.width << ' ' << img.height << "\n15\n";
        out.write(reinterpret_cast<const char*>(img.levels.data()),
                  static_cast<std::streamsize>(img.levels.size()));
    } else {
        out << "P2\n" << img.width << ' ' << img.height << "\n15\n";
        for (int r = 0; r < img.height; ++r) {
            for (int c = 0; c < img.width; ++c) {
                out << int(img.at(r, c)) << (c + 1 == img.width ? '\n' : ' ');
            }
        }
    }
    if (!out) throw std::runtime_error("pgm: write failed for " + path.string());
}

int EdgeMap::count() const {
    int total = 0;
    for (std::uint8_t f : flags) total += (f != 0);
    return total;
}

void write_pbm(const EdgeMap& map, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pbm: cannot write " + path.string());
    out << "P4\n" << map.width << ' ' << map.height << '\n';
    const int row_bytes = (map.width + 7) / 8;
    std::vector<unsigned char> row(row_bytes);
    for (int r = 0; r < map.height; ++r) {
        std::fill(row.begin(), row.end(), 0);
        for (int c = 0; c < map.width; ++c) {
            if (map.at(r, c)) row[c / 8] |= static_cast<unsigned char>(0x80 >> (c % 8));
        }
        out.write(reinterpret_cast<const char*>(row.data()), row_bytes);
    }
    if (!out) throw std::runtime_error("pbm: write failed for " + path.string());
}

GrayImage render_edges(const EdgeMap& map) {
    GrayImage img = make_image(map.width, map.height, 0);
    for (std::size_t i = 0; i < map.flags.size(); ++i) {
        img.levels[i] = map.flags[i] ? 15 : 0;
    }
    return img;
}

std::vector<double> transcribe_to_bias(const GrayImage& img, double v_max) {
    if (!(v_max > 0.0)) throw std::invalid_argument("transcribe_to_bias: v_max must be positive");
    std::vector<double> bias(img.levels.size());
    for (std::size_t i = 0; i < img.levels.size(); ++i) {
        bias[i] = v_max * img.levels[i] / 15.0;
    }
    return bias;
}

GrayImage read_smoothed(const std::vector<double>& voltages, int width, int height,
                        double v_max) {
    if (static_cast<int>(voltages.size()) != width * height) {
        throw std::invalid_argument("read_smoothed: voltage vector does not match raster");
    }
    GrayImage img = make_image(width, height);
    for (std::size_t i = 0; i < voltages.size(); ++i) {
        if (!std::isfinite(voltages[i])) {
            throw std::invalid_argument("read_smoothed: nonfinite voltage");
        }
        const long level = std::lround(15.0 * voltages[i] / v_max);
        img.levels[i] = static_cast<std::uint8_t>(std::clamp(level, 0L, 15L));
    }
    return img;
}

GrayImage add_gaussian_noise(const GrayImage& img, double mu, double sigma,
                             std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("add_gaussian_noise: sigma must be >= 0");
    GrayImage out = img;
    if (sigma == 0.0 && mu == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(mu, sigma);
    for (std::uint8_t& level : out.levels) {
        const long shifted = level + std::lround(15.0 * noise(rng));
        level = static_cast<std::uint8_t>(std::clamp(shifted, 0L, 15L));
    }
    return out;
}

void OutputBand::validate() const {
    if (!(lo < hi)) throw std::invalid_argument("output band: need lo < hi");
}

void FuseMajority::validate() const {
    if (min_count < 1) throw std::invalid_argument("fuse majority: min_count must be >= 1");
    if (!(threshold > 0.0)) throw std::invalid_argument("fuse majority: threshold must be positive");
}

EdgeMap detect_edges_output_band(const Grid& grid, const OutputBand& band) {
    band.validate();
    if (grid.output_devices.empty()) {
        throw std::invalid_argument("detect_edges_output_band: grid has no output devices");
    }
    if (band.relative && grid.output_baseline.size() != grid.output_devices.size()) {
        throw std::invalid_argument("detect_edges_output_band: grid carries no baseline");
    }
    EdgeMap map{grid.topology.width, grid.topology.height, {}};
    map.flags.resize(grid.node_count());
    for (int i = 0; i < grid.node_count(); ++i) {
        const Memristor& dev = grid.output_devices[i];
        double m = memristance(dev.params, dev.state);
        if (band.relative) m -= grid.output_baseline[i];
        map.flags[i] = (m >= band.lo && m <= band.hi) ? 1 : 0;
    }
    return map;
}

EdgeMap detect_edges_fuse_majority(const Grid& grid, const FuseMajority& spec) {
    spec.validate();
    if (spec.relative && grid.fuse_baseline.size() != grid.fuses.size()) {
        throw std::invalid_argument("detect_edges_fuse_majority: grid carries no baseline");
    }
    EdgeMap map{grid.topology.width, grid.topology.height, {}};
    map.flags.resize(grid.node_count());
    for (int i = 0; i < grid.node_count(); ++i) {
        int exceeding = 0;
        for (int32_t f : grid.incident_fuses[i]) {
            const FuseState& fuse = grid.fuses[f].fuse;
            if (spec.per_half) {
                const double base = spec.relative ? grid.fuse_baseline[f] / 2.0 : 0.0;
                if (memristance(fuse.a.params, fuse.a.state) - base > spec.threshold) ++exceeding;
                if (memristance(fuse.b.params, fuse.b.state) - base > spec.threshold) ++exceeding;
            } else {
                const double base = spec.relative ? grid.fuse_baseline[f] : 0.0;
                if (fuse_memristance(fuse) - base > spec.threshold) ++exceeding;
            }
        }
        map.flags[i] = exceeding >= spec.min_count ? 1 : 0;
    }
    return map;
}

namespace {

EdgeMap gradient_detect(const GrayImage& img, double threshold, const int (&kx)[3][3],
                        const int (&ky)[3][3]) {
    EdgeMap map{img.width, img.height, {}};
    map.flags.resize(img.levels.size());
    auto sample = [&](int r, int c) {
        r = std::clamp(r, 0, img.height - 1);  // replicate padding
        c = std::clamp(c, 0, img.width - 1);
        return img.at(r, c) / 15.0;
    };
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double gx = 0.0, gy = 0.0;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const double v = sample(r + dr, c + dc);
                    gx += kx[dr + 1][dc + 1] * v;
                    gy += ky[dr + 1][dc + 1] * v;
                }
            }
            map.flags[r * img.width + c] = std::hypot(gx, gy) > threshold ? 1 : 0;
        }
    }
    return map;
}

}  // namespace

EdgeMap prewitt(const GrayImage& img, double threshold) {
    static const int kx[3][3] = {{-1, 0, 1}, {-1, 0, 1}, {-1, 0, 1}};
    static const int ky[3][3] = {{-1, -1, -1}, {0, 0, 0}, {1, 1, 1}};
    return gradient_detect(img, threshold, kx, ky);
}

EdgeMap sobel(const GrayImage& img, double threshold) {
    static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    static const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    return gradient_detect(img, threshold, kx, ky);
}

MismatchResult intensity_mismatch(const GrayImage& a, const GrayImage& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("intensity_mismatch: dimension mismatch");
    }
    MismatchResult result;
    result.difference = make_image(a.width, a.height);
    double total = 0.0;
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        const int d = std::abs(int(a.levels[i]) - int(b.levels[i]));
        result.difference.levels[i] = static_cast<std::uint8_t>(d);
        total += d / 15.0;
    }
    result.fraction = total / static_cast<double>(a.levels.size());
    return result;
}

double edge_iou(const EdgeMap& a, const EdgeMap& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("edge_iou: dimension mismatch");
    }
    int inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.flags.size(); ++i) {
        const bool fa = a.flags[i] != 0, fb = b.flags[i] != 0;
        inter += (fa && fb);
        uni += (fa || fb);
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

GrayImage scale_brightness(const GrayImage& img, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("scale_brightness: scale must be positive");
    GrayImage out = img;
    for (std::uint8_t& level : out.levels) {
        const long light = std::lround(s * (15.0 - level));
        level = static_cast<std::uint8_t>(15 - std::clamp(light, 0L, 15L));
    }
    return out;
}

}  // namespace opl
