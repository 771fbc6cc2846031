#ifndef FPKFV_IO_HPP
#define FPKFV_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fpkfv/density.hpp"
#include "fpkfv/mesh.hpp"

namespace fpkfv {

/// Row-major 8-bit image, row 0 at the top. channels is 1 (gray) or 3 (RGB).
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<uint8_t> pixel;

    uint8_t at(int x, int y, int c = 0) const {
        return pixel[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    uint8_t& at(int x, int y, int c = 0) {
        return pixel[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

/// Reads PGM (P2/P5) or PPM (P3/P6) with maxval <= 255.
Image read_image(const std::string& path);
/// Writes binary PGM (1 channel) or PPM (3 channels).
void write_image(const Image& img, const std::string& path);

/// Renders a density on a structured grid to grayscale, min->0, max->255;
/// image row 0 corresponds to the top cell row (largest y).
Image render_density(const DensityField& m, const Mesh& mesh);

} // namespace fpkfv

#endif
