#include "fpkfv/io.hpp"
#include "fpkfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace fpkfv {

namespace {

// next whitespace-separated token, skipping '#' comments
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

int next_int(std::istream& in, const std::string& path) {
    const std::string tok = next_token(in);
    try {
        return std::stoi(tok);
    } catch (...) {
        throw validation_error("read_image: " + path + ": malformed header token '" + tok + "'");
    }
}

} // namespace

Image read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("read_image: cannot open '" + path + "'");

    const std::string magic = next_token(in);
    int channels;
    bool binary;
    if (magic == "P2") { channels = 1; binary = false; }
    else if (magic == "P5") { channels = 1; binary = true; }
    else if (magic == "P3") { channels = 3; binary = false; }
    else if (magic == "P6") { channels = 3; binary = true; }
    else throw validation_error("read_image: " + path + ": unsupported magic '" + magic + "'");

    Image img;
    img.channels = channels;
    img.width = next_int(in, path);
    img.height = next_int(in, path);
    const int maxval = next_int(in, path);
    if (img.width < 1 || img.height < 1)
        throw validation_error("read_image: " + path + ": bad dimensions");
    if (maxval < 1 || maxval > 255)
        throw validation_error("read_image: " + path + ": only maxval <= 255 supported");

    const size_t count = static_cast<size_t>(img.width) * img.height * channels;
    img.pixel.resize(count);
    if (binary) {
        // the tokenizer consumed the single whitespace after maxval already
        in.read(reinterpret_cast<char*>(img.pixel.data()), static_cast<std::streamsize>(count));
        if (static_cast<size_t>(in.gcount()) != count)
            throw validation_error("read_image: " + path + ": truncated pixel data");
    } else {
        for (size_t i = 0; i < count; ++i) {
            const int v = next_int(in, path);
            if (v < 0 || v > maxval)
                throw validation_error("read_image: " + path + ": pixel value out of range");
            img.pixel[i] = static_cast<uint8_t>(v);
        }
    }
    return img;
}

void write_image(const Image& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3)
        throw validation_error("write_image: channels must be 1 or 3");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("write_image: cannot write '" + path + "'");
    out << (img.channels == 1 ? "P5" : "P6") << "\n"
        << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixel.data()),
              static_cast<std::streamsize>(img.pixel.size()));
}

Image render_density(const DensityField& m, const Mesh& mesh) {
    if (!mesh.structured()) throw validation_error("render_density: structured grid required");

    double lo = m.density(0), hi = m.density(0);
    for (int i = 1; i < mesh.n_cells; ++i) {
        lo = std::min(lo, m.density(i));
        hi = std::max(hi, m.density(i));
    }
    const double span = hi > lo ? hi - lo : 1.0;

    Image img;
    img.width = mesh.nx;
    img.height = mesh.ny;
    img.channels = 1;
    img.pixel.resize(static_cast<size_t>(mesh.nx) * mesh.ny);
    for (int iy = 0; iy < mesh.ny; ++iy)
        for (int ix = 0; ix < mesh.nx; ++ix) {
            const double v = (m.density(mesh.cell_id(ix, iy)) - lo) / span;
            img.at(ix, mesh.ny - 1 - iy) = static_cast<uint8_t>(std::lround(255.0 * v));
        }
    return img;
}

} // namespace fpkfv
