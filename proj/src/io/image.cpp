#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "pat/io.hpp"

#ifdef PAT_HAVE_PNG
#include <png.h>
#endif

namespace pat::io {

namespace {

// Quantized rows of the displayed image.
std::vector<std::uint16_t> quantize(const RealArray& img, bool depth_down, std::size_t& width, std::size_t& height) {
    if (img.ndim() != 2) fail(ErrorKind::precondition, "image export: 2D array required");
    const std::size_t n0 = img.dims[0], n1 = img.dims[1];
    width = depth_down ? n0 : n1;
    height = depth_down ? n1 : n0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : img.data)
        if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    const double range = hi > lo ? hi - lo : 1.0;
    std::vector<std::uint16_t> px(width * height, 0);
    for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c) {
            const double v = depth_down ? img[c * n1 + r] : img[r * n1 + c];
            const double q = std::isfinite(v) ? (v - lo) / range : 0.0;
            px[r * width + c] = static_cast<std::uint16_t>(std::lround(std::clamp(q, 0.0, 1.0) * 65535.0));
        }
    return px;
}

}  // namespace

void write_pgm(const std::string& path, const RealArray& image, bool depth_down) {
    std::size_t w = 0, h = 0;
    const auto px = quantize(image, depth_down, w, h);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::io, "cannot open for writing: " + path);
    os << "P5\n" << w << " " << h << "\n65535\n";
    for (std::uint16_t v : px) {
        const char b[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
        os.write(b, 2);
    }
    if (!os) fail(ErrorKind::io, "write failed: " + path);
}

bool png_supported() {
#ifdef PAT_HAVE_PNG
    return true;
#else
    return false;
#endif
}

void write_png(const std::string& path, const RealArray& image, bool depth_down) {
#ifdef PAT_HAVE_PNG
    std::size_t w = 0, h = 0;
    const auto px = quantize(image, depth_down, w, h);
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(w);
    img.height = static_cast<png_uint_32>(h);
    img.format = PNG_FORMAT_LINEAR_Y;
    // The simplified API expects native-endian 16-bit samples.
    std::vector<png_uint_16> native(px.begin(), px.end());
    if (!png_image_write_to_file(&img, path.c_str(), 0, native.data(), 0, nullptr))
        fail(ErrorKind::io, "png write failed: " + path);
#else
    (void)path, (void)image, (void)depth_down;
    fail(ErrorKind::io, "PNG support was not built");
#endif
}

}  // namespace pat::io
