#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pat/core.hpp"

namespace pat::metrics {

using Mask = std::vector<std::uint8_t>;  // same layout as the image, nonzero = selected

// Pearson correlation over the selected pixels (all pixels if mask is empty).
double correlation(const RealArray& a, const RealArray& b, const Mask& mask = {});

// Rectangle on a 2D image: rows [row, row + rows), cols [col, col + cols).
struct Rect {
    std::size_t row = 0, col = 0, rows = 0, cols = 0;
};

// Sum of squared Sobel responses in both directions over the pixels of the
// rectangle whose 3x3 neighbourhood lies inside it.
double tenenbaum(const RealArray& image, const Rect& rect);
// tenenbaum divided by the number of pixels in the rectangle.
double tenenbaum_normalized(const RealArray& image, const Rect& rect);
Rect full_rect(const RealArray& image);

RealArray mip(const RealArray& volume, std::size_t axis);

// Disc in pixel units on a 2D image.
struct Disc {
    double row = 0.0, col = 0.0, diameter = 0.0;
};
Mask disc_mask(const std::vector<std::size_t>& dims, const Disc& disc);
// Pixels in the disc with model >= fraction * max(model in disc); fraction 0 selects the whole disc.
Mask roi_by_threshold(const RealArray& model, const Disc& disc, double fraction);
// The `count` brightest pixels in the disc (ties keep the lower index).
Mask roi_by_count(const RealArray& model, const Disc& disc, std::size_t count);
std::size_t mask_count(const Mask& mask);
Rect bounding_box(const Mask& mask, const std::vector<std::size_t>& dims);

struct FitResult {
    double w = 0.0;        // FWHM
    double center = 0.0;   // z0 or x0
    double a0 = 0.0;
    double i0 = 0.0;       // ESF offset
    double residual = 0.0; // L2 norm of the residual
    int iterations = 0;
};

// I(z) = 2 a0 w / (pi (w^2 + 4 (z - z0)^2))
double lorentzian(double z, double w, double z0, double a0);
// I(x) = I0 + a0 (atan((x - x0) / (w / 2)) / pi + 1/2)
double edge_spread(double x, double w, double x0, double a0, double i0);

FitResult fit_lorentzian_lsf(std::span<const double> z, std::span<const double> intensity);
FitResult fit_esf(std::span<const double> x, std::span<const double> intensity);

// Indices of `count` consecutive samples centered on the profile maximum.
std::vector<std::size_t> window_around_peak(std::span<const double> profile, std::size_t count);

}  // namespace pat::metrics
