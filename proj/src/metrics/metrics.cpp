#include "pat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pat::metrics {

namespace {

void require_2d(const RealArray& a, const char* what) {
    if (a.ndim() != 2) fail(ErrorKind::precondition, std::string(what) + ": 2D image required");
}

}  // namespace

double correlation(const RealArray& a, const RealArray& b, const Mask& mask) {
    if (a.dims != b.dims) fail(ErrorKind::precondition, "correlation: image shapes differ");
    if (!mask.empty() && mask.size() != a.size()) fail(ErrorKind::precondition, "correlation: mask shape differs");
    std::size_t n = 0;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (mask.empty() || mask[i]) {
            ma += a[i];
            mb += b[i];
            ++n;
        }
    if (n < 2) fail(ErrorKind::validation, "correlation: fewer than two selected pixels");
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (mask.empty() || mask[i]) {
            const double da = a[i] - ma, db = b[i] - mb;
            sab += da * db;
            saa += da * da;
            sbb += db * db;
        }
    if (saa <= 0.0 || sbb <= 0.0) fail(ErrorKind::numerical, "correlation: zero variance, correlation undefined");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

Rect full_rect(const RealArray& image) {
    require_2d(image, "full_rect");
    return {0, 0, image.dims[0], image.dims[1]};
}

double tenenbaum(const RealArray& u, const Rect& r) {
    require_2d(u, "tenenbaum");
    if (r.rows < 3 || r.cols < 3) fail(ErrorKind::precondition, "tenenbaum: region smaller than 3x3");
    if (r.row + r.rows > u.dims[0] || r.col + r.cols > u.dims[1]) fail(ErrorKind::precondition, "tenenbaum: region outside image");
    const std::size_t w = u.dims[1];
    auto at = [&](std::size_t i, std::size_t j) { return u[i * w + j]; };
    double sum = 0.0;
    for (std::size_t i = r.row + 1; i + 1 < r.row + r.rows; ++i)
        for (std::size_t j = r.col + 1; j + 1 < r.col + r.cols; ++j) {
            const double gx = (at(i - 1, j + 1) + 2 * at(i, j + 1) + at(i + 1, j + 1)) -
                              (at(i - 1, j - 1) + 2 * at(i, j - 1) + at(i + 1, j - 1));
            const double gy = (at(i + 1, j - 1) + 2 * at(i + 1, j) + at(i + 1, j + 1)) -
                              (at(i - 1, j - 1) + 2 * at(i - 1, j) + at(i - 1, j + 1));
            sum += gx * gx + gy * gy;
        }
    return sum;
}

double tenenbaum_normalized(const RealArray& u, const Rect& r) {
    return tenenbaum(u, r) / static_cast<double>(r.rows * r.cols);
}

RealArray mip(const RealArray& v, std::size_t axis) {
    if (v.ndim() != 3) fail(ErrorKind::precondition, "mip: 3D volume required");
    if (axis > 2) fail(ErrorKind::parameter, "mip: axis must be 0, 1 or 2");
    std::vector<std::size_t> dims;
    for (std::size_t a = 0; a < 3; ++a)
        if (a != axis) dims.push_back(v.dims[a]);
    RealArray out(dims, -std::numeric_limits<double>::infinity());
    const std::size_t n1 = v.dims[1], n2 = v.dims[2];
    for (std::size_t i = 0; i < v.dims[0]; ++i)
        for (std::size_t j = 0; j < n1; ++j)
            for (std::size_t k = 0; k < n2; ++k) {
                std::size_t o;
                if (axis == 0) o = j * n2 + k;
                else if (axis == 1) o = i * n2 + k;
                else o = i * n1 + j;
                out[o] = std::max(out[o], v[(i * n1 + j) * n2 + k]);
            }
    return out;
}

Mask disc_mask(const std::vector<std::size_t>& dims, const Disc& d) {
    if (dims.size() != 2) fail(ErrorKind::precondition, "disc_mask: 2D image required");
    Mask m(dims[0] * dims[1], 0);
    const double r = 0.5 * d.diameter;
    for (std::size_t i = 0; i < dims[0]; ++i)
        for (std::size_t j = 0; j < dims[1]; ++j) {
            const double di = static_cast<double>(i) - d.row, dj = static_cast<double>(j) - d.col;
            m[i * dims[1] + j] = di * di + dj * dj <= r * r;
        }
    return m;
}

Mask roi_by_threshold(const RealArray& model, const Disc& disc, double fraction) {
    require_2d(model, "roi_by_threshold");
    if (!(fraction >= 0.0 && fraction <= 1.0)) fail(ErrorKind::parameter, "roi: threshold fraction must lie in [0, 1]");
    Mask m = disc_mask(model.dims, disc);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!std::isfinite(model[i])) fail(ErrorKind::validation, "roi: non-finite model value");
        if (m[i]) peak = std::max(peak, model[i]);
    }
    if (fraction > 0.0)
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = m[i] && model[i] >= fraction * peak;
    if (mask_count(m) == 0) fail(ErrorKind::validation, "roi: empty mask");
    return m;
}

Mask roi_by_count(const RealArray& model, const Disc& disc, std::size_t count) {
    require_2d(model, "roi_by_count");
    Mask inside = disc_mask(model.dims, disc);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < inside.size(); ++i)
        if (inside[i]) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return model[a] > model[b]; });
    Mask m(inside.size(), 0);
    for (std::size_t k = 0; k < std::min(count, idx.size()); ++k) m[idx[k]] = 1;
    if (mask_count(m) == 0) fail(ErrorKind::validation, "roi: empty mask");
    return m;
}

std::size_t mask_count(const Mask& m) { return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](auto v) { return v != 0; })); }

Rect bounding_box(const Mask& m, const std::vector<std::size_t>& dims) {
    if (dims.size() != 2 || m.size() != dims[0] * dims[1]) fail(ErrorKind::precondition, "bounding_box: shape mismatch");
    std::size_t r0 = dims[0], r1 = 0, c0 = dims[1], c1 = 0;
    bool any = false;
    for (std::size_t i = 0; i < dims[0]; ++i)
        for (std::size_t j = 0; j < dims[1]; ++j)
            if (m[i * dims[1] + j]) {
                any = true;
                r0 = std::min(r0, i), r1 = std::max(r1, i), c0 = std::min(c0, j), c1 = std::max(c1, j);
            }
    if (!any) fail(ErrorKind::validation, "bounding_box: empty mask");
    return {r0, c0, r1 - r0 + 1, c1 - c0 + 1};
}

std::vector<std::size_t> window_around_peak(std::span<const double> p, std::size_t count) {
    if (count == 0 || count > p.size()) fail(ErrorKind::parameter, "window_around_peak: bad window size");
    const auto peak = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    long long start = static_cast<long long>(peak) - static_cast<long long>(count / 2);
    start = std::clamp<long long>(start, 0, static_cast<long long>(p.size() - count));
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), static_cast<std::size_t>(start));
    return idx;
}

}  // namespace pat::metrics
