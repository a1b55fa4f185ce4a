#include <algorithm>
#include <cmath>
#include <numbers>

#include "pat/masks.hpp"

namespace pat::masks {

using std::numbers::pi;

namespace {

// Smallest azimuth gap between a ring of j points at offset a and one of jp points at offset b.
double min_azimuth_gap(std::size_t j, double a, std::size_t jp, double b) {
    const double period = 2.0 * pi / static_cast<double>(jp);
    double best = pi;
    for (std::size_t i = 0; i < j; ++i) {
        const double phi = 2.0 * pi * static_cast<double>(i) / static_cast<double>(j) + a;
        double delta = std::fmod(phi - b, period);
        if (delta < 0) delta += period;
        best = std::min({best, delta, period - delta});
    }
    return best;
}

double chord(double theta_a, double theta_b, double dphi) {
    const double c = std::cos(theta_a) * std::cos(theta_b) + std::sin(theta_a) * std::sin(theta_b) * std::cos(dphi);
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * c));
}

}  // namespace

SliceLayout equisteradian_slices(double omega, double theta_max) {
    if (!(omega > 0.0) || !(theta_max > 0.0)) fail(ErrorKind::parameter, "equisteradian: bad unit steradian");
    SliceLayout s;
    // Slice 1: one sensor at the pole covering one unit steradian.
    double cos_prev = 1.0 - omega / (2.0 * pi);
    double theta_prev = std::acos(std::max(-1.0, cos_prev));
    s.counts.push_back(1);
    s.polar.push_back(0.0);
    s.offset.push_back(0.0);
    s.total = 1;
    double phi_r = 0.0;
    std::size_t j = 1;
    double prev_ring = 0.0;
    for (std::size_t k = 2;; ++k) {
        const std::size_t jp = s.counts.back();
        // phi_r = phi_{j_{k-1}, k-1} + (k-1) 2 pi / j_{k-1}
        const double next_phi_r = (2.0 * pi + pi / static_cast<double>(jp) + phi_r) +
                                  static_cast<double>(k - 1) * 2.0 * pi / static_cast<double>(jp);
        double cos_k = 0.0, ring = 0.0;
        for (;;) {
            cos_k = cos_prev - omega * static_cast<double>(j) / (2.0 * pi);
            if (cos_k < -1.0) break;
            ring = 0.5 * (theta_prev + std::acos(cos_k));
            const double rs = j == 1 ? 2.0 * std::sin(ring) : 2.0 * std::sin(ring) * std::sin(pi / static_cast<double>(j));
            const double offset = pi / static_cast<double>(j) + next_phi_r;
            const double prev_offset = pi / static_cast<double>(jp) + phi_r;
            const double rk = chord(ring, prev_ring, min_azimuth_gap(j, offset, jp, prev_offset));
            if (rs > 1.8 * rk) {
                j *= 2;
                continue;
            }
            break;
        }
        if (cos_k < -1.0 || ring > theta_max) break;
        s.counts.push_back(j);
        s.polar.push_back(ring);
        s.offset.push_back(next_phi_r);
        s.total += j;
        phi_r = next_phi_r;
        prev_ring = ring;
        cos_prev = cos_k;
        theta_prev = std::acos(cos_k);
    }
    return s;
}

SensorMask equisteradian_mask_3d(const MaskSpec& spec) {
    spec.validate();
    if (spec.dim != 3) fail(ErrorKind::parameter, "equisteradian_mask_3d: requires d = 3");
    if (!(spec.r0 > 0.0)) fail(ErrorKind::parameter, "equisteradian_mask_3d: r0 must be positive");
    const double half = 0.5 * spec.aperture();
    if (spec.r0 >= half * std::sqrt(2.0))
        fail(ErrorKind::parameter, "equisteradian_mask_3d: r0 must be smaller than the aperture half-diagonal");
    std::vector<double> ctr = spec.center.empty() ? std::vector<double>{0.0, 0.0} : spec.center;
    const double theta_max = std::atan(half / spec.r0);
    const double cap = 2.0 * pi * (1.0 - std::cos(theta_max));
    const double omega0 = cap / static_cast<double>(spec.n_req);
    const double target = static_cast<double>(spec.n_req);

    auto count = [&](double scale) { return static_cast<double>(equisteradian_slices(omega0 * scale, theta_max).total); };
    // Locate the count jump across n_req by bisection on the unit steradian scale.
    double lo = 0.25, hi = 4.0;
    while (count(lo) < target && lo > 1e-3) lo *= 0.5;
    while (count(hi) >= target && hi < 1e3) hi *= 2.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count(mid) >= target ? lo : hi) = mid;
    }
    const double above = count(lo), below = count(hi);
    double scale = lo;
    if (target - below <= above - target) {
        // Fewer points: move to the largest scale that still realizes `below`.
        double a = hi, b = hi * 2.0;
        while (count(b) >= below && b < 1e3) b *= 2.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (a + b);
            (count(mid) >= below ? a : b) = mid;
        }
        scale = a;
    }
    const SliceLayout layout = equisteradian_slices(omega0 * scale, theta_max);

    SensorMask m;
    m.lateral_dims = 2;
    m.layout = "equisteradian";
    m.unit_steradian = omega0 * scale;
    m.slice_counts = layout.counts;
    m.slice_angles = layout.polar;
    for (std::size_t k = 0; k < layout.counts.size(); ++k) {
        const std::size_t j = layout.counts[k];
        const double rho = spec.r0 * std::tan(layout.polar[k]);
        for (std::size_t i = 0; i < j; ++i) {
            const double phi = 2.0 * pi * static_cast<double>(i) / static_cast<double>(j) + pi / static_cast<double>(j) +
                               layout.offset[k];
            m.positions.push_back(ctr[0] + rho * std::cos(phi));
            m.positions.push_back(ctr[1] + rho * std::sin(phi));
        }
    }
    m.weights = density_weights(m.positions, 2, ctr, spec.r0, 3, spec.aperture_measure());
    if (spec.snap) m = snap_to_grid(m, spec);
    return m;
}

}  // namespace pat::masks
