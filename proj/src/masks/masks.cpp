#include "pat/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace pat::masks {

double MaskSpec::aperture_measure() const { return std::pow(aperture(), static_cast<double>(dim - 1)); }

void MaskSpec::validate() const {
    if (dim != 2 && dim != 3) fail(ErrorKind::parameter, "mask: dimension must be 2 or 3");
    if (grid < 2 || grid % 2) fail(ErrorKind::parameter, "mask: grid size must be even and >= 2");
    if (!(pitch > 0.0)) fail(ErrorKind::parameter, "mask: pitch must be positive");
    if (!center.empty() && center.size() != static_cast<std::size_t>(dim - 1))
        fail(ErrorKind::parameter, "mask: center must have d-1 components");
    if (n_req < 1) fail(ErrorKind::parameter, "mask: requested sensor count must be >= 1");
}

namespace {

std::vector<double> lateral_center(const MaskSpec& spec) {
    return spec.center.empty() ? std::vector<double>(spec.dim - 1, 0.0) : spec.center;
}

void check_inside(const SensorMask& m, const MaskSpec& spec) {
    const double lo = -static_cast<double>(spec.grid / 2) * spec.pitch;
    const double hi = (static_cast<double>(spec.grid / 2) - 1) * spec.pitch;
    const double tol = 1e-9 * spec.pitch;
    for (double x : m.positions)
        if (x < lo - tol || x > hi + tol) fail(ErrorKind::validation, "mask: sensors exceed the aperture");
}

}  // namespace

std::vector<double> density_weights(std::span<const double> positions, std::size_t lateral_dims,
                                    std::span<const double> center, double r0, int d, double measure) {
    if (center.size() != lateral_dims) fail(ErrorKind::parameter, "density_weights: center rank mismatch");
    if (!(r0 > 0.0)) fail(ErrorKind::parameter, "density_weights: r0 must be positive");
    const std::size_t m = positions.size() / lateral_dims;
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
        double r2 = r0 * r0;
        for (std::size_t a = 0; a < lateral_dims; ++a) {
            const double dx = positions[i * lateral_dims + a] - center[a];
            r2 += dx * dx;
        }
        w[i] = std::pow(std::sqrt(r2), static_cast<double>(d));
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v *= measure / total;
    return w;
}

SensorMask equispaced_mask(const MaskSpec& spec, std::size_t interval) {
    spec.validate();
    if (interval < 1) fail(ErrorKind::parameter, "equispaced_mask: interval must be >= 1");
    std::size_t n = spec.n_req;
    if (spec.dim == 3) {
        n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(spec.n_req))));
        if (n * n != spec.n_req) fail(ErrorKind::parameter, "equispaced_mask: 3D count must be a perfect square");
    }
    const auto span = static_cast<long long>((n - 1) * interval);
    const long long start = -(span + 1) / 2;  // the extra half step goes to the negative side
    const auto ctr = lateral_center(spec);
    std::vector<double> axis;
    for (std::size_t k = 0; k < n; ++k) axis.push_back(static_cast<double>(start + static_cast<long long>(k * interval)) * spec.pitch);

    SensorMask m;
    m.lateral_dims = spec.dim - 1;
    m.layout = "equispaced";
    if (spec.dim == 2) {
        for (double x : axis) m.positions.push_back(x + std::round(ctr[0] / spec.pitch) * spec.pitch);
    } else {
        for (double x : axis)
            for (double y : axis) {
                m.positions.push_back(x + std::round(ctr[0] / spec.pitch) * spec.pitch);
                m.positions.push_back(y + std::round(ctr[1] / spec.pitch) * spec.pitch);
            }
    }
    check_inside(m, spec);
    const std::size_t count = m.positions.size() / m.lateral_dims;
    m.weights.assign(count, spec.aperture_measure() / static_cast<double>(count));
    return m;
}

SensorMask equiangular_mask_2d(const MaskSpec& spec) {
    spec.validate();
    if (spec.dim != 2) fail(ErrorKind::parameter, "equiangular_mask_2d: requires d = 2");
    if (!(spec.r0 > 0.0)) fail(ErrorKind::parameter, "equiangular_mask_2d: r0 must be positive");
    const double xc = lateral_center(spec)[0];
    const double lo = -static_cast<double>(spec.grid / 2) * spec.pitch;
    const double hi = (static_cast<double>(spec.grid / 2) - 1) * spec.pitch;
    const double reach = std::min(xc - lo, hi - xc);
    if (!(reach > 0.0)) fail(ErrorKind::parameter, "equiangular_mask_2d: center of interest outside the aperture");
    const double theta_max = std::atan(reach / spec.r0);
    const double step = 2.0 * theta_max / static_cast<double>(spec.n_req);
    SensorMask m;
    m.lateral_dims = 1;
    m.layout = "equiangular";
    for (std::size_t i = 0; i < spec.n_req; ++i) {
        const double gamma = -theta_max + (static_cast<double>(i) + 0.5) * step;
        m.positions.push_back(xc + spec.r0 * std::tan(gamma));
    }
    m.weights = density_weights(m.positions, 1, std::vector<double>{xc}, spec.r0, 2, spec.aperture_measure());
    if (spec.snap) m = snap_to_grid(m, spec);
    return m;
}

SensorMask snap_to_grid(const SensorMask& mask, const MaskSpec& spec) {
    const std::size_t d = mask.lateral_dims;
    const long long half = static_cast<long long>(spec.grid / 2);
    std::set<std::vector<long long>> seen;
    SensorMask out = mask;
    out.positions.clear();
    out.weights.clear();
    const double total = std::accumulate(mask.weights.begin(), mask.weights.end(), 0.0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        std::vector<long long> node(d);
        for (std::size_t a = 0; a < d; ++a)
            node[a] = std::clamp<long long>(std::llround(mask.positions[i * d + a] / spec.pitch), -half, half - 1);
        if (!seen.insert(node).second) continue;
        for (auto v : node) out.positions.push_back(static_cast<double>(v) * spec.pitch);
        out.weights.push_back(mask.weights[i]);
    }
    const double kept = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    for (auto& w : out.weights) w *= total / kept;
    return out;
}

}  // namespace pat::masks
