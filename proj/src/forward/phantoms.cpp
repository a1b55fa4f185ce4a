#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pat/forward.hpp"

namespace pat::forward {

using std::numbers::pi;

namespace {

Field empty_field(const GridSpec& g) {
    if (g.dims.size() < 2 || g.dims.size() > 3) fail(ErrorKind::precondition, "phantom: grid must be 2D or 3D");
    if (!(g.spacing > 0.0)) fail(ErrorKind::parameter, "phantom: spacing must be positive");
    for (std::size_t a = 0; a + 1 < g.dims.size(); ++a)
        if (g.dims[a] % 2) fail(ErrorKind::precondition, "phantom: lateral dims must be even");
    Field f;
    f.values = RealArray(g.dims);
    f.spacing.assign(g.dims.size(), g.spacing);
    for (std::size_t a = 0; a + 1 < g.dims.size(); ++a) f.origin.push_back(-static_cast<double>(g.dims[a] / 2) * g.spacing);
    f.origin.push_back(0.0);
    return f;
}

// Coordinates of every node, physical units.
template <class Fn>
void for_each_node(const Field& f, Fn fn) {
    const auto& dims = f.dims();
    const std::size_t d = dims.size();
    std::vector<double> p(d);
    for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
        std::size_t rem = flat;
        for (std::size_t a = d; a-- > 0;) {
            p[a] = f.origin[a] + static_cast<double>(rem % dims[a]) * f.spacing[a];
            rem /= dims[a];
        }
        fn(flat, p);
    }
}

double soft_edge(double signed_distance, double width) { return 0.5 * (1.0 - std::tanh(signed_distance / width)); }

// Draws a capsule between a and b (grid units) with half width hw by maximum.
void draw_segment_2d(Field& f, double ax, double az, double bx, double bz, double hw) {
    const auto nx = static_cast<long long>(f.dims()[0]), nz = static_cast<long long>(f.dims()[1]);
    const double pad = hw + 3.0;
    const long long x0 = std::max(0LL, static_cast<long long>(std::floor(std::min(ax, bx) - pad)));
    const long long x1 = std::min(nx - 1, static_cast<long long>(std::ceil(std::max(ax, bx) + pad)));
    const long long z0 = std::max(0LL, static_cast<long long>(std::floor(std::min(az, bz) - pad)));
    const long long z1 = std::min(nz - 1, static_cast<long long>(std::ceil(std::max(az, bz) + pad)));
    const double vx = bx - ax, vz = bz - az, len2 = vx * vx + vz * vz;
    for (long long i = x0; i <= x1; ++i)
        for (long long k = z0; k <= z1; ++k) {
            double s = len2 > 0 ? ((i - ax) * vx + (k - az) * vz) / len2 : 0.0;
            s = std::clamp(s, 0.0, 1.0);
            const double dx = i - ax - s * vx, dz = k - az - s * vz;
            const double v = soft_edge(std::sqrt(dx * dx + dz * dz) - hw, 0.6);
            double& dst = f.values[i * nz + k];
            dst = std::max(dst, v);
        }
}

void branch(Field& f, std::mt19937_64& gen, double x, double z, double angle, double length, double hw, int level) {
    std::uniform_real_distribution<double> jitter(-0.18, 0.18);
    const double ex = x + length * std::sin(angle);
    const double ez = z - length * std::cos(angle);
    draw_segment_2d(f, x, z, ex, ez, hw);
    if (level == 0) return;
    const double spread = 0.45 + jitter(gen);
    branch(f, gen, ex, ez, angle - spread, length * 0.72, std::max(0.8, hw * 0.7), level - 1);
    branch(f, gen, ex, ez, angle + spread + jitter(gen), length * 0.72, std::max(0.8, hw * 0.7), level - 1);
    if (level % 2 == 0) branch(f, gen, ex, ez, angle + jitter(gen), length * 0.6, std::max(0.8, hw * 0.6), level - 1);
}

}  // namespace

void smooth(Field& f, double sigma) {
    if (sigma <= 0.0) return;
    const int rad = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * rad + 1);
    double sum = 0.0;
    for (int i = -rad; i <= rad; ++i) sum += k[i + rad] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (auto& v : k) v /= sum;
    const auto& dims = f.dims();
    for (std::size_t a = 0; a < dims.size(); ++a) {
        std::size_t inner = 1;
        for (std::size_t b = a + 1; b < dims.size(); ++b) inner *= dims[b];
        const std::size_t n = dims[a], outer = f.values.size() / (n * inner);
        std::vector<double> line(n);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t in = 0; in < inner; ++in) {
                double* base = f.values.data.data() + o * n * inner + in;
                for (std::size_t i = 0; i < n; ++i) line[i] = base[i * inner];
                for (std::size_t i = 0; i < n; ++i) {
                    double acc = 0.0;
                    for (int t = -rad; t <= rad; ++t) {
                        const long long j = static_cast<long long>(i) + t;
                        if (j >= 0 && j < static_cast<long long>(n)) acc += k[t + rad] * line[j];
                    }
                    base[i * inner] = acc;
                }
            }
    }
}

Field gaussian_blob(const GridSpec& g, std::span<const double> center, double sigma, double amplitude) {
    Field f = empty_field(g);
    if (center.size() != g.dims.size()) fail(ErrorKind::precondition, "gaussian_blob: center rank mismatch");
    if (!(sigma > 0.0)) fail(ErrorKind::parameter, "gaussian_blob: sigma must be positive");
    for_each_node(f, [&](std::size_t i, const std::vector<double>& p) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < p.size(); ++a) r2 += (p[a] - center[a]) * (p[a] - center[a]);
        f.values[i] = amplitude * std::exp(-0.5 * r2 / (sigma * sigma));
    });
    const std::size_t nz = g.dims.back();
    for (std::size_t line = 0; line < f.values.size() / nz; ++line) f.values[line * nz] = 0.0;
    return f;
}

Field ball_field(const GridSpec& g, const Ball& ball, int supersample) {
    Field f = empty_field(g);
    if (ball.center.size() != g.dims.size()) fail(ErrorKind::precondition, "ball_field: center rank mismatch");
    if (supersample < 1) fail(ErrorKind::parameter, "ball_field: supersample must be >= 1");
    const std::size_t d = g.dims.size();
    const double h = g.spacing;
    const double reach = ball.radius + h;
    const int s = supersample;
    const std::size_t sub = static_cast<std::size_t>(std::pow(s, static_cast<double>(d)));
    for_each_node(f, [&](std::size_t i, const std::vector<double>& p) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) r2 += (p[a] - ball.center[a]) * (p[a] - ball.center[a]);
        if (r2 > reach * reach) return;
        std::size_t inside = 0;
        for (std::size_t q = 0; q < sub; ++q) {
            std::size_t rem = q;
            double s2 = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                const double off = ((static_cast<double>(rem % s) + 0.5) / s - 0.5) * h;
                rem /= s;
                s2 += (p[a] + off - ball.center[a]) * (p[a] + off - ball.center[a]);
            }
            inside += s2 <= ball.radius * ball.radius;
        }
        f.values[i] = ball.amplitude * static_cast<double>(inside) / static_cast<double>(sub);
    });
    return f;
}

Field tree_phantom(const GridSpec& g, std::uint64_t seed) {
    if (g.dims.size() != 2) fail(ErrorKind::precondition, "tree_phantom: 2D grid required");
    Field f = empty_field(g);
    std::mt19937_64 gen(seed);
    const double nx = static_cast<double>(g.dims[0]), nz = static_cast<double>(g.dims[1]);
    const double cx = nx / 2;
    const double scale = nz / 256.0;
    // The trunk grows toward the sensor plane at z = 0.
    const double base = 0.80 * nz, top = 0.50 * nz;
    draw_segment_2d(f, cx, base, cx, top, 4.0 * scale);
    draw_segment_2d(f, cx - 14 * scale, base + 2 * scale, cx + 14 * scale, base + 2 * scale, 1.5 * scale);
    branch(f, gen, cx, top, -0.55, 0.16 * nz, 2.6 * scale, 4);
    branch(f, gen, cx, top, 0.55, 0.16 * nz, 2.6 * scale, 4);
    branch(f, gen, cx, top, 0.0, 0.13 * nz, 2.8 * scale, 4);
    smooth(f, 0.8);
    const std::size_t z = g.dims[1];
    for (std::size_t i = 0; i < g.dims[0]; ++i)
        for (std::size_t k = 0; k < std::min<std::size_t>(z, 3); ++k) f.values[i * z + k] = 0.0;
    return f;
}

Field yarn_phantom(const GridSpec& g, std::uint64_t seed) {
    if (g.dims.size() != 3) fail(ErrorKind::precondition, "yarn_phantom: 3D grid required");
    Field f = empty_field(g);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    const double nx = static_cast<double>(g.dims[0]), ny = static_cast<double>(g.dims[1]), nz = static_cast<double>(g.dims[2]);
    const double depth = 0.47 * nz;
    const double radius = 2.2 * nx / 226.0;
    const double wavelength = 0.14 * nx;
    const int rows = 7;
    const double row_gap = 0.08 * ny;
    for (int r = 0; r < rows; ++r) {
        const double y0 = ny / 2 + (r - (rows - 1) / 2.0) * row_gap + jitter(gen);
        const double phase = (r % 2) * pi + 0.3 * jitter(gen);
        // Each loop row weaves over and under its neighbours.
        for (double x = 0.15 * nx; x <= 0.85 * nx; x += 0.4) {
            const double t = 2.0 * pi * x / wavelength;
            const double y = y0 + 0.35 * row_gap * std::sin(t + phase);
            const double z = depth + 0.18 * nz * 0.25 * std::cos(t + phase);
            const long long i0 = static_cast<long long>(std::floor(x - radius - 2)), i1 = static_cast<long long>(std::ceil(x + radius + 2));
            const long long j0 = static_cast<long long>(std::floor(y - radius - 2)), j1 = static_cast<long long>(std::ceil(y + radius + 2));
            const long long k0 = static_cast<long long>(std::floor(z - radius - 2)), k1 = static_cast<long long>(std::ceil(z + radius + 2));
            for (long long i = std::max(0LL, i0); i <= std::min<long long>(g.dims[0] - 1, i1); ++i)
                for (long long j = std::max(0LL, j0); j <= std::min<long long>(g.dims[1] - 1, j1); ++j)
                    for (long long k = std::max(1LL, k0); k <= std::min<long long>(g.dims[2] - 1, k1); ++k) {
                        const double dist = std::sqrt((i - x) * (i - x) + (j - y) * (j - y) + (k - z) * (k - z));
                        double& dst = f.values[(i * g.dims[1] + j) * g.dims[2] + k];
                        dst = std::max(dst, soft_edge(dist - radius, 0.6));
                    }
        }
    }
    return f;
}

}  // namespace pat::forward
