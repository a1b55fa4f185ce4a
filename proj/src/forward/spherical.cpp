#include <algorithm>
#include <cmath>
#include <numbers>

#include "pat/forward.hpp"

namespace pat::forward {

using std::numbers::pi;

namespace {

double distance(const Ball& ball, std::span<const double> sensor) {
    if (sensor.size() != ball.center.size()) fail(ErrorKind::precondition, "sphere: sensor and ball rank differ");
    double d2 = 0.0;
    for (std::size_t a = 0; a < sensor.size(); ++a) d2 += (sensor[a] - ball.center[a]) * (sensor[a] - ball.center[a]);
    const double d = std::sqrt(d2);
    if (!(ball.radius > 0.0)) fail(ErrorKind::validation, "sphere: radius must be positive");
    if (d <= ball.radius) fail(ErrorKind::validation, "sphere: sensor lies inside the ball");
    return d;
}

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

double trilinear(const Field& f, const double* p) {
    double frac[3];
    long long base[3];
    for (int a = 0; a < 3; ++a) {
        const double u = (p[a] - f.origin[a]) / f.spacing[a];
        const double fl = std::floor(u);
        base[a] = static_cast<long long>(fl);
        frac[a] = u - fl;
    }
    const auto& dims = f.dims();
    double acc = 0.0;
    for (int c = 0; c < 8; ++c) {
        long long idx[3];
        double w = 1.0;
        bool inside = true;
        for (int a = 0; a < 3; ++a) {
            const int bit = (c >> (2 - a)) & 1;
            idx[a] = base[a] + bit;
            w *= bit ? frac[a] : 1.0 - frac[a];
            inside &= idx[a] >= 0 && idx[a] < static_cast<long long>(dims[a]);
        }
        if (inside && w != 0.0) acc += w * f.values[(idx[0] * dims[1] + idx[1]) * dims[2] + idx[2]];
    }
    return acc;
}

}  // namespace

std::vector<double> sphere_analytic(const Ball& ball, std::span<const double> sensor, std::span<const double> times,
                                    double sound_speed) {
    const double d = distance(ball, sensor);
    std::vector<double> p(times.size(), 0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double u = d - sound_speed * times[i];
        if (std::abs(u) <= ball.radius) p[i] = ball.amplitude * u / (2.0 * d);
    }
    return p;
}

std::vector<double> sphere_analytic_averaged(const Ball& ball, std::span<const double> sensor,
                                             std::span<const double> times, double sound_speed, double h) {
    const double d = distance(ball, sensor);
    if (!(h > 0.0)) fail(ErrorKind::parameter, "sphere: averaging window must be positive");
    // Antiderivative of p in t: t M(ct) = A (R^2 - min(u^2, R^2)) / (4 d c), u = d - c t.
    auto prim = [&](double t) {
        const double u = d - sound_speed * t;
        const double r2 = ball.radius * ball.radius;
        return ball.amplitude * (r2 - std::min(u * u, r2)) / (4.0 * d * sound_speed);
    };
    std::vector<double> p(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) p[i] = (prim(times[i] + h / 2) - prim(times[i] - h / 2)) / h;
    return p;
}

std::vector<double> spherical_means_quadrature(const Field& f, std::span<const double> sensor,
                                               std::span<const double> times, double sound_speed,
                                               const QuadratureOptions& opt) {
    if (f.ndim() != 3 || sensor.size() != 3) fail(ErrorKind::precondition, "spherical_means: 3D field required");
    if (opt.polar < 2 || opt.azimuth < 3) fail(ErrorKind::parameter, "spherical_means: too few quadrature nodes");
    double h = opt.step;
    if (h == 0.0) {
        if (times.size() < 2) fail(ErrorKind::parameter, "spherical_means: cannot infer the time step");
        h = times[1] - times[0];
    }
    if (!(h > 0.0)) fail(ErrorKind::parameter, "spherical_means: time step must be positive");

    // Orthonormal frame with the pole along the requested axis.
    double e3[3] = {0.0, 0.0, 1.0};
    if (!opt.axis.empty()) {
        if (opt.axis.size() != 3) fail(ErrorKind::parameter, "spherical_means: axis must have 3 components");
        const double n = std::sqrt(opt.axis[0] * opt.axis[0] + opt.axis[1] * opt.axis[1] + opt.axis[2] * opt.axis[2]);
        if (!(n > 0.0)) fail(ErrorKind::parameter, "spherical_means: zero axis");
        for (int a = 0; a < 3; ++a) e3[a] = opt.axis[a] / n;
    }
    double e1[3] = {1.0, 0.0, 0.0};
    if (std::abs(e3[0]) > 0.9) e1[0] = 0.0, e1[1] = 1.0;
    const double dot = e1[0] * e3[0] + e1[1] * e3[1] + e1[2] * e3[2];
    double n1 = 0.0;
    for (int a = 0; a < 3; ++a) e1[a] -= dot * e3[a], n1 += e1[a] * e1[a];
    for (int a = 0; a < 3; ++a) e1[a] /= std::sqrt(n1);
    const double e2[3] = {e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2], e3[0] * e1[1] - e3[1] * e1[0]};

    std::vector<double> gx, gw;
    gauss_legendre(opt.polar, gx, gw);
    std::vector<double> dirs;  // unit vectors, 3 per node
    std::vector<double> wts;
    for (int i = 0; i < opt.polar; ++i) {
        const double ct = gx[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int k = 0; k < opt.azimuth; ++k) {
            const double phi = 2.0 * pi * (k + 0.5) / opt.azimuth;
            for (int a = 0; a < 3; ++a) dirs.push_back(st * std::cos(phi) * e1[a] + st * std::sin(phi) * e2[a] + ct * e3[a]);
            wts.push_back(gw[i] / (2.0 * opt.azimuth));
        }
    }
    auto t_mean = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double r = sound_speed * t;
        double acc = 0.0, p[3];
        for (std::size_t q = 0; q < wts.size(); ++q) {
            for (int a = 0; a < 3; ++a) p[a] = sensor[a] + r * dirs[3 * q + a];
            acc += wts[q] * trilinear(f, p);
        }
        return t * acc;
    };
    std::vector<double> out(times.size());
    parallel_for(times.size(), [&](std::size_t i) { out[i] = (t_mean(times[i] + h / 2) - t_mean(times[i] - h / 2)) / h; });
    return out;
}

}  // namespace pat::forward
