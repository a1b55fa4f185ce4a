#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "pat/metrics.hpp"

namespace pat::metrics {

using std::numbers::pi;

double lorentzian(double z, double w, double z0, double a0) {
    return 2.0 * a0 * w / (pi * (w * w + 4.0 * (z - z0) * (z - z0)));
}

double edge_spread(double x, double w, double x0, double a0, double i0) {
    return i0 + a0 * (std::atan((x - x0) / (w / 2.0)) / pi + 0.5);
}

namespace {

constexpr int kMaxIter = 200;

template <std::size_t P>
using Vec = std::array<double, P>;

// Model value and gradient with respect to the parameters at one sample.
template <std::size_t P>
using Model = std::function<double(double x, const Vec<P>& p, Vec<P>& grad)>;

template <std::size_t P>
bool solve(std::array<Vec<P>, P> a, Vec<P> b, Vec<P>& x) {
    for (std::size_t c = 0; c < P; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < P; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-300) return false;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < P; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < P; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = P; c-- > 0;) {
        double s = b[c];
        for (std::size_t k = c + 1; k < P; ++k) s -= a[c][k] * x[k];
        x[c] = s / a[c][c];
    }
    return true;
}

template <std::size_t P>
double cost(const Model<P>& f, std::span<const double> x, std::span<const double> y, const Vec<P>& p) {
    Vec<P> g;
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = f(x[i], p, g) - y[i];
        c += r * r;
    }
    return c;
}

// Damped Gauss-Newton (Levenberg-Marquardt). The accepted cost never increases.
// Parameter 0 is the width and is kept positive; a width collapsing below
// min_width means the data do not resemble the model.
template <std::size_t P>
FitResult refine(const Model<P>& f, std::span<const double> x, std::span<const double> y, Vec<P> p, const Vec<P>& scale,
                 double min_width) {
    double lambda = 1e-3;
    double c = cost(f, x, y, p);
    for (int it = 1; it <= kMaxIter; ++it) {
        std::array<Vec<P>, P> a{};
        Vec<P> g{}, grad;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = f(x[i], p, grad) - y[i];
            for (std::size_t u = 0; u < P; ++u) {
                g[u] += grad[u] * r;
                for (std::size_t v = 0; v < P; ++v) a[u][v] += grad[u] * grad[v];
            }
        }
        bool done = false;
        for (;;) {
            auto damped = a;
            for (std::size_t u = 0; u < P; ++u) damped[u][u] += lambda * std::max(a[u][u], 1e-300);
            Vec<P> rhs, step{};
            for (std::size_t u = 0; u < P; ++u) rhs[u] = -g[u];
            if (!solve<P>(damped, rhs, step)) {
                lambda *= 10.0;
            } else {
                Vec<P> trial = p;
                for (std::size_t u = 0; u < P; ++u) trial[u] += step[u];
                const double tc = trial[0] > 0.0 ? cost(f, x, y, trial) : std::numeric_limits<double>::infinity();
                if (tc <= c) {
                    bool small = true;
                    for (std::size_t u = 0; u < P; ++u) small &= std::abs(step[u]) < 1e-6 * scale[u];
                    p = trial;
                    c = tc;
                    lambda = std::max(lambda / 10.0, 1e-15);
                    done = small || c == 0.0;
                    break;
                }
                lambda *= 10.0;
            }
            if (lambda > 1e15) {
                done = true;  // no descent direction left: stationary point
                break;
            }
        }
        if (p[0] < min_width) fail(ErrorKind::numerical, "fit: width collapsed below the sample spacing");
        if (done) {
            FitResult res;
            res.w = p[0];
            res.center = p[1];
            res.a0 = p[2];
            if constexpr (P > 3) res.i0 = p[3];
            res.residual = std::sqrt(c);
            res.iterations = it;
            return res;
        }
    }
    fail(ErrorKind::numerical, "fit: no convergence within 200 iterations");
}

void check_samples(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorKind::precondition, "fit: position and intensity counts differ");
    if (x.size() < 5) fail(ErrorKind::precondition, "fit: at least 5 samples required");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) fail(ErrorKind::validation, "fit: non-finite sample");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (!(*hi > *lo)) fail(ErrorKind::validation, "fit: degenerate sample positions");
    const auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
    if (!(*yhi > *ylo)) fail(ErrorKind::validation, "fit: constant intensities");
}

double min_spacing(std::span<const double> x) {
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    double step = s.back() - s.front();
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] > s[i - 1]) step = std::min(step, s[i] - s[i - 1]);
    return step;
}

std::vector<double> width_grid(std::span<const double> x) {
    const auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
    const double lo = 0.25 * min_spacing(x), hi = 4.0 * (*xhi - *xlo);
    std::vector<double> w;
    for (int k = 0; k <= 60; ++k) w.push_back(lo * std::pow(hi / lo, k / 60.0));
    return w;
}

}  // namespace

FitResult fit_lorentzian_lsf(std::span<const double> z, std::span<const double> y) {
    check_samples(z, y);
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    const double span = *hi - *lo;
    // Coarse search with the amplitude solved in closed form.
    Vec<3> best{1.0, 0.0, 0.0};
    double best_cost = std::numeric_limits<double>::infinity();
    for (double w : width_grid(z))
        for (int k = 0; k <= 80; ++k) {
            const double z0 = *lo + span * k / 80.0;
            double sgy = 0.0, sgg = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double g = lorentzian(z[i], w, z0, 1.0);
                sgy += g * y[i];
                sgg += g * g;
            }
            const double a0 = sgy / sgg;
            double c = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) c += std::pow(a0 * lorentzian(z[i], w, z0, 1.0) - y[i], 2);
            if (c < best_cost) best_cost = c, best = {w, z0, a0};
        }
    Model<3> model = [](double x, const Vec<3>& p, Vec<3>& g) {
        const double w = p[0], d = x - p[1], a0 = p[2];
        const double den = w * w + 4.0 * d * d;
        g[0] = 2.0 * a0 * (4.0 * d * d - w * w) / (pi * den * den);
        g[1] = 16.0 * a0 * w * d / (pi * den * den);
        g[2] = 2.0 * w / (pi * den);
        return 2.0 * a0 * w / (pi * den);
    };
    const double amp = std::max(std::abs(best[2]), 1e-300);
    return refine<3>(model, z, y, best, {span, span, amp}, 0.25 * min_spacing(z));
}

FitResult fit_esf(std::span<const double> x, std::span<const double> y) {
    check_samples(x, y);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double span = *hi - *lo;
    Vec<4> best{1.0, 0.0, 0.0, 0.0};
    double best_cost = std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(x.size());
    for (double w : width_grid(x))
        for (int k = 0; k <= 80; ++k) {
            const double x0 = *lo + span * k / 80.0;
            // Least squares for y = i0 + a0 * s(x).
            double ss = 0.0, s1 = 0.0, sy = 0.0, y1 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double s = edge_spread(x[i], w, x0, 1.0, 0.0);
                ss += s * s, s1 += s, sy += s * y[i], y1 += y[i];
            }
            const double det = n * ss - s1 * s1;
            if (std::abs(det) < 1e-300) continue;
            const double a0 = (n * sy - s1 * y1) / det;
            const double i0 = (y1 - a0 * s1) / n;
            double c = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) c += std::pow(edge_spread(x[i], w, x0, a0, i0) - y[i], 2);
            if (c < best_cost) best_cost = c, best = {w, x0, a0, i0};
        }
    Model<4> model = [](double xv, const Vec<4>& p, Vec<4>& g) {
        const double w = p[0], d = xv - p[1], a0 = p[2];
        const double s = 2.0 * d / w;
        const double ds = 1.0 / (1.0 + s * s);
        g[0] = a0 / pi * ds * (-2.0 * d / (w * w));
        g[1] = a0 / pi * ds * (-2.0 / w);
        g[2] = std::atan(s) / pi + 0.5;
        g[3] = 1.0;
        return p[3] + a0 * g[2];
    };
    const auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
    const double amp = *yhi - *ylo;
    return refine<4>(model, x, y, best, {span, span, amp, amp}, 0.25 * min_spacing(x));
}

}  // namespace pat::metrics
