#pragma once

#include <cmath>
#include <mutex>

#include "pat/nufft.hpp"

namespace pat::nufft::detail {

// Resolved window with the validation done once.
struct Kernel {
    double alpha, rate;

    explicit Kernel(const WindowSpec& resolved) : alpha(resolved.alpha), rate(window_rate(resolved)) {}

    double psi(double theta) const {
        const double r = alpha * alpha - theta * theta;
        return r < 0.0 ? 0.0 : std::cyl_bessel_i(0.0, rate * std::sqrt(r));
    }
    double psihat(double x) const {
        const double r = alpha * alpha * (rate * rate - x * x);
        if (r > 1e-24) {
            const double q = std::sqrt(r);
            return 2.0 * alpha * std::sinh(q) / q;
        }
        if (r < -1e-24) {
            const double q = std::sqrt(-r);
            return 2.0 * alpha * std::sin(q) / q;
        }
        return 2.0 * alpha;
    }
};

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex();

// Plain unscaled transform over the leading axes, batched over the rest.
void fft_leading_plain(ComplexArray& grid, std::size_t axes, Direction dir);

inline long long wrap(long long i, long long n) {
    long long r = i % n;
    return r < 0 ? r + n : r;
}

}  // namespace pat::nufft::detail
