#include <cmath>
#include <numbers>
#include <sstream>

#include "pat/nufft.hpp"

namespace pat::nufft {

WindowSpec resolve(const WindowSpec& spec) {
    using std::numbers::pi;
    WindowSpec s = spec;
    if (!(s.c > 1.0) || !std::isfinite(s.c)) fail(ErrorKind::parameter, "window: oversampling factor c must be > 1");
    if (s.K < 1) fail(ErrorKind::parameter, "window: K must be >= 1");
    if (s.alpha == 0.0) s.alpha = 0.98 * pi * (2.0 * s.c - 1.0);
    if (s.beta == 0.0) s.beta = pi * (2.0 - 1.0 / s.c);
    const double upper = pi * (2.0 * s.c - 1.0);
    // The window has to stay positive on [-pi, pi] for deapodization.
    if (!(s.alpha > s.c && s.alpha > pi && s.alpha < upper)) {
        std::ostringstream os;
        os << "window: alpha=" << s.alpha << " outside (max(c, pi), pi(2c-1)) = (" << std::max(s.c, pi) << ", " << upper << ")";
        fail(ErrorKind::parameter, os.str());
    }
    if (!(s.beta > 0.0) || !std::isfinite(s.beta)) fail(ErrorKind::parameter, "window: beta must be positive");
    return s;
}

double window_rate(const WindowSpec& s) { return s.beta * (s.K - 0.5) / s.alpha; }

double window_eval(const WindowSpec& spec, double theta) {
    const WindowSpec s = resolve(spec);
    const double r = s.alpha * s.alpha - theta * theta;
    if (r < 0.0) return 0.0;
    return std::cyl_bessel_i(0.0, window_rate(s) * std::sqrt(r));
}

double window_ft_eval(const WindowSpec& spec, double x) {
    const WindowSpec s = resolve(spec);
    const double b = window_rate(s);
    const double r = s.alpha * s.alpha * (b * b - x * x);
    if (r > 1e-24) {
        const double q = std::sqrt(r);
        return 2.0 * s.alpha * std::sinh(q) / q;
    }
    if (r < -1e-24) {
        const double q = std::sqrt(-r);
        return 2.0 * s.alpha * std::sin(q) / q;
    }
    return 2.0 * s.alpha;
}

std::size_t smooth_even_length(double target) {
    auto n = static_cast<std::size_t>(std::ceil(target - 1e-9));
    if (n < 2) n = 2;
    if (n % 2) ++n;
    for (;; n += 2) {
        std::size_t m = n;
        for (std::size_t p : {2u, 3u, 5u, 7u})
            while (m % p == 0) m /= p;
        if (m == 1) return n;
    }
}

}  // namespace pat::nufft
