#include <fftw3.h>

#include "kernel.hpp"

namespace pat::nufft {

namespace detail {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

namespace {

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

// Multiplies by (-1)^(i_0 + i_1 + ...) over the leading axes.
void checkerboard(ComplexArray& g, std::size_t axes, std::size_t inner) {
    const std::size_t outer = product(std::vector<std::size_t>(g.dims.begin(), g.dims.begin() + axes));
    for (std::size_t idx = 0; idx < outer; ++idx) {
        std::size_t rem = idx, parity = 0;
        for (std::size_t a = axes; a-- > 0;) {
            parity += rem % g.dims[a];
            rem /= g.dims[a];
        }
        if (parity & 1) {
            cplx* p = g.data.data() + idx * inner;
            for (std::size_t k = 0; k < inner; ++k) p[k] = -p[k];
        }
    }
}

}  // namespace

namespace detail {

void fft_leading_plain(ComplexArray& g, std::size_t axes, Direction dir) {
    if (g.size() == 0) return;
    std::size_t inner = 1;
    for (std::size_t a = axes; a < g.ndim(); ++a) inner *= g.dims[a];
    std::vector<fftw_iodim> dims(axes);
    std::size_t stride = inner;
    for (std::size_t a = axes; a-- > 0;) {
        dims[a].n = static_cast<int>(g.dims[a]);
        dims[a].is = dims[a].os = static_cast<int>(stride);
        stride *= g.dims[a];
    }
    fftw_iodim batch{static_cast<int>(inner), 1, 1};
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_guru_dft(static_cast<int>(axes), dims.data(), inner > 1 ? 1 : 0, &batch, as_fftw(g.data.data()),
                                  as_fftw(g.data.data()), dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                  kFlags);
    }
    if (!plan) fail(ErrorKind::numerical, "fft: planner failed");
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace detail

// With i standing for i - N/2 on both sides, the centered transform equals
// the plain one with (-1)^i modulation before and (-1)^(p - N/2) after.
void fft_centered_leading(ComplexArray& g, std::size_t axes, Direction dir) {
    if (axes == 0 || axes > g.ndim()) fail(ErrorKind::precondition, "fft_centered: bad axis count");
    for (std::size_t a = 0; a < axes; ++a)
        if (g.dims[a] % 2) fail(ErrorKind::precondition, "fft_centered: dims must be even");
    if (g.size() == 0) return;
    std::size_t inner = 1;
    for (std::size_t a = axes; a < g.ndim(); ++a) inner *= g.dims[a];

    checkerboard(g, axes, inner);
    detail::fft_leading_plain(g, axes, dir);
    // (-1)^(p - N/2) = (-1)^p * (-1)^(N/2)
    std::size_t half_sum = 0;
    std::size_t total = 1;
    for (std::size_t a = 0; a < axes; ++a) {
        half_sum += g.dims[a] / 2;
        total *= g.dims[a];
    }
    checkerboard(g, axes, inner);
    double scale = (half_sum & 1) ? -1.0 : 1.0;
    if (dir == Direction::inverse) scale /= static_cast<double>(total);
    for (auto& v : g.data) v *= scale;
}

ComplexArray fft_centered(const ComplexArray& grid, Direction dir) {
    ComplexArray out = grid;
    fft_centered_leading(out, out.ndim(), dir);
    return out;
}

Fft1d::Fft1d(std::size_t n, Direction dir) : n_(n) {
    std::vector<cplx> a(n), b(n);
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(a.data()), as_fftw(b.data()),
                             dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD, kFlags);
    if (!plan_) fail(ErrorKind::numerical, "fft: planner failed");
}

Fft1d::~Fft1d() {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void Fft1d::execute(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_), as_fftw(const_cast<cplx*>(in)), as_fftw(out));
}

}  // namespace pat::nufft
