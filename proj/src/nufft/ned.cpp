#include <cmath>
#include <numbers>

#include "kernel.hpp"

namespace pat::nufft {

using std::numbers::pi;

NedPlan::NedPlan(std::span<const double> positions, const std::vector<std::size_t>& out_dims, const WindowSpec& spec)
    : d_(out_dims.size()), dims_(out_dims), spec_(resolve(spec)) {
    if (d_ < 1 || d_ > 2) fail(ErrorKind::precondition, "nufft_ned: only 1 or 2 dimensions are supported");
    if (positions.size() % d_) fail(ErrorKind::precondition, "nufft_ned: positions are not M x D");
    for (auto n : dims_)
        if (n == 0 || n % 2) fail(ErrorKind::precondition, "nufft_ned: output dims must be even");
    m_ = positions.size() / d_;
    taps_ = 2 * spec_.K;
    detail::Kernel ker(spec_);

    for (auto n : dims_) ldims_.push_back(smooth_even_length(spec_.c * static_cast<double>(n)));
    base_.resize(m_ * d_);
    weight_.resize(m_ * d_ * taps_);
    for (std::size_t m = 0; m < m_; ++m) {
        for (std::size_t a = 0; a < d_; ++a) {
            const double x = positions[m * d_ + a];
            if (!std::isfinite(x)) fail(ErrorKind::range, "nufft_ned: non-finite position");
            const double c = static_cast<double>(ldims_[a]) / static_cast<double>(dims_[a]);
            const long long mid = round_half_away(c * x);
            base_[m * d_ + a] = mid - spec_.K + 1;
            for (int k = 0; k < taps_; ++k) {
                const double mu = static_cast<double>(mid - spec_.K + 1 + k);
                weight_[(m * d_ + a) * taps_ + k] = ker.psihat(x - mu / c) / (2.0 * pi * c);
            }
        }
    }
    for (auto n : dims_)
        for (std::size_t i = 0; i < n; ++i) {
            const double j = static_cast<double>(i) - static_cast<double>(n / 2);
            deapod_.push_back(1.0 / ker.psi(2.0 * pi * j / static_cast<double>(n)));
        }
}

ComplexArray NedPlan::execute(std::span<const cplx> values) const {
    ComplexArray batched = execute_batch(values, 1);
    batched.dims.pop_back();
    return batched;
}

ComplexArray NedPlan::execute_batch(std::span<const cplx> values, std::size_t batch) const {
    if (values.size() != m_ * batch) fail(ErrorKind::precondition, "nufft_ned: values do not match plan");
    std::vector<std::size_t> gdims = ldims_;
    gdims.push_back(batch);
    ComplexArray grid(gdims);
    const auto lx = static_cast<long long>(ldims_[0]);
    const long long ly = d_ == 2 ? static_cast<long long>(ldims_[1]) : 1;

    // Samples are spread in ascending order so every node sees a fixed summation order.
    for (std::size_t m = 0; m < m_; ++m) {
        const cplx* v = values.data() + m * batch;
        const double* wx = weight_.data() + (m * d_) * taps_;
        for (int kx = 0; kx < taps_; ++kx) {
            const long long ix = detail::wrap(base_[m * d_] + kx, lx);
            if (d_ == 1) {
                cplx* g = grid.data.data() + ix * batch;
                for (std::size_t b = 0; b < batch; ++b) g[b] += wx[kx] * v[b];
                continue;
            }
            const double* wy = weight_.data() + (m * d_ + 1) * taps_;
            for (int ky = 0; ky < taps_; ++ky) {
                const long long iy = detail::wrap(base_[m * d_ + 1] + ky, ly);
                const double w = wx[kx] * wy[ky];
                cplx* g = grid.data.data() + (ix * ly + iy) * batch;
                for (std::size_t b = 0; b < batch; ++b) g[b] += w * v[b];
            }
        }
    }

    detail::fft_leading_plain(grid, d_, Direction::forward);

    std::vector<std::size_t> odims = dims_;
    odims.push_back(batch);
    ComplexArray out(odims);
    const std::size_t nx = dims_[0], ny = d_ == 2 ? dims_[1] : 1;
    for (std::size_t i = 0; i < nx; ++i) {
        const long long qx = detail::wrap(static_cast<long long>(i) - static_cast<long long>(nx / 2), lx);
        for (std::size_t k = 0; k < ny; ++k) {
            long long q = qx;
            double scale = deapod_[i];
            if (d_ == 2) {
                q = qx * ly + detail::wrap(static_cast<long long>(k) - static_cast<long long>(ny / 2), ly);
                scale *= deapod_[nx + k];
            }
            const cplx* src = grid.data.data() + q * batch;
            cplx* dst = out.data.data() + (i * ny + k) * batch;
            for (std::size_t b = 0; b < batch; ++b) dst[b] = src[b] * scale;
        }
    }
    return out;
}

ComplexArray nufft_ned(std::span<const double> positions, std::span<const cplx> values,
                       const std::vector<std::size_t>& out_dims, const WindowSpec& spec) {
    NedPlan plan(positions, out_dims, spec);
    return plan.execute(values);
}

}  // namespace pat::nufft
