#include <cmath>
#include <numbers>

#include "kernel.hpp"

namespace pat::nufft {

using std::numbers::pi;

NerPlan::NerPlan(std::size_t n, const WindowSpec& spec) : n_(n), spec_(resolve(spec)) {
    if (n == 0) fail(ErrorKind::precondition, "nufft_ner: empty input");
    l_ = smooth_even_length(spec_.c * static_cast<double>(n));
    detail::Kernel ker(spec_);
    inv_psi_.resize(n);
    for (std::size_t i = 0; i < n; ++i) inv_psi_[i] = 1.0 / ker.psi(2.0 * pi * static_cast<double>(i) / n - pi);
    phase_.resize(2 * l_);
    for (std::size_t m = 0; m < 2 * l_; ++m) phase_[m] = std::polar(1.0, pi * static_cast<double>(m) / effective_c());
    fft_ = std::make_unique<Fft1d>(l_);
}

void NerPlan::oversample(const cplx* u, cplx* work) const {
    thread_local std::vector<cplx> padded;
    padded.assign(l_, cplx{});
    for (std::size_t i = 0; i < n_; ++i) padded[i] = u[i] * inv_psi_[i];
    fft_->execute(padded.data(), work);
}

NerTaps NerPlan::taps(std::span<const double> kappas, std::span<const cplx> scale) const {
    detail::Kernel ker(spec_);
    const double c = effective_c();
    const double n = static_cast<double>(n_);
    const auto len = static_cast<long long>(l_);
    NerTaps t;
    t.taps = 2 * spec_.K;
    t.index.resize(kappas.size() * t.taps);
    t.weight.resize(kappas.size() * t.taps);
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        double kap = kappas[i];
        if (!std::isfinite(kap) || std::abs(kap) > n)
            fail(ErrorKind::range, "nufft_ner: frequency outside [-N, N]");
        // The sum is N-periodic in kappa; evaluate at the representative nearest zero.
        if (std::abs(kap) > n / 2) kap -= n * static_cast<double>(round_half_away(kap / n));
        const long long mid = round_half_away(c * kap);
        // e^{-i pi xi} = e^{-i pi kappa} e^{i pi mu / c}; the second factor is tabulated.
        const cplx s = (scale.empty() ? cplx{1.0} : scale[i]) * std::polar(1.0, -pi * kap);
        for (int k = -spec_.K + 1; k <= spec_.K; ++k) {
            const long long mu = mid + k;
            const double xi = kap - static_cast<double>(mu) / c;
            const std::size_t slot = i * t.taps + (k + spec_.K - 1);
            t.index[slot] = static_cast<std::uint32_t>(detail::wrap(mu, len));
            t.weight[slot] = s * (ker.psihat(xi) / (2.0 * pi * c)) * phase_[detail::wrap(mu, 2 * len)];
        }
    }
    return t;
}

void apply_taps(const NerTaps& t, const cplx* line, cplx* out) {
    const std::size_t m = t.size();
    const std::uint32_t* idx = t.index.data();
    const cplx* w = t.weight.data();
    for (std::size_t i = 0; i < m; ++i) {
        cplx acc{};
        for (int k = 0; k < t.taps; ++k) acc += w[k] * line[idx[k]];
        out[i] = acc;
        idx += t.taps;
        w += t.taps;
    }
}

std::vector<cplx> NerPlan::execute(std::span<const cplx> u, std::span<const double> kappas) const {
    if (u.size() != n_) fail(ErrorKind::precondition, "nufft_ner: input length does not match plan");
    std::vector<cplx> work(l_), out(kappas.size());
    oversample(u.data(), work.data());
    apply_taps(taps(kappas), work.data(), out.data());
    return out;
}

std::vector<cplx> nufft_ner(std::span<const cplx> u, std::span<const double> kappas, const WindowSpec& spec) {
    NerPlan plan(u.size(), spec);
    return plan.execute(u, kappas);
}

}  // namespace pat::nufft
