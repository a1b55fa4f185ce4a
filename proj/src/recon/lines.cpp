#include "lines.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace pat::recon::detail {

namespace {

// Two-tap linear interpolation between integer bins of the centered spectrum.
nufft::NerTaps linear_taps(const std::vector<double>& kappa, const std::vector<cplx>& mult, std::size_t len) {
    nufft::NerTaps t;
    t.taps = 2;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        const double k0 = std::floor(kappa[i]);
        const double f = kappa[i] - k0;
        const auto k = static_cast<long long>(k0);
        const double sign = (k & 1) ? -1.0 : 1.0;  // centered bin k is (-1)^k times plain bin k mod L
        const auto n = static_cast<long long>(len);
        t.index.push_back(static_cast<std::uint32_t>(((k % n) + n) % n));
        t.index.push_back(static_cast<std::uint32_t>((((k + 1) % n) + n) % n));
        t.weight.push_back(mult[i] * (sign * (1.0 - f)));
        t.weight.push_back(mult[i] * (-sign * f));
    }
    return t;
}

}  // namespace

ComplexArray transform_lines(const ComplexArray& lines, const std::vector<double>& lateral_scale, LineMethod method,
                             const nufft::WindowSpec& window, const LineRule& rule) {
    const std::size_t axes = lines.ndim() - 1;
    if (axes == 0 || lateral_scale.size() != axes) fail(ErrorKind::precondition, "transform_lines: bad shape");
    const std::size_t n = lines.dims.back();
    const std::size_t len = 2 * n;
    const std::size_t count = lines.size() / n;

    // Group lines by scaled radius; the map keeps the processing order fixed.
    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t line = 0; line < count; ++line) {
        std::size_t rem = line;
        double rho2 = 0.0;
        for (std::size_t a = axes; a-- > 0;) {
            const double j = static_cast<double>(rem % lines.dims[a]) - static_cast<double>(lines.dims[a] / 2);
            rem /= lines.dims[a];
            rho2 += (j * lateral_scale[a]) * (j * lateral_scale[a]);
        }
        groups[rho2].push_back(line);
    }
    std::vector<std::pair<double, const std::vector<std::size_t>*>> order;
    for (auto& [k, v] : groups) order.emplace_back(k, &v);

    std::unique_ptr<nufft::NerPlan> ner;
    std::unique_ptr<nufft::Fft1d> fft;
    if (method == LineMethod::nufft)
        ner = std::make_unique<nufft::NerPlan>(len, window);
    else
        fft = std::make_unique<nufft::Fft1d>(len);
    const std::size_t work_len = ner ? ner->oversampled_length() : len;

    std::vector<std::size_t> odims = lines.dims;
    odims.back() = len;
    ComplexArray out(odims);

    parallel_for(order.size(), [&](std::size_t g) {
        std::vector<double> kappa(len), active_kappa;
        std::vector<cplx> mult(len), active_mult;
        std::vector<std::size_t> slots;
        rule(std::sqrt(order[g].first), kappa, mult);
        for (std::size_t l = 0; l < len; ++l) {
            if (mult[l] == cplx{}) continue;
            slots.push_back(l);
            active_kappa.push_back(kappa[l]);
            // e^{i pi kappa} moves the evaluation from plain to centered sample indices.
            active_mult.push_back(ner ? mult[l] * std::polar(1.0, std::numbers::pi * kappa[l]) : mult[l]);
        }
        const nufft::NerTaps taps =
            ner ? ner->taps(active_kappa, active_mult) : linear_taps(active_kappa, active_mult, len);

        std::vector<cplx> mirrored(len), work(work_len), values(slots.size());
        for (std::size_t line : *order[g].second) {
            const cplx* src = lines.data.data() + line * n;
            mirrored[0] = cplx{};
            for (std::size_t t = 0; t < n; ++t) mirrored[n + t] = src[t];
            for (std::size_t t = 1; t < n; ++t) mirrored[n - t] = src[t];
            if (ner)
                ner->oversample(mirrored.data(), work.data());
            else
                fft->execute(mirrored.data(), work.data());
            nufft::apply_taps(taps, work.data(), values.data());
            cplx* dst = out.data.data() + line * len;
            for (std::size_t i = 0; i < slots.size(); ++i) dst[slots[i]] = values[i];
        }
    });
    return out;
}

}  // namespace pat::recon::detail
