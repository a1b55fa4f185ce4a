#include <cmath>
#include <numbers>
#include <random>

#include "pat/forward.hpp"

namespace pat::forward {

namespace {

// Uniform in (0, 1] from the top 53 bits; mt19937_64 output is specified by
// the standard, so the stream is identical on every platform.
double uniform53(std::mt19937_64& gen) { return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

recon::SensorRecord add_noise(const recon::SensorRecord& rec, double snr_db, std::uint64_t seed) {
    if (std::isnan(snr_db)) fail(ErrorKind::parameter, "add_noise: snr must be a number");
    if (std::isinf(snr_db) && snr_db > 0) return rec;
    if (std::isinf(snr_db)) fail(ErrorKind::parameter, "add_noise: snr of -inf is not meaningful");
    recon::SensorRecord out = rec;
    const std::size_t n = rec.samples.size();
    if (n == 0) return out;

    double signal = 0.0;
    for (double v : rec.samples) signal += v * v;
    signal = std::sqrt(signal / static_cast<double>(n));

    std::mt19937_64 gen(seed);
    std::vector<double> noise(n);
    for (std::size_t i = 0; i < n; i += 2) {
        // Box-Muller
        const double r = std::sqrt(-2.0 * std::log(uniform53(gen)));
        const double phi = 2.0 * std::numbers::pi * uniform53(gen);
        noise[i] = r * std::cos(phi);
        if (i + 1 < n) noise[i + 1] = r * std::sin(phi);
    }
    double mean = 0.0;
    for (double v : noise) mean += v;
    mean /= static_cast<double>(n);
    double rms = 0.0;
    for (auto& v : noise) {
        v -= mean;
        rms += v * v;
    }
    rms = std::sqrt(rms / static_cast<double>(n));
    if (rms == 0.0) return out;
    const double scale = signal / std::pow(10.0, snr_db / 20.0) / rms;
    for (std::size_t i = 0; i < n; ++i) out.samples[i] += scale * noise[i];
    return out;
}

}  // namespace pat::forward
