#include <cmath>
#include <numbers>

#include "pat/nufft.hpp"

namespace pat::nufft {

using std::numbers::pi;

std::vector<cplx> nudft_ner_direct(std::span<const cplx> u, std::span<const double> kappas) {
    const double n = static_cast<double>(u.size());
    std::vector<cplx> out(kappas.size());
    for (std::size_t l = 0; l < kappas.size(); ++l) {
        cplx acc{};
        for (std::size_t i = 0; i < u.size(); ++i) {
            // Reduce the phase in integer arithmetic first to keep large products accurate.
            const double ph = std::fmod(kappas[l] * static_cast<double>(i), n);
            acc += u[i] * std::polar(1.0, -2.0 * pi * ph / n);
        }
        out[l] = acc;
    }
    return out;
}

ComplexArray nudft_ned_direct(std::span<const double> positions, std::span<const cplx> values,
                              const std::vector<std::size_t>& out_dims) {
    const std::size_t d = out_dims.size();
    if (d < 1 || d > 2) fail(ErrorKind::precondition, "nudft_ned_direct: only 1 or 2 dimensions are supported");
    if (positions.size() != values.size() * d) fail(ErrorKind::precondition, "nudft_ned_direct: shape mismatch");
    ComplexArray out(out_dims);
    const std::size_t nx = out_dims[0], ny = d == 2 ? out_dims[1] : 1;
    for (std::size_t i = 0; i < nx; ++i) {
        const double jx = static_cast<double>(i) - static_cast<double>(nx / 2);
        for (std::size_t k = 0; k < ny; ++k) {
            const double jy = static_cast<double>(k) - static_cast<double>(ny / 2);
            cplx acc{};
            for (std::size_t m = 0; m < values.size(); ++m) {
                double ph = jx * positions[m * d] / static_cast<double>(nx);
                if (d == 2) ph += jy * positions[m * d + 1] / static_cast<double>(ny);
                ph -= std::floor(ph);
                acc += values[m] * std::polar(1.0, -2.0 * pi * ph);
            }
            out[i * ny + k] = acc;
        }
    }
    return out;
}

}  // namespace pat::nufft
