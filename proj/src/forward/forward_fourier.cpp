#include <algorithm>
#include <cmath>
#include <map>

#include "pat/forward.hpp"

namespace pat::forward {

recon::SensorRecord forward_fourier(const Field& f, double sound_speed, const nufft::WindowSpec& window,
                                    std::size_t n_time) {
    const std::size_t d = f.ndim();
    if (d < 2 || d > 3) fail(ErrorKind::precondition, "forward_fourier: field must be 2D or 3D");
    if (f.spacing.size() != d) fail(ErrorKind::precondition, "forward_fourier: spacing rank mismatch");
    if (!(sound_speed > 0.0)) fail(ErrorKind::validation, "forward_fourier: sound speed must be positive");
    const double pitch = f.spacing[0];
    for (std::size_t a = 1; a + 1 < d; ++a)
        if (std::abs(f.spacing[a] - pitch) > 1e-12 * pitch)
            fail(ErrorKind::precondition, "forward_fourier: lateral spacings must agree");
    const std::size_t depth = f.dims().back();
    const std::size_t lines_count = f.values.size() / depth;
    const std::size_t nt = n_time == 0 ? depth : n_time;
    if (nt < 2) fail(ErrorKind::precondition, "forward_fourier: need at least two time samples");
    const std::size_t nz = std::max(depth, 2 * nt);
    const std::size_t len = 2 * nz;

    double peak = 0.0, plane = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (!std::isfinite(f.values[i])) fail(ErrorKind::validation, "forward_fourier: non-finite field value");
        peak = std::max(peak, std::abs(f.values[i]));
    }
    for (std::size_t line = 0; line < lines_count; ++line) plane = std::max(plane, std::abs(f.values[line * depth]));
    if (plane > 1e-6 * peak) fail(ErrorKind::validation, "forward_fourier: source intersects the sensor plane");

    std::vector<std::size_t> lateral(f.dims().begin(), f.dims().end() - 1);
    std::vector<std::size_t> padded = lateral;
    padded.push_back(nz);
    ComplexArray lines(padded);
    for (std::size_t line = 0; line < lines_count; ++line)
        for (std::size_t z = 0; z < depth; ++z) lines[line * nz + z] = f.values[line * depth + z];
    nufft::fft_centered_leading(lines, d - 1, nufft::Direction::forward);

    // Lines sharing a lateral radius share the frequency set.
    const double dz = f.spacing.back();
    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t line = 0; line < lines_count; ++line) {
        std::size_t rem = line;
        double rho2 = 0.0;
        for (std::size_t a = d - 1; a-- > 0;) {
            const double j = static_cast<double>(rem % lateral[a]) - static_cast<double>(lateral[a] / 2);
            rem /= lateral[a];
            const double s = j * static_cast<double>(len) * dz / (static_cast<double>(lateral[a]) * pitch);
            rho2 += s * s;
        }
        groups[rho2].push_back(line);
    }
    std::vector<std::pair<double, const std::vector<std::size_t>*>> order;
    for (auto& [k, v] : groups) order.emplace_back(k, &v);

    // With F the depth spectrum of the evenly mirrored line, the trace is
    // p(tau) = (1/2n) sum_m F(m) cos(2 pi tau kappa_m / 2n), kappa_m = sqrt(m^2 + rho^2),
    // a sum over non-equispaced frequencies. Frequencies at or above the
    // temporal Nyquist are not representable and are dropped. The mirrored
    // field doubles the free-space pressure on the plane, hence the 1/2.
    const nufft::Fft1d fft(len);
    const double half = static_cast<double>(nz);
    ComplexArray traces(std::vector<std::size_t>{lines_count, nt});
    parallel_for(order.size(), [&](std::size_t g) {
        const double rho2 = order[g].first;
        const auto& members = *order[g].second;
        std::vector<double> pos;
        std::vector<std::size_t> slot;  // plain frequency index per position
        std::vector<double> share;
        for (std::size_t p = 0; p < len; ++p) {
            const double m = p < nz ? static_cast<double>(p) : static_cast<double>(p) - static_cast<double>(len);
            const double k = std::sqrt(m * m + rho2);
            if (k >= half) continue;
            if (m == 0.0) {
                // cos splits into both signs
                for (double sgn : {1.0, -1.0}) {
                    pos.push_back(-sgn * k);
                    slot.push_back(p);
                    share.push_back(0.5);
                }
            } else {
                pos.push_back(m > 0 ? -k : k);
                slot.push_back(p);
                share.push_back(1.0);
            }
        }
        if (pos.empty()) return;
        const std::size_t b = members.size();
        std::vector<cplx> values(pos.size() * b), even(len), spec(len);
        for (std::size_t i = 0; i < b; ++i) {
            const cplx* src = lines.data.data() + members[i] * nz;
            even[0] = src[0];
            even[nz] = cplx{};
            for (std::size_t z = 1; z < nz; ++z) even[z] = even[len - z] = src[z];
            fft.execute(even.data(), spec.data());
            for (std::size_t q = 0; q < pos.size(); ++q)
                values[q * b + i] = spec[slot[q]] * (0.5 * share[q] / static_cast<double>(len));
        }
        const nufft::NedPlan plan(pos, {len}, window);
        const ComplexArray out = plan.execute_batch(values, b);
        for (std::size_t i = 0; i < b; ++i)
            for (std::size_t t = 0; t < nt; ++t) traces[members[i] * nt + t] = out[(nz + t) * b + i];
    });
    std::vector<std::size_t> tdims = lateral;
    tdims.push_back(nt);
    traces.dims = tdims;
    nufft::fft_centered_leading(traces, d - 1, nufft::Direction::inverse);

    recon::SensorRecord rec = recon::full_grid_record(lateral, pitch, nt, dz / sound_speed, sound_speed);
    for (std::size_t i = 0; i < rec.samples.size(); ++i) rec.samples[i] = traces[i].real();
    return rec;
}

recon::SensorRecord subsample(const recon::SensorRecord& full, std::span<const double> positions,
                              std::span<const double> weights) {
    const std::size_t d = full.lateral_dims;
    if (positions.size() != weights.size() * d) fail(ErrorKind::precondition, "subsample: shape mismatch");
    recon::SensorRecord probe = full;
    probe.n_sensors = weights.size();
    probe.positions.assign(positions.begin(), positions.end());
    const auto nodes = recon::grid_nodes(probe);
    const auto full_nodes = recon::grid_nodes(full);
    std::vector<long long> row_of(product(full.grid), -1);
    for (std::size_t m = 0; m < full.n_sensors; ++m)
        if (full_nodes[m] >= 0) row_of[full_nodes[m]] = static_cast<long long>(m);

    recon::SensorRecord out = full;
    out.n_sensors = weights.size();
    out.positions.assign(positions.begin(), positions.end());
    out.weights.assign(weights.begin(), weights.end());
    out.samples.assign(out.n_sensors * full.n_time, 0.0);
    for (std::size_t m = 0; m < out.n_sensors; ++m) {
        if (nodes[m] < 0 || row_of[nodes[m]] < 0) fail(ErrorKind::validation, "subsample: sensor is not on a recorded grid node");
        std::copy_n(full.samples.begin() + row_of[nodes[m]] * full.n_time, full.n_time,
                    out.samples.begin() + m * full.n_time);
    }
    return out;
}

}  // namespace pat::forward
