#include "pat/recon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lines.hpp"

namespace pat::recon {

double SensorRecord::aperture_measure() const {
    double x = 1.0;
    for (auto n : grid) x *= static_cast<double>(n) * pitch;
    return x;
}

void SensorRecord::validate() const {
    if (lateral_dims < 1 || lateral_dims > 2) fail(ErrorKind::precondition, "record: lateral dimension must be 1 or 2");
    if (grid.size() != lateral_dims) fail(ErrorKind::precondition, "record: grid rank does not match");
    for (auto n : grid)
        if (n < 2 || n % 2) fail(ErrorKind::precondition, "record: lateral grid sizes must be even");
    if (!(pitch > 0.0) || !(dt > 0.0) || !(sound_speed > 0.0))
        fail(ErrorKind::validation, "record: pitch, dt and sound speed must be positive");
    if (n_time < 2) fail(ErrorKind::precondition, "record: need at least two time samples");
    if (positions.size() != n_sensors * lateral_dims || weights.size() != n_sensors ||
        samples.size() != n_sensors * n_time)
        fail(ErrorKind::precondition, "record: array sizes are inconsistent");
    for (double v : samples)
        if (!std::isfinite(v)) fail(ErrorKind::validation, "record: non-finite sample");
    for (std::size_t m = 0; m < n_sensors; ++m)
        for (std::size_t a = 0; a < lateral_dims; ++a) {
            const double half = 0.5 * static_cast<double>(grid[a]) * pitch;
            const double x = positions[m * lateral_dims + a];
            if (!std::isfinite(x) || x < -half - 1e-9 * pitch || x > half + 1e-9 * pitch)
                fail(ErrorKind::validation, "record: sensor outside the aperture");
        }
}

SensorRecord full_grid_record(const std::vector<std::size_t>& grid, double pitch, std::size_t n_time, double dt,
                              double sound_speed) {
    SensorRecord r;
    r.lateral_dims = grid.size();
    r.grid = grid;
    r.pitch = pitch;
    r.dt = dt;
    r.sound_speed = sound_speed;
    r.n_sensors = product(grid);
    r.n_time = n_time;
    r.samples.assign(r.n_sensors * n_time, 0.0);
    r.weights.assign(r.n_sensors, std::pow(pitch, static_cast<double>(grid.size())));
    r.positions.resize(r.n_sensors * grid.size());
    for (std::size_t m = 0; m < r.n_sensors; ++m) {
        std::size_t rem = m;
        for (std::size_t a = grid.size(); a-- > 0;) {
            const auto i = static_cast<double>(rem % grid[a]);
            rem /= grid[a];
            r.positions[m * grid.size() + a] = (i - static_cast<double>(grid[a] / 2)) * pitch;
        }
    }
    return r;
}

std::vector<long long> grid_nodes(const SensorRecord& rec) {
    std::vector<long long> nodes(rec.n_sensors, -1);
    for (std::size_t m = 0; m < rec.n_sensors; ++m) {
        long long node = 0;
        bool ok = true;
        for (std::size_t a = 0; a < rec.lateral_dims; ++a) {
            const double u = rec.positions[m * rec.lateral_dims + a] / rec.pitch + static_cast<double>(rec.grid[a] / 2);
            const double r = std::round(u);
            if (std::abs(u - r) > 1e-6 || r < 0 || r >= static_cast<double>(rec.grid[a])) {
                ok = false;
                break;
            }
            node = node * static_cast<long long>(rec.grid[a]) + static_cast<long long>(r);
        }
        if (ok) nodes[m] = node;
    }
    return nodes;
}

bool is_full_grid(const SensorRecord& rec) {
    const std::size_t total = product(rec.grid);
    if (rec.n_sensors != total) return false;
    std::vector<char> seen(total, 0);
    for (long long node : grid_nodes(rec)) {
        if (node < 0 || seen[node]) return false;
        seen[node] = 1;
    }
    return true;
}

double kappa(std::span<const double> j, double l) {
    double r2 = l * l;
    for (double v : j) r2 += v * v;
    if (l == 0.0) return 0.0;
    return (l > 0 ? 1.0 : -1.0) * std::sqrt(r2);
}

double amplitude_factor(std::span<const double> j, double l) {
    const double k = kappa(j, l);
    if (l == 0.0 || k == 0.0) return 0.0;
    return 2.0 * l / k;
}

namespace {

std::vector<double> lateral_scale(const SensorRecord& rec, const std::vector<std::size_t>& grid) {
    std::vector<double> s;
    const double depth = 2.0 * static_cast<double>(rec.n_time) * rec.depth_step();
    for (auto n : grid) s.push_back(depth / (static_cast<double>(n) * rec.pitch));
    return s;
}

void hermitian_symmetrize(ComplexArray& f) {
    const std::size_t d = f.ndim();
    ComplexArray src = f;
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        std::size_t rem = flat, mirror = 0, stride = 1;
        for (std::size_t a = d; a-- > 0;) {
            const std::size_t i = rem % f.dims[a];
            rem /= f.dims[a];
            mirror += ((f.dims[a] - i) % f.dims[a]) * stride;
            stride *= f.dims[a];
        }
        f[flat] = 0.5 * (src[flat] + std::conj(src[mirror]));
    }
}

Field finish(const ComplexArray& lines, const SensorRecord& rec, const std::vector<std::size_t>& grid,
             detail::LineMethod method, const Options& opt) {
    if (opt.upsample < 1) fail(ErrorKind::parameter, "reconstruct: upsample must be >= 1");
    SensorRecord geom = rec;
    geom.grid = grid;
    Spectrum spec = spectrum_from_lines(
        lines, geom, method == detail::LineMethod::nufft ? TimeStep::nufft : TimeStep::linear_interp, opt.window);
    return image_from_spectrum(spec, geom, opt.upsample);
}

ComplexArray grid_lines(const SensorRecord& rec) {
    rec.validate();
    if (!is_full_grid(rec)) fail(ErrorKind::precondition, "reconstruct: sensors do not form the complete grid");
    std::vector<std::size_t> dims = rec.grid;
    dims.push_back(rec.n_time);
    ComplexArray lines(dims);
    const auto nodes = grid_nodes(rec);
    for (std::size_t m = 0; m < rec.n_sensors; ++m)
        for (std::size_t t = 0; t < rec.n_time; ++t)
            lines[nodes[m] * rec.n_time + t] = rec.samples[m * rec.n_time + t];
    nufft::fft_centered_leading(lines, rec.lateral_dims, nufft::Direction::forward);
    return lines;
}

}  // namespace

Spectrum spectrum_from_lines(const ComplexArray& lines, const SensorRecord& rec, TimeStep step,
                             const nufft::WindowSpec& window) {
    const std::size_t n = rec.n_time;
    const double half = static_cast<double>(n);
    auto rule = [n, half](double rho, std::vector<double>& kap, std::vector<cplx>& mult) {
        for (std::size_t i = 0; i < 2 * n; ++i) {
            const double l = static_cast<double>(i) - half;
            const double k = l == 0.0 ? 0.0 : (l > 0 ? 1.0 : -1.0) * std::sqrt(rho * rho + l * l);
            kap[i] = k;
            // Free-space data on the plane: F = (2l/kappa) * G. Frequencies at or
            // beyond the temporal Nyquist of the mirrored trace carry no data.
            mult[i] = (l == 0.0 || std::abs(k) >= half) ? 0.0 : 2.0 * l / k;
        }
    };
    Spectrum s;
    s.coefficients = detail::transform_lines(
        lines, lateral_scale(rec, rec.grid),
        step == TimeStep::nufft ? detail::LineMethod::nufft : detail::LineMethod::linear, window, rule);
    hermitian_symmetrize(s.coefficients);
    return s;
}

Field image_from_spectrum(Spectrum& spec, const SensorRecord& rec, int upsample) {
    ComplexArray& f = spec.coefficients;
    const std::size_t d = f.ndim();
    const auto u = static_cast<std::size_t>(upsample);
    std::vector<std::size_t> big(f.dims);
    for (auto& v : big) v *= u;
    ComplexArray padded(big);
    std::vector<std::size_t> offset(d);
    for (std::size_t a = 0; a < d; ++a) offset[a] = (big[a] - f.dims[a]) / 2;

    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        std::size_t rem = flat, target = 0, stride = 1;
        bool nyquist = false;
        for (std::size_t a = d; a-- > 0;) {
            const std::size_t i = rem % f.dims[a];
            rem /= f.dims[a];
            nyquist |= (i == 0);
            target += (i + offset[a]) * stride;
            stride *= big[a];
        }
        // A zero-padded Nyquist bin would lose its conjugate partner.
        if (u > 1 && nyquist) continue;
        padded[target] = f[flat];
    }
    nufft::fft_centered_leading(padded, d, nufft::Direction::inverse);

    const double gain = std::pow(static_cast<double>(u), static_cast<double>(d));
    const std::size_t depth_total = big.back();
    const std::size_t depth = depth_total / 2;
    std::vector<std::size_t> odims(big.begin(), big.end() - 1);
    odims.push_back(depth);

    Field out;
    out.values = RealArray(odims);
    double peak = 0.0, imag = 0.0;
    const std::size_t lines = padded.size() / depth_total;
    for (std::size_t line = 0; line < lines; ++line)
        for (std::size_t t = 0; t < depth; ++t) {
            const cplx v = gain * padded[line * depth_total + depth + t];
            out.values[line * depth + t] = v.real();
            peak = std::max(peak, std::abs(v.real()));
            imag = std::max(imag, std::abs(v.imag()));
        }
    spec.imag_residue = peak > 0.0 ? imag / peak : imag;
    for (std::size_t a = 0; a + 1 < d; ++a) {
        out.spacing.push_back(rec.pitch / static_cast<double>(u));
        out.origin.push_back(-static_cast<double>(rec.grid[a] / 2) * rec.pitch);
    }
    out.spacing.push_back(rec.depth_step() / static_cast<double>(u));
    out.origin.push_back(0.0);
    return out;
}

Field reconstruct_equispaced(const SensorRecord& rec, const Options& opt) {
    return finish(grid_lines(rec), rec, rec.grid, detail::LineMethod::nufft, opt);
}

Field reconstruct_interp_fft(const SensorRecord& rec, const Options& opt) {
    return finish(grid_lines(rec), rec, rec.grid, detail::LineMethod::linear, opt);
}

Field reconstruct_nedner(const SensorRecord& rec, const std::vector<std::size_t>& out_dims, const Options& opt) {
    rec.validate();
    if (out_dims.size() != rec.lateral_dims) fail(ErrorKind::precondition, "reconstruct_nedner: out_dims rank mismatch");
    if (rec.n_sensors == 0) fail(ErrorKind::precondition, "reconstruct_nedner: no sensors");
    const double total = std::accumulate(rec.weights.begin(), rec.weights.end(), 0.0);
    const double target = rec.aperture_measure();
    if (std::abs(total - target) > 1e-6 * target)
        fail(ErrorKind::validation, "reconstruct_nedner: weights do not sum to the aperture measure");

    const std::size_t d = rec.lateral_dims;
    const double cell = std::pow(rec.pitch, static_cast<double>(d));
    std::vector<double> pos(rec.positions.size());
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = rec.positions[i] / rec.pitch;
    std::vector<cplx> values(rec.samples.size());
    for (std::size_t m = 0; m < rec.n_sensors; ++m) {
        const double w = rec.weights[m] / cell;
        for (std::size_t t = 0; t < rec.n_time; ++t) values[m * rec.n_time + t] = w * rec.samples[m * rec.n_time + t];
    }
    nufft::NedPlan plan(pos, out_dims, opt.window);
    ComplexArray lines = plan.execute_batch(values, rec.n_time);
    return finish(lines, rec, out_dims, detail::LineMethod::nufft, opt);
}

SensorRecord interpolate_to_grid(const SensorRecord& rec) {
    rec.validate();
    if (rec.lateral_dims != 1) fail(ErrorKind::precondition, "interpolate_to_grid: only 2D records are supported");
    if (rec.n_sensors == 0) fail(ErrorKind::precondition, "interpolate_to_grid: no sensors");
    std::vector<std::size_t> order(rec.n_sensors);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rec.positions[a] < rec.positions[b]; });
    SensorRecord out = full_grid_record(rec.grid, rec.pitch, rec.n_time, rec.dt, rec.sound_speed);
    const std::size_t nt = rec.n_time;
    for (std::size_t i = 0; i < out.n_sensors; ++i) {
        const double x = out.positions[i];
        auto hi = std::lower_bound(order.begin(), order.end(), x,
                                   [&](std::size_t s, double v) { return rec.positions[s] < v; });
        std::size_t a, b;
        double f = 0.0;
        if (hi == order.begin()) {
            a = b = order.front();
        } else if (hi == order.end()) {
            a = b = order.back();
        } else {
            b = *hi;
            a = *(hi - 1);
            const double xa = rec.positions[a], xb = rec.positions[b];
            f = xb > xa ? (x - xa) / (xb - xa) : 0.0;
        }
        for (std::size_t t = 0; t < nt; ++t)
            out.samples[i * nt + t] = (1.0 - f) * rec.samples[a * nt + t] + f * rec.samples[b * nt + t];
    }
    return out;
}

}  // namespace pat::recon
