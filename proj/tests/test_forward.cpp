#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "pat/forward.hpp"

using namespace pat;
using namespace pat::forward;

TEST_CASE("analytic N-wave") {
    const Ball b{{0.0, 0.0, 2e-3}, 2e-4, 3.0};
    const std::vector<double> sensor = {0.0, 0.0, 0.0};
    const double c = 1500.0, d = 2e-3;
    std::vector<double> t;
    for (int k = 0; k < 200; ++k) t.push_back(k * 1e-8);
    const auto p = sphere_analytic(b, sensor, t, c);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double u = d - c * t[k];
        const double want = std::abs(u) <= b.radius ? 3.0 * u / (2.0 * d) : 0.0;
        CHECK(p[k] == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK_THROWS_AS(sphere_analytic(b, std::vector<double>{0.0, 0.0, 2e-3}, t, c), Error);
}

TEST_CASE("interval-averaged N-wave matches numeric averaging") {
    const Ball b{{1e-4, -2e-4, 1.5e-3}, 3e-4, 1.0};
    const std::vector<double> sensor = {0.0, 0.0, 0.0};
    const double c = 1500.0, h = 4e-8;
    std::vector<double> t;
    for (int k = 0; k < 150; ++k) t.push_back(k * h);
    const auto avg = sphere_analytic_averaged(b, sensor, t, c, h);
    for (std::size_t k = 0; k < t.size(); k += 7) {
        const double want = oracle::integrate(
                                [&](double s) { return sphere_analytic(b, sensor, std::vector<double>{s}, c)[0]; },
                                t[k] - h / 2, t[k] + h / 2, 1e-14) /
                            h;
        CHECK(avg[k] == doctest::Approx(want).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("spherical means quadrature against the N-wave") {
    const std::size_t n = 48;
    const double h = 1e-4;
    const GridSpec g{{n, n, n}, h};
    const Ball b{{0.0, 0.0, 24 * h}, 8 * h, 1.0};
    const Field f = ball_field(g, b, 4);
    const std::vector<double> sensor = {0.0, 0.0, 0.0};
    const double c = 1500.0, dt = h / c;
    std::vector<double> t;
    for (int k = 0; k < 48; ++k) t.push_back(k * dt);
    const auto quad = spherical_means_quadrature(f, sensor, t, c);
    const auto exact = sphere_analytic_averaged(b, sensor, t, c, dt);
    // The voxelized ball smears the jumps at |d - ct| = R over about two
    // samples, which dominates the difference.
    CHECK(oracle::rel_l2(quad, exact) < 0.15);
    // Zero crossing at the travel time to the center.
    CHECK(quad[23] > 0.0);
    CHECK(quad[25] < 0.0);
    CHECK(std::abs(quad[24]) < 0.05 * *std::max_element(quad.begin(), quad.end()));
}

TEST_CASE("spherical means quadrature against a Gaussian in closed form") {
    const double sigma = 4e-4, d = 22e-4, c = 1500.0, dt = 1e-4 / c;
    // Mean of the Gaussian over a sphere of radius r whose center is d away.
    auto t_mean = [&](double t) {
        const double r = c * t;
        if (r <= 0.0) return 0.0;
        const double m = sigma * sigma / (2.0 * r * d) *
                         (std::exp(-(r - d) * (r - d) / (2 * sigma * sigma)) - std::exp(-(r + d) * (r + d) / (2 * sigma * sigma)));
        return t * m;
    };
    std::vector<double> t, want;
    for (int k = 0; k < 40; ++k) {
        t.push_back(k * dt);
        want.push_back((t_mean(k * dt + dt / 2) - t_mean(k * dt - dt / 2)) / dt);
    }
    auto error = [&](std::size_t n, double h) {
        const std::vector<double> ctr = {0.0, 0.0, d};
        const Field f = gaussian_blob(GridSpec{{n, n, n}, h}, ctr, sigma);
        return oracle::rel_l2(spherical_means_quadrature(f, std::vector<double>{0.0, 0.0, 0.0}, t, c), want);
    };
    const double coarse = error(48, 1e-4), fine = error(96, 0.5e-4);
    CHECK(coarse < 0.02);
    // Trilinear sampling is second order in the voxel size.
    CHECK(coarse / fine > 3.5);
}

TEST_CASE("noise has the requested SNR and is white") {
    recon::SensorRecord r = recon::full_grid_record({8}, 1e-4, 256, 1e-7, 1500.0);
    for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] = std::sin(0.05 * static_cast<double>(i));
    const double signal = std::sqrt(std::inner_product(r.samples.begin(), r.samples.end(), r.samples.begin(), 0.0) /
                                    static_cast<double>(r.samples.size()));
    std::vector<double> kurtosis, lag1;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto noisy = add_noise(r, 30.0, seed);
        std::vector<double> e(r.samples.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = noisy.samples[i] - r.samples[i];
        double m2 = 0.0, m4 = 0.0, c1 = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) {
            m2 += e[i] * e[i];
            m4 += std::pow(e[i], 4);
            if (i) c1 += e[i] * e[i - 1];
        }
        const double n = static_cast<double>(e.size());
        CHECK(20.0 * std::log10(signal / std::sqrt(m2 / n)) == doctest::Approx(30.0).epsilon(1e-9));
        kurtosis.push_back((m4 / n) / std::pow(m2 / n, 2));
        lag1.push_back(c1 / m2);
    }
    CHECK(oracle::median(kurtosis) == doctest::Approx(3.0).epsilon(0.05));
    CHECK(std::abs(oracle::median(lag1)) < 0.02);

    const auto a = add_noise(r, 20.0, 5), b = add_noise(r, 20.0, 5), c = add_noise(r, 20.0, 6);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    CHECK(add_noise(r, std::numeric_limits<double>::infinity(), 1).samples == r.samples);
    CHECK_THROWS_AS(add_noise(r, std::nan(""), 1), Error);
}

TEST_CASE("subsampling a full record") {
    recon::SensorRecord r = recon::full_grid_record({8}, 1e-4, 4, 1e-7, 1500.0);
    std::iota(r.samples.begin(), r.samples.end(), 0.0);
    const std::vector<double> pos = {-4e-4, 1e-4};
    const std::vector<double> w = {0.3, 0.5};
    const auto s = subsample(r, pos, w);
    CHECK(s.n_sensors == 2);
    // node 0 sits at -4 * pitch, node 5 at +1 * pitch
    CHECK(s.samples == std::vector<double>{0, 1, 2, 3, 20, 21, 22, 23});
    CHECK(s.weights == w);
    CHECK_THROWS_AS(subsample(r, std::vector<double>{0.5e-4}, std::vector<double>{1.0}), Error);
}

TEST_CASE("phantom primitives") {
    const double h = 1e-4;
    const GridSpec g{{32, 32, 32}, h};
    const Field ball = ball_field(g, Ball{{0.0, 0.0, 16 * h}, 6 * h, 2.0});
    const double volume = std::accumulate(ball.values.data.begin(), ball.values.data.end(), 0.0);
    CHECK(volume == doctest::Approx(2.0 * 4.0 / 3.0 * std::numbers::pi * 216.0).epsilon(0.01));

    const std::vector<double> ctr = {0.0, 10 * h};
    const Field blob = gaussian_blob(GridSpec{{32, 32}, h}, ctr, 2 * h, 1.5);
    CHECK(blob.values[16 * 32 + 10] == doctest::Approx(1.5));
    CHECK(blob.values[17 * 32 + 10] == doctest::Approx(1.5 * std::exp(-1.0 / 8.0)));
    CHECK(blob.values[15 * 32 + 10] == doctest::Approx(blob.values[17 * 32 + 10]));

    Field s = blob;
    smooth(s, 1.0);
    const double before = std::accumulate(blob.values.data.begin(), blob.values.data.end(), 0.0);
    const double after = std::accumulate(s.values.data.begin(), s.values.data.end(), 0.0);
    CHECK(after == doctest::Approx(before).epsilon(1e-6));
}

TEST_CASE("procedural phantoms are seeded") {
    const GridSpec g{{128, 64}, 1e-4};
    const Field a = tree_phantom(g, 1), b = tree_phantom(g, 1), c = tree_phantom(g, 2);
    CHECK(a.values.data == b.values.data);
    CHECK(a.values.data != c.values.data);
    CHECK(*std::min_element(a.values.data.begin(), a.values.data.end()) >= 0.0);
    CHECK(*std::max_element(a.values.data.begin(), a.values.data.end()) > 0.0);

    const GridSpec g3{{32, 32, 24}, 1e-4};
    const Field y = yarn_phantom(g3, 3), z = yarn_phantom(g3, 3);
    CHECK(y.values.data == z.values.data);
    CHECK(*std::max_element(y.values.data.begin(), y.values.data.end()) > 0.0);
}

TEST_CASE("Fourier forward model") {
    const double h = 1e-4, c = 1500.0;
    const GridSpec g{{64, 64}, h};
    const std::vector<double> ctr = {0.0, 20 * h};
    const Field f = gaussian_blob(g, ctr, 1.5 * h);

    const auto rec = forward_fourier(f, c);
    CHECK(rec.n_sensors == 64);
    CHECK(rec.n_time == 64);
    CHECK(rec.dt == doctest::Approx(h / c));
    CHECK(forward_fourier(f, c, {}, 160).n_time == 160);

    // Causal: nothing arrives before the wavefront leaves the blob.
    const double* trace = rec.samples.data() + 32 * rec.n_time;
    const double top = *std::max_element(trace, trace + rec.n_time);
    for (std::size_t t = 0; t < 11; ++t) CHECK(std::abs(trace[t]) < 1e-3 * top);

    // Linear in the initial pressure.
    Field twice = f;
    for (auto& v : twice.values.data) v *= 2.0;
    const auto r2 = forward_fourier(twice, c);
    for (std::size_t i = 0; i < rec.samples.size(); i += 97) CHECK(r2.samples[i] == doctest::Approx(2.0 * rec.samples[i]));
}

TEST_CASE("Fourier forward model against spherical means") {
    const double h = 1e-4, c = 1500.0;
    const std::size_t n = 48;
    const GridSpec g{{n, n, n}, h};
    const std::vector<double> ctr = {0.0, 0.0, 19.2 * h};
    const Field f = gaussian_blob(g, ctr, 3.0 * h);
    const auto rec = forward_fourier(f, c, {}, 32);
    const double* trace = rec.samples.data() + (24 * n + 24) * rec.n_time;
    std::vector<double> t, fourier(trace, trace + rec.n_time);
    for (std::size_t k = 0; k < rec.n_time; ++k) t.push_back(k * rec.dt);
    const auto quad = spherical_means_quadrature(f, std::vector<double>{0.0, 0.0, 0.0}, t, c);
    CHECK(oracle::rel_l2(fourier, quad) < 0.05);
    // The bipolar pulse changes sign at the travel time.
    CHECK(fourier[19] > 0.0);
    CHECK(fourier[20] < 0.0);
}
