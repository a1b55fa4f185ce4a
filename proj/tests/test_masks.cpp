#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "pat/masks.hpp"

using namespace pat;
using namespace pat::masks;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

bool power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

MaskSpec spec2d(std::size_t n) {
    MaskSpec s;
    s.dim = 2;
    s.grid = 1024;
    s.pitch = 1e-4;
    s.r0 = 0.0105;
    s.n_req = n;
    return s;
}

MaskSpec spec3d(std::size_t n) {
    MaskSpec s;
    s.dim = 3;
    s.grid = 226;
    s.pitch = 60e-6;
    s.r0 = 3.6e-3;
    s.n_req = n;
    return s;
}

}  // namespace

TEST_CASE("spec validation") {
    MaskSpec s = spec2d(32);
    s.grid = 1023;
    CHECK_THROWS_AS(s.validate(), Error);
    s = spec2d(0);
    CHECK_THROWS_AS(s.validate(), Error);
    s = spec2d(8);
    s.dim = 4;
    CHECK_THROWS_AS(s.validate(), Error);
    s = spec2d(8);
    s.r0 = 0.0;
    CHECK_THROWS_AS(equiangular_mask_2d(s), Error);
}

TEST_CASE("equispaced lattice") {
    const MaskSpec s = spec2d(32);
    for (std::size_t interval : {1u, 7u, 32u}) {
        const SensorMask m = equispaced_mask(s, interval);
        REQUIRE(m.size() == 32);
        for (std::size_t i = 1; i < m.size(); ++i)
            CHECK(m.positions[i] - m.positions[i - 1] == doctest::Approx(interval * s.pitch));
        // Centered: the extra half step sits on the negative side.
        const double mid = 0.5 * (m.positions.front() + m.positions.back());
        CHECK(mid <= 0.0);
        CHECK(mid > -s.pitch);
        CHECK(sum(m.weights) == doctest::Approx(s.aperture_measure()));
    }
    CHECK_THROWS_AS(equispaced_mask(s, 40), Error);  // 31 * 40 nodes exceed the grid

    MaskSpec t = spec3d(1681);
    const SensorMask m3 = equispaced_mask(t, 3);
    CHECK(m3.size() == 1681);
    CHECK(sum(m3.weights) == doctest::Approx(t.aperture_measure()));
    t.n_req = 1625;
    CHECK_THROWS_AS(equispaced_mask(t, 3), Error);
}

TEST_CASE("equiangular sensors sit at equal angular steps") {
    MaskSpec s = spec2d(32);
    const SensorMask m = equiangular_mask_2d(s);
    REQUIRE(m.size() == 32);
    const double half = 512 * s.pitch;
    const double reach = std::min(half, half - s.pitch);
    const double theta_max = std::atan(reach / s.r0);
    for (std::size_t i = 0; i < 32; ++i) {
        const double gamma = std::atan(m.positions[i] / s.r0);
        CHECK(gamma == doctest::Approx(-theta_max + (i + 0.5) * 2.0 * theta_max / 32.0).epsilon(1e-12));
    }
    // Weights follow r^2 and sum to the aperture.
    CHECK(sum(m.weights) == doctest::Approx(s.aperture_measure()));
    for (std::size_t i = 0; i < 32; ++i) {
        const double r2 = s.r0 * s.r0 + m.positions[i] * m.positions[i];
        CHECK(m.weights[i] / m.weights[16] == doctest::Approx(r2 / (s.r0 * s.r0 + m.positions[16] * m.positions[16])));
    }
    const double ratio = *std::max_element(m.weights.begin(), m.weights.end()) /
                         *std::min_element(m.weights.begin(), m.weights.end());
    CHECK(ratio > 10.0);
}

TEST_CASE("equiangular mask around an off-center point of interest") {
    MaskSpec s = spec2d(16);
    s.center = {0.01};
    const SensorMask m = equiangular_mask_2d(s);
    const double reach = 511 * s.pitch - 0.01;
    CHECK(m.positions.back() - 0.01 < reach);
    CHECK(0.01 - m.positions.front() < reach + 1e-12);
    s.center = {0.06};
    CHECK_THROWS_AS(equiangular_mask_2d(s), Error);
}

TEST_CASE("snapping keeps the weight sum and drops duplicates") {
    MaskSpec s = spec2d(200);
    s.grid = 64;
    s.r0 = 1e-3;
    const SensorMask raw = equiangular_mask_2d(s);
    s.snap = true;
    const SensorMask snapped = equiangular_mask_2d(s);
    CHECK(snapped.size() < raw.size());
    CHECK(sum(snapped.weights) == doctest::Approx(sum(raw.weights)));
    std::set<long long> nodes;
    for (double x : snapped.positions) {
        const double k = x / s.pitch;
        CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-12));
        nodes.insert(std::llround(k));
    }
    CHECK(nodes.size() == snapped.size());
}

TEST_CASE("density weights") {
    const std::vector<double> pos = {0.0, 0.0, 3.0, 4.0};
    const std::vector<double> ctr = {0.0, 0.0};
    const auto w = density_weights(pos, 2, ctr, 12.0, 3, 10.0);
    // r = 12 and 13
    CHECK(w[1] / w[0] == doctest::Approx(std::pow(13.0 / 12.0, 3)));
    CHECK(w[0] + w[1] == doctest::Approx(10.0));
    CHECK_THROWS_AS(density_weights(pos, 2, ctr, 0.0, 3, 1.0), Error);
}

TEST_CASE("equi-steradian slices") {
    const double theta_max = std::atan(113 * 60e-6 / 3.6e-3);
    const double cap = 2.0 * std::numbers::pi * (1.0 - std::cos(theta_max));
    for (double n : {200.0, 800.0, 1625.0}) {
        const SliceLayout s = equisteradian_slices(cap / n, theta_max);
        CHECK(s.counts.front() == 1);
        CHECK(s.polar.front() == 0.0);
        std::size_t total = 0;
        for (std::size_t k = 0; k < s.counts.size(); ++k) {
            CHECK(power_of_two(s.counts[k]));
            if (k > 0) {
                CHECK(s.counts[k] >= s.counts[k - 1]);
                CHECK(s.polar[k] > s.polar[k - 1]);
                CHECK(s.polar[k] <= theta_max);
            }
            total += s.counts[k];
        }
        CHECK(total == s.total);
        // Each sensor owns one unit steradian, so the count tracks the cap.
        CHECK(static_cast<double>(s.total) == doctest::Approx(n).epsilon(0.15));
    }
}

TEST_CASE("equi-steradian mask on the volume grid") {
    const MaskSpec s = spec3d(1625);
    const SensorMask m = equisteradian_mask_3d(s);
    CHECK(std::abs(static_cast<double>(m.size()) - 1625.0) <= 0.15 * 1625.0);
    CHECK(sum(m.weights) == doctest::Approx(s.aperture_measure()));
    std::size_t total = 0;
    for (auto c : m.slice_counts) {
        CHECK(power_of_two(c));
        total += c;
    }
    CHECK(total == m.size());
    const double ratio = *std::max_element(m.weights.begin(), m.weights.end()) /
                         *std::min_element(m.weights.begin(), m.weights.end());
    CHECK(ratio == doctest::Approx(9.7).epsilon(0.1));
    // The central sensor sits under the point of interest.
    CHECK(m.positions[0] == doctest::Approx(0.0));
    CHECK(m.positions[1] == doctest::Approx(0.0));
}

TEST_CASE("equi-steradian count responds to the request") {
    std::size_t prev = 0;
    for (std::size_t n : {100u, 400u, 1600u}) {
        const SensorMask m = equisteradian_mask_3d(spec3d(n));
        CHECK(m.size() > prev);
        CHECK(std::abs(static_cast<double>(m.size()) - n) <= 0.3 * n);
        prev = m.size();
    }
    MaskSpec bad = spec3d(100);
    bad.r0 = 1.0;
    CHECK_THROWS_AS(equisteradian_mask_3d(bad), Error);
}

TEST_CASE("snapped equi-steradian mask keeps its total weight") {
    MaskSpec s = spec3d(1625);
    s.snap = true;
    const SensorMask m = equisteradian_mask_3d(s);
    CHECK(sum(m.weights) == doctest::Approx(s.aperture_measure()));
    std::set<std::pair<long long, long long>> nodes;
    for (std::size_t i = 0; i < m.size(); ++i)
        nodes.insert({std::llround(m.positions[2 * i] / s.pitch), std::llround(m.positions[2 * i + 1] / s.pitch)});
    CHECK(nodes.size() == m.size());
}
