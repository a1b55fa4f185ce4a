#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pat/metrics.hpp"

using namespace pat;
using namespace pat::metrics;

namespace {

RealArray image(std::size_t rows, std::size_t cols, const std::function<double(std::size_t, std::size_t)>& f) {
    RealArray a({rows, cols});
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a[i * cols + j] = f(i, j);
    return a;
}

}  // namespace

TEST_CASE("correlation of small images") {
    RealArray a({2, 2}), b({2, 2});
    a.data = {1, 2, 3, 4};
    b.data = {1, 2, 3, 5};
    CHECK(correlation(a, b) == doctest::Approx(oracle::pearson(a.data, b.data)).epsilon(1e-14));
    CHECK(correlation(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    RealArray neg = a;
    for (auto& v : neg.data) v = -v;
    CHECK(std::abs(correlation(a, neg) + 1.0) <= 1e-12);
    // Masked: the last pixel excluded leaves identical data.
    CHECK(correlation(a, b, Mask{1, 1, 1, 0}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(correlation(a, b, Mask{1, 0, 0, 0}), Error);
    RealArray flat({2, 2}, 3.0);
    CHECK_THROWS_AS(correlation(a, flat), Error);
}

TEST_CASE("correlation is invariant to gain and offset") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    RealArray a({16, 16}), b({16, 16});
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = g(rng), b[i] = a[i] + 0.5 * g(rng);
    RealArray c = b;
    for (auto& v : c.data) v = 3.0 * v - 7.0;
    CHECK(correlation(a, c) == doctest::Approx(correlation(a, b)).epsilon(1e-12));
    CHECK(correlation(a, b) == doctest::Approx(oracle::pearson(a.data, b.data)).epsilon(1e-12));
    CHECK(correlation(a, b) == doctest::Approx(correlation(b, a)).epsilon(1e-15));
}

TEST_CASE("Tenenbaum sharpness") {
    const RealArray flat = image(8, 8, [](auto, auto) { return 2.5; });
    CHECK(tenenbaum(flat, full_rect(flat)) == 0.0);
    // Vertical step of height s: the Sobel x response is 4s in the two
    // columns beside the edge and zero elsewhere, over 6 interior rows.
    const double s = 0.75;
    const RealArray step = image(8, 8, [&](auto, std::size_t j) { return j >= 4 ? s : 0.0; });
    CHECK(tenenbaum(step, full_rect(step)) == doctest::Approx(6 * 2 * 16 * s * s));
    CHECK(tenenbaum_normalized(step, full_rect(step)) == doctest::Approx(6 * 2 * 16 * s * s / 64));
    // Transposing the image swaps the two responses.
    const RealArray t = image(8, 8, [&](std::size_t i, auto) { return i >= 4 ? s : 0.0; });
    CHECK(tenenbaum(t, full_rect(t)) == doctest::Approx(tenenbaum(step, full_rect(step))));
    // A linear ramp has constant gradient: gx = 8a per pixel.
    const double a = 0.1;
    const RealArray ramp = image(8, 8, [&](auto, std::size_t j) { return a * static_cast<double>(j); });
    CHECK(tenenbaum(ramp, full_rect(ramp)) == doctest::Approx(36 * 64 * a * a));
    CHECK(tenenbaum(ramp, Rect{2, 2, 3, 3}) == doctest::Approx(64 * a * a));
    CHECK_THROWS_AS(tenenbaum(ramp, Rect{0, 0, 2, 8}), Error);
    CHECK_THROWS_AS(tenenbaum(ramp, Rect{6, 0, 3, 3}), Error);
}

TEST_CASE("maximum intensity projection") {
    RealArray v({2, 3, 4});
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>((i * 7) % 11);
    for (std::size_t axis = 0; axis < 3; ++axis) {
        const RealArray m = mip(v, axis);
        std::vector<std::size_t> dims;
        for (std::size_t a = 0; a < 3; ++a)
            if (a != axis) dims.push_back(v.dims[a]);
        CHECK(m.dims == dims);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t k = 0; k < 4; ++k) {
                    const std::size_t idx[3] = {i, j, k};
                    std::size_t o = 0;
                    for (std::size_t a = 0, s = 0; a < 3; ++a)
                        if (a != axis) o = o * dims[s++] + idx[a];
                    CHECK(m[o] >= v[(i * 3 + j) * 4 + k]);
                }
    }
    CHECK(mip(v, 2)[0] == std::max({v[0], v[1], v[2], v[3]}));
    CHECK_THROWS_AS(mip(v, 3), Error);
}

TEST_CASE("regions of interest") {
    const RealArray model = image(21, 21, [](std::size_t i, std::size_t j) {
        return std::exp(-(std::pow(i - 10.0, 2) + std::pow(j - 10.0, 2)) / 20.0);
    });
    const Disc d{10.0, 10.0, 10.0};
    const Mask all = roi_by_threshold(model, d, 0.0);
    CHECK(mask_count(all) == mask_count(disc_mask(model.dims, d)));
    std::size_t inside = 0;
    for (int i = -5; i <= 5; ++i)
        for (int j = -5; j <= 5; ++j) inside += i * i + j * j <= 25;
    CHECK(mask_count(all) == inside);
    const Mask half = roi_by_threshold(model, d, 0.5);
    for (std::size_t i = 0; i < model.size(); ++i)
        if (half[i]) CHECK(model[i] >= 0.5);
    CHECK(mask_count(half) < mask_count(all));
    const Mask top = roi_by_count(model, d, 5);
    CHECK(mask_count(top) == 5);
    CHECK(top[10 * 21 + 10]);
    const Rect box = bounding_box(all, model.dims);
    CHECK(box.row == 5);
    CHECK(box.rows == 11);
    CHECK(box.cols == 11);
    CHECK_THROWS_AS(roi_by_threshold(model, d, 1.5), Error);
    CHECK_THROWS_AS(roi_by_threshold(model, Disc{100.0, 100.0, 2.0}, 0.0), Error);
}

TEST_CASE("window around the peak") {
    const std::vector<double> p = {0, 1, 5, 2, 1, 0, 0, 0, 0, 0};
    CHECK(window_around_peak(p, 4) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(window_around_peak(p, 8).front() == 0);
    const std::vector<double> q = {0, 0, 0, 0, 0, 0, 0, 1, 9, 2};
    CHECK(window_around_peak(q, 4) == std::vector<std::size_t>{6, 7, 8, 9});
    CHECK_THROWS_AS(window_around_peak(q, 11), Error);
}

TEST_CASE("fits recover exact parameters") {
    std::vector<double> z, y, x, e;
    for (int i = 0; i < 8; ++i) {
        z.push_back(0.5 * i);
        y.push_back(lorentzian(0.5 * i, 1.3, 1.9, 0.8));
    }
    for (int i = -10; i <= 10; ++i) {
        x.push_back(i);
        e.push_back(edge_spread(i, 3.0, 1.0, 2.0, -0.4));
    }
    const FitResult l = fit_lorentzian_lsf(z, y);
    CHECK(std::abs(l.w - 1.3) <= 1e-6 * 1.3);
    CHECK(std::abs(l.center - 1.9) <= 1e-6 * 1.9);
    CHECK(std::abs(l.a0 - 0.8) <= 1e-6 * 0.8);
    const FitResult s = fit_esf(x, e);
    CHECK(std::abs(s.w - 3.0) <= 1e-6 * 3.0);
    CHECK(std::abs(s.center - 1.0) <= 1e-6 * 1.0);
    CHECK(std::abs(s.a0 - 2.0) <= 1e-6 * 2.0);
    CHECK(std::abs(s.i0 + 0.4) <= 1e-6 * 0.4);
}

TEST_CASE("fits are robust to 1% noise") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::vector<double> lw, lc, ew, ec;
    for (int seed = 0; seed < 100; ++seed) {
        std::vector<double> z, y, x, e;
        for (int i = 0; i < 8; ++i) {
            z.push_back(0.5 * i);
            y.push_back(lorentzian(0.5 * i, 1.3, 1.9, 0.8) * (1.0 + 0.01 * g(rng)));
        }
        // Edge profile: 21 samples across the edge. Both profiles get 1% multiplicative noise.
        for (int i = -10; i <= 10; ++i) {
            x.push_back(i);
            e.push_back(edge_spread(i, 3.0, 1.0, 2.0, -0.4) * (1.0 + 0.01 * g(rng)));
        }
        const FitResult l = fit_lorentzian_lsf(z, y);
        const FitResult s = fit_esf(x, e);
        lw.push_back(std::abs(l.w / 1.3 - 1.0));
        lc.push_back(std::abs(l.center / 1.9 - 1.0));
        ew.push_back(std::abs(s.w / 3.0 - 1.0));
        ec.push_back(std::abs(s.center - 1.0) / 3.0);
    }
    CHECK(oracle::median(lw) <= 0.02);
    CHECK(oracle::median(lc) <= 0.02);
    CHECK(oracle::median(ew) <= 0.02);
    CHECK(oracle::median(ec) <= 0.02);
}

TEST_CASE("fit preconditions") {
    const std::vector<double> z = {0, 1, 2, 3};
    CHECK_THROWS_AS(fit_lorentzian_lsf(z, z), Error);
    const std::vector<double> z5 = {0, 1, 2, 3, 4}, flat(5, 1.0);
    CHECK_THROWS_AS(fit_lorentzian_lsf(z5, flat), Error);
    const std::vector<double> same(5, 2.0), y = {0, 1, 2, 1, 0};
    CHECK_THROWS_AS(fit_lorentzian_lsf(same, y), Error);
    // A bipolar profile has no Lorentzian fit.
    const std::vector<double> z8 = {0, 1, 2, 3, 4, 5, 6, 7}, bi = {-0.07, -0.14, -0.11, 0.18, 0.38, 0.15, -0.14, -0.15};
    CHECK_THROWS_AS(fit_lorentzian_lsf(z8, bi), Error);
}
