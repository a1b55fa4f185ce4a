// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "pat/pat.h"

namespace fs = std::filesystem;

namespace {

const char* kConfig = R"({
  "schema_version": 1,
  "grid": {"dims": [64, 32], "spacing": 1e-4},
  "record_length": 128,
  "phantom": {"type": "primitives", "items": [{"type": "gaussian", "center": [0.0, 1.6e-3], "sigma": 3e-4}]},
  "center_of_interest": {"lateral": [0.0], "r0": 2e-3}
})";

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pat_capi_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("version and errors") {
    CHECK(std::string(pat_version()).size() > 0);
    pat_array* a = nullptr;
    CHECK(pat_array_read(nullptr, &a) == PAT_ERR_ARGUMENT);
    CHECK(std::string(pat_last_error()).find("null") != std::string::npos);
    CHECK(pat_array_read("/nonexistent/file.patarr", &a) == PAT_ERR_IO);
    CHECK(a == nullptr);
    CHECK(std::string(pat_last_error()).find("/nonexistent/file.patarr") != std::string::npos);
    CHECK(pat_phantom("{not json", &a) == PAT_ERR_VALIDATION);
    CHECK(pat_phantom(kConfig, nullptr) == PAT_ERR_ARGUMENT);
    // Accessors tolerate null handles; free functions accept null.
    CHECK(pat_array_ndim(nullptr) == 0);
    CHECK(pat_array_data(nullptr) == nullptr);
    CHECK(pat_record_sensors(nullptr) == 0);
    pat_array_free(nullptr);
    pat_record_free(nullptr);
    pat_mask_free(nullptr);
    pat_string_free(nullptr);
}

TEST_CASE("array handles") {
    const size_t dims[2] = {3, 4};
    std::vector<double> data(12);
    for (size_t i = 0; i < 12; ++i) data[i] = static_cast<double>(i % 5);
    const double spacing[2] = {0.5, 0.25}, origin[2] = {-1.0, 0.0};
    pat_array* a = nullptr;
    REQUIRE(pat_array_create(2, dims, data.data(), spacing, origin, &a) == PAT_OK);
    CHECK(pat_array_ndim(a) == 2);
    size_t d[2];
    double s[2], o[2];
    CHECK(pat_array_dims(a, d) == PAT_OK);
    CHECK(pat_array_spacing(a, s) == PAT_OK);
    CHECK(pat_array_origin(a, o) == PAT_OK);
    CHECK(d[0] == 3);
    CHECK(d[1] == 4);
    CHECK(s[1] == 0.25);
    CHECK(o[0] == -1.0);
    CHECK(std::vector<double>(pat_array_data(a), pat_array_data(a) + 12) == data);

    // Projections need a volume.
    pat_array* m = nullptr;
    CHECK(pat_array_mip(a, 0, &m) == PAT_ERR_VALIDATION);
    const size_t vd[3] = {3, 2, 2};
    pat_array* v = nullptr;
    REQUIRE(pat_array_create(3, vd, data.data(), nullptr, nullptr, &v) == PAT_OK);
    REQUIRE(pat_array_mip(v, 0, &m) == PAT_OK);
    CHECK(pat_array_ndim(m) == 2);
    for (size_t k = 0; k < 4; ++k)
        CHECK(pat_array_data(m)[k] == std::max({data[k], data[4 + k], data[8 + k]}));
    pat_array_free(m);
    CHECK(pat_array_mip(v, 3, &m) == PAT_ERR_VALIDATION);
    pat_array_free(v);

    TempDir dir;
    CHECK(pat_array_write(a, (dir / "a.patarr").c_str()) == PAT_OK);
    pat_array* b = nullptr;
    REQUIRE(pat_array_read((dir / "a.patarr").c_str(), &b) == PAT_OK);
    CHECK(std::vector<double>(pat_array_data(b), pat_array_data(b) + 12) == data);
    CHECK(pat_array_write_image(a, (dir / "a.pgm").c_str(), "pgm") == PAT_OK);
    CHECK(fs::file_size(dir / "a.pgm") > 24);
    CHECK(pat_array_write_image(a, (dir / "a.bmp").c_str(), "bmp") != PAT_OK);
    pat_array_free(b);
    pat_array_free(a);

    const size_t zero[1] = {0};
    CHECK(pat_array_create(1, zero, nullptr, nullptr, nullptr, &a) != PAT_OK);
}

TEST_CASE("simulate, reconstruct and evaluate") {
    pat_array* phantom = nullptr;
    REQUIRE(pat_phantom(kConfig, &phantom) == PAT_OK);
    pat_record* rec = nullptr;
    REQUIRE(pat_simulate(kConfig, nullptr, &rec) == PAT_OK);
    CHECK(pat_record_sensors(rec) == 64);
    CHECK(pat_record_samples_per_sensor(rec) == 128);
    CHECK(pat_record_lateral_dims(rec) == 1);
    CHECK(pat_record_dt(rec) == doctest::Approx(1e-4 / 1500.0));

    pat_array* img = nullptr;
    double seconds = -1.0;
    REQUIRE(pat_reconstruct(rec, "nufft", nullptr, &img, &seconds) == PAT_OK);
    CHECK(seconds >= 0.0);
    size_t d[2];
    pat_array_dims(img, d);
    CHECK(d[0] == 64);
    CHECK(d[1] == 128);
    CHECK(pat_reconstruct(rec, "bogus", nullptr, &img, nullptr) == PAT_ERR_VALIDATION);
    CHECK(pat_reconstruct(rec, "nufft", R"({"upsample": 0})", &img, nullptr) == PAT_ERR_VALIDATION);

    // Crop the depth axis to the phantom for the comparison.
    std::vector<double> crop;
    for (size_t i = 0; i < 64; ++i)
        crop.insert(crop.end(), pat_array_data(img) + i * 128, pat_array_data(img) + i * 128 + 32);
    const size_t cd[2] = {64, 32};
    const double sp[2] = {1e-4, 1e-4}, org[2] = {-32e-4, 0.0};
    pat_array* cropped = nullptr;
    REQUIRE(pat_array_create(2, cd, crop.data(), sp, org, &cropped) == PAT_OK);
    char* report = nullptr;
    REQUIRE(pat_evaluate(cropped, phantom, R"({"disc": {"center": [0.0, 1.6e-3], "diameter": 2e-3}})", &report) ==
            PAT_OK);
    const auto j = nlohmann::json::parse(report);
    CHECK(j.at("roi").at("rho").get<double>() > 0.95);
    char* csv = nullptr;
    REQUIRE(pat_evaluate_csv(report, &csv) == PAT_OK);
    CHECK(std::string(csv).find("rho") != std::string::npos);
    pat_string_free(csv);
    pat_string_free(report);

    pat_record* noisy = nullptr;
    REQUIRE(pat_record_add_noise(rec, 20.0, 3, &noisy) == PAT_OK);
    CHECK(pat_record_samples(noisy)[40 * 128 + 30] != pat_record_samples(rec)[40 * 128 + 30]);
    pat_record_free(noisy);

    pat_array_free(cropped);
    pat_array_free(img);
    pat_record_free(rec);
    pat_array_free(phantom);
}

TEST_CASE("masks through the C interface") {
    pat_mask* m = nullptr;
    REQUIRE(pat_mask_create(kConfig, R"({"type": "equiangular", "n": 16})", &m) == PAT_OK);
    CHECK(pat_mask_size(m) > 0);
    CHECK(pat_mask_size(m) <= 16);
    CHECK(pat_mask_lateral_dims(m) == 1);
    char* desc = nullptr;
    REQUIRE(pat_mask_describe(m, &desc) == PAT_OK);
    CHECK(nlohmann::json::parse(desc).is_object());
    pat_string_free(desc);

    pat_record* full = nullptr;
    REQUIRE(pat_simulate(kConfig, nullptr, &full) == PAT_OK);
    pat_record* sub = nullptr;
    REQUIRE(pat_record_subsample(full, m, &sub) == PAT_OK);
    CHECK(pat_record_sensors(sub) == pat_mask_size(m));
    pat_record* direct = nullptr;
    REQUIRE(pat_simulate(kConfig, m, &direct) == PAT_OK);
    CHECK(pat_record_sensors(direct) == pat_mask_size(m));

    TempDir dir;
    CHECK(pat_mask_write_csv(m, (dir / "m.csv").c_str()) == PAT_OK);
    pat_mask* back = nullptr;
    REQUIRE(pat_mask_read_csv((dir / "m.csv").c_str(), &back) == PAT_OK);
    CHECK(pat_mask_size(back) == pat_mask_size(m));
    for (size_t i = 0; i < pat_mask_size(m); ++i) CHECK(pat_mask_positions(back)[i] == pat_mask_positions(m)[i]);
    pat_array* preview = nullptr;
    CHECK(pat_mask_preview(m, 64, 1e-4, &preview) == PAT_OK);
    pat_array_free(preview);

    CHECK(pat_mask_create(kConfig, R"({"type": "hexagonal"})", &back) == PAT_ERR_VALIDATION);
    pat_mask_free(back);
    pat_record_free(direct);
    pat_record_free(sub);
    pat_record_free(full);
    pat_mask_free(m);
}
