#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>

#include "pat/io.hpp"

using namespace pat;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pat_io_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

}  // namespace

TEST_CASE("field container round trip") {
    TempDir dir;
    Field f{RealArray({3, 4, 5}), {1e-4, 2e-4, 3e-4}, {-1.5e-4, 0.0, 7.0}};
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (auto& v : f.values.data) v = g(rng);
    f.values[7] = -0.0;
    f.values[8] = 1e-310;
    const std::string p = dir / "a.patarr";
    io::write_field(p, f, {"x", "y", "z"});
    CHECK(io::read_kind(p) == "field");
    const Field r = io::read_field(p);
    CHECK(r.dims() == f.dims());
    CHECK(r.spacing == f.spacing);
    CHECK(r.origin == f.origin);
    CHECK(std::memcmp(r.values.data.data(), f.values.data.data(), f.values.size() * 8) == 0);

    // Layout: magic, little-endian header length, JSON header, payload.
    const std::string bytes = slurp(p);
    REQUIRE(bytes.size() > 16);
    CHECK(bytes.substr(0, 8) == "PATARR01");
    std::uint64_t len = 0;
    for (int i = 0; i < 8; ++i) len |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
    const auto h = nlohmann::json::parse(bytes.substr(16, len));
    CHECK(h.at("dtype") == "f64");
    CHECK(h.at("byte_order") == "LE");
    CHECK(h.at("layout") == "C");
    CHECK(h.at("dims") == nlohmann::json({3, 4, 5}));
    CHECK(h.at("axes") == nlohmann::json({"x", "y", "z"}));
    CHECK(bytes.size() == 16 + len + f.values.size() * 8);
}

TEST_CASE("record container round trip") {
    TempDir dir;
    recon::SensorRecord r = recon::full_grid_record({4, 6}, 1e-4, 5, 6.5e-8, 1480.0);
    for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] = std::sin(0.3 * static_cast<double>(i));
    r.weights[3] = 0.25;
    const std::string p = dir / "r.patarr";
    io::write_record(p, r);
    CHECK(io::read_kind(p) == "record");
    const auto q = io::read_record(p);
    CHECK(q.lateral_dims == 2);
    CHECK(q.grid == r.grid);
    CHECK(q.pitch == r.pitch);
    CHECK(q.dt == r.dt);
    CHECK(q.sound_speed == r.sound_speed);
    CHECK(q.n_sensors == r.n_sensors);
    CHECK(q.n_time == r.n_time);
    CHECK(q.positions == r.positions);
    CHECK(q.weights == r.weights);
    CHECK(q.samples == r.samples);
    CHECK_THROWS_AS(io::read_field(p), Error);
}

TEST_CASE("corrupt containers are rejected") {
    TempDir dir;
    Field f{RealArray({8}, 1.0), {1.0}, {0.0}};
    const std::string p = dir / "a.patarr";
    io::write_field(p, f);
    const std::string bytes = slurp(p);

    auto expect_io = [&](const std::string& content) {
        const std::string q = dir / "bad.patarr";
        std::ofstream(q, std::ios::binary) << content;
        try {
            io::read_field(q);
            FAIL("accepted a corrupt file");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::io);
        }
    };
    expect_io("NOTMAGIC" + bytes.substr(8));
    expect_io(bytes.substr(0, bytes.size() - 8));
    expect_io(bytes + "extra");
    expect_io(bytes.substr(0, 12));
    CHECK_THROWS_AS(io::read_field(dir / "missing.patarr"), Error);
}

TEST_CASE("mask CSV round trip") {
    TempDir dir;
    masks::SensorMask m;
    m.lateral_dims = 2;
    m.positions = {0.0, 1e-4, -3.3e-4, 1.0 / 3.0};
    m.weights = {0.1, 2.0 / 7.0};
    const std::string p = dir / "m.csv";
    io::write_mask_csv(p, m);
    CHECK(slurp(p).rfind("x,y,weight\n", 0) == 0);
    const auto r = io::read_mask_csv(p);
    CHECK(r.lateral_dims == 2);
    CHECK(r.positions == m.positions);
    CHECK(r.weights == m.weights);

    std::ofstream(dir / "bad.csv") << "x,weight\n1.0\n";
    CHECK_THROWS_AS(io::read_mask_csv(dir / "bad.csv"), Error);
    std::ofstream(dir / "bad2.csv") << "a,b\n";
    CHECK_THROWS_AS(io::read_mask_csv(dir / "bad2.csv"), Error);
}

TEST_CASE("PGM export") {
    TempDir dir;
    RealArray img({3, 2});
    img.data = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    const std::string p = dir / "i.pgm";
    io::write_pgm(p, img, true);
    const std::string bytes = slurp(p);
    const std::string head = "P5\n3 2\n65535\n";
    REQUIRE(bytes.substr(0, head.size()) == head);
    REQUIRE(bytes.size() == head.size() + 12);
    auto px = [&](std::size_t k) {
        return (static_cast<unsigned char>(bytes[head.size() + 2 * k]) << 8) |
               static_cast<unsigned char>(bytes[head.size() + 2 * k + 1]);
    };
    // Depth down: first displayed row is depth 0 across the lateral axis.
    CHECK(px(0) == 0);
    CHECK(px(1) == 26214);
    CHECK(px(2) == 52428);
    CHECK(px(5) == 65535);
    CHECK_THROWS_AS(io::write_pgm(p, RealArray({2, 2, 2})), Error);
}
