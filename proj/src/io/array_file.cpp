#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "pat/io.hpp"

namespace pat::io {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'P', 'A', 'T', 'A', 'R', 'R', '0', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_doubles(std::ostream& os, const std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double d : v) put_u64(os, std::bit_cast<std::uint64_t>(d));
    }
}

void get_doubles(std::istream& is, std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double& d : v) d = std::bit_cast<double>(get_u64(is));
    }
}

void write_container(const std::string& path, const json& header, const std::vector<double>& payload) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::io, "cannot open for writing: " + path);
    const std::string text = header.dump();
    os.write(kMagic, 8);
    put_u64(os, text.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_doubles(os, payload);
    if (!os) fail(ErrorKind::io, "write failed: " + path);
}

json read_container(const std::string& path, std::vector<double>& payload) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::io, "cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) fail(ErrorKind::io, "not a PATARR01 file: " + path);
    const std::uint64_t len = get_u64(is);
    if (!is || len > (1u << 30)) fail(ErrorKind::io, "corrupt header length: " + path);
    std::string text(len, '\0');
    is.read(text.data(), static_cast<std::streamsize>(len));
    if (!is) fail(ErrorKind::io, "truncated header: " + path);
    json h;
    try {
        h = json::parse(text);
        if (h.at("dtype") != "f64" || h.at("byte_order") != "LE" || h.at("layout") != "C")
            fail(ErrorKind::io, "unsupported array encoding: " + path);
        std::size_t n = 1;
        for (auto& d : h.at("dims")) n *= d.get<std::size_t>();
        payload.resize(n);
    } catch (const json::exception& e) {
        fail(ErrorKind::io, "bad array header in " + path + ": " + e.what());
    }
    const auto start = is.tellg();
    is.seekg(0, std::ios::end);
    const auto remaining = static_cast<std::uint64_t>(is.tellg() - start);
    if (remaining != payload.size() * 8) fail(ErrorKind::io, "payload size does not match header dims: " + path);
    is.seekg(start);
    get_doubles(is, payload);
    if (!is) fail(ErrorKind::io, "truncated payload: " + path);
    return h;
}

json base_header(const std::vector<std::size_t>& dims, const std::string& kind) {
    json h;
    h["dtype"] = "f64";
    h["byte_order"] = "LE";
    h["layout"] = "C";
    h["dims"] = dims;
    h["kind"] = kind;
    h["version"] = 1;
    return h;
}

}  // namespace

void write_field(const std::string& path, const Field& f, const std::vector<std::string>& axes) {
    json h = base_header(f.dims(), "field");
    h["spacing"] = f.spacing;
    h["origin"] = f.origin;
    if (!axes.empty()) {
        h["axes"] = axes;
    } else {
        std::vector<std::string> names = f.ndim() == 3 ? std::vector<std::string>{"x", "y", "z"} : std::vector<std::string>{"x", "z"};
        if (f.ndim() != 2 && f.ndim() != 3) names.assign(f.ndim(), "");
        h["axes"] = names;
    }
    write_container(path, h, f.values.data);
}

Field read_field(const std::string& path) {
    Field f;
    json h = read_container(path, f.values.data);
    if (h.value("kind", "field") != "field") fail(ErrorKind::io, "not a field: " + path);
    try {
        f.values.dims = h.at("dims").get<std::vector<std::size_t>>();
        f.spacing = h.value("spacing", std::vector<double>(f.values.dims.size(), 1.0));
        f.origin = h.value("origin", std::vector<double>(f.values.dims.size(), 0.0));
    } catch (const json::exception& e) {
        fail(ErrorKind::io, "bad field header in " + path + ": " + e.what());
    }
    if (f.spacing.size() != f.ndim() || f.origin.size() != f.ndim()) fail(ErrorKind::io, "field header rank mismatch: " + path);
    return f;
}

void write_record(const std::string& path, const recon::SensorRecord& rec) {
    json h = base_header({rec.n_sensors, rec.n_time}, "record");
    h["spacing"] = {1.0, rec.dt};
    h["axes"] = {"sensor", "t"};
    json meta;
    meta["dt"] = rec.dt;
    meta["sound_speed"] = rec.sound_speed;
    meta["pitch"] = rec.pitch;
    meta["grid"] = rec.grid;
    meta["lateral_dims"] = rec.lateral_dims;
    meta["positions"] = rec.positions;
    meta["weights"] = rec.weights;
    h["meta"] = meta;
    write_container(path, h, rec.samples);
}

recon::SensorRecord read_record(const std::string& path) {
    recon::SensorRecord r;
    json h = read_container(path, r.samples);
    try {
        if (h.value("kind", "") != "record") fail(ErrorKind::io, "not a sensor record: " + path);
        const auto dims = h.at("dims").get<std::vector<std::size_t>>();
        if (dims.size() != 2) fail(ErrorKind::io, "record must be 2D: " + path);
        r.n_sensors = dims[0];
        r.n_time = dims[1];
        const json& m = h.at("meta");
        r.dt = m.at("dt").get<double>();
        r.sound_speed = m.at("sound_speed").get<double>();
        r.pitch = m.at("pitch").get<double>();
        r.grid = m.at("grid").get<std::vector<std::size_t>>();
        r.lateral_dims = m.at("lateral_dims").get<std::size_t>();
        r.positions = m.at("positions").get<std::vector<double>>();
        r.weights = m.at("weights").get<std::vector<double>>();
    } catch (const json::exception& e) {
        fail(ErrorKind::io, "bad record header in " + path + ": " + e.what());
    }
    r.validate();
    return r;
}

std::string read_kind(const std::string& path) {
    std::vector<double> payload;
    return read_container(path, payload).value("kind", "field");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::io, "cannot open for writing: " + path);
    os << text;
    if (!os) fail(ErrorKind::io, "write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::io, "cannot open: " + path);
    return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace pat::io
