#include "config.hpp"

#include <cmath>
#include <filesystem>

#include "pat/io.hpp"

namespace pat::experiment {

namespace detail {

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::parameter, std::string(what) + ": invalid JSON: " + e.what());
    }
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::parameter, std::string("config: bad value for \"") + key + "\"");
    }
}

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorKind::parameter, std::string("config: missing \"") + key + "\"");
    return j.at(key);
}

std::string resolve_path(const Config& c, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !c.base_dir.empty()) path = std::filesystem::path(c.base_dir) / path;
    return path.string();
}

std::vector<double> ball_sensor(const recon::SensorRecord& rec, std::size_t m) {
    std::vector<double> s(rec.positions.begin() + m * rec.lateral_dims,
                          rec.positions.begin() + (m + 1) * rec.lateral_dims);
    s.push_back(0.0);
    return s;
}

std::vector<forward::Ball> phantom_balls(const Config& c) {
    std::vector<forward::Ball> balls;
    for (const auto& item : require(c.phantom, "items")) {
        if (get_or<std::string>(item, "type", "ball") != "ball")
            fail(ErrorKind::parameter, "config: the analytic engine supports ball primitives only");
        balls.push_back({require(item, "center").get<std::vector<double>>(), require(item, "radius").get<double>(),
                         get_or(item, "amplitude", 1.0)});
    }
    return balls;
}

// Analytic N-wave record at the given sensors; each sample is the average
// over one time step, matching the Fourier engine's discrete sampling.
recon::SensorRecord analytic_record(const Config& c, recon::SensorRecord rec) {
    const auto balls = phantom_balls(c);
    std::vector<double> times(rec.n_time);
    for (std::size_t n = 0; n < rec.n_time; ++n) times[n] = static_cast<double>(n) * rec.dt;
    rec.samples.assign(rec.n_sensors * rec.n_time, 0.0);
    parallel_for(rec.n_sensors, [&](std::size_t m) {
        const auto s = ball_sensor(rec, m);
        for (const auto& b : balls) {
            if (b.center.size() != s.size()) fail(ErrorKind::parameter, "config: ball center rank mismatch");
            const auto p = forward::sphere_analytic_averaged(b, s, times, c.sound_speed, rec.dt);
            for (std::size_t n = 0; n < rec.n_time; ++n) rec.samples[m * rec.n_time + n] += p[n];
        }
    });
    return rec;
}

std::size_t samples(const Config& c) { return c.record_length ? c.record_length : c.grid.dims.back(); }

}  // namespace

MaskEntry parse_mask_entry(const json& j) {
    MaskEntry m;
    m.type = require(j, "type").get<std::string>();
    m.name = get_or<std::string>(j, "name", m.type);
    m.n = get_or<std::size_t>(j, "n", 0);
    m.snap = get_or(j, "snap", true);
    m.path = get_or<std::string>(j, "path", "");
    m.method = get_or<std::string>(j, "method", "nufft");
    parse_method(m.method);
    if (m.type == "equispaced") {
        const json& iv = require(j, "interval");
        if (iv.is_array()) {
            if (iv.size() != 2) fail(ErrorKind::parameter, "config: interval range must be [first, last]");
            const auto a = iv[0].get<std::size_t>(), b = iv[1].get<std::size_t>();
            if (a < 1 || b < a) fail(ErrorKind::parameter, "config: bad interval range");
            for (std::size_t k = a; k <= b; ++k) m.intervals.push_back(k);
        } else {
            m.intervals.push_back(iv.get<std::size_t>());
        }
    } else if (m.type != "full" && m.type != "equiangular" && m.type != "equisteradian" && m.type != "file") {
        fail(ErrorKind::parameter, "config: unknown mask type \"" + m.type + "\"");
    }
    if (m.type == "file" && m.path.empty()) fail(ErrorKind::parameter, "config: file mask needs \"path\"");
    return m;
}

Config parse_config(const json& j) {
    if (!j.is_object()) fail(ErrorKind::parameter, "config: top level must be an object");
    if (get_or(j, "schema_version", 0) != schema_version)
        fail(ErrorKind::parameter, "config: unsupported schema_version (expected 1)");
    Config c;
    c.name = get_or<std::string>(j, "name", "experiment");
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    const json& g = require(j, "grid");
    c.grid.dims = require(g, "dims").get<std::vector<std::size_t>>();
    c.grid.spacing = require(g, "spacing").get<double>();
    if (c.grid.dims.size() < 2 || c.grid.dims.size() > 3) fail(ErrorKind::parameter, "config: grid must be 2D or 3D");
    c.sound_speed = get_or(j, "sound_speed", 1500.0);
    c.record_length = get_or<std::size_t>(j, "record_length", 0);
    c.phantom = get_or(j, "phantom", json::object());
    c.engine = get_or<std::string>(j, "engine", "fourier");
    if (c.engine != "fourier" && c.engine != "analytic") fail(ErrorKind::parameter, "config: engine must be fourier or analytic");
    if (j.contains("noise") && !j.at("noise").is_null()) {
        c.snr_db = require(j.at("noise"), "snr_db").get<double>();
        c.noise_seed = get_or<std::uint64_t>(j.at("noise"), "seed", c.seed);
    }
    if (j.contains("window")) {
        const json& w = j.at("window");
        c.window.c = get_or(w, "c", c.window.c);
        c.window.alpha = get_or(w, "alpha", c.window.alpha);
        c.window.K = get_or(w, "K", c.window.K);
        c.window.beta = get_or(w, "beta", c.window.beta);
    }
    nufft::resolve(c.window);
    c.upsample = get_or(j, "upsample", 1);
    if (c.upsample < 1) fail(ErrorKind::parameter, "config: upsample must be >= 1");
    const std::size_t lateral = c.grid.dims.size() - 1;
    if (j.contains("center_of_interest")) {
        const json& ci = j.at("center_of_interest");
        c.center = get_or(ci, "lateral", std::vector<double>(lateral, 0.0));
        c.r0 = require(ci, "r0").get<double>();
    } else {
        c.center.assign(lateral, 0.0);
    }
    if (c.center.size() != lateral) fail(ErrorKind::parameter, "config: center_of_interest.lateral rank mismatch");
    c.reference = get_or<std::string>(j, "reference", "phantom");
    if (c.reference != "phantom" && c.reference != "full")
        fail(ErrorKind::parameter, "config: reference must be phantom or full");
    if (j.contains("masks"))
        for (const auto& m : j.at("masks")) c.masks.push_back(parse_mask_entry(m));
    c.protocol = get_or(j, "protocol", json::object());
    c.write_volumes = get_or(j, "write_volumes", true);
    c.base_dir = get_or<std::string>(j, "base_dir", "");
    return c;
}

masks::MaskSpec mask_spec(const Config& c, const MaskEntry& m) {
    masks::MaskSpec s;
    s.dim = static_cast<int>(c.grid.dims.size());
    s.grid = c.grid.dims[0];
    for (std::size_t a = 1; a + 1 < c.grid.dims.size(); ++a)
        if (c.grid.dims[a] != s.grid) fail(ErrorKind::parameter, "config: masks need a square lateral grid");
    s.pitch = c.grid.spacing;
    s.center = c.center;
    s.r0 = c.r0;
    s.n_req = m.n;
    s.snap = m.snap;
    return s;
}

masks::SensorMask build_mask(const Config& c, const MaskEntry& m, std::size_t interval) {
    if (m.type == "file") return io::read_mask_csv(resolve_path(c, m.path));
    const std::size_t lateral = c.grid.dims.size() - 1;
    if (m.type == "full") {
        std::vector<std::size_t> lat(c.grid.dims.begin(), c.grid.dims.end() - 1);
        const auto rec = recon::full_grid_record(lat, c.grid.spacing, 2, 1.0, 1.0);
        masks::SensorMask mask;
        mask.lateral_dims = lateral;
        mask.positions = rec.positions;
        mask.weights = rec.weights;
        mask.layout = "full";
        return mask;
    }
    auto spec = mask_spec(c, m);
    masks::SensorMask mask;
    if (m.type == "equispaced") {
        mask = masks::equispaced_mask(spec, interval);
        return mask;  // already on nodes
    }
    if (m.type == "equiangular") {
        if (spec.dim != 2) fail(ErrorKind::parameter, "config: equiangular masks are 2D");
        mask = masks::equiangular_mask_2d(spec);
    } else {
        if (spec.dim != 3) fail(ErrorKind::parameter, "config: equisteradian masks are 3D");
        mask = masks::equisteradian_mask_3d(spec);
    }
    return spec.snap ? masks::snap_to_grid(mask, spec) : mask;
}

Field build_phantom(const Config& c) {
    const std::string type = require(c.phantom, "type").get<std::string>();
    const std::uint64_t seed = get_or<std::uint64_t>(c.phantom, "seed", c.seed);
    Field f;
    if (type == "tree") {
        f = forward::tree_phantom(c.grid, seed);
    } else if (type == "yarn") {
        f = forward::yarn_phantom(c.grid, seed);
    } else if (type == "primitives") {
        f = forward::gaussian_blob(c.grid, std::vector<double>(c.grid.dims.size(), 0.0), 1.0, 0.0);
        for (const auto& item : require(c.phantom, "items")) {
            const std::string kind = get_or<std::string>(item, "type", "ball");
            const auto center = require(item, "center").get<std::vector<double>>();
            const double amp = get_or(item, "amplitude", 1.0);
            Field p;
            if (kind == "ball") {
                p = forward::ball_field(c.grid, {center, require(item, "radius").get<double>(), amp},
                                        get_or(item, "supersample", 4));
            } else if (kind == "gaussian") {
                p = forward::gaussian_blob(c.grid, center, require(item, "sigma").get<double>(), amp);
            } else {
                fail(ErrorKind::parameter, "config: unknown primitive \"" + kind + "\"");
            }
            for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += p.values[i];
        }
    } else if (type == "file") {
        f = io::read_field(resolve_path(c, require(c.phantom, "path").get<std::string>()));
        if (f.dims() != c.grid.dims) fail(ErrorKind::validation, "config: phantom file dims differ from grid.dims");
    } else {
        fail(ErrorKind::parameter, "config: unknown phantom type \"" + type + "\"");
    }
    const double sigma = get_or(c.phantom, "smooth", 0.0);
    if (sigma > 0.0) forward::smooth(f, sigma);
    return f;
}

recon::SensorRecord simulate_full(const Config& c, const Field& phantom) {
    recon::SensorRecord rec;
    if (c.engine == "fourier") {
        rec = forward::forward_fourier(phantom, c.sound_speed, c.window, c.record_length);
    } else {
        std::vector<std::size_t> lat(c.grid.dims.begin(), c.grid.dims.end() - 1);
        rec = analytic_record(c, recon::full_grid_record(lat, c.grid.spacing, samples(c),
                                                         c.grid.spacing / c.sound_speed, c.sound_speed));
    }
    if (c.snr_db) rec = forward::add_noise(rec, *c.snr_db, c.noise_seed);
    return rec;
}

recon::SensorRecord simulate_mask(const Config& c, const Field& phantom, const recon::SensorRecord* full,
                                  const masks::SensorMask& mask) {
    if (c.engine == "fourier" || full != nullptr) {
        if (full) return forward::subsample(*full, mask.positions, mask.weights);
        const auto rec = simulate_full(c, phantom);
        return forward::subsample(rec, mask.positions, mask.weights);
    }
    std::vector<std::size_t> lat(c.grid.dims.begin(), c.grid.dims.end() - 1);
    recon::SensorRecord rec =
        recon::full_grid_record(lat, c.grid.spacing, samples(c), c.grid.spacing / c.sound_speed, c.sound_speed);
    rec.n_sensors = mask.size();
    rec.positions = mask.positions;
    rec.weights = mask.weights;
    rec = analytic_record(c, rec);
    if (c.snr_db) rec = forward::add_noise(rec, *c.snr_db, c.noise_seed);
    return rec;
}

recon::Options recon_options(const Config& c) {
    recon::Options o;
    o.upsample = c.upsample;
    o.window = c.window;
    return o;
}

}  // namespace detail

Method parse_method(const std::string& name) {
    if (name == "nufft") return Method::nufft;
    if (name == "interp") return Method::interp;
    if (name == "interp_ner") return Method::interp_ner;
    fail(ErrorKind::parameter, "unknown reconstruction method \"" + name + "\"");
}

Field make_phantom(const std::string& config_json) {
    return detail::build_phantom(detail::parse_config(detail::parse(config_json, "config")));
}

masks::SensorMask make_mask(const std::string& config_json, const std::string& mask_json) {
    const auto c = detail::parse_config(detail::parse(config_json, "config"));
    const auto m = detail::parse_mask_entry(detail::parse(mask_json, "mask"));
    if (m.intervals.size() > 1) fail(ErrorKind::parameter, "make_mask: give a single interval");
    return detail::build_mask(c, m, m.intervals.empty() ? 1 : m.intervals.front());
}

recon::SensorRecord simulate(const std::string& config_json, const masks::SensorMask* mask) {
    const auto c = detail::parse_config(detail::parse(config_json, "config"));
    const Field phantom = c.engine == "analytic" ? Field{} : detail::build_phantom(c);
    if (mask) return detail::simulate_mask(c, phantom, nullptr, *mask);
    return detail::simulate_full(c, phantom);
}

Field reconstruct(const recon::SensorRecord& rec, Method method, const recon::Options& opt) {
    switch (method) {
        case Method::interp:
            return recon::reconstruct_interp_fft(rec, opt);
        case Method::interp_ner:
            if (recon::is_full_grid(rec)) return recon::reconstruct_equispaced(rec, opt);
            return recon::reconstruct_equispaced(recon::interpolate_to_grid(rec), opt);
        case Method::nufft:
        default:
            if (recon::is_full_grid(rec)) return recon::reconstruct_equispaced(rec, opt);
            return recon::reconstruct_nedner(rec, rec.grid, opt);
    }
}

}  // namespace pat::experiment
