#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pat/experiment.hpp"

namespace pat::experiment::detail {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

json parse(const std::string& text, const char* what);

struct MaskEntry {
    std::string name;
    std::string type;        // full, equispaced, equiangular, equisteradian, file
    std::size_t n = 0;
    std::vector<std::size_t> intervals;  // equispaced only; one run each
    bool snap = true;
    std::string path;        // file only
    std::string method = "nufft";
};

struct Config {
    std::string name;
    std::uint64_t seed = 0;
    forward::GridSpec grid;
    double sound_speed = 1500.0;
    std::size_t record_length = 0;  // samples; 0 = grid depth
    json phantom;
    std::string engine = "fourier";
    std::optional<double> snr_db;
    std::uint64_t noise_seed = 0;
    nufft::WindowSpec window;
    int upsample = 1;
    std::vector<double> center;  // lateral, physical
    double r0 = 0.0;
    std::string reference = "phantom";
    std::vector<MaskEntry> masks;
    json protocol = json::object();
    bool write_volumes = true;
    std::string base_dir;  // directory of the config file for relative paths
};

Config parse_config(const json& j);
MaskEntry parse_mask_entry(const json& j);
masks::MaskSpec mask_spec(const Config& c, const MaskEntry& m);
masks::SensorMask build_mask(const Config& c, const MaskEntry& m, std::size_t interval);
Field build_phantom(const Config& c);
recon::SensorRecord simulate_full(const Config& c, const Field& phantom);
recon::SensorRecord simulate_mask(const Config& c, const Field& phantom, const recon::SensorRecord* full,
                                  const masks::SensorMask& mask);
recon::Options recon_options(const Config& c);

}  // namespace pat::experiment::detail
