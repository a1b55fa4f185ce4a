#pragma once

#include <string>
#include <vector>

#include "pat/core.hpp"
#include "pat/masks.hpp"
#include "pat/recon.hpp"

namespace pat::io {

// Array container: "PATARR01", uint64 LE header length, JSON header
// (dtype "f64", byte_order "LE", layout "C", dims, spacing, origin, axes,
// kind, optional meta), then the raw little-endian doubles.
void write_field(const std::string& path, const Field& f, const std::vector<std::string>& axes = {});
Field read_field(const std::string& path);

// Records use dims [sensors, time] and keep geometry in the header meta.
void write_record(const std::string& path, const recon::SensorRecord& rec);
recon::SensorRecord read_record(const std::string& path);

// "field" or "record".
std::string read_kind(const std::string& path);

// 16-bit grayscale, min..max mapped to 0..65535. Rows follow axis 1 when
// `depth_down` is set (lateral across, depth down), otherwise axis 0.
void write_pgm(const std::string& path, const RealArray& image, bool depth_down = true);
bool png_supported();
void write_png(const std::string& path, const RealArray& image, bool depth_down = true);

void write_mask_csv(const std::string& path, const masks::SensorMask& mask);
masks::SensorMask read_mask_csv(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace pat::io
