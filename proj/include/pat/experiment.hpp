#pragma once

#include <functional>
#include <string>

#include "pat/core.hpp"
#include "pat/forward.hpp"
#include "pat/masks.hpp"
#include "pat/recon.hpp"

namespace pat::experiment {

// All entry points take and return JSON text so the C API can pass them
// through unchanged. Schema: see README ("Experiment configuration").

// Phantom from the "phantom" section of a config (grid/spacing from "grid").
Field make_phantom(const std::string& config_json);

// Mask from one entry of "masks" plus the config geometry.
masks::SensorMask make_mask(const std::string& config_json, const std::string& mask_json);

// Synthetic record: phantom, forward engine ("fourier" or "analytic"),
// optional noise, optional restriction to a mask.
recon::SensorRecord simulate(const std::string& config_json, const masks::SensorMask* mask = nullptr);

enum class Method { nufft, interp, interp_ner };
Method parse_method(const std::string& name);

// nufft: equispaced pipeline on full grids, NEDNER otherwise.
// interp: linear-interpolation FFT baseline (full grids only).
// interp_ner: linear interpolation of the sensors onto the grid, then NUFFT.
Field reconstruct(const recon::SensorRecord& rec, Method method, const recon::Options& opt);

// Metrics of `image` against `model` under a protocol (JSON). 3D inputs are
// compared through their maximum intensity projection along depth.
std::string evaluate(const Field& image, const Field& model, const std::string& protocol_json);

// Flat CSV rendering of an evaluate() report.
std::string evaluate_csv(const std::string& report_json);

using Log = std::function<void(const std::string&)>;

// Runs a full experiment into out_dir (created if needed).
void run_pipeline(const std::string& config_json, const std::string& out_dir, const Log& log = {});

}  // namespace pat::experiment
