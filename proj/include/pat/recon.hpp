#pragma once

#include <span>
#include <vector>

#include "pat/core.hpp"
#include "pat/nufft.hpp"

namespace pat::recon {

// Time series measured on the plane z = 0. Positions are physical,
// relative to the grid center (node i sits at (i - N/2) * pitch).
struct SensorRecord {
    std::size_t lateral_dims = 1;     // d - 1
    std::vector<std::size_t> grid;    // lateral grid size per axis
    double pitch = 0.0;               // lateral grid spacing
    double dt = 0.0;
    double sound_speed = 1500.0;
    std::size_t n_sensors = 0;
    std::size_t n_time = 0;
    std::vector<double> positions;    // n_sensors x lateral_dims
    std::vector<double> weights;      // n_sensors
    std::vector<double> samples;      // n_sensors x n_time

    double depth_step() const { return sound_speed * dt; }
    double aperture_measure() const;  // X^(d-1)
    void validate() const;            // shapes and finiteness
};

// Full-grid record layout (sensors in C order over the lateral grid).
SensorRecord full_grid_record(const std::vector<std::size_t>& grid, double pitch, std::size_t n_time, double dt,
                              double sound_speed);

// Node index of each sensor, or -1 if it is not on a grid node.
std::vector<long long> grid_nodes(const SensorRecord& rec);
bool is_full_grid(const SensorRecord& rec);

struct Options {
    int upsample = 1;
    nufft::WindowSpec window{};
};

double kappa(std::span<const double> j, double l);
double amplitude_factor(std::span<const double> j, double l);

Field reconstruct_equispaced(const SensorRecord& rec, const Options& opt = {});
Field reconstruct_nedner(const SensorRecord& rec, const std::vector<std::size_t>& out_dims, const Options& opt = {});
Field reconstruct_interp_fft(const SensorRecord& rec, const Options& opt = {});

// Intermediate access for tests: the symmetrized spectrum f_hat(j, l) on the
// centered grid [grid..., 2 * n_time], and the imaginary residue of the last
// inverse transform relative to its maximum.
struct Spectrum {
    ComplexArray coefficients;
    double imag_residue = 0.0;
};
enum class TimeStep { nufft, linear_interp };
Spectrum spectrum_from_lines(const ComplexArray& lines, const SensorRecord& rec, TimeStep step,
                             const nufft::WindowSpec& window);
Field image_from_spectrum(Spectrum& spec, const SensorRecord& rec, int upsample);

// Linear interpolation of the sensor data onto every lateral grid node
// (constant extension beyond the outermost sensors). 2D records only.
SensorRecord interpolate_to_grid(const SensorRecord& rec);

}  // namespace pat::recon
