#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pat/core.hpp"
#include "pat/nufft.hpp"
#include "pat/recon.hpp"

namespace pat::forward {

// Full-grid record of the field f (lateral axes first, depth last, depth
// row 0 on the sensor plane). The time step is depth spacing / sound speed.
// n_time samples are recorded (0 = as many as f has depth rows); the depth
// is zero-padded to 2 n_time internally so late arrivals do not wrap into
// the record.
recon::SensorRecord forward_fourier(const Field& f, double sound_speed, const nufft::WindowSpec& window = {},
                                    std::size_t n_time = 0);

struct Ball {
    std::vector<double> center;  // physical, lateral axes then depth
    double radius = 0.0;
    double amplitude = 1.0;
};

// Point samples of the N-wave p = A (d - c t) / (2 d) for |d - c t| <= R.
std::vector<double> sphere_analytic(const Ball& ball, std::span<const double> sensor, std::span<const double> times,
                                    double sound_speed);

// Same wave averaged over [t - h/2, t + h/2] for every sample time.
std::vector<double> sphere_analytic_averaged(const Ball& ball, std::span<const double> sensor,
                                             std::span<const double> times, double sound_speed, double h);

struct QuadratureOptions {
    int polar = 96;      // Gauss-Legendre nodes in cos(theta)
    int azimuth = 192;   // uniform nodes in phi
    // Time derivative step in seconds; 0 uses the spacing of `times`.
    double step = 0.0;
    // Pole of the quadrature frame; empty means the depth axis.
    std::vector<double> axis;
};

// p(x, t) = d/dt [t * M(c t)] where M(r) is the mean of f over the sphere of
// radius r about x (3D fields, trilinear sampling, zero outside the grid).
// The derivative is the central difference over `step`, which equals the
// average of p over one step.
std::vector<double> spherical_means_quadrature(const Field& f, std::span<const double> sensor,
                                               std::span<const double> times, double sound_speed,
                                               const QuadratureOptions& opt = {});

// Adds white Gaussian noise with 20 log10(rms(signal) / rms(noise)) = snr_db.
// An infinite snr_db returns the record unchanged.
recon::SensorRecord add_noise(const recon::SensorRecord& rec, double snr_db, std::uint64_t seed);

// Rows of a full-grid record at the given positions; positions must sit on
// grid nodes. Weights are taken from `weights`.
recon::SensorRecord subsample(const recon::SensorRecord& full, std::span<const double> positions,
                              std::span<const double> weights);

// Phantoms on a grid with lateral axes centered on the plane and depth rows
// starting at z = 0.
struct GridSpec {
    std::vector<std::size_t> dims;  // lateral..., depth
    double spacing = 1.0;
};

Field gaussian_blob(const GridSpec& g, std::span<const double> center, double sigma, double amplitude = 1.0);

// Uniform ball with partial-volume weights from `supersample`^d subvoxels.
Field ball_field(const GridSpec& g, const Ball& ball, int supersample = 4);

// Procedural tree: trunk plus recursively branching crown, smoothed.
Field tree_phantom(const GridSpec& g, std::uint64_t seed);

// Procedural knitted-yarn-like volume: interleaved smooth tubes.
Field yarn_phantom(const GridSpec& g, std::uint64_t seed);

// Gaussian smoothing with standard deviation sigma (grid units), separable.
void smooth(Field& f, double sigma);

}  // namespace pat::forward
