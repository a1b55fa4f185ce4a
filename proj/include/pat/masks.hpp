#pragma once

#include <span>
#include <string>
#include <vector>

#include "pat/core.hpp"

namespace pat::masks {

struct MaskSpec {
    int dim = 2;                  // image dimension d; sensors live in d - 1
    std::size_t grid = 0;         // nodes per lateral axis (even)
    double pitch = 0.0;           // node spacing
    std::vector<double> center;   // lateral position of the center of interest; empty = grid center
    double r0 = 0.0;              // standoff of the center of interest from the plane
    std::size_t n_req = 0;        // requested sensor count
    bool snap = false;            // snap to grid nodes and drop duplicates

    double aperture() const { return static_cast<double>(grid) * pitch; }
    double aperture_measure() const;  // X^(d-1)
    void validate() const;
};

struct SensorMask {
    std::size_t lateral_dims = 1;
    std::vector<double> positions;           // M x lateral_dims, physical, grid center at 0
    std::vector<double> weights;             // M
    std::string layout;
    std::vector<std::size_t> slice_counts;   // equi-steradian only
    std::vector<double> slice_angles;        // polar angle of each slice's ring
    double unit_steradian = 0.0;             // equi-steradian only

    std::size_t size() const { return weights.size(); }
};

// Centered lattice with `interval` nodes between neighbours; n_req sensors in
// 2D, n_req = n^2 in 3D. Uniform weights.
SensorMask equispaced_mask(const MaskSpec& spec, std::size_t interval);

// Sensors where rays from the center of interest at equal angular steps hit
// the line; gamma_i = -theta_max + (i + 1/2) 2 theta_max / N.
SensorMask equiangular_mask_2d(const MaskSpec& spec);

// One sensor per unit solid angle of the cap seen from the center of interest.
SensorMask equisteradian_mask_3d(const MaskSpec& spec);

// Cap slices for a fixed unit steradian omega; exposed for tests.
struct SliceLayout {
    std::vector<std::size_t> counts;
    std::vector<double> polar;     // ring polar angle (0 for the central slice)
    std::vector<double> offset;    // phi_r per slice
    std::size_t total = 0;
};
SliceLayout equisteradian_slices(double omega, double theta_max);

// r_m^d normalized so the weights sum to `measure`. r is the distance from
// the center of interest (lateral center, standoff r0) to each sensor.
std::vector<double> density_weights(std::span<const double> positions, std::size_t lateral_dims,
                                    std::span<const double> center, double r0, int d, double measure);

// Nearest-node snapping; duplicates are dropped and the remaining weights are
// rescaled to keep their sum.
SensorMask snap_to_grid(const SensorMask& mask, const MaskSpec& spec);

}  // namespace pat::masks
