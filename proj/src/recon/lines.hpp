#pragma once

#include <functional>
#include <vector>

#include "pat/nufft.hpp"

namespace pat::recon::detail {

enum class LineMethod { nufft, linear };

// Fills kappa and mult (both of length 2n, output l = -n..n-1) for lines at
// scaled lateral radius rho. mult == 0 marks an output that stays zero.
using LineRule = std::function<void(double rho, std::vector<double>& kappa, std::vector<cplx>& mult)>;

// lines: [lateral..., n] with sample 0 on the plane. Each line is mirrored
// evenly to length 2n (centered index -n..n-1, entry -n zero), and its
// centered spectrum is evaluated at kappa and scaled by mult. Lines whose
// scaled radius coincides share one set of taps. Returns [lateral..., 2n].
ComplexArray transform_lines(const ComplexArray& lines, const std::vector<double>& lateral_scale, LineMethod method,
                             const nufft::WindowSpec& window, const LineRule& rule);

}  // namespace pat::recon::detail
