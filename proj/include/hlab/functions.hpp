#pragma once

#include <string>

#include "hlab/grid.hpp"

namespace hlab {

// Builds a grid function from a literal with exact (1D) or quadrature (2D) cell averages.
// Terms are summed; each term is [number '*'] atom or a bare number. Atoms:
//   const(c)  power_abs(a[,x0[,y0]])  log_abs([x0[,y0]])  indicator(lo,hi[,lo1,hi1])
//   ball_power(a,r[,x0[,y0]])  sin(k)  steps(seed,levels)  table(path)
// Relative table paths resolve against base_dir.
GridFunction make_function(const Grid& g, const std::string& literal, const std::string& base_dir = ".");

}  // namespace hlab
