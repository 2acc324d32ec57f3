#pragma once

#include "hlab/dyadic.hpp"
#include "hlab/grid.hpp"
#include "hlab/young.hpp"

namespace hlab {

// Luxemburg average over Q. With w, the measure is w dx normalized by w(Q).
double luxemburg_norm(const GridFunction& f, const Cube& q, const YoungFunction& A, const GridFunction* w = nullptr);

// Same over an arbitrary cell box (used for clipped dilates).
double luxemburg_norm_box(const GridFunction& f, const Box& cells, const YoungFunction& A,
                          const GridFunction* w = nullptr);

// (1/|Q|) int_Q |fg| / (||f||_{A,Q} ||g||_{Abar,Q}); 0 when the numerator vanishes.
double holder_defect(const GridFunction& f, const GridFunction& g, const YoungFunction& A, const Cube& q,
                     const YoungFunction* Abar = nullptr);

// Average of f over Q with fractional cell coverage.
double cube_average(const GridFunction& f, const Cube& q);

}  // namespace hlab
