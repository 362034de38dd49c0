#pragma once

// Stability-analysis toolkit for the delay geometric Brownian motion
//   dw(t) = -w(t - tau) dt + sigma * w(t - tau) dB_t
// in reduced parameters: analytic decay regions, the exact fundamental
// solution of the deterministic delayed equation with its square-integral
// criterion, and seeded Monte Carlo verification.

#include "dgbm/dde.hpp"
#include "dgbm/lyapunov.hpp"
#include "dgbm/params.hpp"
#include "dgbm/philox.hpp"
#include "dgbm/piecewise_poly.hpp"
#include "dgbm/region.hpp"
#include "dgbm/simulate.hpp"
#include "dgbm/stability.hpp"
#include "dgbm/version.hpp"
