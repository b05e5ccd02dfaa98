#pragma once

#include "nilflow/flow_state.hpp"

#include <cstdint>

namespace nilflow {

struct InitialDataParams {
  std::uint64_t seed = 1;
  double amp_G = 0.3;
  double amp_g = 0.2;
  double amp_a = 0.3;
  double amp_m = 0.2;
  double h0 = 0.5;
  double kappa = 0.0;  // twist strength
  double t0 = 0.0;
  bool full_h = false;
  int modes = 4;
};

/// Smooth random data: G = exp(S(x)), g = exp(s(x)), with S, s, a and m
/// truncated Fourier series whose mode-k amplitude is amp/(1+k).
FlowState random_state(const Grid& grid, const LieStructure& L, const InitialDataParams& p);

/// Symmetric matrix exponential via the eigendecomposition.
Mat3 sym_exp(const Mat3& S);

}  // namespace nilflow
