#include "nilflow/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace nilflow {

namespace {

class SeriesSampler {
 public:
  SeriesSampler(std::uint64_t seed, int modes) : rng_(seed), modes_(modes) {}

  // Uniform on [-1, 1] from the raw 64-bit output, so the stream is the same
  // on every standard library.
  double unit() { return 2.0 * static_cast<double>(rng_() >> 11) * 0x1.0p-53 - 1.0; }

  ScalarField series(const Grid& grid, double amp) {
    std::vector<double> cs(modes_ + 1), sn(modes_ + 1);
    for (int k = 0; k <= modes_; ++k) {
      cs[k] = unit() * amp / (1.0 + k);
      sn[k] = k == 0 ? 0.0 : unit() * amp / (1.0 + k);
    }
    ScalarField f(grid.size(), 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double th = 2.0 * std::numbers::pi * grid.x(static_cast<int>(i)) / grid.length;
      double v = 0.0;
      for (int k = 0; k <= modes_; ++k) v += cs[k] * std::cos(k * th) + sn[k] * std::sin(k * th);
      f[i] = v;
    }
    return f;
  }

 private:
  std::mt19937_64 rng_;
  int modes_;
};

}  // namespace

Mat3 sym_exp(const Mat3& S) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (S + S.transpose()));
  const Mat3 R = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                 es.eigenvectors().transpose();
  return 0.5 * (R + R.transpose());
}

FlowState random_state(const Grid& grid, const LieStructure& L, const InitialDataParams& p) {
  FlowState s = flat_state(grid, L, p.h0);
  s.t = p.t0;
  s.twist = diagonal_twist(p.kappa);
  SeriesSampler rs(p.seed, p.modes);
  const std::size_t n = grid.size();

  std::array<ScalarField, 6> sg;
  for (auto& f : sg) f = rs.series(grid, p.amp_G);
  const ScalarField lg = rs.series(grid, p.amp_g);
  std::array<ScalarField, 3> av, mv;
  for (auto& f : av) f = rs.series(grid, p.amp_a);
  for (auto& f : mv) f = rs.series(grid, p.amp_m);

  for (std::size_t i = 0; i < n; ++i) {
    Mat3 S;
    S << sg[0][i], sg[1][i], sg[2][i], sg[1][i], sg[3][i], sg[4][i], sg[2][i], sg[4][i], sg[5][i];
    s.G[i] = sym_exp(S);
    s.g[i] = std::exp(lg[i]);
    s.a[i] = Vec3(av[0][i], av[1][i], av[2][i]);
    Mat3 m;
    m << 0.0, mv[0][i], mv[1][i], -mv[0][i], 0.0, mv[2][i], -mv[1][i], -mv[2][i], 0.0;
    s.m[i] = m;
  }
  if (p.full_h) s.h0_field = ScalarField(n, p.h0);
  return s;
}

}  // namespace nilflow
