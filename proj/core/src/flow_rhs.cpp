#include "nilflow/flow_rhs.hpp"

#include "nilflow/parallel.hpp"

namespace nilflow {

namespace {

// G^{ka}G^{lb}C^p_{kl} for each p, i.e. Gi C^p Gi.
std::array<Mat3, 3> raised_constants(const LieStructure& L, const Mat3& Gi) {
  return {Gi * L.constants[0] * Gi, Gi * L.constants[1] * Gi, Gi * L.constants[2] * Gi};
}

Vec3 eps_contract(const Mat3& A) {
  // v_k = sum_{ab} A_ab eps_{kab}
  return Vec3(A(1, 2) - A(2, 1), A(2, 0) - A(0, 2), A(0, 1) - A(1, 0));
}

}  // namespace

SymMatrixField rhs_G(const FlowState& s, const FlowKinematics& k) {
  const std::size_t n = s.size();
  SymMatrixField out(n);
  parallel_for(n, [&](std::size_t x) {
    const Mat3& G = s.G[x];
    const Mat3& Gi = k.Gi[x];
    const Mat3& DG = k.DG[x];
    const double gi = 1.0 / s.g[x];
    const double h0 = s.h0_at(x);
    Mat3 r = gi * (k.DDG[x] - k.Gamma[x] * DG) - gi * DG * Gi * DG;
    Mat3 br1 = Mat3::Zero();
    Mat3 S = Mat3::Zero();
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        const Mat3& Cp = s.L.constants[p];
        const Mat3& Cq = s.L.constants[q];
        br1 += G(p, q) * Cp.transpose() * Gi * Cq;
        S(p, q) = (Cp.transpose() * Gi * Cq * Gi).trace();
      }
    r += br1 - 0.5 * G * S * G;
    r += (h0 * h0 / G.determinant()) * G;  // 1/2 G^{kk'}G^{ll'}H_{ikl}H_{jk'l'}
    r += gi * s.m[x] * Gi * s.m[x].transpose();
    out[x] = 0.5 * (r + r.transpose());
  });
  return out;
}

SymMatrixField rhs_G(const FlowState& s) { return rhs_G(s, kinematics(s)); }

ScalarField rhs_g(const FlowState& s, const FlowKinematics& k) {
  const std::size_t n = s.size();
  ScalarField out(n);
  for (std::size_t x = 0; x < n; ++x)
    out[x] = 0.5 * contract(k.Gi[x], k.DG[x], k.DG[x]) + 0.5 * contract(k.Gi[x], s.m[x], s.m[x]);
  return out;
}

ScalarField rhs_g(const FlowState& s) { return rhs_g(s, kinematics(s)); }

VectorField connection_velocity(const FlowState& s, const FlowKinematics& k) {
  const std::size_t n = s.size();
  VectorField out(n);
  for (std::size_t x = 0; x < n; ++x) {
    const Mat3& Gi = k.Gi[x];
    const Mat3 DGGi = k.DG[x] * Gi;  // (D_xG)_{qj} G^{ji}
    Vec3 low = Vec3::Zero();
    for (int q = 0; q < 3; ++q) {
      const Mat3& Cq = s.L.constants[q];
      for (int kk = 0; kk < 3; ++kk)
        for (int i = 0; i < 3; ++i) low(kk) += Cq(i, kk) * DGGi(q, i);
    }
    low += 0.5 * s.h0_at(x) * eps_contract(Gi * s.m[x] * Gi);
    out[x] = Gi * low;
  }
  return out;
}

VectorField rhs_a(const FlowState& s, const FlowKinematics& k, const FlowConventions& conv) {
  VectorField X = connection_velocity(s, k);
  for (auto& v : X) v *= conv.connection_sign;
  return X;
}

VectorField rhs_a(const FlowState& s, const FlowConventions& conv) { return rhs_a(s, kinematics(s), conv); }

namespace {

// B_vv without the d_x m / g part, which is differentiated separately.
AntisymMatrixField b_remainder(const FlowState& s, const FlowKinematics& k) {
  const std::size_t n = s.size();
  AntisymMatrixField out(n);
  for (std::size_t x = 0; x < n; ++x) {
    const Mat3& G = s.G[x];
    const Mat3& Gi = k.Gi[x];
    const double gi = 1.0 / s.g[x];
    const Mat3 P = k.DG[x] * Gi * s.m[x];
    Mat3 r = gi * (k.DxH[x] - k.dm[x]) - gi * (P - P.transpose());
    const auto up = raised_constants(s.L, Gi);
    Mat3 W;  // W(p, j) = sum_ab (Gi C^p Gi)_ab eps_{abj}
    for (int p = 0; p < 3; ++p) W.row(p) = eps_contract(up[p]).transpose();
    const Mat3 GW = G * W;
    r += 0.5 * s.h0_at(x) * (GW - GW.transpose());
    out[x] = r;
  }
  return out;
}

VectorField b_mixed(const FlowState& s, const FlowKinematics& k, const FlowConventions& conv) {
  const std::size_t n = s.size();
  VectorField out(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto up = raised_constants(s.L, k.Gi[x]);
    Vec3 v;
    for (int p = 0; p < 3; ++p) v(p) = up[p].cwiseProduct(s.m[x]).sum();
    out[x] = conv.mixed_base_sign * 0.5 * (s.G[x] * v);
  }
  return out;
}

}  // namespace

BField compute_B(const FlowState& s, const FlowKinematics& k, const FlowConventions& conv) {
  BField b;
  b.vv = b_remainder(s, k);
  for (std::size_t x = 0; x < s.size(); ++x) b.vv[x] += k.dm[x] / s.g[x];
  b.vb = b_mixed(s, k, conv);
  return b;
}

BField compute_B(const FlowState& s, const FlowConventions& conv) { return compute_B(s, kinematics(s), conv); }

TorsionRates rhs_H(const FlowState& s, const FlowKinematics& k, const FlowConventions& conv) {
  const std::size_t n = s.size();
  const AntisymMatrixField rest = b_remainder(s, k);
  const VectorField vb = b_mixed(s, k, conv);
  const AntisymMatrixField drest = deriv(rest, s.grid);
  const AntisymMatrixField d2m = second_deriv(s.m, s.grid);
  const ScalarField dg = deriv(s.g, s.grid);
  const VectorField X = connection_velocity(s, k);

  TorsionRates out;
  out.dm.resize(n);
  if (s.h0_field) out.dh0_field = ScalarField(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const double gi = 1.0 / s.g[x];
    const Mat3 B = k.dm[x] * gi + rest[x];
    Mat3 dB = d2m[x] * gi - dg[x] * gi * gi * k.dm[x] + drest[x] + fiber_connection_term(B, k.omega[x]);
    for (int kk = 0; kk < 3; ++kk) dB -= s.L.constants[kk] * vb[x](kk);
    Mat3 corr;
    const Vec3& v = X[x];
    corr << 0.0, v(2), -v(1), -v(2), 0.0, v(0), v(1), -v(0), 0.0;  // eps_{kij} X^k
    Mat3 r = dB - conv.frame_correction_sign * s.h0_at(x) * corr;
    out.dm[x] = 0.5 * (r - r.transpose());
    if (out.dh0_field) {
      // Vertical component dB(e1, e2, e3) = -B([e1,e2],e3) + B([e1,e3],e2) - B([e2,e3],e1).
      double v3 = 0.0;
      for (int kk = 0; kk < 3; ++kk)
        v3 += -s.L(kk, 0, 1) * B(kk, 2) + s.L(kk, 0, 2) * B(kk, 1) - s.L(kk, 1, 2) * B(kk, 0);
      (*out.dh0_field)[x] = v3;
    }
  }
  out.dh0 = 0.0;
  return out;
}

TorsionRates rhs_H(const FlowState& s, const FlowConventions& conv) { return rhs_H(s, kinematics(s), conv); }

FlowRates rhs(const FlowState& s, const FlowConventions& conv) {
  const FlowKinematics k = kinematics(s);
  FlowRates r;
  r.G = rhs_G(s, k);
  r.g = rhs_g(s, k);
  r.a = rhs_a(s, k, conv);
  TorsionRates h = rhs_H(s, k, conv);
  r.h0 = h.dh0;
  r.m = std::move(h.dm);
  r.h0_field = std::move(h.dh0_field);
  return r;
}

}  // namespace nilflow
