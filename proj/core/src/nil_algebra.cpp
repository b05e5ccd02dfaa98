#include "nilflow/nil_algebra.hpp"

#include <cmath>
#include <string>

namespace nilflow {

std::string_view to_string(AlgebraKind kind) {
  return kind == AlgebraKind::heisenberg ? "heisenberg" : "abelian";
}

AlgebraKind algebra_kind_from_string(std::string_view name) {
  if (name == "heisenberg") return AlgebraKind::heisenberg;
  if (name == "abelian") return AlgebraKind::abelian;
  throw std::invalid_argument("unknown group '" + std::string(name) + "' (expected heisenberg or abelian)");
}

LieStructure LieStructure::heisenberg(double c) {
  LieStructure L;
  L.kind = AlgebraKind::heisenberg;
  L.c = c;
  L.constants[kCenterIndex](0, 1) = c;
  L.constants[kCenterIndex](1, 0) = -c;
  return L;
}

LieStructure LieStructure::abelian() {
  LieStructure L;
  L.kind = AlgebraKind::abelian;
  L.c = 0.0;
  return L;
}

Vec3 LieStructure::bracket(const Vec3& x, const Vec3& y) const {
  Vec3 out;
  for (int k = 0; k < 3; ++k) out[k] = x.dot(constants[k] * y);
  return out;
}

std::string_view to_string(StructureViolation v) {
  switch (v) {
    case StructureViolation::antisymmetry: return "antisymmetry";
    case StructureViolation::jacobi: return "jacobi";
    case StructureViolation::nilpotency: return "nilpotency";
    case StructureViolation::tracelessness: return "tracelessness";
  }
  return "unknown";
}

std::vector<StructureViolation> validate_structure(const LieStructure& L, double tol) {
  std::vector<StructureViolation> out;

  bool antisym = true;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (std::abs(L(k, i, j) + L(k, j, i)) > tol) antisym = false;
  if (!antisym) out.push_back(StructureViolation::antisymmetry);

  bool jacobi = true;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double s = 0.0;
          for (int m = 0; m < 3; ++m)
            s += L(m, i, j) * L(l, m, k) + L(m, j, k) * L(l, m, i) + L(m, k, i) * L(l, m, j);
          if (std::abs(s) > tol) jacobi = false;
        }
  if (!jacobi) out.push_back(StructureViolation::jacobi);

  bool nilpotent = true;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (k != kCenterIndex && std::abs(L(k, i, j)) > tol) nilpotent = false;
        if ((i == kCenterIndex || j == kCenterIndex) && std::abs(L(k, i, j)) > tol) nilpotent = false;
      }
  if (!nilpotent) out.push_back(StructureViolation::nilpotency);

  bool traceless = true;
  for (int j = 0; j < 3; ++j) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += L(k, k, j);
    if (std::abs(s) > tol) traceless = false;
  }
  if (!traceless) out.push_back(StructureViolation::tracelessness);

  return out;
}

Mat3 ad_matrix(const LieStructure& L, const Vec3& a) {
  Mat3 ad = Mat3::Zero();
  for (int p = 0; p < 3; ++p)
    for (int i = 0; i < 3; ++i) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[k] * L(p, k, i);
      ad(p, i) = s;
    }
  return ad;
}

bool is_derivation(const LieStructure& L, const Mat3& K, double tol) {
  // K[e_i, e_j] = [K e_i, e_j] + [e_i, K e_j]
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Vec3 ei = Vec3::Unit(i);
      const Vec3 ej = Vec3::Unit(j);
      const Vec3 lhs = K * L.bracket(ei, ej);
      const Vec3 rhs = L.bracket(K * ei, ej) + L.bracket(ei, K * ej);
      if ((lhs - rhs).cwiseAbs().maxCoeff() > tol) return false;
    }
  return true;
}

bool is_spd(const Mat3& G) {
  if (!G.allFinite()) return false;
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + G.cwiseAbs().maxCoeff())) return false;
  Eigen::LLT<Mat3> llt(G);
  return llt.info() == Eigen::Success;
}

void require_spd(const Mat3& G, std::string_view what) {
  if (!is_spd(G)) throw DomainError(std::string(what) + ": fiber metric is not symmetric positive definite");
}

double bracket_norm_sq(const LieStructure& L, const Mat3& G) {
  require_spd(G, "bracket_norm_sq");
  const Mat3 Gi = G.inverse();
  // sum_{k,k'} G_{kk'} tr(C^k Gi C^{k'T} Gi)
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int kp = 0; kp < 3; ++kp) {
      if (G(k, kp) == 0.0) continue;
      s += G(k, kp) * (L.constants[k] * Gi * L.constants[kp].transpose() * Gi).trace();
    }
  return s;
}

double levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  return ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
}

double hg_norm_sq(const LieStructure& /*L*/, const Mat3& G, double h0) {
  require_spd(G, "hg_norm_sq");
  const Mat3 Gi = G.inverse();
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double e = levi_civita(i, j, k);
        if (e == 0.0) continue;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
              const double f = levi_civita(a, b, c);
              if (f == 0.0) continue;
              s += e * f * Gi(i, a) * Gi(j, b) * Gi(k, c);
            }
      }
  return h0 * h0 * s;
}

Vec3 unit_center(const Mat3& G) {
  require_spd(G, "unit_center");
  return Vec3::Unit(kCenterIndex) / std::sqrt(G(kCenterIndex, kCenterIndex));
}

}  // namespace nilflow
