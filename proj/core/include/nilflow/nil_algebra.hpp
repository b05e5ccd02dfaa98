#pragma once

#include "nilflow/types.hpp"

#include <array>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace nilflow {

enum class AlgebraKind { heisenberg, abelian };

std::string_view to_string(AlgebraKind kind);
AlgebraKind algebra_kind_from_string(std::string_view name);

/// Structure constants of a three-dimensional nilpotent Lie algebra in a
/// fixed frame {e1, e2, e3}, with e3 spanning the center.
///
/// `constants[k](i, j)` holds C^k_{ij}, so that [e_i, e_j] = sum_k C^k_{ij} e_k.
/// Indices are zero-based in code (e1 -> 0).
struct LieStructure {
  AlgebraKind kind = AlgebraKind::heisenberg;
  double c = 1.0;
  std::array<Mat3, 3> constants{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};

  static LieStructure heisenberg(double c = 1.0);
  static LieStructure abelian();

  double operator()(int k, int i, int j) const { return constants[k](i, j); }

  /// [x, y] for fiber vectors given in frame components.
  Vec3 bracket(const Vec3& x, const Vec3& y) const;
};

/// Index of the frame vector spanning the center.
inline constexpr int kCenterIndex = 2;

enum class StructureViolation { antisymmetry, jacobi, nilpotency, tracelessness };

std::string_view to_string(StructureViolation v);

/// Lists every structural invariant that fails (empty when the constants
/// describe a valid two-step nilpotent algebra with e3 central).
std::vector<StructureViolation> validate_structure(const LieStructure& L, double tol = 1e-12);

/// (ad_a)^p_i = sum_k a^k C^p_{ki}: the matrix of x -> [a, x].
Mat3 ad_matrix(const LieStructure& L, const Vec3& a);

/// True when K (acting as x -> K x) is a derivation of the bracket.
bool is_derivation(const LieStructure& L, const Mat3& K, double tol = 1e-12);

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

bool is_spd(const Mat3& G);
void require_spd(const Mat3& G, std::string_view what);

/// |[,]|^2 as the full contraction G^{ii'} G^{jj'} C^k_{ij} C^{k'}_{i'j'} G_{kk'}.
double bracket_norm_sq(const LieStructure& L, const Mat3& G);

/// |H^G|^2 for the purely vertical torsion H_{ijk} = h0 eps_{ijk}.
double hg_norm_sq(const LieStructure& L, const Mat3& G, double h0);

/// Unit section of the center, zeta = e3 / sqrt(G33).
Vec3 unit_center(const Mat3& G);

/// Levi-Civita symbol eps_{ijk} on zero-based indices.
double levi_civita(int i, int j, int k);

}  // namespace nilflow
