#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/cocycle.hpp"
#include "twistlab/group.hpp"

namespace twistlab {

using ComplexMatrix = Eigen::MatrixXcd;

/// Default bound on group orders and representation dimensions.
inline constexpr std::int64_t kDefaultDimensionCap = 4096;

/// max |(U*U - I)_jk|.
double unitarity_residual(const ComplexMatrix& u);
/// Max-entry norm of a complex matrix.
double max_abs_entry(const ComplexMatrix& m);

/// x -> U(x) with U(x)U(y) = u(x,y)U(x+y). Matrices are produced on demand.
class ProjectiveRep {
public:
  ProjectiveRep(Cocycle cocycle, std::size_t dimension, std::function<ComplexMatrix(const LatticeElement&)> assignment,
                std::string description);

  const AbelianGroup& group() const noexcept { return cocycle_.group(); }
  const Cocycle& cocycle() const noexcept { return cocycle_; }
  std::size_t dimension() const noexcept { return dimension_; }
  ComplexMatrix operator()(const LatticeElement& x) const;
  const std::string& description() const noexcept { return description_; }

private:
  Cocycle cocycle_;
  std::size_t dimension_;
  std::function<ComplexMatrix(const LatticeElement&)> assignment_;
  std::string description_;
};

/// lambda_u(x) on l^2(G), basis delta_g in enumeration order:
/// (lambda_u(x) f)(y) = u(-y, x) f(y - x).
ComplexMatrix regular_rep_matrix(const Cocycle& u, const LatticeElement& x, std::int64_t cap = kDefaultDimensionCap);
ProjectiveRep regular_rep(const Cocycle& u, std::int64_t cap = kDefaultDimensionCap);

/// x -> rho(x) I_1; its cocycle is d rho (trivial when rho is a character).
ProjectiveRep scalar_rep(const PhaseMap& rho);
/// U == I_d with the trivial cocycle.
ProjectiveRep trivial_rep(const AbelianGroup& group, std::size_t dimension = 1);
/// U((a,b)) = V^a W^b on Z2 x Z2 with V = [[0,1],[1,0]], W = diag(1,-1).
ProjectiveRep pauli_rep();

/// max ||U(x)U(y) - u(x,y)U(x+y)||_max over the pairs.
double projective_relation_check(const ProjectiveRep& rep, const std::vector<Pair>& samples);
/// All pairs for finite groups of order <= 64, otherwise `count` seeded samples.
std::vector<Pair> relation_samples(const AbelianGroup& group, std::size_t count = 1000, std::int64_t radius = 10, std::uint64_t seed = 1);

/// Kronecker product assignment with the pointwise product cocycle.
ProjectiveRep tensor_rep(const std::vector<ProjectiveRep>& reps, std::int64_t cap = kDefaultDimensionCap);

// ---------------------------------------------------------------------------
// Truncated vectors on the group

/// Finitely supported unit vector in l^2(G), keyed by reduced elements.
class TruncatedVector {
public:
  /// Rejects vectors whose norm differs from 1 by more than 1e-12.
  TruncatedVector(AbelianGroup group, std::map<LatticeElement, Complex> values);
  /// Scales the values to unit norm.
  static TruncatedVector normalized(AbelianGroup group, std::map<LatticeElement, Complex> values);
  /// chi_F / sqrt(#F).
  static TruncatedVector box(const FolnerBox& box);
  static TruncatedVector point_mass(AbelianGroup group, const LatticeElement& x);

  const AbelianGroup& group() const noexcept { return group_; }
  const std::map<LatticeElement, Complex>& values() const noexcept { return values_; }
  Complex at(const LatticeElement& x) const;
  double norm() const;

private:
  AbelianGroup group_;
  std::map<LatticeElement, Complex> values_;
};

/// (lambda_u(x) phi, psi) = sum_y u(-y,x) phi(y-x) conj(psi(y)).
Complex twisted_inner_product(const Cocycle& u, const LatticeElement& x, const TruncatedVector& phi, const TruncatedVector& psi);

/// (lambda_u(x) phi_F, phi_F) = (1/#F) sum_{y in F ∩ (x+F)} u(-y, x). Closed
/// form for matrix-backed cocycles, box enumeration otherwise.
Complex rep_inner_product(const Cocycle& u, const FolnerBox& box, const LatticeElement& x);
/// Same quantity by explicit enumeration of the intersection.
Complex rep_inner_product_enumerated(const Cocycle& u, const FolnerBox& box, const LatticeElement& x);

/// lambda_u(x) compressed to l^2(window): entries (y, y-x) = u(-y, x) for
/// y, y-x in the window. Rows are in lexicographic window order.
ComplexMatrix windowed_regular_matrix(const Cocycle& u, const FolnerBox& window, const LatticeElement& x,
                                      std::int64_t cap = kDefaultDimensionCap);

/// (lambda(x)|phi|, |phi|), the untwisted overlap of absolute values.
double weak_containment_diag(const TruncatedVector& phi, const LatticeElement& x);

// ---------------------------------------------------------------------------
// CCR pairs

struct CcrCheck {
  /// max ||V(a)W(b) - sigma(a,b)W(b)V(a)||_max over the samples.
  double relation_residual = 0.0;
  /// max unitarity residual of the truncated translations (0 for finite B).
  double boundary_defect = 0.0;
  bool windowed = false;
};

/// V_sigma(a) = multiplication by b -> sigma(a,b) and W(b) = lambda_B(b).
/// Finite B is realised exactly; B = Z^Q needs a window box and then W(b) is
/// a partial translation.
class CcrPair {
public:
  CcrPair(BilinearMap sigma, std::optional<FolnerBox> window = {}, std::int64_t cap = kDefaultDimensionCap);

  const BilinearMap& sigma() const noexcept { return sigma_; }
  bool windowed() const noexcept { return window_.has_value(); }
  std::size_t dimension() const noexcept { return basis_.size(); }
  const std::vector<LatticeElement>& basis() const noexcept { return basis_; }

  ComplexMatrix v(const LatticeElement& a) const;
  ComplexMatrix w(const LatticeElement& b) const;
  CcrCheck check(const std::vector<std::pair<LatticeElement, LatticeElement>>& samples) const;
  /// U(a,b) = V(a)W(b) on A x B with cocycle u_sigma; finite B only.
  ProjectiveRep joint() const;

private:
  std::size_t index_of(const LatticeElement& b) const;
  BilinearMap sigma_;
  std::optional<FolnerBox> window_;
  std::vector<LatticeElement> basis_;
};

// ---------------------------------------------------------------------------
// Fell absorption

struct FellReport {
  /// max over x of ||W(lambda_u(x) ⊗ V(x))W* - lambda_uv(x) ⊗ I||_max.
  double conjugation_residual = 0.0;
  double unitarity_residual = 0.0;
  /// max over x of the matched distance between the two eigenvalue multisets.
  double spectral_distance = 0.0;
  std::size_t dimension = 0;
};

/// The intertwiner W = sum_g |g><g| ⊗ V(-g) on l^2(G) ⊗ H.
ComplexMatrix fell_intertwiner(const ProjectiveRep& v_rep, std::int64_t cap = kDefaultDimensionCap);
FellReport fell_check(const Cocycle& u, const ProjectiveRep& v_rep, std::int64_t cap = kDefaultDimensionCap);

/// Greedy nearest matching distance between two eigenvalue multisets.
double spectral_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace twistlab
