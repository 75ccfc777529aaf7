#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "twistlab/group.hpp"
#include "twistlab/numeric.hpp"
#include "twistlab/tail_model.hpp"

namespace twistlab {

using RealMatrix = Eigen::MatrixXd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// |A|_inf = max_ij |a_ij|.
double max_entry_norm(const RealMatrix& a);
/// Entrywise reduction to (-pi, pi].
RealMatrix canonicalize(const RealMatrix& a);

/// A normalised map rho: G -> T (rho(e) = 1), used to build coboundaries and
/// to perturb cocycles and representations.
class PhaseMap {
public:
  /// rho(x) = exp(i (x.Qx + l.x)).
  static PhaseMap quadratic(AbelianGroup group, RealMatrix q, Eigen::VectorXd linear);
  /// rho(x) = exp(i angles[index_of(x)]); finite groups, angles[0] must be 0.
  static PhaseMap table(AbelianGroup group, std::vector<double> angles);
  /// rho(x) = exp(i angle(x)); angle(e) must vanish.
  static PhaseMap custom(AbelianGroup group, std::function<double(const LatticeElement&)> angle, std::string description);
  static PhaseMap trivial(AbelianGroup group);

  const AbelianGroup& group() const noexcept { return group_; }
  double angle(const LatticeElement& x) const;
  Complex operator()(const LatticeElement& x) const { return unit_phase(angle(x)); }
  const std::string& description() const noexcept { return description_; }

private:
  PhaseMap(AbelianGroup group, std::function<double(const LatticeElement&)> angle, std::string description);
  AbelianGroup group_;
  std::function<double(const LatticeElement&)> angle_;
  std::string description_;
};

/// A normalised T-valued 2-cocycle. Immutable; copies share state.
class Cocycle {
public:
  enum class Kind { Matrix, BilinearLift, Table, Coboundary, Product, Commutator };

  /// u_A(x,y) = exp(i x.(Ay)) on Z^N; A is canonicalised to (-pi, pi].
  static Cocycle matrix(RealMatrix a);
  /// Same without canonicalisation (values agree; matrices may differ by 2pi).
  static Cocycle matrix_raw(RealMatrix a);
  /// Dense table on a finite group, indexed [index_of(x) * |G| + index_of(y)].
  /// Validates modulus, normalisation, and (for |G| <= 64) the cocycle identity.
  static Cocycle table(AbelianGroup group, std::vector<Complex> values);
  /// d rho(x,y) = rho(x) rho(y) conj(rho(x+y)).
  static Cocycle coboundary(PhaseMap rho);
  /// Pointwise product; all factors must live on the same group.
  static Cocycle product(std::vector<Cocycle> factors);
  static Cocycle trivial(AbelianGroup group);
  /// u((a1,b1),(a2,b2)) = (-1)^{a2 b1} on Z2 x Z2.
  static Cocycle pauli();

  Kind kind() const noexcept;
  std::string kind_name() const;
  const AbelianGroup& group() const noexcept;

  /// Deterministic value u(x,y); throws RankMismatch for foreign elements.
  Complex evaluate(const LatticeElement& x, const LatticeElement& y) const;
  Complex operator()(const LatticeElement& x, const LatticeElement& y) const { return evaluate(x, y); }

  /// Matrix backing u = u_A (Matrix and BilinearLift variants).
  const RealMatrix* matrix_data() const noexcept;
  /// D for BilinearLift.
  const RealMatrix* bilinear_data() const noexcept;
  const std::vector<Complex>* table_data() const noexcept;
  const std::vector<Cocycle>* factors() const noexcept;

  /// True for bicharacters and products of bicharacters with coboundaries:
  /// the cocycles whose class is read off the commutator on generator pairs.
  bool is_class_decidable() const noexcept;
  /// True when u is known to be a bicharacter (no coboundary factors).
  bool is_bicharacter() const noexcept;

  std::string describe() const;

private:
  struct Impl;
  friend Cocycle lift_bilinear(const RealMatrix& d);
  friend Cocycle commutator_bicharacter(const Cocycle& u);
  explicit Cocycle(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// u^D = u_{D~} with D~ = [[0, 0], [-D^t, 0]] on Z^{P+Q}.
Cocycle lift_bilinear(const RealMatrix& d);

/// kappa(x,y) = u(x,y) conj(u(y,x)); for u_A this is u_{A - A^t}.
Cocycle commutator_bicharacter(const Cocycle& u);

/// (d rho) u.
Cocycle perturb(const Cocycle& u, const PhaseMap& rho);

/// sigma: A x B -> T.
class BilinearMap {
public:
  /// sigma_D(a,b) = exp(i a.(Db)) on Z^P x Z^Q.
  static BilinearMap lattice(RealMatrix d);
  /// sigma(a,b) = exp(2 pi i a.(E b) / denominator) on finite groups; E must
  /// make sigma well defined modulo the group moduli.
  static BilinearMap finite(AbelianGroup left, AbelianGroup right, IntMatrix exponents, std::int64_t denominator);

  const AbelianGroup& left() const noexcept { return left_; }
  const AbelianGroup& right() const noexcept { return right_; }
  /// Product group A x B.
  AbelianGroup product_group() const;
  bool is_lattice() const noexcept { return lattice_.has_value(); }
  const RealMatrix* lattice_matrix() const noexcept { return lattice_ ? &*lattice_ : nullptr; }

  Complex operator()(const LatticeElement& a, const LatticeElement& b) const;
  /// u_sigma((a1,b1),(a2,b2)) = conj(sigma(a2,b1)).
  Cocycle lift() const;
  /// Largest bilinearity defect over the given (a, a', b, b') samples.
  double bilinearity_residual(const std::vector<std::array<LatticeElement, 4>>& samples) const;
  std::string describe() const;

private:
  BilinearMap(AbelianGroup left, AbelianGroup right) : left_(std::move(left)), right_(std::move(right)) {}
  AbelianGroup left_;
  AbelianGroup right_;
  std::optional<RealMatrix> lattice_;
  IntMatrix exponents_;
  std::int64_t denominator_ = 1;
};

// ---------------------------------------------------------------------------
// Sampling

struct Triple {
  LatticeElement x, y, z;
};
struct Pair {
  LatticeElement x, y;
};

/// Uniform element with |coords| <= radius (reduced into finite factors).
LatticeElement random_element(const AbelianGroup& group, std::int64_t radius, std::mt19937_64& rng);
std::vector<Triple> sample_triples(const AbelianGroup& group, std::size_t count, std::int64_t radius, std::uint64_t seed);
std::vector<Pair> sample_pairs(const AbelianGroup& group, std::size_t count, std::int64_t radius, std::uint64_t seed);
std::vector<Triple> all_triples(const AbelianGroup& group);
std::vector<Pair> all_pairs(const AbelianGroup& group);
/// Uniform integer in [lo, hi] without relying on library distributions.
std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi);
double uniform_real(std::mt19937_64& rng, double lo, double hi);

// ---------------------------------------------------------------------------
// Checks

/// max |u(x,y)u(x+y,z) - u(y,z)u(x,y+z)|; throws ValidationError on an empty list.
double check_cocycle_identity(const Cocycle& u, const std::vector<Triple>& samples);
/// max ||u(x,y)| - 1| over the pairs.
double modulus_residual(const Cocycle& u, const std::vector<Pair>& samples);
/// max |u(x,e) - 1|, |u(e,x) - 1|.
double normalization_residual(const Cocycle& u, const std::vector<Pair>& samples);
/// max of both bilinearity defects over sampled triples.
double bicharacter_residual(const Cocycle& u, const std::vector<Triple>& samples);

enum class CoboundaryVerdict { Coboundary, NotCoboundary, Inconclusive };
std::string to_string(CoboundaryVerdict v);

struct CoboundaryReport {
  CoboundaryVerdict verdict = CoboundaryVerdict::Inconclusive;
  std::optional<Pair> witness;
  Complex witness_value{1.0, 0.0};
  /// max |kappa - 1| over generator pairs and samples.
  double max_commutator_defect = 0.0;
};

/// Decides [u] = 1 via the commutator on generator pairs (plus any extra
/// sample pairs searched for a witness). Throws UnsupportedVariant unless
/// u.is_class_decidable().
CoboundaryReport coboundary_test(const Cocycle& u, const std::vector<Pair>& samples = {});

/// max |kappa_u - kappa_v| on generator pairs and the extra samples.
double commutator_distance(const Cocycle& u, const Cocycle& v, const std::vector<Pair>& samples = {});

// ---------------------------------------------------------------------------
// Sequences

/// u_1, u_2, ... (indices start at 1), optionally with a declared model for
/// the matrix norms |A_i|_inf of matrix-backed members.
class CocycleSequence {
public:
  CocycleSequence(AbelianGroup group, std::function<Cocycle(std::size_t)> generator, std::optional<TailModel> norm_model = {},
                  std::string description = "custom");

  /// u_i = u_{r^i A}; norm model geometric(|A|_inf, r).
  static CocycleSequence geometric_matrix(const RealMatrix& a, double ratio);
  /// u_i = u_{A_i} with |A_i| following a model: A_i = (s_i / |A|_inf) A.
  static CocycleSequence scaled_matrix(const RealMatrix& a, const TailModel& norms);
  static CocycleSequence constant(const Cocycle& u);

  const AbelianGroup& group() const noexcept { return group_; }
  Cocycle at(std::size_t i) const;
  const std::optional<TailModel>& norm_model() const noexcept { return norm_model_; }
  const std::string& description() const noexcept { return description_; }

private:
  AbelianGroup group_;
  std::function<Cocycle(std::size_t)> generator_;
  std::optional<TailModel> norm_model_;
  std::string description_;
};

/// prod_{i <= n} u_i(x, y), accumulated as a compensated phase sum.
Complex partial_product(const CocycleSequence& sequence, std::size_t n, const LatticeElement& x, const LatticeElement& y);

struct OneFreeWitness {
  std::size_t index = 0;
  LatticeElement x, y;
  /// Exact phase eps_i (f(x)+f(y)-f(x+y)) of d rho_i(x,y); nonzero.
  double angle = 0.0;
};

struct OneFreeSequence {
  CocycleSequence sequence;
  std::vector<OneFreeWitness> witnesses;
  /// sum_{i <= count} eps_i; |1 - d rho_i(x,y)| <= eps_i |f(x)+f(y)-f(x+y)|.
  double epsilon_sum = 0.0;
};

/// d rho_i with rho_i(x) = exp(i 2^{-i} f(x)); f defaults to x_1^2. Throws
/// ConstructionError when the group is trivial or f looks additive (no
/// nonzero defect f(x)+f(y)-f(x+y) among small elements).
OneFreeSequence one_free_coboundary_sequence(const AbelianGroup& group, std::size_t count,
                                             std::function<std::int64_t(const LatticeElement&)> f = {});

}  // namespace twistlab
