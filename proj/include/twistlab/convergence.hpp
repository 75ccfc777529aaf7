#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/cocycle.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/group.hpp"
#include "twistlab/representation.hpp"
#include "twistlab/tail_model.hpp"

namespace twistlab {

inline constexpr std::size_t kDefaultSeriesHorizon = 10'000;
inline constexpr std::size_t kDefaultScanHorizon = 100'000;

enum class Verdict { ProvedConvergent, ProvedDivergent, Inconclusive };
std::string to_string(Verdict v);

struct SeriesRow {
  std::size_t index = 0;
  double term = 0.0;
  double partial_sum = 0.0;
  /// Upper bound on the remaining tail after this index; +inf when uncertified.
  double bound = 0.0;
};

struct SeriesVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double partial_sum = 0.0;
  std::size_t terms_evaluated = 0;
  std::optional<double> tail_bound;
  /// How the tail bound or the divergence witness was obtained.
  std::string derivation;
  std::optional<std::string> witness;
  std::string note;
  std::vector<SeriesRow> rows;
};

/// Analytic comparison data for a nonnegative series. The majorant (sum of
/// the listed series) must dominate every term; the minorant likewise from
/// below. Declared models are checked against the computed prefix.
struct Comparison {
  std::vector<PowerGeometricSeries> majorant;
  std::vector<PowerGeometricSeries> minorant;
  bool verify_prefix = true;
  std::string derivation;
};

/// The series sum C i^a r^i that a power or geometric model describes.
std::optional<PowerGeometricSeries> comparison_series(const TailModel& model);
/// Uses a declared model as majorant when summable, as minorant otherwise.
Comparison declared_comparison(const std::optional<TailModel>& model);

/// Evaluates term(1..n) (n = min(n_max, available)) and certifies the tail
/// through the comparison. Terms must be nonnegative.
SeriesVerdict certify_series(const std::function<double(std::size_t)>& term, std::size_t n_max, const Comparison& comparison,
                             std::size_t available = static_cast<std::size_t>(-1));

// ---------------------------------------------------------------------------

struct ProductReport {
  Complex partial_product{1.0, 0.0};
  Verdict product = Verdict::Inconclusive;
  /// |prod_{i<=n} z_i - prod z_i| <= exp(tail) - 1 for unit-modulus terms.
  std::optional<double> product_error_bound;
  SeriesVerdict series;
};

/// prod z_i and the verdict on sum |1 - z_i|.
ProductReport product_diagnose(const std::function<Complex(std::size_t)>& z, const std::optional<TailModel>& model, std::size_t n_max);

/// Verdict on sum |1 - c_i|; throws InvalidInnerProduct when |c_i| > 1 + 1e-9.
SeriesVerdict star_condition(const std::function<Complex(std::size_t)>& inner_products, const std::optional<TailModel>& model,
                             std::size_t n_max);

struct Theorem33Report {
  /// sum_i (1 - #(F_i ∩ (x+F_i)) / #F_i).
  SeriesVerdict sigma_part;
  /// sum_i (1/#F_i) sum_{y in F_i} |1 - u_i(-y, x)|.
  SeriesVerdict cocycle_part;
};

/// F_i = K_{m_i} with m_i from the model. The cocycle part is evaluated
/// exactly while the cumulative box size stays within `point_budget`.
Theorem33Report theorem33_condition(const CocycleSequence& sequence, const TailModel& sides, const LatticeElement& x, std::size_t n_max,
                                    std::int64_t point_budget = 20'000'000);

/// Exact per-term cocycle-part value (1/#K_m) sum_{y in K_m} |1 - u(-y, x)|.
double theorem33_cocycle_term(const Cocycle& u, std::int64_t side, const LatticeElement& x);

enum class ClauseStatus { Certified, Refuted, Inconclusive };
std::string to_string(ClauseStatus s);

struct Clause {
  ClauseStatus status = ClauseStatus::Inconclusive;
  std::string statement;
  std::vector<SeriesVerdict> series;
  std::string note;
};

struct Prop42Report {
  /// (1) F-sequence iff m_i -> inf; (2) sigma-F iff sum 1/m_i < inf;
  /// (3) product cocycle iff sum |A_i| < inf; (4) tensor product exists when
  /// sum 1/m_i < inf and sum m_i |A_i| < inf.
  Clause f_sequence, sigma_f, product_cocycle, tensor_product;
  /// (N|x|_1/2) sum m_i |A_i| bound when x is supplied and clause (4) holds.
  std::optional<double> cocycle_part_bound;
};

Prop42Report prop42_decide(const TailModel& sides, const TailModel& norms, const std::optional<LatticeElement>& x = {},
                           std::size_t n_max = kDefaultSeriesHorizon);

// ---------------------------------------------------------------------------
// Subsequence selection

struct Selection {
  std::vector<std::size_t> indices;
  /// Verified sup_{x in H_i, y in F_i} |1 - u(-y, x)| per step.
  std::vector<double> sups;
};

class SelectionFailure : public Error {
public:
  SelectionFailure(std::size_t step, std::size_t best_index, double best_sup, double target);
  std::size_t step;
  std::size_t best_index;
  double best_sup;
  double target;
};

/// sup_{x in H, y in K_m} |1 - u(-y, x)| for the sup-ball H of radius `radius`.
double selection_sup(const Cocycle& u, std::int64_t side, std::int64_t radius);

/// Greedy smallest-index choice of j_1 < j_2 < ... with sup <= 1/i^2 at step i,
/// scanning indices up to `scan_horizon`.
Selection corollary34_select(const CocycleSequence& sequence, const TailModel& sides, std::size_t count,
                             std::size_t scan_horizon = kDefaultScanHorizon);

struct PostSelectionCheck {
  /// First exhaustion index containing x.
  std::size_t n = 0;
  double sum = 0.0;
  /// 2(n-1) + sum_{i=n}^{count} 1/i^2.
  double bound = 0.0;
};

/// sum over selected steps of the exact cocycle-part term at x.
PostSelectionCheck corollary34_post_selection(const CocycleSequence& sequence, const TailModel& sides, const Selection& selection,
                                              const LatticeElement& x);

// ---------------------------------------------------------------------------
// Dirichlet example

/// (1/(2n+1)) sin((2n+1)theta/2) / sin(theta/2), equal to 1 at theta = 0 mod 2pi.
double dirichlet_value(std::int64_t n, double theta);

struct DirichletReport {
  SeriesVerdict reciprocal;  // sum 1/n_j
  SeriesVerdict defect;      // sum |1 - D(n_j, theta_j)|
  std::string window = "centered {-n..n}";
};

/// The defect series is certified with |1 - D(n, theta)| <= n(n+1) theta^2 / 6.
DirichletReport dirichlet_condition(const TailModel& n_model, const TailModel& theta_model, std::size_t n_max = kDefaultSeriesHorizon);

/// psi_i(x) = conj(rho_i(-x)) phi_i(x).
std::vector<TruncatedVector> gauge_fix(const std::vector<PhaseMap>& rhos, const std::vector<TruncatedVector>& phis);

}  // namespace twistlab
