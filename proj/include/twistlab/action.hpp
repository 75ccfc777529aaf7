#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/cocycle.hpp"
#include "twistlab/convergence.hpp"
#include "twistlab/representation.hpp"

namespace twistlab {

/// Per-index data of a product-type action: either inner products
/// (v_i(g) phi_i, phi_i) or tracial values tau_i(v_i(g)).
class ActionScenario {
public:
  enum class Kind { Vector, Trace };
  using Values = std::function<Complex(std::size_t, const LatticeElement&)>;
  using Bounds = std::function<std::optional<Comparison>(const LatticeElement&)>;

  /// (U_i(g) phi_i, phi_i) from explicit unitaries and unit vectors.
  static ActionScenario from_unitaries(AbelianGroup group, std::function<ComplexMatrix(std::size_t, const LatticeElement&)> unitaries,
                                       std::function<Eigen::VectorXcd(std::size_t)> vectors, std::string description);
  /// Raw inner products; `length` limits the supplied prefix.
  static ActionScenario from_inner_products(AbelianGroup group, Values values, std::string description,
                                            std::size_t length = static_cast<std::size_t>(-1));
  static ActionScenario from_traces(AbelianGroup group, Values values, std::string description,
                                    std::size_t length = static_cast<std::size_t>(-1));

  /// Attaches analytic bounds on 1 - |value_i(g)| used when no model is declared.
  ActionScenario with_bounds(Bounds bounds) const;

  Kind kind() const noexcept { return kind_; }
  const AbelianGroup& group() const noexcept { return group_; }
  std::size_t length() const noexcept { return length_; }
  const std::string& description() const noexcept { return description_; }
  /// Validated value at index i >= 1; modulus must be <= 1 + 1e-12.
  Complex value(std::size_t i, const LatticeElement& g) const;
  std::optional<Comparison> bounds(const LatticeElement& g) const;

private:
  ActionScenario(Kind kind, AbelianGroup group, Values values, std::string description, std::size_t length);
  Kind kind_;
  AbelianGroup group_;
  Values values_;
  Bounds bounds_;
  std::string description_;
  std::size_t length_;
};

/// sum_i (1 - |(U_i(g) phi_i, phi_i)|) for vector-backed scenarios.
SeriesVerdict extension_condition(const ActionScenario& s, const LatticeElement& g, const std::optional<TailModel>& model,
                                  std::size_t n_max = kDefaultSeriesHorizon);
/// sum_i (1 - |tau_i(v_i(g))|) for trace-backed scenarios.
SeriesVerdict trace_condition(const ActionScenario& s, const LatticeElement& g, const std::optional<TailModel>& model,
                              std::size_t n_max = kDefaultSeriesHorizon);

enum class InnerOuter { InnerCertified, OuterCertified, Inconclusive };
std::string to_string(InnerOuter v);

struct InnerOuterQuery {
  LatticeElement g;
  std::optional<TailModel> model;
};

struct InnerOuterReport {
  InnerOuter verdict = InnerOuter::Inconclusive;
  std::vector<SeriesVerdict> per_query;
  std::optional<LatticeElement> outer_witness;
  /// Only the supplied implementers are examined.
  std::string scope = "evaluated for the supplied implementing unitaries only";
};

InnerOuterReport inner_outer_verdict(const ActionScenario& s, const std::vector<InnerOuterQuery>& queries,
                                     std::size_t n_max = kDefaultSeriesHorizon);

enum class Obstruction { Obstructed, NotObstructed, Inconclusive };
std::string to_string(Obstruction v);

struct ObstructionReport {
  Obstruction verdict = Obstruction::Inconclusive;
  std::optional<Pair> witness;
  Complex witness_value{1.0, 0.0};
  /// max_i of the commutator distance between u_i and u.
  double class_distance = 0.0;
  std::string note;
};

/// Obstructed when every u_i has the commutator of u on generator pairs and u
/// is not a coboundary. Throws UnsupportedVariant for cocycles whose class is
/// not read off the commutator.
ObstructionReport cohomological_obstruction(const std::vector<Cocycle>& classes, const Cocycle& u);

// ---------------------------------------------------------------------------
// Scenario builders

/// tau(lambda_{u_i}(g)) for the canonical trace: exact delta_{g,e} on Z^N,
/// normalised matrix trace on finite groups.
ActionScenario twisted_trace_scenario(const CocycleSequence& sequence, std::size_t length = static_cast<std::size_t>(-1));
/// Normalised 2x2 trace of the Pauli implementers V^a W^b at every index.
ActionScenario pauli_trace_scenario(std::size_t length = static_cast<std::size_t>(-1));
/// (lambda_{u_i}(g) phi_i, phi_i) with phi_i the normalised box K_{m_i}; bounded
/// by the box-defect and cocycle majorants when the models allow.
ActionScenario regular_box_scenario(const CocycleSequence& sequence, const TailModel& sides);

}  // namespace twistlab
