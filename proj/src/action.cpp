#include "twistlab/action.hpp"

#include <cmath>

#include "twistlab/errors.hpp"

namespace twistlab {

namespace {

constexpr double kModulusSlack = 1e-12;
constexpr double kClassTolerance = 1e-12;

SeriesVerdict identity_verdict(std::size_t n_max) {
  Comparison zero{{PowerGeometricSeries{0.0, 0.0, 1.0}}, {}, false, "g = e: v_i(e) = I, every term vanishes"};
  return certify_series([](std::size_t) { return 0.0; }, n_max, zero);
}

SeriesVerdict modulus_series(const ActionScenario& s, const LatticeElement& g, const std::optional<TailModel>& model, std::size_t n_max) {
  s.group().require_member(g, "query");
  if (s.group().reduce(g).is_zero()) return identity_verdict(n_max);
  Comparison cmp;
  if (model) {
    cmp = declared_comparison(model);
  } else if (auto b = s.bounds(g)) {
    cmp = *b;
  } else {
    cmp = declared_comparison(std::nullopt);
  }
  return certify_series([&](std::size_t i) { return 1.0 - std::abs(s.value(i, g)); }, n_max, cmp, s.length());
}

}  // namespace

ActionScenario::ActionScenario(Kind kind, AbelianGroup group, Values values, std::string description, std::size_t length)
    : kind_(kind), group_(std::move(group)), values_(std::move(values)), description_(std::move(description)), length_(length) {}

ActionScenario ActionScenario::from_unitaries(AbelianGroup group, std::function<ComplexMatrix(std::size_t, const LatticeElement&)> unitaries,
                                              std::function<Eigen::VectorXcd(std::size_t)> vectors, std::string description) {
  Values values = [unitaries = std::move(unitaries), vectors = std::move(vectors)](std::size_t i, const LatticeElement& g) {
    const Eigen::VectorXcd phi = vectors(i);
    if (std::abs(phi.norm() - 1.0) > kModulusSlack) throw ValidationError("reference vector " + std::to_string(i) + " is not a unit vector");
    const ComplexMatrix u = unitaries(i, g);
    if (u.rows() != phi.size() || u.cols() != phi.size()) throw RankMismatch("unitary and vector sizes differ at index " + std::to_string(i));
    return phi.dot(u * phi);
  };
  return ActionScenario(Kind::Vector, std::move(group), std::move(values), std::move(description), static_cast<std::size_t>(-1));
}

ActionScenario ActionScenario::from_inner_products(AbelianGroup group, Values values, std::string description, std::size_t length) {
  return ActionScenario(Kind::Vector, std::move(group), std::move(values), std::move(description), length);
}

ActionScenario ActionScenario::from_traces(AbelianGroup group, Values values, std::string description, std::size_t length) {
  return ActionScenario(Kind::Trace, std::move(group), std::move(values), std::move(description), length);
}

ActionScenario ActionScenario::with_bounds(Bounds bounds) const {
  ActionScenario copy = *this;
  copy.bounds_ = std::move(bounds);
  return copy;
}

Complex ActionScenario::value(std::size_t i, const LatticeElement& g) const {
  if (i == 0 || i > length_) throw ValidationError("scenario index " + std::to_string(i) + " out of range");
  group_.require_member(g, "query");
  const Complex v = values_(i, group_.reduce(g));
  if (!(std::abs(v) <= 1.0 + kModulusSlack)) {
    throw InvalidInnerProduct("value at index " + std::to_string(i) + " has modulus " + std::to_string(std::abs(v)) + " > 1");
  }
  return v;
}

std::optional<Comparison> ActionScenario::bounds(const LatticeElement& g) const {
  if (!bounds_) return std::nullopt;
  return bounds_(group_.reduce(g));
}

SeriesVerdict extension_condition(const ActionScenario& s, const LatticeElement& g, const std::optional<TailModel>& model, std::size_t n_max) {
  if (s.kind() != ActionScenario::Kind::Vector) throw ValidationError("extension condition needs a vector-backed scenario");
  auto v = modulus_series(s, g, model, n_max);
  if (v.verdict == Verdict::ProvedConvergent) v.note = "extension exists and is unitarily implemented";
  return v;
}

SeriesVerdict trace_condition(const ActionScenario& s, const LatticeElement& g, const std::optional<TailModel>& model, std::size_t n_max) {
  if (s.kind() != ActionScenario::Kind::Trace) throw ValidationError("trace condition needs a trace-backed scenario");
  return modulus_series(s, g, model, n_max);
}

std::string to_string(InnerOuter v) {
  switch (v) {
    case InnerOuter::InnerCertified: return "InnerCertified";
    case InnerOuter::OuterCertified: return "OuterCertified";
    case InnerOuter::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

InnerOuterReport inner_outer_verdict(const ActionScenario& s, const std::vector<InnerOuterQuery>& queries, std::size_t n_max) {
  if (queries.empty()) throw ValidationError("inner/outer verdict needs at least one query");
  InnerOuterReport report;
  bool all_convergent = true;
  for (const auto& q : queries) {
    report.per_query.push_back(modulus_series(s, q.g, q.model, n_max));
    const auto& v = report.per_query.back();
    if (v.verdict != Verdict::ProvedConvergent) all_convergent = false;
    if (v.verdict == Verdict::ProvedDivergent && !report.outer_witness && !s.group().reduce(q.g).is_zero()) report.outer_witness = q.g;
  }
  if (report.outer_witness) {
    report.verdict = InnerOuter::OuterCertified;
  } else if (all_convergent) {
    report.verdict = InnerOuter::InnerCertified;
  }
  return report;
}

std::string to_string(Obstruction v) {
  switch (v) {
    case Obstruction::Obstructed: return "Obstructed";
    case Obstruction::NotObstructed: return "NotObstructed";
    case Obstruction::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

ObstructionReport cohomological_obstruction(const std::vector<Cocycle>& classes, const Cocycle& u) {
  if (classes.empty()) throw ValidationError("obstruction check needs at least one u_i");
  for (const auto& ui : classes) {
    if (!(ui.group() == u.group())) throw RankMismatch("u_i and u live on different groups");
    if (!ui.is_class_decidable()) throw UnsupportedVariant("class of " + ui.describe() + " is not read off its commutator");
  }
  const CoboundaryReport base = coboundary_test(u);
  ObstructionReport report;
  for (const auto& ui : classes) report.class_distance = std::max(report.class_distance, commutator_distance(ui, u));
  if (base.verdict == CoboundaryVerdict::Coboundary) {
    report.verdict = Obstruction::NotObstructed;
    report.note = "[u] = 1";
    return report;
  }
  if (base.verdict == CoboundaryVerdict::Inconclusive) {
    report.note = "class of u undecided";
    return report;
  }
  report.witness = base.witness;
  report.witness_value = base.witness_value;
  if (report.class_distance > kClassTolerance) {
    report.note = "[u_i] = [u] fails for some i";
    return report;
  }
  report.verdict = Obstruction::Obstructed;
  report.note = "[u_i] = [u] != 1 for every i; the product action does not extend";
  return report;
}

// ---------------------------------------------------------------------------

ActionScenario twisted_trace_scenario(const CocycleSequence& sequence, std::size_t length) {
  const auto& g = sequence.group();
  ActionScenario::Values values;
  if (g.is_finite()) {
    values = [sequence](std::size_t i, const LatticeElement& x) {
      const ComplexMatrix m = regular_rep_matrix(sequence.at(i), x);
      return m.trace() / static_cast<double>(m.rows());
    };
  } else {
    values = [](std::size_t, const LatticeElement& x) { return x.is_zero() ? Complex{1.0, 0.0} : Complex{}; };
  }
  auto s = ActionScenario::from_traces(g, std::move(values), "canonical trace of lambda_{u_i}(g); " + sequence.description(), length);
  return s.with_bounds([](const LatticeElement& x) -> std::optional<Comparison> {
    if (x.is_zero()) return std::nullopt;
    return Comparison{{}, {PowerGeometricSeries{1.0, 0.0, 1.0}}, true, "tau(lambda(g)) = 0 for g != e"};
  });
}

ActionScenario pauli_trace_scenario(std::size_t length) {
  const ProjectiveRep rep = pauli_rep();
  auto s = ActionScenario::from_traces(
      AbelianGroup::finite({2, 2}), [rep](std::size_t, const LatticeElement& x) { return rep(x).trace() / 2.0; },
      "normalised trace of V^a W^b", length);
  return s.with_bounds([](const LatticeElement& x) -> std::optional<Comparison> {
    if (x.is_zero()) return std::nullopt;
    return Comparison{{}, {PowerGeometricSeries{1.0, 0.0, 1.0}}, true, "Pauli implementers are traceless"};
  });
}

ActionScenario regular_box_scenario(const CocycleSequence& sequence, const TailModel& sides) {
  const auto& g = sequence.group();
  if (!g.is_free()) throw ValidationError("regular-box scenarios live on Z^N");
  auto s = ActionScenario::from_inner_products(
      g,
      [sequence, sides, g](std::size_t i, const LatticeElement& x) {
        return rep_inner_product(sequence.at(i), FolnerBox::standard(g.rank(), sides.box_side(i)), x);
      },
      "(lambda_{u_i}(g) phi_{K_m_i}, phi_{K_m_i}); " + sequence.description(), sides.known_terms());
  return s.with_bounds([sequence, sides, g](const LatticeElement& x) -> std::optional<Comparison> {
    // 1 - |c| <= |1 - c| <= sigma-F defect + cocycle-part mean
    const auto norms = sequence.norm_model();
    if (!norms) return std::nullopt;
    const double x1 = static_cast<double>(x.l1_norm());
    Comparison c;
    c.verify_prefix = true;
    c.derivation = "1 - |c_i| <= |x|_1/(m_i+1) + (N|x|_1/2) m_i |A_i|_inf";
    if (const auto* p = std::get_if<PowerLaw>(&sides.law())) {
      if (p->coefficient <= 0.0) return std::nullopt;
      c.majorant.push_back({x1 / p->coefficient, -p->exponent, 1.0});
      const auto n = comparison_series(*norms);
      if (!n) return std::nullopt;
      const double k = static_cast<double>(g.rank()) * x1 / 2.0 * (p->coefficient + 1.0);
      c.majorant.push_back({k * n->coefficient, std::max(p->exponent, 0.0) + n->exponent, n->ratio});
      return c;
    }
    return std::nullopt;
  });
}

}  // namespace twistlab
