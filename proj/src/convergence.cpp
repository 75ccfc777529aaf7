#include "twistlab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "twistlab/parallel.hpp"

namespace twistlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double sum_terms(const std::vector<PowerGeometricSeries>& series, std::size_t i) {
  double s = 0.0;
  for (const auto& c : series) s += c.term(i);
  return s;
}

std::string describe_sum(const std::vector<PowerGeometricSeries>& series) {
  std::string s;
  for (const auto& c : series) s += (s.empty() ? "" : " + ") + c.describe();
  return s;
}

/// 1/m_i bounds for m_i = ceil(model value).
Comparison reciprocal_comparison(const TailModel& sides) {
  Comparison c;
  c.derivation = "1/m_i against the declared box-side model";
  if (const auto* p = std::get_if<PowerLaw>(&sides.law())) {
    const double k = p->coefficient;
    c.majorant.push_back({(1.0 + 2e-9) / k, -p->exponent, 1.0});
    c.minorant.push_back({1.0 / (k + 1.0), -std::max(p->exponent, 0.0), 1.0});
  } else if (const auto* g = std::get_if<GeometricLaw>(&sides.law())) {
    const double k = g->coefficient;
    c.majorant.push_back({(1.0 + 2e-9) / k, 0.0, 1.0 / g->ratio});
    if (g->ratio <= 1.0) c.minorant.push_back({1.0 / (k + 1.0), 0.0, 1.0});
  }
  return c;
}

/// m_i <= c_m' * i^P * R^i with the exponent and ratio returned here.
struct SideEnvelope {
  double coefficient = 0.0;
  double exponent = 0.0;
  double ratio = 1.0;
};

std::optional<SideEnvelope> side_envelope(const TailModel& sides) {
  if (const auto* p = std::get_if<PowerLaw>(&sides.law())) return SideEnvelope{p->coefficient + 1.0, std::max(p->exponent, 0.0), 1.0};
  if (const auto* g = std::get_if<GeometricLaw>(&sides.law())) return SideEnvelope{g->coefficient + 1.0, 0.0, std::max(g->ratio, 1.0)};
  return std::nullopt;
}

/// K * m_i * s_i bounded by one power-geometric series.
std::optional<PowerGeometricSeries> side_times_norm_majorant(const TailModel& sides, const TailModel& norms, double k) {
  const auto env = side_envelope(sides);
  const auto n = comparison_series(norms);
  if (!env || !n) return std::nullopt;
  return PowerGeometricSeries{k * env->coefficient * n->coefficient, env->exponent + n->exponent, env->ratio * n->ratio};
}

bool all_summable(const std::vector<PowerGeometricSeries>& s) {
  return std::all_of(s.begin(), s.end(), [](const PowerGeometricSeries& c) { return c.summable(); });
}

bool some_divergent(const std::vector<PowerGeometricSeries>& s) {
  return std::any_of(s.begin(), s.end(), [](const PowerGeometricSeries& c) { return c.divergent(); }) &&
         std::all_of(s.begin(), s.end(), [](const PowerGeometricSeries& c) { return c.coefficient >= 0.0; });
}

ClauseStatus status_of(const SeriesVerdict& v) {
  switch (v.verdict) {
    case Verdict::ProvedConvergent: return ClauseStatus::Certified;
    case Verdict::ProvedDivergent: return ClauseStatus::Refuted;
    case Verdict::Inconclusive: return ClauseStatus::Inconclusive;
  }
  return ClauseStatus::Inconclusive;
}

bool model_has_zero_sides(const TailModel& sides) {
  if (const auto* p = std::get_if<PowerLaw>(&sides.law())) return p->coefficient == 0.0;
  if (const auto* g = std::get_if<GeometricLaw>(&sides.law())) return g->coefficient == 0.0 || g->ratio == 0.0;
  return false;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::ProvedConvergent: return "ProvedConvergent";
    case Verdict::ProvedDivergent: return "ProvedDivergent";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string to_string(ClauseStatus s) {
  switch (s) {
    case ClauseStatus::Certified: return "Certified";
    case ClauseStatus::Refuted: return "Refuted";
    case ClauseStatus::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::optional<PowerGeometricSeries> comparison_series(const TailModel& model) {
  if (const auto* p = std::get_if<PowerLaw>(&model.law())) return PowerGeometricSeries{p->coefficient, p->exponent, 1.0};
  if (const auto* g = std::get_if<GeometricLaw>(&model.law())) return PowerGeometricSeries{g->coefficient, 0.0, g->ratio};
  return std::nullopt;
}

Comparison declared_comparison(const std::optional<TailModel>& model) {
  Comparison c;
  if (!model) {
    c.derivation = "no tail model declared";
    return c;
  }
  const auto s = comparison_series(*model);
  if (!s) {
    c.derivation = "explicit prefix; no tail claim";
    return c;
  }
  c.derivation = "declared model " + model->to_string();
  if (s->summable()) {
    c.majorant.push_back(*s);
  } else {
    c.minorant.push_back(*s);
  }
  return c;
}

SeriesVerdict certify_series(const std::function<double(std::size_t)>& term, std::size_t n_max, const Comparison& comparison,
                             std::size_t available) {
  if (n_max == 0) throw ValidationError("series horizon must be >= 1");
  const std::size_t n = std::min(n_max, available);
  std::vector<double> terms = parallel_map<double>(n, [&](std::size_t k) { return term(k + 1); });

  SeriesVerdict out;
  out.terms_evaluated = n;
  out.derivation = comparison.derivation;
  out.rows.reserve(n);
  CompensatedSum sum;
  for (std::size_t k = 0; k < n; ++k) {
    double t = terms[k];
    if (!std::isfinite(t) || t < -1e-12) throw ValidationError("series term " + std::to_string(k + 1) + " is negative or not finite: " + fmt(t));
    t = std::max(t, 0.0);
    terms[k] = t;
    sum.add(t);
    out.rows.push_back({k + 1, t, sum.value(), kInf});
  }
  out.partial_sum = sum.value();

  bool majorant_ok = !comparison.majorant.empty() && all_summable(comparison.majorant);
  bool minorant_ok = !comparison.minorant.empty() && some_divergent(comparison.minorant);
  if (comparison.verify_prefix) {
    for (std::size_t k = 0; k < n && (majorant_ok || minorant_ok); ++k) {
      const std::size_t i = k + 1;
      if (majorant_ok && terms[k] > sum_terms(comparison.majorant, i) * (1.0 + 1e-12) + 1e-300) {
        majorant_ok = false;
        out.note = "term " + std::to_string(i) + " exceeds the majorant " + describe_sum(comparison.majorant);
      }
      if (minorant_ok && terms[k] < sum_terms(comparison.minorant, i) * (1.0 - 1e-12)) {
        minorant_ok = false;
        out.note = "term " + std::to_string(i) + " is below the minorant " + describe_sum(comparison.minorant);
      }
    }
  }
  double tail = kInf;
  if (majorant_ok) {
    tail = 0.0;
    for (const auto& c : comparison.majorant) tail += c.tail_after(n);
    if (!std::isfinite(tail)) {
      majorant_ok = false;
      out.note = "tail of " + describe_sum(comparison.majorant) + " could not be bounded";
    }
  }
  if (majorant_ok && minorant_ok) {
    out.note = "majorant and minorant disagree; no claim made";
    return out;
  }
  if (majorant_ok) {
    out.verdict = Verdict::ProvedConvergent;
    out.tail_bound = tail;
    out.derivation += "; majorant " + describe_sum(comparison.majorant);
    for (auto& row : out.rows) row.bound = (out.partial_sum - row.partial_sum) + tail;
    return out;
  }
  if (minorant_ok) {
    out.verdict = Verdict::ProvedDivergent;
    out.witness = "terms dominate " + describe_sum(comparison.minorant) + ", whose sum diverges";
    return out;
  }
  if (out.note.empty()) {
    if (n < n_max) {
      out.note = "only " + std::to_string(n) + " terms available and no tail certificate";
    } else if (comparison.majorant.empty() && comparison.minorant.empty()) {
      out.note = "no analytic tail certificate; partial sums only";
    } else {
      out.note = "comparison series neither summable nor a divergent minorant";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ProductReport product_diagnose(const std::function<Complex(std::size_t)>& z, const std::optional<TailModel>& model, std::size_t n_max) {
  if (n_max == 0) throw ValidationError("product horizon must be >= 1");
  ProductReport report;
  report.series = certify_series([&](std::size_t i) { return std::abs(1.0 - z(i)); }, n_max, declared_comparison(model));
  CompensatedSum phase;
  double log_modulus = 0.0;
  bool zero = false;
  for (std::size_t i = 1; i <= n_max; ++i) {
    const Complex v = z(i);
    if (v == Complex{}) {
      zero = true;
      break;
    }
    phase.add(std::arg(v));
    log_modulus += std::log(std::abs(v));
  }
  report.partial_product = zero ? Complex{} : std::polar(std::exp(log_modulus), phase.value());
  if (report.series.verdict == Verdict::ProvedConvergent) {
    report.product = Verdict::ProvedConvergent;
    report.product_error_bound = std::abs(report.partial_product) * std::expm1(*report.series.tail_bound);
  }
  return report;
}

SeriesVerdict star_condition(const std::function<Complex(std::size_t)>& inner_products, const std::optional<TailModel>& model,
                             std::size_t n_max) {
  return certify_series(
      [&](std::size_t i) {
        const Complex c = inner_products(i);
        if (!(std::abs(c) <= 1.0 + 1e-9)) {
          throw InvalidInnerProduct("inner product " + std::to_string(i) + " has modulus " + fmt(std::abs(c)) + " > 1");
        }
        return std::abs(1.0 - c);
      },
      n_max, declared_comparison(model));
}

// ---------------------------------------------------------------------------
// Box-averaged cocycle sums

double theorem33_cocycle_term(const Cocycle& u, std::int64_t side, const LatticeElement& x) {
  const auto& g = u.group();
  if (!g.is_free() || g.rank() != x.rank()) throw RankMismatch("cocycle-part term needs a cocycle on Z^N matching x");
  if (side < 0) throw ValidationError("box side must be >= 0");
  const FolnerBox box = FolnerBox::standard(g.rank(), side);
  const auto card = static_cast<double>(box.cardinality());
  const std::size_t n = g.rank();
  const auto width = static_cast<std::size_t>(side + 1);

  if (const RealMatrix* a = u.matrix_data()) {
    std::vector<double> b(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      long double s = 0.0L;
      for (std::size_t k = 0; k < n; ++k) s += static_cast<long double>((*a)(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))) * x[k];
      b[j] = static_cast<double>(s);
    }
    // slice on the first coordinate; slices are summed in index order
    const auto slices = parallel_map<double>(width, [&](std::size_t first) {
      CompensatedSum s;
      std::vector<std::int64_t> y(n, 0);
      y[0] = static_cast<std::int64_t>(first);
      while (true) {
        long double phase = 0.0L;
        for (std::size_t j = 0; j < n; ++j) phase -= static_cast<long double>(y[j]) * b[j];
        s.add(2.0 * std::abs(std::sin(static_cast<double>(std::remainder(phase, static_cast<long double>(kTwoPi))) / 2.0)));
        bool done = true;
        for (std::size_t j = n; j > 1 && done;) {
          --j;
          if (y[j] < side) {
            ++y[j];
            done = false;
          } else {
            y[j] = 0;
          }
        }
        if (done) return s.value();
      }
    });
    CompensatedSum total;
    for (double v : slices) total.add(v);
    return total.value() / card;
  }

  const auto slices = parallel_map<double>(width, [&](std::size_t first) {
    CompensatedSum s;
    std::vector<std::int64_t> l(n, 0), h(n, side);
    l[0] = h[0] = static_cast<std::int64_t>(first);
    for_each_in_box(LatticeElement(l), LatticeElement(h), [&](const LatticeElement& y) { s.add(std::abs(1.0 - u(-y, x))); });
    return s.value();
  });
  CompensatedSum total;
  for (double v : slices) total.add(v);
  return total.value() / card;
}

Theorem33Report theorem33_condition(const CocycleSequence& sequence, const TailModel& sides, const LatticeElement& x, std::size_t n_max,
                                    std::int64_t point_budget) {
  const auto& g = sequence.group();
  if (!g.is_free() || g.rank() != x.rank()) throw RankMismatch("x must lie in the Z^N of the cocycle sequence");
  const std::size_t available_sides = sides.known_terms();
  Theorem33Report report;

  if (x.is_zero()) {
    Comparison zero{{PowerGeometricSeries{0.0, 0.0, 1.0}}, {}, false, "x = e: every term vanishes"};
    report.sigma_part = certify_series([](std::size_t) { return 0.0; }, n_max, zero, available_sides);
    report.cocycle_part = report.sigma_part;
    return report;
  }

  const double x1 = static_cast<double>(x.l1_norm());

  // sigma-F part: 1 - overlap/#F <= |x|_1/(m+1), and >= 1/(m+1) for x != e
  Comparison sigma;
  sigma.derivation = "Folner defect <= |x|_1/(m_i+1), >= 1/(m_i+1)";
  if (const auto* p = std::get_if<PowerLaw>(&sides.law())) {
    if (p->coefficient > 0.0) sigma.majorant.push_back({x1 / p->coefficient, -p->exponent, 1.0});
    sigma.minorant.push_back({1.0 / (p->coefficient + 2.0), -std::max(p->exponent, 0.0), 1.0});
  } else if (const auto* gl = std::get_if<GeometricLaw>(&sides.law())) {
    if (gl->coefficient > 0.0 && gl->ratio > 0.0) sigma.majorant.push_back({x1 / gl->coefficient, 0.0, 1.0 / gl->ratio});
    if (gl->ratio <= 1.0) sigma.minorant.push_back({1.0 / (gl->coefficient + 2.0), 0.0, 1.0});
  }
  report.sigma_part = certify_series(
      [&](std::size_t i) { return FolnerBox::standard(g.rank(), sides.box_side(i)).defect(x).to_double(); }, n_max, sigma,
      available_sides);

  // cocycle part: exact terms within the point budget
  std::size_t exact = 0;
  std::int64_t used = 0;
  const std::size_t limit = std::min(n_max, available_sides);
  for (std::size_t i = 1; i <= limit; ++i) {
    std::int64_t card = 0;
    try {
      card = FolnerBox::standard(g.rank(), sides.box_side(i)).cardinality();
    } catch (const OverflowError&) {
      break;
    }
    if (used > point_budget - card) break;
    used += card;
    exact = i;
  }

  Comparison cocycle;
  cocycle.derivation = "|1 - u_A(-y,x)| <= |A|_inf |x|_1 |y|_1, mean |y|_1 over K_m = N m/2";
  std::string norm_note;
  if (const auto& norms = sequence.norm_model()) {
    bool matrices_ok = true;
    for (std::size_t i = 1; i <= exact && matrices_ok; ++i) {
      const Cocycle ui = sequence.at(i);
      const RealMatrix* a = ui.matrix_data();
      if (!a) {
        matrices_ok = false;
        norm_note = "member " + std::to_string(i) + " is not matrix-backed";
      } else if (max_entry_norm(*a) > norms->value(i) * (1.0 + 1e-12) + 1e-300) {
        matrices_ok = false;
        norm_note = "|A_" + std::to_string(i) + "|_inf exceeds the declared norm model";
      }
    }
    if (matrices_ok) {
      if (auto maj = side_times_norm_majorant(sides, *norms, static_cast<double>(g.rank()) * x1 / 2.0)) cocycle.majorant.push_back(*maj);
    }
  } else {
    norm_note = "no norm model declared for the cocycle sequence";
  }
  report.cocycle_part = certify_series(
      [&](std::size_t i) { return theorem33_cocycle_term(sequence.at(i), sides.box_side(i), x); }, n_max, cocycle, exact);
  if (!norm_note.empty()) report.cocycle_part.note = norm_note + (report.cocycle_part.note.empty() ? "" : "; " + report.cocycle_part.note);
  if (exact < limit) {
    report.cocycle_part.note += std::string(report.cocycle_part.note.empty() ? "" : "; ") + "exact terms stop at i = " +
                                std::to_string(exact) + " (point budget " + std::to_string(point_budget) + ")";
  }
  return report;
}

// ---------------------------------------------------------------------------
// Four-clause decision for box sides and matrix norms

Prop42Report prop42_decide(const TailModel& sides, const TailModel& norms, const std::optional<LatticeElement>& x, std::size_t n_max) {
  Prop42Report r;
  r.f_sequence.statement = "(F_i) is an F-sequence iff m_i -> inf";
  r.sigma_f.statement = "(F_i) is a sigma-F-sequence iff sum 1/m_i < inf";
  r.product_cocycle.statement = "prod u_i exists iff sum |A_i|_inf < inf";
  r.tensor_product.statement = "the tensor product exists when sum 1/m_i < inf and sum m_i |A_i|_inf < inf";

  if (const auto* p = std::get_if<PowerLaw>(&sides.law())) {
    r.f_sequence.status = p->coefficient > 0.0 && p->exponent > 0.0 ? ClauseStatus::Certified : ClauseStatus::Refuted;
  } else if (const auto* g = std::get_if<GeometricLaw>(&sides.law())) {
    r.f_sequence.status = g->coefficient > 0.0 && g->ratio > 1.0 ? ClauseStatus::Certified : ClauseStatus::Refuted;
  } else {
    r.f_sequence.note = "explicit prefix makes no claim about m_i -> inf";
  }

  const std::size_t side_terms = sides.known_terms();
  std::optional<SeriesVerdict> reciprocal;
  if (model_has_zero_sides(sides)) {
    r.sigma_f.status = ClauseStatus::Refuted;
    r.sigma_f.note = "m_i = 0 for every i; boxes are single points";
  } else {
    reciprocal = certify_series(
        [&](std::size_t i) {
          const auto m = sides.box_side(i);
          if (m == 0) throw ValidationError("box side m_" + std::to_string(i) + " = 0 has no reciprocal");
          return 1.0 / static_cast<double>(m);
        },
        n_max, reciprocal_comparison(sides), side_terms);
    r.sigma_f.series.push_back(*reciprocal);
    r.sigma_f.status = status_of(*reciprocal);
  }

  Comparison norms_cmp = declared_comparison(norms);
  norms_cmp.verify_prefix = false;
  const auto norm_series = certify_series([&](std::size_t i) { return norms.value(i); }, n_max, norms_cmp, norms.known_terms());
  r.product_cocycle.series.push_back(norm_series);
  r.product_cocycle.status = status_of(norm_series);

  Comparison weighted;
  weighted.derivation = "m_i <= (c+1) i^max(p,0) against the norm model";
  weighted.verify_prefix = true;
  if (auto maj = side_times_norm_majorant(sides, norms, 1.0)) weighted.majorant.push_back(*maj);
  const auto weighted_series = certify_series([&](std::size_t i) { return static_cast<double>(sides.box_side(i)) * norms.value(i); }, n_max,
                                              weighted, std::min(side_terms, norms.known_terms()));
  if (reciprocal) r.tensor_product.series.push_back(*reciprocal);
  r.tensor_product.series.push_back(weighted_series);
  if (reciprocal && reciprocal->verdict == Verdict::ProvedConvergent && weighted_series.verdict == Verdict::ProvedConvergent) {
    r.tensor_product.status = ClauseStatus::Certified;
    if (x) {
      const double bound = weighted_series.partial_sum + *weighted_series.tail_bound;
      r.cocycle_part_bound = static_cast<double>(x->rank()) * static_cast<double>(x->l1_norm()) / 2.0 * bound;
    }
  } else {
    r.tensor_product.status = ClauseStatus::Inconclusive;
    r.tensor_product.note = "sufficient condition only; not both series certified";
  }
  return r;
}

// ---------------------------------------------------------------------------
// Selection

SelectionFailure::SelectionFailure(std::size_t step_, std::size_t best_index_, double best_sup_, double target_)
    : Error("no admissible index for step " + std::to_string(step_) + " within the scan horizon; best candidate " +
            std::to_string(best_index_) + " with sup " + fmt(best_sup_) + " > " + fmt(target_)),
      step(step_),
      best_index(best_index_),
      best_sup(best_sup_),
      target(target_) {}

double selection_sup(const Cocycle& u, std::int64_t side, std::int64_t radius) {
  const auto& g = u.group();
  if (!g.is_free()) throw ValidationError("selection works on Z^N");
  const std::size_t n = g.rank();
  const LatticeElement x_lo(std::vector<std::int64_t>(n, -radius)), x_hi(std::vector<std::int64_t>(n, radius));
  const LatticeElement y_lo = LatticeElement::zero(n), y_hi(std::vector<std::int64_t>(n, side));

  if (const RealMatrix* a = u.matrix_data()) {
    // the phase -y.(Ax) is bilinear, so |phase| peaks at a pair of corners
    double peak = 0.0;
    const std::size_t corners = std::size_t{1} << n;
    for (std::size_t cx = 0; cx < corners; ++cx) {
      Eigen::VectorXd xv(static_cast<Eigen::Index>(n));
      for (std::size_t j = 0; j < n; ++j) xv[static_cast<Eigen::Index>(j)] = static_cast<double>((cx >> j) & 1U ? radius : -radius);
      const Eigen::VectorXd ax = *a * xv;
      for (std::size_t cy = 0; cy < corners; ++cy) {
        double phase = 0.0;
        for (std::size_t j = 0; j < n; ++j) phase += static_cast<double>((cy >> j) & 1U ? side : 0) * ax[static_cast<Eigen::Index>(j)];
        peak = std::max(peak, std::abs(phase));
      }
    }
    if (peak <= kPi) return 2.0 * std::sin(peak / 2.0);
  }
  double sup = 0.0;
  for_each_in_box(x_lo, x_hi, [&](const LatticeElement& x) {
    for_each_in_box(y_lo, y_hi, [&](const LatticeElement& y) { sup = std::max(sup, std::abs(1.0 - u(-y, x))); });
  });
  return sup;
}

Selection corollary34_select(const CocycleSequence& sequence, const TailModel& sides, std::size_t count, std::size_t scan_horizon) {
  if (!sequence.group().is_free()) throw ValidationError("selection works on Z^N");
  Selection out;
  std::size_t previous = 0;
  for (std::size_t step = 1; step <= count; ++step) {
    const std::int64_t side = sides.box_side(step);
    const double target = 1.0 / (static_cast<double>(step) * static_cast<double>(step));
    std::size_t best_index = 0;
    double best_sup = kInf;
    bool found = false;
    for (std::size_t j = previous + 1; j <= scan_horizon; ++j) {
      const double sup = selection_sup(sequence.at(j), side, static_cast<std::int64_t>(step));
      if (sup < best_sup) {
        best_sup = sup;
        best_index = j;
      }
      if (sup <= target) {
        out.indices.push_back(j);
        out.sups.push_back(sup);
        previous = j;
        found = true;
        break;
      }
    }
    if (!found) throw SelectionFailure(step, best_index, best_sup, target);
  }
  return out;
}

PostSelectionCheck corollary34_post_selection(const CocycleSequence& sequence, const TailModel& sides, const Selection& selection,
                                              const LatticeElement& x) {
  PostSelectionCheck out;
  out.n = Exhaustion(sequence.group()).first_index_containing(x);
  CompensatedSum sum, bound;
  const std::size_t count = selection.indices.size();
  for (std::size_t i = 1; i <= count; ++i) {
    sum.add(theorem33_cocycle_term(sequence.at(selection.indices[i - 1]), sides.box_side(i), x));
    if (i < out.n) {
      bound.add(2.0);
    } else {
      bound.add(1.0 / (static_cast<double>(i) * static_cast<double>(i)));
    }
  }
  out.sum = sum.value();
  out.bound = bound.value();
  return out;
}

// ---------------------------------------------------------------------------
// Dirichlet example

double dirichlet_value(std::int64_t n, double theta) {
  if (n < 0) throw ValidationError("dirichlet_value needs n >= 0");
  const double t = canonical_angle(theta);
  if (t == 0.0) return 1.0;
  const double k = 2.0 * static_cast<double>(n) + 1.0;
  return std::sin(k * t / 2.0) / (k * std::sin(t / 2.0));
}

DirichletReport dirichlet_condition(const TailModel& n_model, const TailModel& theta_model, std::size_t n_max) {
  DirichletReport r;
  const std::size_t available = std::min(n_model.known_terms(), theta_model.known_terms());
  auto n_at = [&](std::size_t j) {
    const auto n = n_model.box_side(j);
    if (n < 1) throw ValidationError("n_" + std::to_string(j) + " must be >= 1");
    return n;
  };
  r.reciprocal = certify_series([&](std::size_t j) { return 1.0 / static_cast<double>(n_at(j)); }, n_max, reciprocal_comparison(n_model),
                                n_model.known_terms());

  Comparison defect;
  defect.verify_prefix = false;
  defect.derivation = "|1 - D(n,t)| <= n(n+1) t^2 / 6";
  if (const auto env = side_envelope(n_model)) {
    // n(n+1) <= (c+1)(c+2) i^{2P} R^{2i}
    const double k = env->coefficient * (env->coefficient + 1.0) / 6.0;
    if (const auto* p = std::get_if<PowerLaw>(&theta_model.law())) {
      defect.majorant.push_back(
          {k * p->coefficient * p->coefficient, 2.0 * env->exponent + 2.0 * p->exponent, env->ratio * env->ratio});
    } else if (const auto* g = std::get_if<GeometricLaw>(&theta_model.law())) {
      defect.majorant.push_back(
          {k * g->coefficient * g->coefficient, 2.0 * env->exponent, env->ratio * env->ratio * g->ratio * g->ratio});
    }
  }
  r.defect = certify_series([&](std::size_t j) { return std::abs(1.0 - dirichlet_value(n_at(j), theta_model.value(j))); }, n_max, defect,
                            available);
  return r;
}

std::vector<TruncatedVector> gauge_fix(const std::vector<PhaseMap>& rhos, const std::vector<TruncatedVector>& phis) {
  if (rhos.size() != phis.size()) throw ValidationError("gauge_fix needs one phase map per vector");
  std::vector<TruncatedVector> out;
  out.reserve(phis.size());
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const auto& g = phis[i].group();
    if (!(rhos[i].group() == g)) throw RankMismatch("phase map and vector live on different groups");
    std::map<LatticeElement, Complex> values;
    for (const auto& [x, v] : phis[i].values()) values.emplace(x, std::conj(rhos[i](g.negate(x))) * v);
    out.emplace_back(g, std::move(values));
  }
  return out;
}

}  // namespace twistlab
