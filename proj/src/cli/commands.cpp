#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "twistlab/errors.hpp"

namespace twistlab::cli {

namespace {

struct Context {
  Fields& fields;
  Report& report;
  std::uint64_t seed;
};

using Handler = std::function<Json(Context&)>;

Json default_matrix() { return Json::array({Json::array({0.0, kPi}), Json::array({0.0, 0.0})}); }

Json fraction_json(const Fraction& f) {
  return Json{{"numerator", f.numerator}, {"denominator", f.denominator}, {"value", f.to_double()}};
}

Cocycle take_cocycle(Fields& f, const std::string& key, const Json& fallback) {
  const Json raw = f.has(key) ? f.raw(key) : fallback;
  Json resolved;
  Cocycle u = parse_cocycle(raw, resolved);
  f.put(key, resolved);
  return u;
}

ProjectiveRep take_rep(Fields& f, const std::string& key, const Json& fallback) {
  const Json raw = f.has(key) ? f.raw(key) : fallback;
  Json resolved;
  ProjectiveRep r = parse_rep(raw, resolved);
  f.put(key, resolved);
  return r;
}

TailModel take_model(Fields& f, const std::string& key, const TailModel& fallback) {
  const TailModel m = f.has(key) ? parse_model(f.raw(key)) : fallback;
  f.put(key, model_json(m));
  return m;
}

std::optional<TailModel> take_optional_model(Fields& f, const std::string& key) {
  if (!f.has(key)) {
    f.take(key, Json());
    return std::nullopt;
  }
  const TailModel m = parse_model(f.raw(key));
  f.put(key, model_json(m));
  return m;
}

std::size_t take_horizon(Fields& f, const std::string& key, std::int64_t fallback) {
  const auto n = f.integer(key, fallback);
  if (n < 1) throw ValidationError("'" + key + "' must be >= 1");
  return static_cast<std::size_t>(n);
}

/// Optional "group" field; must agree with the group the inputs define.
void check_group(Fields& f, const AbelianGroup& group) {
  const Json g = f.take("group", Json());
  if (g.is_null()) {
    f.put("group", group.to_string());
    return;
  }
  if (!(parse_group(g) == group)) throw RankMismatch("declared group " + g.get<std::string>() + " differs from " + group.to_string());
  f.put("group", group.to_string());
}

Json series_entry(Context& c, const std::string& name, const SeriesVerdict& v) {
  c.report.tables.emplace_back(name, v);
  return to_json(v);
}

// ---------------------------------------------------------------------------

Json check_cocycle(Context& c) {
  auto& f = c.fields;
  const Cocycle u = take_cocycle(f, "cocycle", Json{{"variant", "pauli"}});
  const auto samples = static_cast<std::size_t>(std::max<std::int64_t>(1, f.integer("samples", 1000)));
  const auto radius = f.integer("radius", 10);
  const Json points = f.take("points", Json::array());
  const auto& g = u.group();
  check_group(f, g);

  const bool exhaustive = g.is_finite() && g.order() <= 16;
  const auto triples = exhaustive ? all_triples(g) : sample_triples(g, samples, radius, c.seed);
  const auto pairs = exhaustive ? all_pairs(g) : sample_pairs(g, samples, radius, c.seed + 1);

  Json result{{"group", g.to_string()},
              {"variant", u.kind_name()},
              {"description", u.describe()},
              {"exhaustive", exhaustive},
              {"checked_triples", triples.size()},
              {"identity_residual", check_cocycle_identity(u, triples)},
              {"modulus_residual", modulus_residual(u, pairs)},
              {"normalization_residual", normalization_residual(u, pairs)},
              {"bicharacter_residual", bicharacter_residual(u, triples)}};
  if (u.is_class_decidable()) {
    result["coboundary"] = to_json(coboundary_test(u, pairs));
  } else {
    result["coboundary"] = Json{{"verdict", "unsupported"}, {"reason", "class is not read off the commutator for this variant"}};
  }
  Json evals = Json::array();
  for (const auto& p : points) {
    if (!p.is_array() || p.size() != 2) throw ValidationError("points are [x, y] pairs");
    const auto x = parse_element(p[0], g), y = parse_element(p[1], g);
    evals.push_back(Json{{"x", to_json(x)}, {"y", to_json(y)}, {"value", to_json(u(x, y))}, {"kappa", to_json(u(x, y) * std::conj(u(y, x)))}});
  }
  result["evaluations"] = evals;
  return result;
}

Json folner(Context& c) {
  auto& f = c.fields;
  const auto rank = f.integer("rank", 1);
  if (rank < 1 || rank > 16) throw ValidationError("rank must be in 1..16");
  const auto side = f.integer("side", 3);
  const auto group = AbelianGroup::lattice(static_cast<std::size_t>(rank));
  const auto offset = parse_element(f.take("offset", Json(std::vector<std::int64_t>(static_cast<std::size_t>(rank), 0))), group);
  const auto x = parse_element(f.take("x", Json(LatticeElement::unit(static_cast<std::size_t>(rank), 0).coords())), group);
  const FolnerBox box(offset, side);
  const Fraction defect = box.defect(x);
  const Fraction bound{x.l1_norm(), checked_add(side, 1)};
  Json result{{"cardinality", box.cardinality()},
              {"overlap", box.overlap(x)},
              {"defect", fraction_json(defect)},
              {"defect_bound", fraction_json(bound)},
              {"bound_holds", fraction_less_equal(defect, bound)},
              {"l1_norm_x", x.l1_norm()}};
  if (offset.is_zero()) {
    result["l1_mass"] = box.l1_mass();
  } else {
    result["l1_mass"] = Json();
  }
  return result;
}

Json converge(Context& c) {
  auto& f = c.fields;
  const std::string mode = f.text("mode", "theorem33");
  if (mode == "theorem33") {
    const RealMatrix a = canonicalize(parse_matrix(f.take("matrix", default_matrix())));
    const TailModel norms = take_model(f, "norms", TailModel::geometric(max_entry_norm(a), 0.5));
    const TailModel sides = take_model(f, "sides", TailModel::power(1.0, 2.0));
    const auto group = AbelianGroup::lattice(static_cast<std::size_t>(a.rows()));
    const auto x = parse_element(f.take("x", Json(LatticeElement::unit(group.rank(), 0).coords())), group);
    const auto n_max = take_horizon(f, "n_max", 10'000);
    const auto budget = f.integer("point_budget", 20'000'000);
    if (max_entry_norm(a) == 0.0) {
      const auto seq = CocycleSequence::geometric_matrix(a, 0.5);
      const auto r = theorem33_condition(seq, sides, x, n_max, budget);
      return Json{{"mode", mode}, {"sigma_part", series_entry(c, "sigma_part", r.sigma_part)},
                  {"cocycle_part", series_entry(c, "cocycle_part", r.cocycle_part)}};
    }
    const auto seq = CocycleSequence::scaled_matrix(a, norms);
    const auto r = theorem33_condition(seq, sides, x, n_max, budget);
    return Json{{"mode", mode}, {"sigma_part", series_entry(c, "sigma_part", r.sigma_part)},
                {"cocycle_part", series_entry(c, "cocycle_part", r.cocycle_part)}};
  }

  const auto tail = take_optional_model(f, "tail");
  std::vector<Complex> values;
  std::optional<TailModel> generator;
  if (f.has("values")) {
    for (const auto& e : f.take("values", Json::array())) values.push_back(parse_complex(e));
    if (values.empty()) throw ValidationError("values must be nonempty");
    f.take(mode == "product" ? "phases" : "defects", Json());
  } else {
    f.take("values", Json());
    generator = take_model(f, mode == "product" ? "phases" : "defects", TailModel::geometric(kPi, 0.5));
  }
  const auto n_max = std::min<std::size_t>(take_horizon(f, "n_max", 10'000), values.empty() ? static_cast<std::size_t>(-1) : values.size());
  if (mode == "product") {
    auto z = [&](std::size_t i) { return values.empty() ? unit_phase(generator->value(i)) : values.at(i - 1); };
    const auto r = product_diagnose(z, tail, n_max);
    return Json{{"mode", mode},
                {"partial_product", to_json(r.partial_product)},
                {"product", to_string(r.product)},
                {"product_error_bound", r.product_error_bound ? Json(*r.product_error_bound) : Json()},
                {"series", series_entry(c, "series", r.series)}};
  }
  if (mode == "star") {
    auto ip = [&](std::size_t i) { return values.empty() ? Complex{1.0 - generator->value(i), 0.0} : values.at(i - 1); };
    return Json{{"mode", mode}, {"series", series_entry(c, "series", star_condition(ip, tail, n_max))}};
  }
  throw ValidationError("unknown converge mode '" + mode + "' (theorem33, product, star)");
}

Json select(Context& c) {
  auto& f = c.fields;
  const RealMatrix a = parse_matrix(f.take("matrix", default_matrix()));
  const double ratio = f.number("ratio", 0.5);
  const TailModel sides = take_model(f, "sides", TailModel::power(1.0, 2.0));
  const auto count = take_horizon(f, "count", 6);
  const auto horizon = take_horizon(f, "scan_horizon", 100'000);
  const auto seq = CocycleSequence::geometric_matrix(a, ratio);
  const Json xj = f.take("x", Json());
  Json result;
  try {
    const Selection s = corollary34_select(seq, sides, count, horizon);
    result["status"] = "selected";
    result["indices"] = s.indices;
    result["sups"] = s.sups;
    if (!xj.is_null()) {
      const auto x = parse_element(xj, seq.group());
      const auto post = corollary34_post_selection(seq, sides, s, x);
      result["post_selection"] = Json{{"x", to_json(x)}, {"n", post.n}, {"sum", post.sum}, {"bound", post.bound}, {"holds", post.sum <= post.bound}};
    }
  } catch (const SelectionFailure& e) {
    result["status"] = "failed";
    result["failure"] = Json{{"step", e.step}, {"best_index", e.best_index}, {"best_sup", e.best_sup}, {"target", e.target}, {"message", e.what()}};
    c.report.failed = true;
  }
  return result;
}

Json clause_json(Context& c, const std::string& name, const Clause& cl) {
  Json series = Json::array();
  for (std::size_t k = 0; k < cl.series.size(); ++k) series.push_back(series_entry(c, name + "." + std::to_string(k), cl.series[k]));
  Json j{{"status", to_string(cl.status)}, {"statement", cl.statement}, {"series", series}};
  if (!cl.note.empty()) j["note"] = cl.note;
  return j;
}

Json prop42(Context& c) {
  auto& f = c.fields;
  const TailModel m = take_model(f, "m", TailModel::power(1.0, 2.0));
  const TailModel a = take_model(f, "a", TailModel::geometric(kPi, 0.5));
  const Json xj = f.take("x", Json());
  const auto n_max = take_horizon(f, "n_max", 10'000);
  std::optional<LatticeElement> x;
  if (!xj.is_null()) x = parse_element(xj, AbelianGroup::lattice(xj.size()));
  const auto r = prop42_decide(m, a, x, n_max);
  const bool all = r.f_sequence.status == ClauseStatus::Certified && r.sigma_f.status == ClauseStatus::Certified &&
                   r.product_cocycle.status == ClauseStatus::Certified && r.tensor_product.status == ClauseStatus::Certified;
  return Json{{"f_sequence", clause_json(c, "f_sequence", r.f_sequence)},
              {"sigma_f", clause_json(c, "sigma_f", r.sigma_f)},
              {"product_cocycle", clause_json(c, "product_cocycle", r.product_cocycle)},
              {"tensor_product", clause_json(c, "tensor_product", r.tensor_product)},
              {"all_certified", all},
              {"cocycle_part_bound", r.cocycle_part_bound ? Json(*r.cocycle_part_bound) : Json()}};
}

Json dirichlet(Context& c) {
  auto& f = c.fields;
  if (f.has("n") || f.has("theta")) {
    const auto n = f.integer("n", 1);
    const double theta = f.number("theta", 0.0);
    const double v = dirichlet_value(n, theta);
    c.report.value = v;
    return Json{{"n", n}, {"theta", theta}, {"value", v}};
  }
  const TailModel nm = take_model(f, "n_model", TailModel::power(1.0, 2.0));
  const TailModel tm = take_model(f, "theta_model", TailModel::power(1.0, -4.0));
  const auto n_max = take_horizon(f, "n_max", 10'000);
  const auto r = dirichlet_condition(nm, tm, n_max);
  return Json{{"window", r.window},
              {"reciprocal", series_entry(c, "reciprocal", r.reciprocal)},
              {"defect", series_entry(c, "defect", r.defect)}};
}

Json ccr(Context& c) {
  auto& f = c.fields;
  std::optional<BilinearMap> sigma;
  std::optional<FolnerBox> window;
  if (f.has("matrix")) {
    const RealMatrix d = parse_matrix(f.take("matrix", Json()));
    sigma = BilinearMap::lattice(d);
    const auto side = f.integer("window", 3);
    window = FolnerBox::standard(static_cast<std::size_t>(d.cols()), side);
    f.take("left", Json());
    f.take("right", Json());
    f.take("exponents", Json());
    f.take("denominator", Json());
  } else {
    f.take("matrix", Json());
    f.take("window", Json());
    const auto left = parse_group(f.take("left", "Z2"));
    const auto right = parse_group(f.take("right", "Z2"));
    const IntMatrix e = parse_int_matrix(f.take("exponents", Json::array({Json::array({1})})));
    const auto den = f.integer("denominator", 2);
    sigma = BilinearMap::finite(left, right, e, den);
  }
  const auto samples = static_cast<std::size_t>(std::max<std::int64_t>(1, f.integer("samples", 200)));
  const auto radius = f.integer("radius", 5);

  const CcrPair pair(*sigma, window);
  const auto& A = sigma->left();
  const auto& B = sigma->right();
  std::vector<std::pair<LatticeElement, LatticeElement>> ab;
  std::mt19937_64 rng(c.seed);
  const bool exhaustive = A.is_finite() && B.is_finite() && A.order() * B.order() <= 4096;
  if (exhaustive) {
    for (const auto& a : A.elements())
      for (const auto& b : B.elements()) ab.emplace_back(a, b);
  } else {
    for (std::size_t k = 0; k < samples; ++k) ab.emplace_back(random_element(A, radius, rng), random_element(B, radius, rng));
  }
  const CcrCheck check = pair.check(ab);
  Json result{{"sigma", sigma->describe()},
              {"dimension", pair.dimension()},
              {"windowed", check.windowed},
              {"exhaustive", exhaustive},
              {"relation_residual", check.relation_residual},
              {"boundary_defect", check.boundary_defect}};
  if (!pair.windowed()) {
    const ProjectiveRep joint = pair.joint();
    result["joint_relation_residual"] = projective_relation_check(joint, relation_samples(joint.group(), samples, radius, c.seed));
  } else {
    result["joint_relation_residual"] = Json();
    result["note"] = "B = Z^Q is truncated to a window; W(b) is a partial translation and boundary_defect measures its failure to be unitary";
  }
  return result;
}

Json fell(Context& c) {
  auto& f = c.fields;
  const Cocycle u = take_cocycle(f, "cocycle", Json{{"variant", "pauli"}});
  const ProjectiveRep v = take_rep(f, "rep", Json{{"kind", "pauli"}});
  check_group(f, u.group());
  const auto cap = f.integer("cap", kDefaultDimensionCap);
  const FellReport r = fell_check(u, v, cap);
  return Json{{"group", u.group().to_string()},
              {"dimension", r.dimension},
              {"conjugation_residual", r.conjugation_residual},
              {"unitarity_residual", r.unitarity_residual},
              {"spectral_distance", r.spectral_distance}};
}

Json tensor(Context& c) {
  auto& f = c.fields;
  const Json raw = f.has("factors") ? f.raw("factors") : Json::array({Json{{"kind", "pauli"}}, Json{{"kind", "pauli"}}, Json{{"kind", "pauli"}}});
  if (!raw.is_array() || raw.empty()) throw ValidationError("factors must be a nonempty list of representations");
  std::vector<ProjectiveRep> reps;
  Json resolved = Json::array();
  for (const auto& e : raw) {
    Json r;
    reps.push_back(parse_rep(e, r));
    resolved.push_back(r);
  }
  f.put("factors", resolved);
  const auto cap = f.integer("cap", kDefaultDimensionCap);
  const auto samples = static_cast<std::size_t>(std::max<std::int64_t>(1, f.integer("samples", 200)));
  const auto radius = f.integer("radius", 5);
  const ProjectiveRep t = tensor_rep(reps, cap);
  check_group(f, t.group());
  const auto pairs = relation_samples(t.group(), samples, radius, c.seed);
  double unitarity = 0.0;
  for (const auto& p : pairs) unitarity = std::max(unitarity, unitarity_residual(t(p.x)));
  return Json{{"group", t.group().to_string()},
              {"dimension", t.dimension()},
              {"cocycle", t.cocycle().describe()},
              {"checked_pairs", pairs.size()},
              {"relation_residual", projective_relation_check(t, pairs)},
              {"unitarity_residual", unitarity}};
}

Json action(Context& c) {
  auto& f = c.fields;
  const std::string source = f.text("source", "twisted-trace");
  std::optional<ActionScenario> scenario;
  if (source == "twisted-trace") {
    const Cocycle u = take_cocycle(f, "cocycle", Json{{"variant", "pauli"}});
    scenario = twisted_trace_scenario(CocycleSequence::constant(u));
  } else if (source == "pauli-trace") {
    scenario = pauli_trace_scenario();
  } else if (source == "regular-box") {
    const RealMatrix a = parse_matrix(f.take("matrix", default_matrix()));
    const double ratio = f.number("ratio", 0.5);
    const TailModel sides = take_model(f, "sides", TailModel::power(1.0, 2.0));
    scenario = regular_box_scenario(CocycleSequence::geometric_matrix(a, ratio), sides);
  } else if (source == "raw") {
    const auto group = parse_group(f.take("group", Json()));
    const std::string kind = f.text("kind", "trace");
    const Json entries = f.take("values", Json::array());
    auto table = std::make_shared<std::map<LatticeElement, std::vector<Complex>>>();
    std::size_t length = static_cast<std::size_t>(-1);
    for (const auto& e : entries) {
      Fields ef(e, "raw value entry");
      const auto g = group.reduce(parse_element(ef.take("g", Json()), group));
      std::vector<Complex> vs;
      for (const auto& v : ef.take("values", Json::array())) vs.push_back(parse_complex(v));
      ef.finish();
      length = std::min(length, vs.size());
      (*table)[g] = std::move(vs);
    }
    if (table->empty()) throw ValidationError("raw scenarios need at least one {g, values} entry");
    ActionScenario::Values values = [table](std::size_t i, const LatticeElement& g) {
      if (g.is_zero()) return Complex{1.0, 0.0};
      const auto it = table->find(g);
      if (it == table->end()) throw ValidationError("no values supplied for g = " + g.to_string());
      return it->second.at(i - 1);
    };
    if (kind == "trace") {
      scenario = ActionScenario::from_traces(group, values, "raw traces", length);
    } else if (kind == "vector") {
      scenario = ActionScenario::from_inner_products(group, values, "raw inner products", length);
    } else {
      throw ValidationError("raw kind must be 'trace' or 'vector'");
    }
  } else {
    throw ValidationError("unknown action source '" + source + "'");
  }
  const auto& g = scenario->group();
  if (source != "raw") check_group(f, g);

  Json default_queries = Json::array();
  default_queries.push_back(to_json(g.identity()));
  for (const auto& e : g.generators()) default_queries.push_back(to_json(e));
  const Json qs = f.take("queries", default_queries);
  const auto tail = take_optional_model(f, "tail");
  const auto n_max = take_horizon(f, "n_max", 10'000);

  std::vector<InnerOuterQuery> queries;
  for (const auto& q : qs) queries.push_back({parse_element(q, g), tail});
  const auto r = inner_outer_verdict(*scenario, queries, n_max);
  Json per = Json::array();
  for (std::size_t k = 0; k < queries.size(); ++k) {
    per.push_back(Json{{"g", to_json(queries[k].g)}, {"series", series_entry(c, "g=" + queries[k].g.to_string(), r.per_query[k])}});
  }
  return Json{{"scenario", scenario->description()},
              {"kind", scenario->kind() == ActionScenario::Kind::Trace ? "trace" : "vector"},
              {"verdict", to_string(r.verdict)},
              {"outer_witness", r.outer_witness ? to_json(*r.outer_witness) : Json()},
              {"queries", per},
              {"scope", r.scope}};
}

Json obstruction(Context& c) {
  auto& f = c.fields;
  Json base_resolved;
  const Json base_raw = f.has("cocycle") ? f.raw("cocycle") : Json{{"variant", "pauli"}};
  const Cocycle u = parse_cocycle(base_raw, base_resolved);
  f.put("cocycle", base_resolved);
  // count is read before classes so a re-run keeps the key order
  const bool explicit_classes = f.has("classes");
  std::int64_t count = 0;
  if (explicit_classes) {
    f.take("count", Json());
  } else {
    count = f.integer("count", 3);
  }
  std::vector<Cocycle> classes;
  Json resolved = Json::array();
  if (explicit_classes) {
    for (const auto& e : f.raw("classes")) {
      Json r;
      classes.push_back(parse_cocycle(e, r));
      resolved.push_back(r);
    }
  } else {
    if (count < 1) throw ValidationError("count must be >= 1");
    for (std::int64_t k = 0; k < count; ++k) {
      classes.push_back(u);
      resolved.push_back(base_resolved);
    }
  }
  f.put("classes", resolved);
  check_group(f, u.group());
  const auto r = cohomological_obstruction(classes, u);
  Json result{{"verdict", to_string(r.verdict)}, {"class_distance", r.class_distance}, {"note", r.note}};
  if (r.witness) {
    result["witness"] = Json::array({to_json(r.witness->x), to_json(r.witness->y)});
    result["kappa"] = to_json(r.witness_value);
  } else {
    result["witness"] = Json();
  }
  return result;
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"check-cocycle", check_cocycle}, {"folner", folner}, {"converge", converge}, {"select", select},
      {"prop42", prop42},               {"dirichlet", dirichlet}, {"ccr", ccr},     {"fell", fell},
      {"tensor", tensor},               {"action", action},  {"obstruction", obstruction}};
  return h;
}

}  // namespace

std::vector<std::string> command_names() {
  return {"check-cocycle", "folner", "converge", "select", "prop42", "dirichlet", "ccr", "fell", "tensor", "action", "obstruction"};
}

Report execute(const Json& scenario) {
  Fields f(scenario, "scenario");
  const auto schema = f.integer("schema", 1);
  if (schema != 1) throw ValidationError("unsupported schema version " + std::to_string(schema));
  const std::string command = f.text("command", "");
  const auto it = handlers().find(command);
  if (it == handlers().end()) throw ValidationError("unknown command '" + command + "'");
  const auto seed = f.integer("seed", 1);
  Report report;
  report.format = f.text("format", "json");
  if (report.format != "json" && report.format != "csv" && report.format != "value") {
    throw ValidationError("format must be json, csv or value");
  }
  Context ctx{f, report, static_cast<std::uint64_t>(seed)};
  Json result = it->second(ctx);
  Json resolved = f.finish();
  if (report.format == "csv" && report.tables.empty()) throw ValidationError("csv output is only available for series commands");
  if (report.format == "value" && !report.value) throw ValidationError("value output is only available for dirichlet with n and theta");
  report.document = Json{{"schema", 1}, {"command", command}, {"scenario", resolved}, {"result", result}};
  return report;
}

}  // namespace twistlab::cli
