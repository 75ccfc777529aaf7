#include <doctest.h>

#include <cmath>
#include <random>

#include "twistlab/action.hpp"
#include "twistlab/errors.hpp"

using namespace twistlab;

namespace {

RealMatrix m2(double a, double b, double c, double d) {
  RealMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const RealMatrix kTorus = m2(0, kPi, 0, 0);

std::vector<InnerOuterQuery> queries_for(const std::vector<LatticeElement>& gs, std::optional<TailModel> model = {}) {
  std::vector<InnerOuterQuery> q;
  for (const auto& g : gs) q.push_back({g, model});
  return q;
}

}  // namespace

TEST_CASE("extension condition examples") {
  const auto z2 = AbelianGroup::lattice(2);
  const auto fixed = ActionScenario::from_unitaries(
      z2, [](std::size_t, const LatticeElement&) { return ComplexMatrix::Identity(3, 3).eval(); },
      [](std::size_t) { return Eigen::VectorXcd::Unit(3, 1).eval(); }, "identity implementers");
  const auto v0 = extension_condition(fixed, LatticeElement{1, 0}, TailModel::power(0, 0), 100);
  CHECK(v0.verdict == Verdict::ProvedConvergent);
  CHECK(v0.partial_sum == 0.0);
  CHECK(v0.note == "extension exists and is unitarily implemented");

  const auto box = regular_box_scenario(CocycleSequence::geometric_matrix(kTorus, 0.5), TailModel::power(1, 2));
  for (const LatticeElement& g : {LatticeElement{1, 0}, LatticeElement{0, 1}, LatticeElement{2, -1}}) {
    const auto v = extension_condition(box, g, std::nullopt, 200);
    CHECK(v.verdict == Verdict::ProvedConvergent);
    REQUIRE(v.tail_bound);
  }

  // delta_e moved by lambda_{u_i}(g): inner product 0 for g != e
  const auto seq = CocycleSequence::geometric_matrix(kTorus, 0.5);
  const auto delta = TruncatedVector::point_mass(z2, LatticeElement{0, 0});
  const auto moved = ActionScenario::from_inner_products(
      z2, [seq, delta](std::size_t i, const LatticeElement& g) { return twisted_inner_product(seq.at(i), g, delta, delta); },
      "point mass");
  CHECK(moved.value(3, LatticeElement{1, 0}) == Complex(0, 0));
  const auto vd = extension_condition(moved, LatticeElement{1, 0}, TailModel::power(1, 0), 100);
  CHECK(vd.verdict == Verdict::ProvedDivergent);
  CHECK(vd.partial_sum == 100.0);

  CHECK_THROWS_AS(extension_condition(pauli_trace_scenario(), LatticeElement{1, 0}, std::nullopt), ValidationError);
}

TEST_CASE("scenario validation") {
  const auto g = AbelianGroup::finite({3});
  const auto bad = ActionScenario::from_traces(g, [](std::size_t, const LatticeElement&) { return Complex(1.0 + 1e-9, 0); }, "too big");
  CHECK_THROWS_AS(bad.value(1, LatticeElement{1}), InvalidInnerProduct);
  const auto ok = ActionScenario::from_traces(g, [](std::size_t, const LatticeElement&) { return Complex(1.0 + 1e-13, 0); }, "edge", 4);
  CHECK_NOTHROW(ok.value(4, LatticeElement{1}));
  CHECK_THROWS_AS(ok.value(5, LatticeElement{1}), ValidationError);
  CHECK_THROWS_AS(ok.value(1, LatticeElement{1, 0}), RankMismatch);
  const auto nonunit = ActionScenario::from_unitaries(
      g, [](std::size_t, const LatticeElement&) { return ComplexMatrix::Identity(2, 2).eval(); },
      [](std::size_t) { return Eigen::VectorXcd::Constant(2, 1.0).eval(); }, "bad vector");
  CHECK_THROWS_AS(nonunit.value(1, LatticeElement{1}), ValidationError);
}

TEST_CASE("trace condition examples") {
  const auto g = AbelianGroup::finite({2, 2});
  const auto ones = ActionScenario::from_traces(g, [](std::size_t, const LatticeElement&) { return Complex(1, 0); }, "ones");
  const auto v1 = trace_condition(ones, LatticeElement{1, 1}, TailModel::power(0, 0), 50);
  CHECK(v1.partial_sum == 0.0);
  CHECK(v1.verdict == Verdict::ProvedConvergent);

  const auto pauli = pauli_trace_scenario();
  for (const auto& x : g.elements()) {
    const auto v = trace_condition(pauli, x, std::nullopt, 100);
    if (x.is_zero()) {
      CHECK(v.partial_sum == 0.0);
      CHECK(v.verdict == Verdict::ProvedConvergent);
    } else {
      CHECK(v.verdict == Verdict::ProvedDivergent);
      CHECK(v.partial_sum == 100.0);
    }
  }

  const auto geo = ActionScenario::from_traces(
      AbelianGroup::lattice(1), [](std::size_t i, const LatticeElement&) { return Complex(1.0 - std::ldexp(1.0, -static_cast<int>(i)), 0); },
      "1 - 2^-i");
  const auto vg = trace_condition(geo, LatticeElement{1}, TailModel::geometric(1, 0.5), 60);
  CHECK(vg.verdict == Verdict::ProvedConvergent);
  CHECK(std::abs(vg.partial_sum - 1.0) < 1e-15);
  const auto vectors = ActionScenario::from_inner_products(g, [](std::size_t, const LatticeElement&) { return Complex(1, 0); }, "v");
  CHECK_THROWS_AS(trace_condition(vectors, LatticeElement{1, 0}, std::nullopt), ValidationError);
}

TEST_CASE("inner/outer verdict examples") {
  const auto g = AbelianGroup::finite({2, 2});
  const auto fixed = ActionScenario::from_unitaries(
      g, [](std::size_t, const LatticeElement&) { return ComplexMatrix::Identity(2, 2).eval(); },
      [](std::size_t) { return Eigen::VectorXcd::Unit(2, 0).eval(); }, "fixing implementers");
  const auto inner = inner_outer_verdict(fixed, queries_for(g.elements(), TailModel::power(0, 0)), 100);
  CHECK(inner.verdict == InnerOuter::InnerCertified);
  CHECK_FALSE(inner.outer_witness);
  CHECK(inner.scope == "evaluated for the supplied implementing unitaries only");

  const auto traces = twisted_trace_scenario(CocycleSequence::constant(Cocycle::pauli()));
  const auto outer = inner_outer_verdict(traces, queries_for(g.elements()), 100);
  CHECK(outer.verdict == InnerOuter::OuterCertified);
  REQUIRE(outer.outer_witness);
  CHECK(*outer.outer_witness == LatticeElement{0, 1});

  const auto prefix = ActionScenario::from_inner_products(
      g, [](std::size_t i, const LatticeElement&) { return Complex(1.0 / static_cast<double>(i + 1), 0); }, "finite prefix", 20);
  const auto inc = inner_outer_verdict(prefix, queries_for({LatticeElement{1, 0}}), 100);
  CHECK(inc.verdict == InnerOuter::Inconclusive);
  CHECK(inc.per_query[0].terms_evaluated == 20);

  CHECK_THROWS_AS(inner_outer_verdict(prefix, {}), ValidationError);
}

TEST_CASE("twisted trace scenario is delta at the identity") {
  const auto lat = twisted_trace_scenario(CocycleSequence::geometric_matrix(kTorus, 0.5));
  const auto ve = trace_condition(lat, LatticeElement{0, 0}, std::nullopt, 500);
  CHECK(ve.partial_sum == 0.0);
  CHECK(ve.verdict == Verdict::ProvedConvergent);
  for (const LatticeElement& x : {LatticeElement{1, 0}, LatticeElement{0, -1}, LatticeElement{3, 7}}) {
    CHECK(lat.value(5, x) == Complex(0, 0));
    CHECK(trace_condition(lat, x, std::nullopt, 500).verdict == Verdict::ProvedDivergent);
  }
  // on a finite group the value comes from the regular matrix trace
  std::mt19937_64 rng(3);
  const auto z3 = AbelianGroup::finite({3, 3});
  IntMatrix e(1, 1);
  e << 1;
  const Cocycle u = BilinearMap::finite(AbelianGroup::finite({3}), AbelianGroup::finite({3}), e, 3).lift();
  const auto fin = twisted_trace_scenario(CocycleSequence::constant(u));
  for (const auto& x : z3.elements()) CHECK(std::abs(fin.value(2, x) - (x.is_zero() ? 1.0 : 0.0)) < 1e-15);
}

TEST_CASE("cohomological obstruction examples") {
  const auto g = AbelianGroup::finite({2, 2});
  const auto none = cohomological_obstruction({Cocycle::trivial(g), Cocycle::trivial(g)}, Cocycle::trivial(g));
  CHECK(none.verdict == Obstruction::NotObstructed);

  const Cocycle p = Cocycle::pauli();
  const auto obs = cohomological_obstruction(std::vector<Cocycle>(10, p), p);
  CHECK(obs.verdict == Obstruction::Obstructed);
  REQUIRE(obs.witness);
  CHECK(obs.witness->x == LatticeElement{1, 0});
  CHECK(obs.witness->y == LatticeElement{0, 1});
  CHECK(obs.witness_value == Complex(-1, 0));

  std::vector<Cocycle> varying;
  for (int i = 1; i <= 5; ++i) varying.push_back(Cocycle::matrix(std::ldexp(1.0, -i) * kTorus));
  const auto inc = cohomological_obstruction(varying, Cocycle::matrix(kTorus));
  CHECK(inc.verdict == Obstruction::Inconclusive);
  CHECK(inc.class_distance > 0.1);

  // a non-bicharacter table
  const Cocycle d = Cocycle::coboundary(PhaseMap::table(g, {0.0, 0.4, 1.0, -2.0}));
  std::vector<Complex> values;
  for (const auto& x : g.elements())
    for (const auto& y : g.elements()) values.push_back(d(x, y) * p(x, y));
  const Cocycle t = Cocycle::table(g, values);
  CHECK_THROWS_AS(cohomological_obstruction({t}, p), UnsupportedVariant);
}

TEST_CASE("property: obstruction is invariant under perturbing each u_i") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const bool lattice = trial % 2 == 1;
    const AbelianGroup g = lattice ? AbelianGroup::lattice(2) : AbelianGroup::finite({2, 2});
    const Cocycle u = lattice ? Cocycle::matrix(m2(0, uniform_real(rng, 0.5, 3.0), 0, 0)) : Cocycle::pauli();
    std::vector<Cocycle> plain(4, u), perturbed;
    for (int i = 0; i < 4; ++i) {
      if (lattice) {
        perturbed.push_back(perturb(u, PhaseMap::quadratic(g, m2(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), 0, uniform_real(rng, -1, 1)),
                                                            Eigen::Vector2d(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1)))));
      } else {
        perturbed.push_back(perturb(u, PhaseMap::table(g, {0.0, uniform_real(rng, -3, 3), uniform_real(rng, -3, 3), uniform_real(rng, -3, 3)})));
      }
    }
    const auto a = cohomological_obstruction(plain, u), b = cohomological_obstruction(perturbed, u);
    REQUIRE(a.verdict == b.verdict);
    CHECK(a.verdict == Obstruction::Obstructed);
    CHECK(b.class_distance <= 1e-12);
  }
}

TEST_CASE("property: character gauges leave the extension summands unchanged") {
  const auto g = AbelianGroup::lattice(2);
  const auto seq = CocycleSequence::geometric_matrix(kTorus, 0.5);
  const auto sides = TailModel::power(1, 2);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Vector2d l(uniform_real(rng, -3, 3), uniform_real(rng, -3, 3));
    const PhaseMap chi = PhaseMap::quadratic(g, RealMatrix::Zero(2, 2), l);
    auto plain = [&](std::size_t i, const LatticeElement& x) {
      const auto phi = TruncatedVector::box(FolnerBox::standard(2, sides.box_side(i)));
      return twisted_inner_product(seq.at(i), x, phi, phi);
    };
    auto gauged = [&](std::size_t i, const LatticeElement& x) {
      const auto phi = TruncatedVector::box(FolnerBox::standard(2, sides.box_side(i)));
      const auto psi = gauge_fix({chi}, {phi})[0];
      return twisted_inner_product(perturb(seq.at(i), chi), x, psi, psi);
    };
    const auto s1 = ActionScenario::from_inner_products(g, plain, "plain", 8);
    const auto s2 = ActionScenario::from_inner_products(g, gauged, "gauged", 8);
    for (const LatticeElement& x : {LatticeElement{1, 0}, LatticeElement{-1, 2}}) {
      const auto a = extension_condition(s1, x, std::nullopt, 8), b = extension_condition(s2, x, std::nullopt, 8);
      CHECK(a.verdict == b.verdict);
      for (std::size_t k = 0; k < a.rows.size(); ++k) REQUIRE(std::abs(a.rows[k].term - b.rows[k].term) <= 1e-12);
    }
  }
}

TEST_CASE("regular box scenario agrees with theorem33 feed-through") {
  const auto seq = CocycleSequence::geometric_matrix(kTorus, 0.5);
  const auto sides = TailModel::power(1, 2);
  const auto s = regular_box_scenario(seq, sides);
  const LatticeElement x{1, 0};
  const auto v = extension_condition(s, x, std::nullopt, 30);
  const auto t = theorem33_condition(seq, sides, x, 30);
  // 1 - |c| <= |1 - c| <= sigma-F term + cocycle-part term
  for (std::size_t k = 0; k < 30; ++k)
    CHECK(v.rows[k].term <= t.sigma_part.rows[k].term + t.cocycle_part.rows[k].term + 1e-12);
}
