#include <doctest.h>

#include <algorithm>
#include <set>

#include "twistlab/errors.hpp"
#include "twistlab/group.hpp"

using namespace twistlab;

namespace {

// Independent enumeration of {0..m}^N without the library's box iterator.
std::vector<std::vector<std::int64_t>> naive_box(std::size_t n, std::int64_t m, std::int64_t shift = 0) {
  std::vector<std::vector<std::int64_t>> out{{}};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<std::int64_t>> next;
    for (const auto& p : out)
      for (std::int64_t v = 0; v <= m; ++v) {
        auto q = p;
        q.push_back(v + shift);
        next.push_back(q);
      }
    out = next;
  }
  return out;
}

}  // namespace

TEST_CASE("l1 norm") {
  CHECK(l1_norm(LatticeElement{0, 0}) == 0);
  CHECK(l1_norm(LatticeElement{3, -2}) == 5);
  CHECK(l1_norm(LatticeElement{1, 1, 1}) == 3);
}

TEST_CASE("box cardinality") {
  CHECK(FolnerBox::standard(1, 0).cardinality() == 1);
  CHECK(FolnerBox::standard(2, 3).cardinality() == 16);
  CHECK(FolnerBox::standard(3, 2).cardinality() == 27);
  CHECK_THROWS_AS(FolnerBox::standard(3, 3'000'000).cardinality(), OverflowError);
}

TEST_CASE("box overlap examples") {
  CHECK(FolnerBox::standard(1, 3).overlap(LatticeElement{1}) == 3);
  CHECK(FolnerBox::standard(2, 2).overlap(LatticeElement{0, 0}) == 9);
  CHECK(FolnerBox::standard(1, 3).overlap(LatticeElement{5}) == 0);
  // the offset cancels
  CHECK(FolnerBox(LatticeElement{-7, 4}, 2).overlap(LatticeElement{1, -1}) == 4);
}

TEST_CASE("box l1 mass examples") {
  CHECK(FolnerBox::standard(1, 2).l1_mass() == 3);
  CHECK(FolnerBox::standard(2, 3).l1_mass() == 48);
  for (std::size_t n = 1; n <= 4; ++n) CHECK(FolnerBox::standard(n, 0).l1_mass() == 0);
  CHECK_THROWS_AS(FolnerBox(LatticeElement{1}, 2).l1_mass(), ValidationError);
}

TEST_CASE("overlap equals brute-force intersection for N <= 3, m <= 6, |x| <= 8") {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::int64_t m = 0; m <= 6; ++m) {
      const auto pts = naive_box(n, m);
      const std::set<std::vector<std::int64_t>> f(pts.begin(), pts.end());
      const FolnerBox box = FolnerBox::standard(n, m);
      for (const auto& xv : naive_box(n, 16, -8)) {
        std::int64_t count = 0;
        for (const auto& y : pts) {
          std::vector<std::int64_t> shifted(n);
          for (std::size_t j = 0; j < n; ++j) shifted[j] = y[j] + xv[j];
          count += static_cast<std::int64_t>(f.count(shifted));
        }
        REQUIRE(box.overlap(LatticeElement(xv)) == count);
      }
    }
  }
}

TEST_CASE("Folner defect never exceeds |x|_1/(m+1)") {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::int64_t m = 0; m <= 6; ++m) {
      const FolnerBox box = FolnerBox::standard(n, m);
      for (const auto& xv : naive_box(n, 16, -8)) {
        const LatticeElement x(xv);
        const Fraction d = box.defect(x);
        // cross-multiplied by hand: d.num/d.den <= |x|_1/(m+1)
        const __int128 lhs = static_cast<__int128>(d.numerator) * (m + 1);
        const __int128 rhs = static_cast<__int128>(x.l1_norm()) * d.denominator;
        REQUIRE(lhs <= rhs);
        REQUIRE(fraction_less_equal(d, Fraction{x.l1_norm(), m + 1}));
      }
    }
  }
}

TEST_CASE("l1 mass equals enumeration for N <= 3, m <= 6") {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::int64_t m = 0; m <= 6; ++m) {
      std::int64_t total = 0;
      for (const auto& y : naive_box(n, m))
        for (auto c : y) total += c;
      CHECK(FolnerBox::standard(n, m).l1_mass() == total);
    }
  }
}

TEST_CASE("centered boxes and intersections") {
  const FolnerBox c = FolnerBox::centered(2, 1);
  CHECK(c.cardinality() == 9);
  CHECK(c.contains(LatticeElement{-1, 1}));
  CHECK_FALSE(c.contains(LatticeElement{2, 0}));
  const auto b = c.intersection_with_translate(LatticeElement{1, 0});
  REQUIRE(b);
  CHECK(b->lower == LatticeElement{0, -1});
  CHECK(b->upper == LatticeElement{1, 1});
  CHECK_FALSE(c.intersection_with_translate(LatticeElement{3, 0}));
}

TEST_CASE("finite groups") {
  const auto g = AbelianGroup::parse("Z2xZ3");
  CHECK(g.order() == 6);
  CHECK(g.to_string() == "Z2xZ3");
  const auto elems = g.elements();
  REQUIRE(elems.size() == 6);
  CHECK(elems[1] == LatticeElement{0, 1});
  CHECK(elems[3] == LatticeElement{1, 0});
  for (std::size_t k = 0; k < elems.size(); ++k) {
    CHECK(g.index_of(elems[k]) == k);
    CHECK(g.element_at(k) == elems[k]);
  }
  CHECK(g.add(LatticeElement{1, 2}, LatticeElement{1, 2}) == LatticeElement{0, 1});
  CHECK(g.negate(LatticeElement{1, 1}) == LatticeElement{1, 2});
  CHECK(g.reduce(LatticeElement{-1, 7}) == LatticeElement{1, 1});
  CHECK(g.sup_norm(LatticeElement{0, 2}) == 1);
  CHECK_THROWS_AS(g.require_member(LatticeElement{1}), RankMismatch);
  CHECK(AbelianGroup::parse("Z^2") == AbelianGroup::lattice(2));
  CHECK(AbelianGroup::parse("ZxZ3").to_string() == "ZxZ3");
  CHECK_THROWS_AS(AbelianGroup::parse("Q^2"), ValidationError);
  CHECK_THROWS_AS(AbelianGroup::lattice(2).order(), ValidationError);
}

TEST_CASE("checked arithmetic on elements") {
  const LatticeElement big{INT64_MAX}, one{1}, pair{1, 2};
  CHECK_THROWS_AS(big + one, OverflowError);
  CHECK_THROWS_AS(pair + one, RankMismatch);
  CHECK((LatticeElement{1, 2} - LatticeElement{3, -1}) == LatticeElement{-2, 3});
}

TEST_CASE("exhaustion by sup-norm balls") {
  const Exhaustion h(AbelianGroup::lattice(2));
  CHECK(h.members(1).size() == 9);
  CHECK(h.members(2).size() == 25);
  for (std::size_t i = 1; i <= 3; ++i) {
    const auto a = h.members(i), b = h.members(i + 1);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
  CHECK(h.first_index_containing(LatticeElement{0, 0}) == 1);
  CHECK(h.first_index_containing(LatticeElement{3, -5}) == 5);
  CHECK(h.contains(5, LatticeElement{3, -5}));
  CHECK_FALSE(h.contains(4, LatticeElement{3, -5}));
  const Exhaustion f(AbelianGroup::finite({4}));
  CHECK(f.members(1).size() == 3);
  CHECK(f.members(2).size() == 4);
}
