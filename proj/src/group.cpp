#include "twistlab/group.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "twistlab/errors.hpp"
#include "twistlab/numeric.hpp"

namespace twistlab {

namespace {

std::int64_t abs_checked(std::int64_t v) {
  if (v == INT64_MIN) throw OverflowError("absolute value of INT64_MIN");
  return v < 0 ? -v : v;
}

std::int64_t floor_mod(std::int64_t v, std::int64_t k) {
  const std::int64_t r = v % k;
  return r < 0 ? r + k : r;
}

}  // namespace

// ---------------------------------------------------------------------------
// LatticeElement

LatticeElement LatticeElement::unit(std::size_t rank, std::size_t axis) {
  LatticeElement e = zero(rank);
  e.coords_.at(axis) = 1;
  return e;
}

bool LatticeElement::is_zero() const noexcept {
  return std::all_of(coords_.begin(), coords_.end(), [](std::int64_t c) { return c == 0; });
}

std::int64_t LatticeElement::l1_norm() const {
  std::int64_t s = 0;
  for (auto c : coords_) s = checked_add(s, abs_checked(c));
  return s;
}

std::int64_t LatticeElement::sup_norm() const {
  std::int64_t s = 0;
  for (auto c : coords_) s = std::max(s, abs_checked(c));
  return s;
}

LatticeElement LatticeElement::operator+(const LatticeElement& other) const {
  if (rank() != other.rank()) throw RankMismatch("adding elements of rank " + std::to_string(rank()) + " and " + std::to_string(other.rank()));
  std::vector<std::int64_t> out(rank());
  for (std::size_t j = 0; j < rank(); ++j) out[j] = checked_add(coords_[j], other.coords_[j]);
  return LatticeElement(std::move(out));
}

LatticeElement LatticeElement::operator-() const {
  std::vector<std::int64_t> out(rank());
  for (std::size_t j = 0; j < rank(); ++j) out[j] = checked_mul(coords_[j], -1);
  return LatticeElement(std::move(out));
}

LatticeElement LatticeElement::operator-(const LatticeElement& other) const { return *this + (-other); }

std::string LatticeElement::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < coords_.size(); ++j) {
    if (j) os << ',';
    os << coords_[j];
  }
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------------------
// AbelianGroup

AbelianGroup AbelianGroup::lattice(std::size_t rank) { return AbelianGroup(std::vector<std::int64_t>(rank, 0)); }

AbelianGroup AbelianGroup::finite(std::vector<std::int64_t> moduli) {
  for (auto k : moduli) {
    if (k < 1) throw ValidationError("finite group moduli must be >= 1, got " + std::to_string(k));
  }
  return AbelianGroup(std::move(moduli));
}

AbelianGroup AbelianGroup::parse(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw ValidationError("empty group description");
  std::vector<std::int64_t> moduli;
  std::size_t pos = 0;
  auto fail = [&] { throw ValidationError("cannot parse group '" + std::string(text) + "'"); };
  while (pos < s.size()) {
    if (s[pos] != 'Z') fail();
    ++pos;
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (start == pos) fail();
      const auto count = std::stoll(s.substr(start, pos - start));
      if (count < 1 || count > 64) fail();
      moduli.insert(moduli.end(), static_cast<std::size_t>(count), 0);
    } else {
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (start == pos) {
        moduli.push_back(0);
      } else {
        const auto k = std::stoll(s.substr(start, pos - start));
        if (k < 1) fail();
        moduli.push_back(k);
      }
    }
    if (pos < s.size()) {
      if (s[pos] != 'x') fail();
      ++pos;
      if (pos == s.size()) fail();
    }
  }
  return AbelianGroup(std::move(moduli));
}

bool AbelianGroup::is_finite() const noexcept {
  return std::all_of(moduli_.begin(), moduli_.end(), [](std::int64_t k) { return k > 0; });
}

bool AbelianGroup::is_free() const noexcept {
  return std::all_of(moduli_.begin(), moduli_.end(), [](std::int64_t k) { return k == 0; });
}

std::int64_t AbelianGroup::order() const {
  if (!is_finite()) throw ValidationError("group " + to_string() + " is infinite");
  std::int64_t n = 1;
  for (auto k : moduli_) n = checked_mul(n, k);
  return n;
}

bool AbelianGroup::contains(const LatticeElement& x) const {
  if (x.rank() != rank()) return false;
  for (std::size_t j = 0; j < rank(); ++j) {
    if (moduli_[j] > 0 && (x[j] < 0 || x[j] >= moduli_[j])) return false;
  }
  return true;
}

void AbelianGroup::require_member(const LatticeElement& x, std::string_view what) const {
  if (x.rank() != rank()) {
    throw RankMismatch(std::string(what) + " " + x.to_string() + " has rank " + std::to_string(x.rank()) + ", group " + to_string() + " has rank " + std::to_string(rank()));
  }
}

LatticeElement AbelianGroup::reduce(const LatticeElement& x) const {
  require_member(x);
  std::vector<std::int64_t> out = x.coords();
  for (std::size_t j = 0; j < rank(); ++j) {
    if (moduli_[j] > 0) out[j] = floor_mod(out[j], moduli_[j]);
  }
  return LatticeElement(std::move(out));
}

LatticeElement AbelianGroup::add(const LatticeElement& x, const LatticeElement& y) const {
  require_member(x);
  require_member(y);
  return reduce(x + y);
}

LatticeElement AbelianGroup::negate(const LatticeElement& x) const {
  require_member(x);
  return reduce(-x);
}

LatticeElement AbelianGroup::subtract(const LatticeElement& x, const LatticeElement& y) const {
  require_member(x);
  require_member(y);
  return reduce(x - y);
}

std::int64_t AbelianGroup::sup_norm(const LatticeElement& x) const {
  const LatticeElement r = reduce(x);
  std::int64_t s = 0;
  for (std::size_t j = 0; j < rank(); ++j) {
    std::int64_t v = abs_checked(r[j]);
    if (moduli_[j] > 0) v = std::min(r[j], moduli_[j] - r[j]);
    s = std::max(s, v);
  }
  return s;
}

std::vector<LatticeElement> AbelianGroup::generators() const {
  std::vector<LatticeElement> out;
  out.reserve(rank());
  for (std::size_t j = 0; j < rank(); ++j) out.push_back(reduce(LatticeElement::unit(rank(), j)));
  return out;
}

std::vector<LatticeElement> AbelianGroup::elements() const {
  const std::int64_t n = order();
  std::vector<LatticeElement> out;
  out.reserve(static_cast<std::size_t>(n));
  LatticeElement upper = identity();
  std::vector<std::int64_t> up(rank());
  for (std::size_t j = 0; j < rank(); ++j) up[j] = moduli_[j] - 1;
  for_each_in_box(identity(), LatticeElement(up), [&](const LatticeElement& x) { out.push_back(x); });
  return out;
}

std::size_t AbelianGroup::index_of(const LatticeElement& x) const {
  if (!is_finite()) throw ValidationError("index_of on infinite group " + to_string());
  const LatticeElement r = reduce(x);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < rank(); ++j) idx = idx * static_cast<std::size_t>(moduli_[j]) + static_cast<std::size_t>(r[j]);
  return idx;
}

LatticeElement AbelianGroup::element_at(std::size_t index) const {
  const auto n = static_cast<std::size_t>(order());
  if (index >= n) throw ValidationError("element index out of range");
  std::vector<std::int64_t> out(rank());
  for (std::size_t j = rank(); j > 0; --j) {
    const auto k = static_cast<std::size_t>(moduli_[j - 1]);
    out[j - 1] = static_cast<std::int64_t>(index % k);
    index /= k;
  }
  return LatticeElement(std::move(out));
}

std::string AbelianGroup::to_string() const {
  if (rank() == 0) return "Z^0";
  if (is_free()) return rank() == 1 ? "Z" : "Z^" + std::to_string(rank());
  std::string s;
  for (std::size_t j = 0; j < rank(); ++j) {
    if (j) s += 'x';
    s += 'Z';
    if (moduli_[j] > 0) s += std::to_string(moduli_[j]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Fractions and boxes

bool fraction_less_equal(const Fraction& lhs, const Fraction& rhs) {
  const __int128 a = static_cast<__int128>(lhs.numerator) * rhs.denominator;
  const __int128 b = static_cast<__int128>(rhs.numerator) * lhs.denominator;
  return a <= b;
}

FolnerBox::FolnerBox(LatticeElement offset, std::int64_t side) : offset_(std::move(offset)), side_(side) {
  if (side < 0) throw ValidationError("box side must be >= 0, got " + std::to_string(side));
  // upper corner must be representable
  for (auto c : offset_.coords()) checked_add(c, side);
}

FolnerBox FolnerBox::standard(std::size_t rank, std::int64_t side) { return FolnerBox(LatticeElement::zero(rank), side); }

FolnerBox FolnerBox::centered(std::size_t rank, std::int64_t radius) {
  if (radius < 0) throw ValidationError("box radius must be >= 0");
  return FolnerBox(LatticeElement(std::vector<std::int64_t>(rank, -radius)), checked_mul(radius, 2));
}

std::int64_t FolnerBox::cardinality() const {
  return checked_pow(checked_add(side_, 1), static_cast<std::int64_t>(rank()));
}

bool FolnerBox::contains(const LatticeElement& x) const {
  if (x.rank() != rank()) return false;
  for (std::size_t j = 0; j < rank(); ++j) {
    if (x[j] < offset_[j] || x[j] > offset_[j] + side_) return false;
  }
  return true;
}

std::int64_t FolnerBox::overlap(const LatticeElement& x) const {
  if (x.rank() != rank()) throw RankMismatch("translate " + x.to_string() + " does not match box rank " + std::to_string(rank()));
  std::int64_t count = 1;
  for (std::size_t j = 0; j < rank(); ++j) {
    const std::int64_t width = checked_add(side_ + 1, -abs_checked(x[j]));
    if (width <= 0) return 0;
    count = checked_mul(count, width);
  }
  return count;
}

Fraction FolnerBox::defect(const LatticeElement& x) const {
  const std::int64_t card = cardinality();
  return {card - overlap(x), card};
}

std::int64_t FolnerBox::l1_mass() const {
  if (!offset_.is_zero()) throw ValidationError("l1 mass is defined for boxes with zero offset");
  const auto n = static_cast<std::int64_t>(rank());
  // N m (m+1)^N / 2; m(m+1) is even so divide it first.
  const std::int64_t pair = checked_mul(side_, side_ + 1) / 2;
  if (n == 0) return 0;
  return checked_mul(checked_mul(n, pair), checked_pow(side_ + 1, n - 1));
}

std::optional<BoxBounds> FolnerBox::intersection_with_translate(const LatticeElement& x) const {
  if (x.rank() != rank()) throw RankMismatch("translate rank mismatch");
  std::vector<std::int64_t> lo(rank()), hi(rank());
  for (std::size_t j = 0; j < rank(); ++j) {
    lo[j] = offset_[j] + std::max<std::int64_t>(0, x[j]);
    hi[j] = offset_[j] + side_ + std::min<std::int64_t>(0, x[j]);
    if (hi[j] < lo[j]) return std::nullopt;
  }
  return BoxBounds{LatticeElement(std::move(lo)), LatticeElement(std::move(hi))};
}

std::vector<LatticeElement> FolnerBox::elements() const {
  std::vector<LatticeElement> out;
  out.reserve(static_cast<std::size_t>(cardinality()));
  std::vector<std::int64_t> up(rank());
  for (std::size_t j = 0; j < rank(); ++j) up[j] = offset_[j] + side_;
  for_each_in_box(offset_, LatticeElement(up), [&](const LatticeElement& y) { out.push_back(y); });
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustion

std::vector<LatticeElement> Exhaustion::members(std::size_t i) const {
  if (i == 0) throw ValidationError("exhaustion indices start at 1");
  const auto r = static_cast<std::int64_t>(i);
  const std::size_t n = group_.rank();
  std::set<LatticeElement> out;
  for_each_in_box(LatticeElement(std::vector<std::int64_t>(n, -r)), LatticeElement(std::vector<std::int64_t>(n, r)),
                  [&](const LatticeElement& x) { out.insert(group_.reduce(x)); });
  return {out.begin(), out.end()};
}

bool Exhaustion::contains(std::size_t i, const LatticeElement& x) const {
  return group_.sup_norm(x) <= static_cast<std::int64_t>(i);
}

std::size_t Exhaustion::first_index_containing(const LatticeElement& x) const {
  return static_cast<std::size_t>(std::max<std::int64_t>(1, group_.sup_norm(x)));
}

}  // namespace twistlab
