#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twistlab {

/// An element of Z^N or of a product of cyclic groups, stored as an integer
/// coordinate vector. Arithmetic is overflow-checked.
class LatticeElement {
public:
  LatticeElement() = default;
  explicit LatticeElement(std::vector<std::int64_t> coords) : coords_(std::move(coords)) {}
  LatticeElement(std::initializer_list<std::int64_t> coords) : coords_(coords) {}

  static LatticeElement zero(std::size_t rank) { return LatticeElement(std::vector<std::int64_t>(rank, 0)); }
  static LatticeElement unit(std::size_t rank, std::size_t axis);

  std::size_t rank() const noexcept { return coords_.size(); }
  const std::vector<std::int64_t>& coords() const noexcept { return coords_; }
  std::int64_t operator[](std::size_t j) const { return coords_[j]; }

  bool is_zero() const noexcept;
  std::int64_t l1_norm() const;
  std::int64_t sup_norm() const;

  LatticeElement operator+(const LatticeElement& other) const;
  LatticeElement operator-(const LatticeElement& other) const;
  LatticeElement operator-() const;

  friend bool operator==(const LatticeElement&, const LatticeElement&) = default;
  friend auto operator<=>(const LatticeElement&, const LatticeElement&) = default;

  std::string to_string() const;

private:
  std::vector<std::int64_t> coords_;
};

/// |x|_1 = sum_j |x_j|.
inline std::int64_t l1_norm(const LatticeElement& x) { return x.l1_norm(); }

/// Z_{k_1} x ... x Z_{k_N}; a modulus of 0 stands for a free factor Z, so
/// Z^N is the group with all moduli zero.
class AbelianGroup {
public:
  static AbelianGroup lattice(std::size_t rank);
  static AbelianGroup finite(std::vector<std::int64_t> moduli);
  /// Parses "Z^2", "Z2xZ2", "ZxZ3", "Z4".
  static AbelianGroup parse(std::string_view text);

  std::size_t rank() const noexcept { return moduli_.size(); }
  const std::vector<std::int64_t>& moduli() const noexcept { return moduli_; }
  bool is_finite() const noexcept;
  bool is_free() const noexcept;
  /// Group order; throws ValidationError for infinite groups.
  std::int64_t order() const;

  LatticeElement identity() const { return LatticeElement::zero(rank()); }
  bool contains(const LatticeElement& x) const;
  /// Canonical representative (0 <= x_j < k_j on finite factors).
  LatticeElement reduce(const LatticeElement& x) const;
  LatticeElement add(const LatticeElement& x, const LatticeElement& y) const;
  LatticeElement negate(const LatticeElement& x) const;
  LatticeElement subtract(const LatticeElement& x, const LatticeElement& y) const;
  /// Sup norm of the shortest representative of x.
  std::int64_t sup_norm(const LatticeElement& x) const;

  /// Standard generators e_1..e_N.
  std::vector<LatticeElement> generators() const;

  /// Lexicographic enumeration (first coordinate most significant); finite only.
  std::vector<LatticeElement> elements() const;
  std::size_t index_of(const LatticeElement& x) const;
  LatticeElement element_at(std::size_t index) const;

  /// Throws RankMismatch if x does not belong to this group.
  void require_member(const LatticeElement& x, std::string_view what = "element") const;

  std::string to_string() const;

  friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;

private:
  explicit AbelianGroup(std::vector<std::int64_t> moduli) : moduli_(std::move(moduli)) {}
  std::vector<std::int64_t> moduli_;
};

/// Exact rational with positive denominator (no normalisation needed here).
struct Fraction {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;
  double to_double() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

/// a/b <= c/d for positive denominators, in 128-bit arithmetic.
bool fraction_less_equal(const Fraction& lhs, const Fraction& rhs);

/// Per-coordinate closed interval bounds of an integer box.
struct BoxBounds {
  LatticeElement lower;
  LatticeElement upper;
};

/// F = o + {0,...,m}^N inside Z^N.
class FolnerBox {
public:
  FolnerBox(LatticeElement offset, std::int64_t side);
  /// K_m = {0,...,m}^N.
  static FolnerBox standard(std::size_t rank, std::int64_t side);
  /// {-n,...,n}^N.
  static FolnerBox centered(std::size_t rank, std::int64_t radius);

  std::size_t rank() const noexcept { return offset_.rank(); }
  std::int64_t side() const noexcept { return side_; }
  const LatticeElement& offset() const noexcept { return offset_; }

  /// (m+1)^N.
  std::int64_t cardinality() const;
  bool contains(const LatticeElement& x) const;
  /// #((x+F) ∩ F) = prod_j max(0, m+1-|x_j|).
  std::int64_t overlap(const LatticeElement& x) const;
  /// 1 - overlap(x)/#F as an exact fraction.
  Fraction defect(const LatticeElement& x) const;
  /// sum_{y in K_m} |y|_1 = N m (m+1)^N / 2; requires a zero offset.
  std::int64_t l1_mass() const;

  /// Bounds of F ∩ (x+F), or nullopt if empty.
  std::optional<BoxBounds> intersection_with_translate(const LatticeElement& x) const;
  std::vector<LatticeElement> elements() const;

private:
  LatticeElement offset_;
  std::int64_t side_;
};

/// Visits every point of the integer box [lower, upper] lexicographically.
template <typename Visitor>
void for_each_in_box(const LatticeElement& lower, const LatticeElement& upper, Visitor&& visit) {
  const std::size_t n = lower.rank();
  for (std::size_t j = 0; j < n; ++j) {
    if (upper[j] < lower[j]) return;
  }
  std::vector<std::int64_t> cur = lower.coords();
  while (true) {
    visit(LatticeElement(cur));
    std::size_t j = n;
    while (j > 0) {
      --j;
      if (cur[j] < upper[j]) {
        ++cur[j];
        break;
      }
      cur[j] = lower[j];
      if (j == 0) return;
    }
    if (n == 0) return;
  }
}

/// H_1 ⊆ H_2 ⊆ ... given by sup-norm balls of radius i around the identity.
class Exhaustion {
public:
  explicit Exhaustion(AbelianGroup group) : group_(std::move(group)) {}

  const AbelianGroup& group() const noexcept { return group_; }
  /// Members of H_i (i >= 1), canonical representatives, sorted.
  std::vector<LatticeElement> members(std::size_t i) const;
  bool contains(std::size_t i, const LatticeElement& x) const;
  /// Smallest i >= 1 with x in H_i.
  std::size_t first_index_containing(const LatticeElement& x) const;

private:
  AbelianGroup group_;
};

}  // namespace twistlab
