#include "twistlab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twistlab/errors.hpp"

namespace twistlab {

namespace {

constexpr double kModulusTolerance = 1e-12;
constexpr std::int64_t kExhaustiveTableOrder = 128;
constexpr std::int64_t kMaxTableOrder = 1024;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::VectorXd as_vector(const LatticeElement& x) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.rank()));
  for (std::size_t j = 0; j < x.rank(); ++j) v[static_cast<Eigen::Index>(j)] = static_cast<double>(x[j]);
  return v;
}

/// x.(A y) evaluated in long double to keep large coordinates honest.
double bilinear_phase(const RealMatrix& a, const LatticeElement& x, const LatticeElement& y) {
  long double total = 0.0L;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const auto xi = x[static_cast<std::size_t>(i)];
    if (xi == 0) continue;
    long double row = 0.0L;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const auto yj = y[static_cast<std::size_t>(j)];
      if (yj != 0) row += static_cast<long double>(a(i, j)) * static_cast<long double>(yj);
    }
    total += static_cast<long double>(xi) * row;
  }
  return static_cast<double>(total);
}

}  // namespace

double max_entry_norm(const RealMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

RealMatrix canonicalize(const RealMatrix& a) { return a.unaryExpr([](double v) { return canonical_angle(v); }); }

// ---------------------------------------------------------------------------
// PhaseMap

PhaseMap::PhaseMap(AbelianGroup group, std::function<double(const LatticeElement&)> angle, std::string description)
    : group_(std::move(group)), angle_(std::move(angle)), description_(std::move(description)) {
  if (angle_(group_.identity()) != 0.0) throw ValidationError("phase map must satisfy rho(e) = 1");
}

PhaseMap PhaseMap::quadratic(AbelianGroup group, RealMatrix q, Eigen::VectorXd linear) {
  const auto n = static_cast<Eigen::Index>(group.rank());
  if (q.rows() != n || q.cols() != n || linear.size() != n) throw RankMismatch("quadratic phase map dimensions do not match group rank");
  std::ostringstream os;
  os << "quadratic";
  return PhaseMap(
      std::move(group),
      [q = std::move(q), l = std::move(linear)](const LatticeElement& x) {
        const Eigen::VectorXd v = as_vector(x);
        return v.dot(q * v) + l.dot(v);
      },
      os.str());
}

PhaseMap PhaseMap::table(AbelianGroup group, std::vector<double> angles) {
  const auto order = static_cast<std::size_t>(group.order());
  if (angles.size() != order) throw ValidationError("phase table needs " + std::to_string(order) + " angles");
  AbelianGroup g = group;
  return PhaseMap(
      std::move(group), [g = std::move(g), a = std::move(angles)](const LatticeElement& x) { return a[g.index_of(x)]; },
      "table");
}

PhaseMap PhaseMap::custom(AbelianGroup group, std::function<double(const LatticeElement&)> angle, std::string description) {
  return PhaseMap(std::move(group), std::move(angle), std::move(description));
}

PhaseMap PhaseMap::trivial(AbelianGroup group) {
  return PhaseMap(std::move(group), [](const LatticeElement&) { return 0.0; }, "trivial");
}

double PhaseMap::angle(const LatticeElement& x) const {
  group_.require_member(x);
  return angle_(group_.reduce(x));
}

// ---------------------------------------------------------------------------
// Cocycle

struct Cocycle::Impl {
  Kind kind = Kind::Product;
  AbelianGroup group = AbelianGroup::lattice(0);
  RealMatrix matrix;    // u = u_A for Matrix / BilinearLift
  RealMatrix bilinear;  // D for BilinearLift
  std::vector<Complex> table;
  std::size_t order = 0;
  bool bicharacter_table = false;
  std::optional<PhaseMap> rho;
  std::vector<Cocycle> factors;  // Product; Commutator keeps its base in factors[0]
};

Cocycle Cocycle::matrix(RealMatrix a) { return matrix_raw(canonicalize(a)); }

Cocycle Cocycle::matrix_raw(RealMatrix a) {
  if (a.rows() != a.cols()) throw RankMismatch("cocycle matrix must be square");
  if (!a.allFinite()) throw ValidationError("cocycle matrix has non-finite entries");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Matrix;
  impl->group = AbelianGroup::lattice(static_cast<std::size_t>(a.rows()));
  impl->matrix = std::move(a);
  return Cocycle(std::move(impl));
}

Cocycle Cocycle::table(AbelianGroup group, std::vector<Complex> values) {
  const std::int64_t order = group.order();
  if (order > kMaxTableOrder) throw CapExceeded("table cocycles support groups of order <= " + std::to_string(kMaxTableOrder));
  const auto n = static_cast<std::size_t>(order);
  if (values.size() != n * n) throw ValidationError("cocycle table for " + group.to_string() + " needs " + std::to_string(n * n) + " entries");
  for (const auto& v : values) {
    if (std::abs(std::abs(v) - 1.0) > kModulusTolerance) throw ValidationError("cocycle table entries must have modulus 1");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(values[i] - 1.0) > kModulusTolerance || std::abs(values[i * n] - 1.0) > kModulusTolerance) {
      throw ValidationError("cocycle table is not normalised (u(x,e) = u(e,x) = 1)");
    }
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Table;
  impl->group = std::move(group);
  impl->order = n;
  impl->table = std::move(values);
  Cocycle u(impl);
  if (order <= kExhaustiveTableOrder) {
    const auto& g = impl->group;
    const auto elems = g.elements();
    const auto& t = impl->table;
    auto at = [&](std::size_t a, std::size_t b) { return t[a * n + b]; };
    std::vector<std::vector<std::size_t>> sum(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) sum[a][b] = g.index_of(g.add(elems[a], elems[b]));
    double identity = 0.0, bichar = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) {
          identity = std::max(identity, std::abs(at(a, b) * at(sum[a][b], c) - at(b, c) * at(a, sum[b][c])));
          bichar = std::max(bichar, std::abs(at(sum[a][b], c) - at(a, c) * at(b, c)));
          bichar = std::max(bichar, std::abs(at(a, sum[b][c]) - at(a, b) * at(a, c)));
        }
    if (identity > kModulusTolerance) throw ValidationError("table violates the cocycle identity (residual " + fmt(identity) + ")");
    impl->bicharacter_table = bichar <= kModulusTolerance;
  }
  return u;
}

Cocycle Cocycle::coboundary(PhaseMap rho) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Coboundary;
  impl->group = rho.group();
  impl->rho = std::move(rho);
  return Cocycle(std::move(impl));
}

Cocycle Cocycle::product(std::vector<Cocycle> factors) {
  if (factors.empty()) throw ValidationError("product of no cocycles needs an explicit group; use Cocycle::trivial");
  for (const auto& f : factors) {
    if (!(f.group() == factors.front().group())) throw RankMismatch("product factors live on different groups");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Product;
  impl->group = factors.front().group();
  impl->factors = std::move(factors);
  return Cocycle(std::move(impl));
}

Cocycle Cocycle::trivial(AbelianGroup group) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Product;
  impl->group = std::move(group);
  return Cocycle(std::move(impl));
}

Cocycle Cocycle::pauli() {
  const auto g = AbelianGroup::finite({2, 2});
  const auto elems = g.elements();
  std::vector<Complex> values;
  values.reserve(16);
  for (const auto& x : elems)
    for (const auto& y : elems) values.emplace_back((y[0] * x[1]) % 2 == 0 ? 1.0 : -1.0, 0.0);
  return table(g, std::move(values));
}

Cocycle::Kind Cocycle::kind() const noexcept { return impl_->kind; }

std::string Cocycle::kind_name() const {
  switch (impl_->kind) {
    case Kind::Matrix: return "matrix";
    case Kind::BilinearLift: return "bilinear";
    case Kind::Table: return "table";
    case Kind::Coboundary: return "coboundary";
    case Kind::Product: return impl_->factors.empty() ? "trivial" : "product";
    case Kind::Commutator: return "commutator";
  }
  return "unknown";
}

const AbelianGroup& Cocycle::group() const noexcept { return impl_->group; }

Complex Cocycle::evaluate(const LatticeElement& x, const LatticeElement& y) const {
  const auto& g = impl_->group;
  g.require_member(x, "cocycle argument");
  g.require_member(y, "cocycle argument");
  switch (impl_->kind) {
    case Kind::Matrix:
    case Kind::BilinearLift: {
      const double phase = bilinear_phase(impl_->matrix, x, y);
      if (phase == 0.0) return {1.0, 0.0};
      return unit_phase(canonical_angle(phase));
    }
    case Kind::Table: {
      const std::size_t n = impl_->order;
      return impl_->table[g.index_of(x) * n + g.index_of(y)];
    }
    case Kind::Coboundary: {
      const auto rx = g.reduce(x), ry = g.reduce(y);
      if (rx.is_zero() || ry.is_zero()) return {1.0, 0.0};
      const auto& rho = *impl_->rho;
      return unit_phase(canonical_angle(rho.angle(rx) + rho.angle(ry) - rho.angle(g.add(rx, ry))));
    }
    case Kind::Product: {
      Complex v{1.0, 0.0};
      for (const auto& f : impl_->factors) v *= f.evaluate(x, y);
      return v;
    }
    case Kind::Commutator: {
      const auto& base = impl_->factors.front();
      return base.evaluate(x, y) * std::conj(base.evaluate(y, x));
    }
  }
  return {1.0, 0.0};
}

const RealMatrix* Cocycle::matrix_data() const noexcept {
  return impl_->kind == Kind::Matrix || impl_->kind == Kind::BilinearLift ? &impl_->matrix : nullptr;
}

const RealMatrix* Cocycle::bilinear_data() const noexcept { return impl_->kind == Kind::BilinearLift ? &impl_->bilinear : nullptr; }

const std::vector<Complex>* Cocycle::table_data() const noexcept { return impl_->kind == Kind::Table ? &impl_->table : nullptr; }

const std::vector<Cocycle>* Cocycle::factors() const noexcept {
  return impl_->kind == Kind::Product || impl_->kind == Kind::Commutator ? &impl_->factors : nullptr;
}

bool Cocycle::is_class_decidable() const noexcept {
  switch (impl_->kind) {
    case Kind::Matrix:
    case Kind::BilinearLift:
    case Kind::Coboundary:
    case Kind::Commutator: return true;
    case Kind::Table: return impl_->bicharacter_table;
    case Kind::Product:
      return std::all_of(impl_->factors.begin(), impl_->factors.end(), [](const Cocycle& f) { return f.is_class_decidable(); });
  }
  return false;
}

bool Cocycle::is_bicharacter() const noexcept {
  switch (impl_->kind) {
    case Kind::Matrix:
    case Kind::BilinearLift:
    case Kind::Commutator: return true;
    case Kind::Table: return impl_->bicharacter_table;
    case Kind::Coboundary: return false;
    case Kind::Product:
      return std::all_of(impl_->factors.begin(), impl_->factors.end(), [](const Cocycle& f) { return f.is_bicharacter(); });
  }
  return false;
}

std::string Cocycle::describe() const {
  std::ostringstream os;
  os << kind_name() << " on " << group().to_string();
  if (impl_->kind == Kind::Product && !impl_->factors.empty()) {
    os << " [";
    for (std::size_t i = 0; i < impl_->factors.size(); ++i) os << (i ? ", " : "") << impl_->factors[i].describe();
    os << ']';
  }
  if (impl_->kind == Kind::Commutator) os << " of " << impl_->factors.front().describe();
  return os.str();
}

Cocycle lift_bilinear(const RealMatrix& d) {
  const auto p = d.rows(), q = d.cols();
  if (p < 1 || q < 1) throw ValidationError("bilinear lift needs P, Q >= 1");
  if (!d.allFinite()) throw ValidationError("bilinear matrix has non-finite entries");
  RealMatrix tilde = RealMatrix::Zero(p + q, p + q);
  tilde.block(p, 0, q, p) = -d.transpose();
  auto impl = std::make_shared<Cocycle::Impl>();
  impl->kind = Cocycle::Kind::BilinearLift;
  impl->group = AbelianGroup::lattice(static_cast<std::size_t>(p + q));
  impl->matrix = canonicalize(tilde);
  impl->bilinear = d;
  return Cocycle(std::move(impl));
}

Cocycle commutator_bicharacter(const Cocycle& u) {
  if (const RealMatrix* a = u.matrix_data()) {
    return Cocycle::matrix(*a - a->transpose());
  }
  if (const auto* t = u.table_data()) {
    const auto& g = u.group();
    const auto n = static_cast<std::size_t>(g.order());
    std::vector<Complex> k(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) k[i * n + j] = (*t)[i * n + j] * std::conj((*t)[j * n + i]);
    return Cocycle::table(g, std::move(k));
  }
  auto impl = std::make_shared<Cocycle::Impl>();
  impl->kind = Cocycle::Kind::Commutator;
  impl->group = u.group();
  impl->factors = {u};
  return Cocycle(std::move(impl));
}

Cocycle perturb(const Cocycle& u, const PhaseMap& rho) {
  if (!(rho.group() == u.group())) throw RankMismatch("perturbation phase map lives on a different group");
  return Cocycle::product({Cocycle::coboundary(rho), u});
}

// ---------------------------------------------------------------------------
// BilinearMap

BilinearMap BilinearMap::lattice(RealMatrix d) {
  if (d.rows() < 1 || d.cols() < 1) throw ValidationError("bilinear matrix needs P, Q >= 1");
  if (!d.allFinite()) throw ValidationError("bilinear matrix has non-finite entries");
  BilinearMap s(AbelianGroup::lattice(static_cast<std::size_t>(d.rows())), AbelianGroup::lattice(static_cast<std::size_t>(d.cols())));
  s.lattice_ = std::move(d);
  return s;
}

BilinearMap BilinearMap::finite(AbelianGroup left, AbelianGroup right, IntMatrix exponents, std::int64_t denominator) {
  if (denominator < 1) throw ValidationError("bilinear map denominator must be >= 1");
  if (exponents.rows() != static_cast<Eigen::Index>(left.rank()) || exponents.cols() != static_cast<Eigen::Index>(right.rank())) {
    throw RankMismatch("exponent matrix must be rank(A) x rank(B)");
  }
  for (Eigen::Index i = 0; i < exponents.rows(); ++i) {
    for (Eigen::Index j = 0; j < exponents.cols(); ++j) {
      const auto e = exponents(i, j);
      const auto ka = left.moduli()[static_cast<std::size_t>(i)];
      const auto kb = right.moduli()[static_cast<std::size_t>(j)];
      if ((ka > 0 && (checked_mul(ka, e) % denominator) != 0) || (kb > 0 && (checked_mul(kb, e) % denominator) != 0)) {
        throw ValidationError("bilinear exponents are not well defined modulo the group orders");
      }
    }
  }
  BilinearMap s(std::move(left), std::move(right));
  s.exponents_ = std::move(exponents);
  s.denominator_ = denominator;
  return s;
}

AbelianGroup BilinearMap::product_group() const {
  auto m = left_.moduli();
  m.insert(m.end(), right_.moduli().begin(), right_.moduli().end());
  if (std::all_of(m.begin(), m.end(), [](std::int64_t k) { return k == 0; })) return AbelianGroup::lattice(m.size());
  if (std::all_of(m.begin(), m.end(), [](std::int64_t k) { return k > 0; })) return AbelianGroup::finite(m);
  std::string text;
  for (std::size_t j = 0; j < m.size(); ++j) text += (j ? "x" : "") + std::string("Z") + (m[j] > 0 ? std::to_string(m[j]) : "");
  return AbelianGroup::parse(text);
}

Complex BilinearMap::operator()(const LatticeElement& a, const LatticeElement& b) const {
  left_.require_member(a, "bilinear left argument");
  right_.require_member(b, "bilinear right argument");
  if (lattice_) {
    const double phase = bilinear_phase(*lattice_, a, b);
    return phase == 0.0 ? Complex{1.0, 0.0} : unit_phase(canonical_angle(phase));
  }
  const auto ra = left_.reduce(a), rb = right_.reduce(b);
  __int128 s = 0;
  for (Eigen::Index i = 0; i < exponents_.rows(); ++i)
    for (Eigen::Index j = 0; j < exponents_.cols(); ++j)
      s += static_cast<__int128>(ra[static_cast<std::size_t>(i)]) * exponents_(i, j) * rb[static_cast<std::size_t>(j)];
  const auto n = static_cast<__int128>(denominator_);
  auto r = static_cast<std::int64_t>(((s % n) + n) % n);
  // quarter turns are returned exactly
  if ((4 * static_cast<__int128>(r)) % n == 0) {
    switch (static_cast<int>((4 * static_cast<__int128>(r)) / n)) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      case 3: return {0.0, -1.0};
      default: break;
    }
  }
  return unit_phase(canonical_angle(kTwoPi * static_cast<double>(r) / static_cast<double>(denominator_)));
}

Cocycle BilinearMap::lift() const {
  if (lattice_) return lift_bilinear(*lattice_);
  const auto g = product_group();
  const auto elems = g.elements();
  const std::size_t p = left_.rank();
  auto split = [&](const LatticeElement& x) {
    std::vector<std::int64_t> a(x.coords().begin(), x.coords().begin() + static_cast<std::ptrdiff_t>(p));
    std::vector<std::int64_t> b(x.coords().begin() + static_cast<std::ptrdiff_t>(p), x.coords().end());
    return std::pair{LatticeElement(std::move(a)), LatticeElement(std::move(b))};
  };
  std::vector<Complex> values;
  values.reserve(elems.size() * elems.size());
  for (const auto& x : elems) {
    const auto b1 = split(x).second;
    for (const auto& y : elems) values.push_back(std::conj((*this)(split(y).first, b1)));
  }
  return Cocycle::table(g, std::move(values));
}

double BilinearMap::bilinearity_residual(const std::vector<std::array<LatticeElement, 4>>& samples) const {
  double r = 0.0;
  for (const auto& [a, a2, b, b2] : samples) {
    const auto& s = *this;
    r = std::max(r, std::abs(s(left_.add(a, a2), b) - s(a, b) * s(a2, b)));
    r = std::max(r, std::abs(s(a, right_.add(b, b2)) - s(a, b) * s(a, b2)));
  }
  return r;
}

std::string BilinearMap::describe() const {
  return (lattice_ ? "lattice bilinear map on " : "finite bilinear map on ") + left_.to_string() + " x " + right_.to_string();
}

// ---------------------------------------------------------------------------
// Sampling

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());
  // rejection sampling keeps the draw exactly uniform
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % span);
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

LatticeElement random_element(const AbelianGroup& group, std::int64_t radius, std::mt19937_64& rng) {
  std::vector<std::int64_t> c(group.rank());
  for (auto& v : c) v = uniform_int(rng, -radius, radius);
  return group.reduce(LatticeElement(std::move(c)));
}

std::vector<Triple> sample_triples(const AbelianGroup& group, std::size_t count, std::int64_t radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Triple> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto x = random_element(group, radius, rng);
    auto y = random_element(group, radius, rng);
    auto z = random_element(group, radius, rng);
    out.push_back({std::move(x), std::move(y), std::move(z)});
  }
  return out;
}

std::vector<Pair> sample_pairs(const AbelianGroup& group, std::size_t count, std::int64_t radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Pair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto x = random_element(group, radius, rng);
    auto y = random_element(group, radius, rng);
    out.push_back({std::move(x), std::move(y)});
  }
  return out;
}

std::vector<Triple> all_triples(const AbelianGroup& group) {
  const auto elems = group.elements();
  std::vector<Triple> out;
  out.reserve(elems.size() * elems.size() * elems.size());
  for (const auto& x : elems)
    for (const auto& y : elems)
      for (const auto& z : elems) out.push_back({x, y, z});
  return out;
}

std::vector<Pair> all_pairs(const AbelianGroup& group) {
  const auto elems = group.elements();
  std::vector<Pair> out;
  out.reserve(elems.size() * elems.size());
  for (const auto& x : elems)
    for (const auto& y : elems) out.push_back({x, y});
  return out;
}

// ---------------------------------------------------------------------------
// Checks

double check_cocycle_identity(const Cocycle& u, const std::vector<Triple>& samples) {
  if (samples.empty()) throw ValidationError("cocycle identity check needs at least one triple");
  const auto& g = u.group();
  double r = 0.0;
  for (const auto& [x, y, z] : samples) {
    const Complex lhs = u(x, y) * u(g.add(x, y), z);
    const Complex rhs = u(y, z) * u(x, g.add(y, z));
    r = std::max(r, std::abs(lhs - rhs));
  }
  return r;
}

double modulus_residual(const Cocycle& u, const std::vector<Pair>& samples) {
  double r = 0.0;
  for (const auto& [x, y] : samples) r = std::max(r, std::abs(std::abs(u(x, y)) - 1.0));
  return r;
}

double normalization_residual(const Cocycle& u, const std::vector<Pair>& samples) {
  const auto e = u.group().identity();
  double r = 0.0;
  for (const auto& [x, y] : samples) {
    r = std::max({r, std::abs(u(x, e) - 1.0), std::abs(u(e, x) - 1.0), std::abs(u(y, e) - 1.0), std::abs(u(e, y) - 1.0)});
  }
  return r;
}

double bicharacter_residual(const Cocycle& u, const std::vector<Triple>& samples) {
  const auto& g = u.group();
  double r = 0.0;
  for (const auto& [x, y, z] : samples) {
    r = std::max(r, std::abs(u(g.add(x, y), z) - u(x, z) * u(y, z)));
    r = std::max(r, std::abs(u(x, g.add(y, z)) - u(x, y) * u(x, z)));
  }
  return r;
}

std::string to_string(CoboundaryVerdict v) {
  switch (v) {
    case CoboundaryVerdict::Coboundary: return "Coboundary";
    case CoboundaryVerdict::NotCoboundary: return "NotCoboundary";
    case CoboundaryVerdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {
constexpr double kCommutatorTrivial = 1e-12;
constexpr double kCommutatorWitness = 1e-9;

std::vector<Pair> generator_pairs(const AbelianGroup& g) {
  const auto gens = g.generators();
  std::vector<Pair> out;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j) out.push_back({gens[i], gens[j]});
  return out;
}
}  // namespace

CoboundaryReport coboundary_test(const Cocycle& u, const std::vector<Pair>& samples) {
  if (!u.is_class_decidable()) {
    throw UnsupportedVariant("coboundary test needs a bicharacter (matrix, bilinear, bicharacter table) possibly times coboundaries; got " + u.describe());
  }
  CoboundaryReport report;
  auto consider = [&](const Pair& p) {
    const Complex k = u(p.x, p.y) * std::conj(u(p.y, p.x));
    const double d = std::abs(k - 1.0);
    report.max_commutator_defect = std::max(report.max_commutator_defect, d);
    if (d > kCommutatorWitness && !report.witness) {
      report.witness = p;
      report.witness_value = k;
    }
  };
  for (const auto& p : generator_pairs(u.group())) consider(p);
  for (const auto& p : samples) consider(p);
  if (report.witness) {
    report.verdict = CoboundaryVerdict::NotCoboundary;
  } else if (report.max_commutator_defect > kCommutatorTrivial) {
    report.verdict = CoboundaryVerdict::Inconclusive;
  } else {
    report.verdict = CoboundaryVerdict::Coboundary;
  }
  return report;
}

double commutator_distance(const Cocycle& u, const Cocycle& v, const std::vector<Pair>& samples) {
  if (!(u.group() == v.group())) throw RankMismatch("commutator comparison across different groups");
  double r = 0.0;
  auto consider = [&](const Pair& p) {
    const Complex ku = u(p.x, p.y) * std::conj(u(p.y, p.x));
    const Complex kv = v(p.x, p.y) * std::conj(v(p.y, p.x));
    r = std::max(r, std::abs(ku - kv));
  };
  for (const auto& p : generator_pairs(u.group())) consider(p);
  for (const auto& p : samples) consider(p);
  return r;
}

// ---------------------------------------------------------------------------
// Sequences

CocycleSequence::CocycleSequence(AbelianGroup group, std::function<Cocycle(std::size_t)> generator, std::optional<TailModel> norm_model,
                                 std::string description)
    : group_(std::move(group)), generator_(std::move(generator)), norm_model_(std::move(norm_model)), description_(std::move(description)) {}

CocycleSequence CocycleSequence::geometric_matrix(const RealMatrix& a, double ratio) {
  if (!(ratio >= 0.0)) throw ValidationError("geometric ratio must be >= 0");
  const auto group = AbelianGroup::lattice(static_cast<std::size_t>(a.rows()));
  const RealMatrix base = canonicalize(a);
  return CocycleSequence(
      group, [base, ratio](std::size_t i) { return Cocycle::matrix(base * std::pow(ratio, static_cast<double>(i))); },
      TailModel::geometric(max_entry_norm(base), ratio), "u_i = u_{r^i A}, r=" + fmt(ratio));
}

CocycleSequence CocycleSequence::scaled_matrix(const RealMatrix& a, const TailModel& norms) {
  const RealMatrix base = canonicalize(a);
  const double norm = max_entry_norm(base);
  if (norm == 0.0) throw ValidationError("scaled matrix sequence needs a nonzero base matrix");
  const auto group = AbelianGroup::lattice(static_cast<std::size_t>(a.rows()));
  return CocycleSequence(
      group, [base, norm, norms](std::size_t i) { return Cocycle::matrix_raw(base * (norms.value(i) / norm)); }, norms,
      "u_i = u_{A_i}, |A_i| ~ " + norms.to_string());
}

CocycleSequence CocycleSequence::constant(const Cocycle& u) {
  return CocycleSequence(u.group(), [u](std::size_t) { return u; }, std::nullopt, "constant " + u.describe());
}

Cocycle CocycleSequence::at(std::size_t i) const {
  if (i == 0) throw ValidationError("cocycle sequences are indexed from 1");
  Cocycle u = generator_(i);
  if (!(u.group() == group_)) throw RankMismatch("sequence member lives on a different group");
  return u;
}

Complex partial_product(const CocycleSequence& sequence, std::size_t n, const LatticeElement& x, const LatticeElement& y) {
  if (n < 1) throw ValidationError("partial product needs n >= 1");
  CompensatedSum phase;
  double modulus_log = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const Complex v = sequence.at(i)(x, y);
    phase.add(std::arg(v));
    modulus_log += std::log(std::abs(v));
  }
  return std::polar(std::exp(modulus_log), phase.value());
}

OneFreeSequence one_free_coboundary_sequence(const AbelianGroup& group, std::size_t count, std::function<std::int64_t(const LatticeElement&)> f) {
  if (group.rank() == 0 || (group.is_finite() && group.order() < 2)) {
    throw ConstructionError("1-free coboundary sequences need a nontrivial group");
  }
  if (!f) f = [](const LatticeElement& x) { return checked_mul(x[0], x[0]); };
  const auto e = group.identity();
  const std::int64_t f0 = f(e);
  auto shifted = [f, f0, group](const LatticeElement& x) { return f(group.reduce(x)) - f0; };
  auto defect = [&](const LatticeElement& x, const LatticeElement& y) { return shifted(x) + shifted(y) - shifted(group.add(x, y)); };

  std::optional<Pair> witness;
  std::int64_t witness_defect = 0;
  std::vector<LatticeElement> candidates = group.generators();
  for (const auto& x : Exhaustion(group).members(2)) candidates.push_back(x);
  for (const auto& x : candidates) {
    for (const auto& y : candidates) {
      if (const auto d = defect(x, y); d != 0) {
        witness = Pair{x, y};
        witness_defect = d;
        break;
      }
    }
    if (witness) break;
  }
  if (!witness) throw ConstructionError("f is additive on the searched elements of " + group.to_string() + "; d rho would be trivial");

  OneFreeSequence out{CocycleSequence(
                          group,
                          [group, shifted](std::size_t i) {
                            const double eps = std::ldexp(1.0, -static_cast<int>(i));
                            return Cocycle::coboundary(PhaseMap::custom(
                                group, [eps, shifted](const LatticeElement& x) { return eps * static_cast<double>(shifted(x)); },
                                "exp(i 2^-" + std::to_string(i) + " f)"));
                          },
                          std::nullopt, "1-free coboundaries d rho_i, rho_i = exp(i 2^-i f)"),
                      {}, 0.0};
  CompensatedSum eps_sum;
  for (std::size_t i = 1; i <= count; ++i) {
    const double eps = std::ldexp(1.0, -static_cast<int>(i));
    const double angle = eps * static_cast<double>(witness_defect);
    if (std::fmod(angle, kTwoPi) == 0.0) throw ConstructionError("witness phase is a multiple of 2 pi");
    out.witnesses.push_back({i, witness->x, witness->y, angle});
    eps_sum.add(eps);
  }
  out.epsilon_sum = eps_sum.value();
  return out;
}

}  // namespace twistlab
