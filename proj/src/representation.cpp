#include "twistlab/representation.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

#include "twistlab/errors.hpp"
#include "twistlab/parallel.hpp"

namespace twistlab {

namespace {

constexpr double kNormTolerance = 1e-12;

void require_finite_order(const AbelianGroup& g, std::int64_t cap, const char* what) {
  if (!g.is_finite()) throw ValidationError(std::string(what) + " needs a finite group, got " + g.to_string());
  if (g.order() > cap) {
    throw CapExceeded(std::string(what) + ": order " + std::to_string(g.order()) + " exceeds cap " + std::to_string(cap));
  }
}

std::size_t window_index(const FolnerBox& window, const LatticeElement& y) {
  std::size_t idx = 0;
  const auto base = static_cast<std::size_t>(window.side() + 1);
  for (std::size_t j = 0; j < y.rank(); ++j) idx = idx * base + static_cast<std::size_t>(y[j] - window.offset()[j]);
  return idx;
}

}  // namespace

double unitarity_residual(const ComplexMatrix& u) {
  const ComplexMatrix d = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
  return max_abs_entry(d);
}

double max_abs_entry(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// ProjectiveRep

ProjectiveRep::ProjectiveRep(Cocycle cocycle, std::size_t dimension, std::function<ComplexMatrix(const LatticeElement&)> assignment,
                             std::string description)
    : cocycle_(std::move(cocycle)), dimension_(dimension), assignment_(std::move(assignment)), description_(std::move(description)) {
  if (dimension_ == 0) throw ValidationError("representation dimension must be >= 1");
}

ComplexMatrix ProjectiveRep::operator()(const LatticeElement& x) const {
  group().require_member(x, "representation argument");
  ComplexMatrix m = assignment_(group().reduce(x));
  if (m.rows() != static_cast<Eigen::Index>(dimension_) || m.cols() != static_cast<Eigen::Index>(dimension_)) {
    throw RankMismatch("representation produced a matrix of the wrong size");
  }
  return m;
}

ComplexMatrix regular_rep_matrix(const Cocycle& u, const LatticeElement& x, std::int64_t cap) {
  const auto& g = u.group();
  require_finite_order(g, cap, "regular representation");
  g.require_member(x, "regular representation argument");
  const auto n = static_cast<Eigen::Index>(g.order());
  const auto elems = g.elements();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (const auto& z : elems) {
    const auto y = g.add(x, z);
    m(static_cast<Eigen::Index>(g.index_of(y)), static_cast<Eigen::Index>(g.index_of(z))) = u(g.negate(y), x);
  }
  return m;
}

ProjectiveRep regular_rep(const Cocycle& u, std::int64_t cap) {
  require_finite_order(u.group(), cap, "regular representation");
  return ProjectiveRep(
      u, static_cast<std::size_t>(u.group().order()), [u, cap](const LatticeElement& x) { return regular_rep_matrix(u, x, cap); },
      "lambda_u, u = " + u.describe());
}

ProjectiveRep scalar_rep(const PhaseMap& rho) {
  return ProjectiveRep(
      Cocycle::coboundary(rho), 1,
      [rho](const LatticeElement& x) {
        ComplexMatrix m(1, 1);
        m(0, 0) = rho(x);
        return m;
      },
      "scalar " + rho.description());
}

ProjectiveRep trivial_rep(const AbelianGroup& group, std::size_t dimension) {
  return ProjectiveRep(
      Cocycle::trivial(group), dimension,
      [dimension](const LatticeElement&) {
        return ComplexMatrix::Identity(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(dimension)).eval();
      },
      "trivial");
}

ProjectiveRep pauli_rep() {
  ComplexMatrix v(2, 2), w(2, 2);
  v << 0, 1, 1, 0;
  w << 1, 0, 0, -1;
  return ProjectiveRep(
      Cocycle::pauli(), 2,
      [v, w](const LatticeElement& x) {
        ComplexMatrix m = ComplexMatrix::Identity(2, 2);
        if (x[0] == 1) m = m * v;
        if (x[1] == 1) m = m * w;
        return m;
      },
      "Pauli V^a W^b");
}

double projective_relation_check(const ProjectiveRep& rep, const std::vector<Pair>& samples) {
  const auto& g = rep.group();
  const auto& u = rep.cocycle();
  const auto residuals = parallel_map<double>(samples.size(), [&](std::size_t k) {
    const auto& [x, y] = samples[k];
    const ComplexMatrix lhs = rep(x) * rep(y);
    const ComplexMatrix rhs = u(x, y) * rep(g.add(x, y));
    return max_abs_entry(lhs - rhs);
  });
  double r = 0.0;
  for (double v : residuals) r = std::max(r, v);
  return r;
}

std::vector<Pair> relation_samples(const AbelianGroup& group, std::size_t count, std::int64_t radius, std::uint64_t seed) {
  if (group.is_finite() && group.order() <= 64) return all_pairs(group);
  return sample_pairs(group, count, radius, seed);
}

ProjectiveRep tensor_rep(const std::vector<ProjectiveRep>& reps, std::int64_t cap) {
  if (reps.empty()) throw ValidationError("tensor product of no representations");
  if (reps.size() == 1) return reps.front();
  std::int64_t dim = 1;
  std::vector<Cocycle> cocycles;
  std::string description;
  for (const auto& r : reps) {
    if (!(r.group() == reps.front().group())) throw RankMismatch("tensor factors live on different groups");
    dim = checked_mul(dim, static_cast<std::int64_t>(r.dimension()));
    if (dim > cap) throw CapExceeded("tensor product dimension exceeds cap " + std::to_string(cap));
    cocycles.push_back(r.cocycle());
    description += (description.empty() ? "" : " ⊗ ") + r.description();
  }
  return ProjectiveRep(
      Cocycle::product(std::move(cocycles)), static_cast<std::size_t>(dim),
      [reps](const LatticeElement& x) {
        ComplexMatrix m = reps.front()(x);
        for (std::size_t k = 1; k < reps.size(); ++k) m = Eigen::kroneckerProduct(m, reps[k](x)).eval();
        return m;
      },
      description);
}

// ---------------------------------------------------------------------------
// TruncatedVector

TruncatedVector::TruncatedVector(AbelianGroup group, std::map<LatticeElement, Complex> values) : group_(std::move(group)) {
  for (auto& [x, v] : values) {
    group_.require_member(x, "vector support");
    auto key = group_.reduce(x);
    values_[key] += v;
  }
  if (std::abs(norm() - 1.0) > kNormTolerance) throw ValidationError("truncated vector must have unit norm");
}

TruncatedVector TruncatedVector::normalized(AbelianGroup group, std::map<LatticeElement, Complex> values) {
  CompensatedSum s;
  for (const auto& [x, v] : values) s.add(std::norm(v));
  const double n = std::sqrt(s.value());
  if (!(n > 0.0)) throw ValidationError("cannot normalise the zero vector");
  for (auto& [x, v] : values) v /= n;
  return TruncatedVector(std::move(group), std::move(values));
}

TruncatedVector TruncatedVector::box(const FolnerBox& box) {
  const auto card = box.cardinality();
  const double amp = 1.0 / std::sqrt(static_cast<double>(card));
  std::map<LatticeElement, Complex> values;
  for (auto& y : box.elements()) values.emplace(std::move(y), Complex{amp, 0.0});
  return normalized(AbelianGroup::lattice(box.rank()), std::move(values));
}

TruncatedVector TruncatedVector::point_mass(AbelianGroup group, const LatticeElement& x) {
  return TruncatedVector(std::move(group), {{x, Complex{1.0, 0.0}}});
}

Complex TruncatedVector::at(const LatticeElement& x) const {
  const auto it = values_.find(group_.reduce(x));
  return it == values_.end() ? Complex{} : it->second;
}

double TruncatedVector::norm() const {
  CompensatedSum s;
  for (const auto& [x, v] : values_) s.add(std::norm(v));
  return std::sqrt(s.value());
}

Complex twisted_inner_product(const Cocycle& u, const LatticeElement& x, const TruncatedVector& phi, const TruncatedVector& psi) {
  const auto& g = u.group();
  if (!(phi.group() == g) || !(psi.group() == g)) throw RankMismatch("vectors and cocycle live on different groups");
  g.require_member(x, "translation");
  CompensatedComplexSum s;
  for (const auto& [z, value] : phi.values()) {
    const auto y = g.add(x, z);
    const Complex target = psi.at(y);
    if (target == Complex{}) continue;
    s.add(u(g.negate(y), x) * value * std::conj(target));
  }
  return s.value();
}

Complex rep_inner_product_enumerated(const Cocycle& u, const FolnerBox& box, const LatticeElement& x) {
  const auto& g = u.group();
  if (!g.is_free() || g.rank() != box.rank()) throw RankMismatch("box and cocycle ranks differ");
  g.require_member(x, "translation");
  const auto bounds = box.intersection_with_translate(x);
  if (!bounds) return {};
  CompensatedComplexSum s;
  for_each_in_box(bounds->lower, bounds->upper, [&](const LatticeElement& y) { s.add(u(-y, x)); });
  return s.value() / static_cast<double>(box.cardinality());
}

Complex rep_inner_product(const Cocycle& u, const FolnerBox& box, const LatticeElement& x) {
  const auto& g = u.group();
  if (!g.is_free() || g.rank() != box.rank()) throw RankMismatch("box and cocycle ranks differ");
  g.require_member(x, "translation");
  const RealMatrix* a = u.matrix_data();
  if (!a) return rep_inner_product_enumerated(u, box, x);
  const auto bounds = box.intersection_with_translate(x);
  if (!bounds) return {};
  // sum_{y in box} exp(-i y.(Ax)) factors over coordinates
  Complex total{1.0, 0.0};
  for (std::size_t j = 0; j < g.rank(); ++j) {
    long double ax = 0.0L;
    for (std::size_t k = 0; k < g.rank(); ++k) {
      ax += static_cast<long double>((*a)(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))) * static_cast<long double>(x[k]);
    }
    const double theta = canonical_angle(-static_cast<double>(std::remainder(ax, static_cast<long double>(kTwoPi))));
    total *= exponential_sum(bounds->lower[j], bounds->upper[j], theta);
  }
  return total / static_cast<double>(box.cardinality());
}

ComplexMatrix windowed_regular_matrix(const Cocycle& u, const FolnerBox& window, const LatticeElement& x, std::int64_t cap) {
  const auto& g = u.group();
  if (!g.is_free() || g.rank() != window.rank()) throw RankMismatch("window and cocycle ranks differ");
  const auto card = window.cardinality();
  if (card > cap) throw CapExceeded("window size " + std::to_string(card) + " exceeds cap " + std::to_string(cap));
  const auto n = static_cast<Eigen::Index>(card);
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (const auto& y : window.elements()) {
    const auto z = y - x;
    if (!window.contains(z)) continue;
    m(static_cast<Eigen::Index>(window_index(window, y)), static_cast<Eigen::Index>(window_index(window, z))) = u(-y, x);
  }
  return m;
}

double weak_containment_diag(const TruncatedVector& phi, const LatticeElement& x) {
  const auto& g = phi.group();
  g.require_member(x, "translation");
  CompensatedSum s;
  for (const auto& [z, value] : phi.values()) s.add(std::abs(value) * std::abs(phi.at(g.add(x, z))));
  return std::clamp(s.value(), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// CcrPair

CcrPair::CcrPair(BilinearMap sigma, std::optional<FolnerBox> window, std::int64_t cap) : sigma_(std::move(sigma)), window_(std::move(window)) {
  const auto& b = sigma_.right();
  if (b.is_finite()) {
    if (window_) throw ValidationError("finite B is realised exactly; drop the window");
    require_finite_order(b, cap, "CCR pair");
    basis_ = b.elements();
    return;
  }
  if (!b.is_free()) throw ValidationError("CCR pairs need B finite or B = Z^Q");
  if (!window_) throw ValidationError("B = " + b.to_string() + " needs a window box");
  if (window_->rank() != b.rank()) throw RankMismatch("window rank differs from B");
  if (window_->cardinality() > cap) throw CapExceeded("CCR window exceeds cap " + std::to_string(cap));
  basis_ = window_->elements();
}

std::size_t CcrPair::index_of(const LatticeElement& b) const {
  return window_ ? window_index(*window_, b) : sigma_.right().index_of(b);
}

ComplexMatrix CcrPair::v(const LatticeElement& a) const {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m(k, k) = sigma_(a, basis_[static_cast<std::size_t>(k)]);
  return m;
}

ComplexMatrix CcrPair::w(const LatticeElement& b) const {
  const auto& grp = sigma_.right();
  grp.require_member(b, "translation");
  const auto n = static_cast<Eigen::Index>(basis_.size());
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (const auto& c : basis_) {
    const auto target = grp.add(c, b);
    if (window_ && !window_->contains(target)) continue;
    m(static_cast<Eigen::Index>(index_of(target)), static_cast<Eigen::Index>(index_of(c))) = 1.0;
  }
  return m;
}

CcrCheck CcrPair::check(const std::vector<std::pair<LatticeElement, LatticeElement>>& samples) const {
  CcrCheck out;
  out.windowed = windowed();
  for (const auto& [a, b] : samples) {
    const ComplexMatrix va = v(a), wb = w(b);
    out.relation_residual = std::max(out.relation_residual, max_abs_entry(va * wb - sigma_(a, b) * wb * va));
    out.boundary_defect = std::max(out.boundary_defect, unitarity_residual(wb));
  }
  return out;
}

ProjectiveRep CcrPair::joint() const {
  if (windowed()) throw ValidationError("the joint representation needs a finite B");
  const std::size_t p = sigma_.left().rank();
  auto self = *this;
  return ProjectiveRep(
      sigma_.lift(), basis_.size(),
      [self, p](const LatticeElement& x) {
        std::vector<std::int64_t> a(x.coords().begin(), x.coords().begin() + static_cast<std::ptrdiff_t>(p));
        std::vector<std::int64_t> b(x.coords().begin() + static_cast<std::ptrdiff_t>(p), x.coords().end());
        return (self.v(LatticeElement(std::move(a))) * self.w(LatticeElement(std::move(b)))).eval();
      },
      "V_sigma(a) lambda_B(b)");
}

// ---------------------------------------------------------------------------
// Fell absorption

ComplexMatrix fell_intertwiner(const ProjectiveRep& v_rep, std::int64_t cap) {
  const auto& g = v_rep.group();
  require_finite_order(g, cap, "Fell intertwiner");
  const auto d = static_cast<Eigen::Index>(v_rep.dimension());
  const std::int64_t dim = checked_mul(g.order(), d);
  if (dim > cap) throw CapExceeded("Fell check dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
  ComplexMatrix w = ComplexMatrix::Zero(dim, dim);
  const auto elems = g.elements();
  for (std::size_t k = 0; k < elems.size(); ++k) {
    const auto off = static_cast<Eigen::Index>(k) * d;
    w.block(off, off, d, d) = v_rep(g.negate(elems[k]));
  }
  return w;
}

double spectral_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) throw RankMismatch("spectra of different sizes");
  const Eigen::VectorXcd ea = Eigen::ComplexEigenSolver<ComplexMatrix>(a, false).eigenvalues();
  const Eigen::VectorXcd eb = Eigen::ComplexEigenSolver<ComplexMatrix>(b, false).eigenvalues();
  std::vector<bool> used(static_cast<std::size_t>(eb.size()), false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < ea.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < eb.size(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double dist = std::abs(ea[i] - eb[j]);
      if (dist < best_d) {
        best_d = dist;
        best = static_cast<std::size_t>(j);
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

FellReport fell_check(const Cocycle& u, const ProjectiveRep& v_rep, std::int64_t cap) {
  const auto& g = u.group();
  if (!(v_rep.group() == g)) throw RankMismatch("cocycle and representation live on different groups");
  const ComplexMatrix w = fell_intertwiner(v_rep, cap);
  const Cocycle uv = Cocycle::product({u, v_rep.cocycle()});
  const auto d = static_cast<Eigen::Index>(v_rep.dimension());
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const auto elems = g.elements();

  struct Row {
    double conj = 0.0, spec = 0.0;
  };
  const auto rows = parallel_map<Row>(elems.size(), [&](std::size_t k) {
    const auto& x = elems[k];
    const ComplexMatrix lhs = Eigen::kroneckerProduct(regular_rep_matrix(u, x, cap), v_rep(x)).eval();
    const ComplexMatrix rhs = Eigen::kroneckerProduct(regular_rep_matrix(uv, x, cap), id).eval();
    return Row{max_abs_entry(w * lhs * w.adjoint() - rhs), spectral_distance(lhs, rhs)};
  });
  FellReport report;
  report.dimension = static_cast<std::size_t>(w.rows());
  report.unitarity_residual = unitarity_residual(w);
  for (const auto& r : rows) {
    report.conjugation_residual = std::max(report.conjugation_residual, r.conj);
    report.spectral_distance = std::max(report.spectral_distance, r.spec);
  }
  return report;
}

}  // namespace twistlab
