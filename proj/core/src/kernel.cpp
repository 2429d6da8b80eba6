#include "coarse/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "coarse/error.hpp"
#include "coarse/linalg.hpp"
#include "coarse/parallel.hpp"

namespace coarse {
namespace {

void require_same_space(const BandKernel& k, const BandKernel& l) {
  if (k.space() != l.space()) throw InvalidInput("kernels live on different spaces");
}

void require_vector(const Space& s, const Vector& f) {
  if (f.size() != s.size()) throw InvalidInput("vector size does not match space");
}

// Deterministic, sign-mixed start vector for the power iteration.
double start_component(std::size_t i) {
  std::uint64_t z = (static_cast<std::uint64_t>(i) + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return 1.0 + 0.5 * (static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5);
}

}  // namespace

Complex inner(const Space& s, const Vector& f, const Vector& g) {
  require_vector(s, f);
  require_vector(s, g);
  Complex acc = 0.0;
  for (PointId x = 0; x < s.size(); ++x) acc += s.weight(x) * std::conj(f[x]) * g[x];
  return acc;
}

double norm(const Space& s, const Vector& f) { return std::sqrt(std::max(0.0, inner(s, f, f).real())); }

// ---------------------------------------------------------------------------

BandKernel::BandKernel(SpacePtr space, double propagation)
    : space_(std::move(space)), propagation_(propagation) {
  if (!space_) throw InvalidInput("kernel needs a space");
  if (!(propagation >= 0.0)) throw InvalidInput("propagation must be >= 0");
  row_ptr_.assign(space_->size() + 1, 0);
}

Complex BandKernel::at(PointId x, PointId y) const {
  auto r = row(x);
  auto it = std::lower_bound(r.begin(), r.end(), y,
                             [](const KernelEntry& e, PointId col) { return e.col < col; });
  if (it != r.end() && it->col == y) return it->value;
  return 0.0;
}

bool BandKernel::is_self_adjoint(double tol) const {
  const double scale = std::max(1.0, sup_norm_);
  for (PointId x = 0; x < size(); ++x)
    for (const auto& e : row(x))
      if (std::abs(e.value - std::conj(at(e.col, x))) > tol * scale) return false;
  return true;
}

KernelBuilder::KernelBuilder(SpacePtr space, double propagation)
    : space_(std::move(space)), propagation_(propagation) {
  if (!space_) throw InvalidInput("kernel needs a space");
  if (!(propagation >= 0.0)) throw InvalidInput("propagation must be >= 0");
}

void KernelBuilder::add(PointId x, PointId y, Complex value) {
  if (x >= space_->size() || y >= space_->size()) throw InvalidInput("kernel index out of range");
  if (space_->distance(x, y) > propagation_) {
    throw InvalidInput("kernel entry at distance " + std::to_string(space_->distance(x, y)) +
                       " exceeds propagation " + std::to_string(propagation_));
  }
  triplets_.push_back({x, y, value});
}

BandKernel KernelBuilder::build() && {
  std::sort(triplets_.begin(), triplets_.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  BandKernel k(space_, propagation_);
  k.entries_.reserve(triplets_.size());
  std::vector<std::size_t> counts(space_->size(), 0);
  for (std::size_t i = 0; i < triplets_.size();) {
    std::size_t j = i;
    Complex sum = 0.0;
    while (j < triplets_.size() && triplets_[j].row == triplets_[i].row &&
           triplets_[j].col == triplets_[i].col) {
      sum += triplets_[j].value;
      ++j;
    }
    if (sum != Complex(0.0)) {
      k.entries_.push_back({triplets_[i].col, sum});
      ++counts[triplets_[i].row];
      k.sup_norm_ = std::max(k.sup_norm_, std::abs(sum));
    }
    i = j;
  }
  for (std::size_t x = 0; x < counts.size(); ++x) k.row_ptr_[x + 1] = k.row_ptr_[x] + counts[x];
  triplets_.clear();
  return k;
}

// ---------------------------------------------------------------------------

BandKernel identity_kernel(const SpacePtr& space) {
  KernelBuilder b(space, 0.0);
  for (PointId x = 0; x < space->size(); ++x) b.add(x, x, 1.0 / space->weight(x));
  return std::move(b).build();
}

BandKernel multiplication_kernel(const SpacePtr& space, const std::function<Complex(PointId)>& phi) {
  KernelBuilder b(space, 0.0);
  for (PointId x = 0; x < space->size(); ++x) b.add(x, x, phi(x) / space->weight(x));
  return std::move(b).build();
}

BandKernel lattice_kernel(const SpacePtr& space, std::span<const Band> bands) {
  if (!space->has_coordinates()) throw InvalidInput("lattice kernel needs a coordinate space");
  double prop = 0.0;
  for (const auto& band : bands) prop = std::max(prop, static_cast<double>(l1_norm(band.offset)));
  KernelBuilder b(space, prop);
  for (PointId x = 0; x < space->size(); ++x) {
    for (const auto& band : bands) {
      if (auto y = space->find(space->coord(x) + band.offset)) b.add(x, *y, band.value);
    }
  }
  return std::move(b).build();
}

BandKernel adjacency_kernel(const SpacePtr& space) {
  std::vector<Band> bands;
  for (const auto& o : sphere_offsets(space->dim(), 1)) bands.push_back({o, 1.0});
  return lattice_kernel(space, bands);
}

// ---------------------------------------------------------------------------

Vector op_apply(const BandKernel& k, const Vector& f) {
  const Space& s = *k.space();
  require_vector(s, f);
  Vector out(s.size(), 0.0);
  for (PointId x = 0; x < s.size(); ++x) {
    Complex acc = 0.0;
    for (const auto& e : k.row(x)) acc += s.weight(e.col) * e.value * f[e.col];
    out[x] = acc;
  }
  return out;
}

BandKernel op_adjoint(const BandKernel& k) {
  KernelBuilder b(k.space(), k.propagation());
  for (PointId x = 0; x < k.size(); ++x)
    for (const auto& e : k.row(x)) b.add(e.col, x, std::conj(e.value));
  return std::move(b).build();
}

BandKernel op_compose(const BandKernel& k, const BandKernel& l) {
  require_same_space(k, l);
  const Space& s = *k.space();
  KernelBuilder b(k.space(), k.propagation() + l.propagation());
  std::vector<Complex> acc(s.size(), 0.0);
  std::vector<char> touched(s.size(), 0);
  std::vector<PointId> cols;
  for (PointId x = 0; x < s.size(); ++x) {
    for (const auto& kz : k.row(x)) {
      const Complex a = s.weight(kz.col) * kz.value;
      for (const auto& ly : l.row(kz.col)) {
        if (!touched[ly.col]) {
          touched[ly.col] = 1;
          cols.push_back(ly.col);
        }
        acc[ly.col] += a * ly.value;
      }
    }
    for (PointId y : cols) {
      b.add(x, y, acc[y]);
      acc[y] = 0.0;
      touched[y] = 0;
    }
    cols.clear();
  }
  return std::move(b).build();
}

BandKernel add(const BandKernel& k, const BandKernel& l, Complex alpha) {
  require_same_space(k, l);
  KernelBuilder b(k.space(), std::max(k.propagation(), l.propagation()));
  for (PointId x = 0; x < k.size(); ++x) {
    for (const auto& e : k.row(x)) b.add(x, e.col, e.value);
    for (const auto& e : l.row(x)) b.add(x, e.col, alpha * e.value);
  }
  return std::move(b).build();
}

BandKernel scale(const BandKernel& k, Complex alpha) {
  return map_entries(k, [alpha](PointId, PointId, Complex v) { return alpha * v; });
}

BandKernel map_entries(const BandKernel& k,
                       const std::function<Complex(PointId, PointId, Complex)>& fn) {
  KernelBuilder b(k.space(), k.propagation());
  for (PointId x = 0; x < k.size(); ++x)
    for (const auto& e : k.row(x)) b.add(x, e.col, fn(x, e.col, e.value));
  return std::move(b).build();
}

BandKernel left_multiply(const std::function<Complex(PointId)>& phi, const BandKernel& k) {
  return map_entries(k, [&](PointId x, PointId, Complex v) { return phi(x) * v; });
}

BandKernel right_multiply(const BandKernel& k, const std::function<Complex(PointId)>& phi) {
  return map_entries(k, [&](PointId, PointId y, Complex v) { return v * phi(y); });
}

BandKernel restrict_rows(const BandKernel& k, std::span<const char> rows) {
  if (rows.size() != k.size()) throw InvalidInput("row mask size does not match space");
  return map_entries(k, [&](PointId x, PointId, Complex v) { return rows[x] ? v : Complex(0.0); });
}

BandKernel restrict_cols(const BandKernel& k, std::span<const char> cols) {
  if (cols.size() != k.size()) throw InvalidInput("column mask size does not match space");
  return map_entries(k, [&](PointId, PointId y, Complex v) { return cols[y] ? v : Complex(0.0); });
}

Eigen::MatrixXcd to_dense(const BandKernel& k) {
  const Space& s = *k.space();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(s.size(), s.size());
  for (PointId x = 0; x < s.size(); ++x)
    for (const auto& e : k.row(x))
      m(x, e.col) = std::sqrt(s.weight(x) * s.weight(e.col)) * e.value;
  return m;
}

// ---------------------------------------------------------------------------

double schur_bound(const BandKernel& k) {
  const Space& s = *k.space();
  std::vector<double> col_sum(s.size(), 0.0);
  double row_max = 0.0;
  for (PointId x = 0; x < s.size(); ++x) {
    double row_sum = 0.0;
    for (const auto& e : k.row(x)) {
      row_sum += s.weight(e.col) * std::abs(e.value);
      col_sum[e.col] += s.weight(x) * std::abs(e.value);
    }
    row_max = std::max(row_max, row_sum);
  }
  const double col_max = col_sum.empty() ? 0.0 : *std::max_element(col_sum.begin(), col_sum.end());
  const double schur = std::sqrt(row_max * col_max);
  // V(d(k)) of the finite space itself, so the bound stays valid at the edge
  double volume = 0.0;
  if (s.kind() == Space::Kind::lattice && s.counting_measure() && k.propagation() <= s.window()->radius) {
    volume = s.ball_measure(s.origin(), k.propagation());
  } else {
    for (PointId x = 0; x < s.size(); ++x) volume = std::max(volume, s.ball_measure(x, k.propagation()));
  }
  return std::min(schur, volume * k.sup_norm());
}

namespace {

// Largest eigenvalue of the symmetric tridiagonal (alpha, beta) by Sturm
// bisection.
double top_tridiagonal_eigenvalue(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const std::size_t m = alpha.size();
  double lo = *std::max_element(alpha.begin(), alpha.end());
  double hi = lo;
  for (std::size_t i = 0; i < m; ++i) {
    const double radius = (i > 0 ? std::abs(beta[i - 1]) : 0.0) + (i + 1 < m ? std::abs(beta[i]) : 0.0);
    hi = std::max(hi, alpha[i] + radius);
  }
  auto count_above = [&](double x) {
    std::size_t below = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      d = alpha[i] - x - (i > 0 ? beta[i - 1] * beta[i - 1] / d : 0.0);
      if (d == 0.0) d = -1e-300;
      below += d < 0.0;
    }
    return m - below;
  };
  for (int iter = 0; iter < 200 && hi - lo > 2e-16 * std::max(std::abs(hi), std::abs(lo)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_above(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double operator_norm(const BandKernel& k, const NormOptions& options) {
  const Space& s = *k.space();
  const std::size_t n = s.size();
  if (k.nonzeros() == 0) return 0.0;
  std::vector<double> root_w(n);
  for (PointId x = 0; x < n; ++x) root_w[x] = std::sqrt(s.weight(x));

  // A = sqrt(w) k sqrt(w) acting on l2; iterate v <- A* A v / |A* A v|
  auto apply = [&](const std::vector<Complex>& v, std::vector<Complex>& out) {
    for (PointId x = 0; x < n; ++x) {
      Complex acc = 0.0;
      for (const auto& e : k.row(x)) acc += e.value * root_w[e.col] * v[e.col];
      out[x] = root_w[x] * acc;
    }
  };
  auto apply_adjoint = [&](const std::vector<Complex>& u, std::vector<Complex>& out) {
    std::fill(out.begin(), out.end(), Complex(0.0));
    for (PointId x = 0; x < n; ++x) {
      const Complex ux = root_w[x] * u[x];
      for (const auto& e : k.row(x)) out[e.col] += std::conj(e.value) * ux;
    }
    for (PointId y = 0; y < n; ++y) out[y] *= root_w[y];
  };
  auto l2 = [](const std::vector<Complex>& v) {
    double acc = 0.0;
    for (const auto& c : v) acc += std::norm(c);
    return std::sqrt(acc);
  };

  auto dot = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
  };

  // Lanczos on A* A: the power iteration's Krylov space, with the top Ritz
  // value taken from the tridiagonal. No reorthogonalization; lost
  // orthogonality only duplicates converged Ritz values.
  std::vector<Complex> prev(n, 0.0), q(n), u(n), w(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = start_component(i);
  const double nq = l2(q);
  for (auto& c : q) c /= nq;

  std::vector<double> alpha, beta;
  double theta = 0.0, checked = -1.0, residual = 0.0;
  const std::size_t check_every = 8;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    apply(q, u);
    apply_adjoint(u, w);
    const double b_prev = beta.empty() ? 0.0 : beta.back();
    for (std::size_t i = 0; i < n; ++i) w[i] -= b_prev * prev[i];
    const double a = dot(q, w).real();
    for (std::size_t i = 0; i < n; ++i) w[i] -= a * q[i];
    alpha.push_back(a);
    const double b = l2(w);
    const bool exhausted = b <= 1e-14 * std::max(std::abs(a), theta) || alpha.size() >= 4 * n + 16;
    if (exhausted || alpha.size() % check_every == 0) {
      theta = top_tridiagonal_eigenvalue(alpha, beta);
      if (theta <= 0.0) return 0.0;
      residual = checked < 0.0 ? b / theta : (theta - checked) / theta;
      if (exhausted || (checked >= 0.0 && theta - checked <= options.tolerance * theta)) return std::sqrt(theta);
      checked = theta;
    }
    beta.push_back(b);
    prev.swap(q);
    for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
  }
  if (residual == 0.0) residual = beta.empty() ? 1.0 : beta.back();
  throw ConvergenceError("norm iteration did not converge; residual " + std::to_string(residual), residual);
}

std::vector<double> local_norm_profile(const BandKernel& k, double r) {
  const Space& s = *k.space();
  std::vector<double> profile(s.size(), 0.0);
  parallel_for(s.size(), [&](std::size_t x) {
    const auto rows = s.ball(x, r);
    std::vector<PointId> cols;
    for (PointId y : rows)
      for (const auto& e : k.row(y)) cols.push_back(e.col);
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    if (cols.empty()) return;
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double wr = std::sqrt(s.weight(rows[i]));
      std::size_t j = 0;
      for (const auto& e : k.row(rows[i])) {
        while (cols[j] != e.col) ++j;
        block(i, j) = wr * std::sqrt(s.weight(e.col)) * e.value;
      }
    }
    profile[x] = largest_singular_value(block);
  });
  return profile;
}

LocalizationBound norm_localization_check(const BandKernel& k) {
  const SpacePtr& space = k.space();
  LocalizationBound out;
  Net net = greedy_net(space);
  out.capacity = net.capacity_bound(k.propagation() + 1.0);
  out.lhs = operator_norm(k);
  auto profile = local_norm_profile(k, 1.0);
  const double sup = profile.empty() ? 0.0 : *std::max_element(profile.begin(), profile.end());
  out.rhs = std::sqrt(out.capacity) * sup;
  return out;
}

}  // namespace coarse
