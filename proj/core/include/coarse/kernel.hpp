#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "coarse/space.hpp"

namespace coarse {

using Complex = std::complex<double>;

/// Per-point amplitudes; the inner product is weighted by the space measure.
using Vector = std::vector<Complex>;

Complex inner(const Space& space, const Vector& f, const Vector& g);
double norm(const Space& space, const Vector& f);

struct KernelEntry {
  PointId col = 0;
  Complex value;
};

/// Controlled kernel k on a finite space: entries are stored only for pairs
/// with d(x,y) <= propagation, so Op(k) is a band operator by construction.
/// Rows are kept in compressed form, columns sorted.
class BandKernel {
 public:
  /// The zero kernel.
  BandKernel(SpacePtr space, double propagation);

  const SpacePtr& space() const noexcept { return space_; }
  double propagation() const noexcept { return propagation_; }
  std::size_t size() const noexcept { return row_ptr_.size() - 1; }
  std::span<const KernelEntry> row(PointId x) const {
    return {entries_.data() + row_ptr_[x], entries_.data() + row_ptr_[x + 1]};
  }
  Complex at(PointId x, PointId y) const;
  double sup_norm() const noexcept { return sup_norm_; }
  std::size_t nonzeros() const noexcept { return entries_.size(); }
  /// k(x,y) == conj(k(y,x)) within tol (relative to sup_norm).
  bool is_self_adjoint(double tol = 1e-12) const;

 private:
  friend class KernelBuilder;
  SpacePtr space_;
  double propagation_ = 0.0;
  std::vector<std::size_t> row_ptr_;
  std::vector<KernelEntry> entries_;
  double sup_norm_ = 0.0;
};

/// Accumulates entries; duplicates are summed. Adding a pair farther apart
/// than the propagation throws InvalidInput.
class KernelBuilder {
 public:
  KernelBuilder(SpacePtr space, double propagation);
  void add(PointId x, PointId y, Complex value);
  /// Entries whose sum is exactly zero are dropped.
  BandKernel build() &&;

 private:
  struct Triplet {
    PointId row;
    PointId col;
    Complex value;
  };
  SpacePtr space_;
  double propagation_;
  std::vector<Triplet> triplets_;
};

/// One band of a lattice kernel: k(x, x + offset) = value.
struct Band {
  Coord offset{};
  Complex value;
};

/// Identity operator: k(x,y) = delta_xy / w(x).
BandKernel identity_kernel(const SpacePtr& space);
/// Multiplication operator phi(Q).
BandKernel multiplication_kernel(const SpacePtr& space,
                                 const std::function<Complex(PointId)>& phi);
/// Constant-coefficient lattice kernel from bands, zero outside the window
/// (wrapped on periodic windows).
BandKernel lattice_kernel(const SpacePtr& space, std::span<const Band> bands);
/// Nearest-neighbour adjacency: 1 at l1 distance one.
BandKernel adjacency_kernel(const SpacePtr& space);

/// (Op(k) f)(x) = sum_y w(y) k(x,y) f(y).
Vector op_apply(const BandKernel& k, const Vector& f);
/// k*(x,y) = conj(k(y,x)); same propagation.
BandKernel op_adjoint(const BandKernel& k);
/// (k * l)(x,y) = sum_z w(z) k(x,z) l(z,y); propagation d(k) + d(l).
/// Sums run over the window only (zero padding outside).
BandKernel op_compose(const BandKernel& k, const BandKernel& l);

BandKernel add(const BandKernel& k, const BandKernel& l, Complex alpha = 1.0);
BandKernel scale(const BandKernel& k, Complex alpha);
/// Entrywise transform; zero results are dropped, propagation kept.
BandKernel map_entries(const BandKernel& k,
                       const std::function<Complex(PointId, PointId, Complex)>& fn);
/// phi(Q) Op(k): entries phi(x) k(x,y).
BandKernel left_multiply(const std::function<Complex(PointId)>& phi, const BandKernel& k);
/// Op(k) phi(Q): entries k(x,y) phi(y).
BandKernel right_multiply(const BandKernel& k, const std::function<Complex(PointId)>& phi);
BandKernel restrict_rows(const BandKernel& k, std::span<const char> rows);
BandKernel restrict_cols(const BandKernel& k, std::span<const char> cols);

/// Matrix of Op(k) in the orthonormal basis w(x)^{-1/2} delta_x, i.e.
/// sqrt(w(x)) k(x,y) sqrt(w(y)). Its operator norm equals that of Op(k).
Eigen::MatrixXcd to_dense(const BandKernel& k);

/// min of the row/column Schur value and V(d(k)) sup|k|; always an upper
/// bound for the operator norm.
double schur_bound(const BandKernel& k);

struct NormOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 200000;
};

/// Largest singular value from the Krylov space of the power iteration on
/// Op(k)* Op(k) (Lanczos, fixed start vector). Stops when the top Ritz value
/// moves by less than tolerance (relative) over 8 steps. Throws
/// ConvergenceError carrying the residual when the iteration budget runs out.
double operator_norm(const BandKernel& k, const NormOptions& options = {});

/// x -> ||1_{B_x(r)} Op(k)||, the largest singular value of the rows B_x(r).
std::vector<double> local_norm_profile(const BandKernel& k, double r);

struct LocalizationBound {
  double lhs = 0.0;  ///< ||Op(k)||
  double rhs = 0.0;  ///< N(d(k)+1)^{1/2} sup_x ||1_{B_x(1)} Op(k)||
  double capacity = 0.0;
  bool holds(double tol = 1e-9) const { return lhs <= rhs + tol; }
};

LocalizationBound norm_localization_check(const BandKernel& k);

}  // namespace coarse
