#pragma once

#include <utility>
#include <vector>

#include "coarse/kernel.hpp"
#include "coarse/space.hpp"

namespace coarse {

/// Property A witness x -> phi(x): a unit vector with nonnegative entries
/// supported in B_x(s). Only real nonnegative profiles are accepted, so
/// 1 - <phi(x),phi(y)> = |phi(x) - phi(y)|^2 / 2 holds exactly.
class Witness {
 public:
  using Profile = std::vector<std::pair<PointId, double>>;

  /// phi(x) = |B_x(R)|^{-1/2} 1_{B_x(R)} with balls taken in the ambient
  /// lattice. Needs a counting-measure lattice window with W >= 2R.
  static Witness ball_average(SpacePtr space, int radius);
  /// Explicit profiles over the same space; validated for unit norm,
  /// nonnegativity and finite support.
  static Witness table(SpacePtr space, std::vector<Profile> profiles);

  const SpacePtr& space() const noexcept { return space_; }
  double support_radius() const noexcept { return support_radius_; }
  bool is_ball() const noexcept { return ball_radius_ >= 0; }
  int ball_radius() const noexcept { return ball_radius_; }

  /// <phi(x), phi(y)>, in [0, 1].
  double overlap(PointId x, PointId y) const;
  /// |phi(x) - phi(y)|^2.
  double distance_squared(PointId x, PointId y) const { return 2.0 - 2.0 * overlap(x, y); }
  /// sup over d(x,y) <= r of |phi(x) - phi(y)|.
  double variation(double r) const;

 private:
  Witness() = default;
  SpacePtr space_;
  double support_radius_ = 0.0;
  int ball_radius_ = -1;
  std::vector<Coord> ball_;  // offsets of B_0(R)
  std::vector<Profile> profiles_;
};

/// T_phi with kernel <phi(x),phi(y)> k(x,y); propagation min(d(k), 2s).
BandKernel truncate(const BandKernel& k, const Witness& phi);

/// (sup|k| / 2) max_x sum_{y in B_x(d(k))} w(y) |phi(x) - phi(y)|^2,
/// an upper bound for ||T - T_phi||.
double truncation_error_bound(const BandKernel& k, const Witness& phi);

struct TruncationReport {
  double bound = 0.0;
  double measured = 0.0;   ///< ||T - T_phi||
  double norm = 0.0;       ///< ||T||
  double truncated_norm = 0.0;  ///< ||T_phi||
  double propagation = 0.0;     ///< d(T_phi)
  bool bound_holds(double tol = 1e-9) const { return measured <= bound + tol; }
  bool contraction_holds(double tol = 1e-9) const { return truncated_norm <= norm + tol; }
};

TruncationReport truncation_check(const BandKernel& k, const Witness& phi);

}  // namespace coarse
