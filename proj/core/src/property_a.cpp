#include "coarse/property_a.hpp"

#include <algorithm>
#include <cmath>

#include "coarse/error.hpp"

namespace coarse {

Witness Witness::ball_average(SpacePtr space, int radius) {
  if (!space || space->kind() != Space::Kind::lattice) {
    throw InvalidInput("ball-average witness needs a lattice window");
  }
  if (!space->counting_measure()) throw InvalidInput("ball-average witness needs counting measure");
  if (radius < 0) throw InvalidInput("witness radius must be >= 0");
  if (2 * radius > space->window()->radius) {
    throw InvalidInput("window too small for witness radius plus support margin (need W >= 2R)");
  }
  Witness w;
  w.space_ = std::move(space);
  w.ball_radius_ = radius;
  w.support_radius_ = radius;
  w.ball_ = ball_offsets(w.space_->dim(), radius);
  return w;
}

Witness Witness::table(SpacePtr space, std::vector<Profile> profiles) {
  if (!space) throw InvalidInput("witness needs a space");
  if (profiles.size() != space->size()) throw InvalidInput("one witness profile per point required");
  Witness w;
  w.space_ = std::move(space);
  for (PointId x = 0; x < profiles.size(); ++x) {
    auto& p = profiles[x];
    std::sort(p.begin(), p.end());
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto [z, v] = p[i];
      if (z >= w.space_->size()) throw InvalidInput("witness support point out of range");
      if (i > 0 && p[i - 1].first == z) throw InvalidInput("witness profile repeats a point");
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidInput("witness profiles must be real and nonnegative");
      }
      norm_sq += w.space_->weight(z) * v * v;
      w.support_radius_ = std::max(w.support_radius_, w.space_->distance(x, z));
    }
    if (std::abs(norm_sq - 1.0) > 1e-12) throw InvalidInput("witness profile is not a unit vector");
  }
  w.profiles_ = std::move(profiles);
  return w;
}

double Witness::overlap(PointId x, PointId y) const {
  if (is_ball()) {
    const Space& s = *space_;
    const Coord& cx = s.coord(x);
    const Coord& cy = s.coord(y);
    if (s.ambient_distance(cx, cy) > 2 * ball_radius_) return 0.0;
    std::size_t common = 0;
    for (const auto& o : ball_) {
      if (s.ambient_distance(cx + o, cy) <= ball_radius_) ++common;
    }
    return static_cast<double>(common) / static_cast<double>(ball_.size());
  }
  const auto& a = profiles_[x];
  const auto& b = profiles_[y];
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      acc += space_->weight(a[i].first) * a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return std::clamp(acc, 0.0, 1.0);
}

double Witness::variation(double r) const {
  double sup = 0.0;
  for (PointId x = 0; x < space_->size(); ++x)
    for (PointId y : space_->ball(x, r)) sup = std::max(sup, distance_squared(x, y));
  return std::sqrt(std::max(0.0, sup));
}

BandKernel truncate(const BandKernel& k, const Witness& phi) {
  if (k.space() != phi.space()) throw InvalidInput("kernel and witness live on different spaces");
  KernelBuilder b(k.space(), std::min(k.propagation(), 2.0 * phi.support_radius()));
  for (PointId x = 0; x < k.size(); ++x) {
    for (const auto& e : k.row(x)) {
      const double ov = phi.overlap(x, e.col);
      if (ov != 0.0) b.add(x, e.col, ov * e.value);
    }
  }
  return std::move(b).build();
}

double truncation_error_bound(const BandKernel& k, const Witness& phi) {
  if (k.space() != phi.space()) throw InvalidInput("kernel and witness live on different spaces");
  const Space& s = *k.space();
  double worst = 0.0;
  for (PointId x = 0; x < s.size(); ++x) {
    double acc = 0.0;
    for (PointId y : s.ball(x, k.propagation())) acc += s.weight(y) * phi.distance_squared(x, y);
    worst = std::max(worst, acc);
  }
  return 0.5 * k.sup_norm() * worst;
}

TruncationReport truncation_check(const BandKernel& k, const Witness& phi) {
  TruncationReport report;
  const BandKernel truncated = truncate(k, phi);
  report.bound = truncation_error_bound(k, phi);
  report.measured = operator_norm(add(k, truncated, -1.0));
  report.norm = operator_norm(k);
  report.truncated_norm = operator_norm(truncated);
  report.propagation = truncated.propagation();
  return report;
}

}  // namespace coarse
