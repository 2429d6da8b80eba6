#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "coarse/space.hpp"

namespace coarse {

/// A subset of a space. On lattice windows a subset also knows its
/// membership at ambient points outside the window, so half-lines and
/// complements of bounded sets shrink and thicken as they would in Z^d.
/// Sets built from an explicit window mask contain no outside points.
class Subset {
 public:
  using Predicate = std::function<bool(const Coord&)>;

  static Subset from_mask(SpacePtr space, std::vector<char> mask);
  static Subset from_points(SpacePtr space, std::span<const PointId> points);
  /// Ambient region given by a predicate on Z^d (lattice windows only).
  static Subset from_predicate(SpacePtr space, Predicate predicate);
  static Subset everything(SpacePtr space);
  static Subset nothing(SpacePtr space);

  const SpacePtr& space() const noexcept { return space_; }
  bool contains(PointId x) const { return mask_[x] != 0; }
  /// Membership of an ambient lattice point; falls back to the window mask
  /// on spaces without an ambient lattice.
  bool contains_ambient(const Coord& c) const;
  const std::vector<char>& mask() const noexcept { return mask_; }
  std::vector<PointId> points() const;
  std::size_t count() const;
  bool none() const { return count() == 0; }

  /// Window-level comparisons.
  bool is_subset_of(const Subset& other) const;
  bool same_on_window(const Subset& other) const;

  Subset intersect(const Subset& other) const;
  Subset unite(const Subset& other) const;
  Subset complement() const;

 private:
  Subset(SpacePtr space, std::vector<char> mask, std::shared_ptr<const Predicate> ambient);
  bool ambient_lattice() const;

  SpacePtr space_;
  std::vector<char> mask_;
  std::shared_ptr<const Predicate> ambient_;
};

/// F_(r) = {x : d(x, F) <= r}.
Subset thicken(const Subset& set, double r);
/// F^(r) = {x : d(x, F^c) > r}. Outside-window points of an explicit mask
/// count as complement, so shrinking is conservative at the window edge.
Subset shrink(const Subset& set, double r);

/// d(x, S); +inf when no member lies within search_cap (lattice) or S is empty.
double distance_to(const Subset& set, PointId x, double search_cap);

/// Affine sequence a_n = n * period * direction standing in for a point of
/// the corona.
struct DirectionProxy {
  Coord direction{};
  std::int64_t period = 1;
  Coord point(std::int64_t n) const { return scaled(direction, n * period); }
  std::string label(int dim) const;
};

/// Symbolic filter base: generator(r) yields a generating set at scale r,
/// decreasing in r.
struct FilterSpec {
  struct Frechet {};
  struct HalfSpace {
    std::array<double, kMaxDim> direction{};
  };
  /// Generated by the complements L_(r)^c.
  struct Obstacle {
    std::vector<Coord> points;
  };
  /// Complements of r-neighbourhoods of the hyperplane sublattices
  /// {y : <normal, y> = 0}.
  struct Grassmann {
    std::vector<Coord> normals;
  };
  struct Intersection {
    std::vector<FilterSpec> parts;
  };
  /// Tails {a_n : n >= r} of a direction proxy, sampled inside the window.
  struct Proxy {
    DirectionProxy proxy;
  };

  std::variant<Frechet, HalfSpace, Obstacle, Grassmann, Intersection, Proxy> kind;

  static FilterSpec frechet() { return {Frechet{}}; }
  static FilterSpec half_space(std::array<double, kMaxDim> direction) { return {HalfSpace{direction}}; }
  static FilterSpec obstacle(std::vector<Coord> points) { return {Obstacle{std::move(points)}}; }
  static FilterSpec grassmann(std::vector<Coord> normals) { return {Grassmann{std::move(normals)}}; }
  static FilterSpec intersection(std::vector<FilterSpec> parts) { return {Intersection{std::move(parts)}}; }
  static FilterSpec direction_proxy(DirectionProxy proxy) { return {Proxy{proxy}}; }

  bool is_proxy() const { return std::holds_alternative<Proxy>(kind); }
  std::string name() const;
  Subset generator(const SpacePtr& space, double scale) const;
};

struct CertificateEntry {
  double scale = 0.0;
  double r = 0.0;
  bool pass = false;
  double witness_scale = -1.0;  ///< scale of the generator found inside F^(r)
};

struct CoarseCertificate {
  std::vector<CertificateEntry> entries;
  bool passed() const;
};

/// For each scale and integer r <= r_max, looks for a nonempty generator
/// (on the window) inside shrink(generator(scale), r).
CoarseCertificate is_coarse_certificate(const FilterSpec& filter, const SpacePtr& space,
                                        std::span<const double> scales, double r_max);

/// generator(s) contains generator(t) on the window for consecutive scales.
bool generators_nested(const FilterSpec& filter, const SpacePtr& space,
                       std::span<const double> scales);

struct Cutoff {
  std::vector<double> theta;
  double r = 0.0;
  /// max |theta(x) - theta(y)| / d(x,y) over window pairs.
  double lipschitz = 0.0;
  bool bounds_hold = false;  ///< 1_G <= theta <= 1_F
};

/// theta = d_{F^c} / (d_{F^c} + d_G) for G_(r) inside F. Rejects empty G and
/// violated containment with InvalidInput.
Cutoff cutoff(const Subset& outer, const Subset& inner, double r, double search_cap = -1.0);

/// max over window pairs of |f(x) - f(y)| / d(x,y).
double lipschitz_constant(const Space& space, std::span<const double> values);

/// F in co(xi) at finite horizon: for every integer r in [1, r_max],
/// shrink(F, r) contains all proxy points a_n (n >= horizon) inside the
/// window. An empty sampled tail gives false.
bool coarse_envelope_member(const DirectionProxy& proxy, const Subset& set, double r_max,
                            std::int64_t horizon);

}  // namespace coarse
