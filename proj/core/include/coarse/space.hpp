#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace coarse {

inline constexpr int kMaxDim = 4;

/// Integer lattice coordinate; only the first `dim` components are used,
/// the rest stay zero.
using Coord = std::array<std::int64_t, kMaxDim>;
using PointId = std::size_t;

enum class Boundary { truncate, periodic };

/// Window {-W..W}^d of Z^d.
struct LatticeWindow {
  int dim = 1;
  int radius = 0;
  Boundary boundary = Boundary::truncate;
};

struct Edge {
  PointId u = 0;
  PointId v = 0;
  double length = 1.0;
};

struct SpaceLimits {
  std::size_t max_points = std::size_t{1} << 22;
  // graph spaces keep a dense distance table
  std::size_t max_graph_points = 4096;
};

struct CoordHash {
  std::size_t operator()(const Coord& c) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto v : c) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

/// A finite discrete metric-measure space. Three flavours share the
/// interface: a window of Z^d with the l1 metric, an arbitrary finite subset
/// of Z^d with the l1 metric, and a weighted graph with its path metric.
/// Immutable after construction.
class Space {
 public:
  enum class Kind { lattice, point_cloud, graph };

  Kind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return weights_.size(); }
  int dim() const noexcept { return dim_; }
  bool has_coordinates() const noexcept { return kind_ != Kind::graph; }
  const std::optional<LatticeWindow>& window() const noexcept { return window_; }
  bool periodic() const noexcept {
    return window_ && window_->boundary == Boundary::periodic;
  }

  double distance(PointId a, PointId b) const;
  double weight(PointId x) const { return weights_[x]; }
  std::span<const double> weights() const noexcept { return weights_; }
  bool counting_measure() const noexcept { return counting_; }

  const Coord& coord(PointId x) const { return coords_[x]; }
  /// Index of an ambient coordinate, wrapping on periodic windows.
  std::optional<PointId> find(const Coord& c) const;
  /// Wraps onto the torus for periodic windows, identity otherwise.
  Coord wrap(const Coord& c) const;
  /// l1 distance in the ambient lattice (torus distance on periodic windows).
  std::int64_t ambient_distance(const Coord& a, const Coord& b) const;

  /// Closed ball {y : d(x,y) <= r}, sorted by point id.
  std::vector<PointId> ball(PointId x, double r) const;
  double ball_measure(PointId x, double r) const;

  /// Distance from x to the window boundary, W - max_i |x_i|; +inf when the
  /// space has no artificial edge (graphs, point clouds, periodic windows).
  double edge_distance(PointId x) const;
  /// Lattice origin, or point 0 for other spaces.
  PointId origin() const;

  /// nu = min_x mu(B_x(1/2)).
  double nu() const;

  std::shared_ptr<const Space> with_weights(std::vector<double> weights) const;

 private:
  friend std::shared_ptr<const Space> build_lattice_window(int, int, Boundary, SpaceLimits);
  friend std::shared_ptr<const Space> build_graph_space(std::size_t, std::span<const Edge>,
                                                        SpaceLimits);
  friend std::shared_ptr<const Space> build_point_cloud(int, std::vector<Coord>);

  std::size_t lattice_index(const Coord& c) const;

  Kind kind_ = Kind::lattice;
  int dim_ = 1;
  std::optional<LatticeWindow> window_;
  std::vector<Coord> coords_;
  std::unordered_map<Coord, PointId, CoordHash> cloud_index_;
  std::vector<double> table_;  // graph distances, row-major
  std::vector<double> weights_;
  bool counting_ = true;
};

using SpacePtr = std::shared_ptr<const Space>;

SpacePtr build_lattice_window(int dim, int radius, Boundary boundary = Boundary::truncate,
                              SpaceLimits limits = {});
/// Shortest-path metric of a connected graph with positive edge lengths.
SpacePtr build_graph_space(std::size_t vertex_count, std::span<const Edge> edges,
                           SpaceLimits limits = {});
/// Finite subset of Z^d with the l1 metric; points must be distinct.
SpacePtr build_point_cloud(int dim, std::vector<Coord> points);

Coord make_coord(std::initializer_list<std::int64_t> values);
Coord operator+(const Coord& a, const Coord& b);
Coord operator-(const Coord& a, const Coord& b);
Coord scaled(const Coord& a, std::int64_t factor);
std::int64_t l1_norm(const Coord& a);

/// Offsets o in Z^dim with |o|_1 <= radius, lexicographic order.
std::vector<Coord> ball_offsets(int dim, std::int64_t radius);
/// Offsets o in Z^dim with |o|_1 == radius.
std::vector<Coord> sphere_offsets(int dim, std::int64_t radius);

/// r -> V(r) = sup_x mu(B_x(r)), the supremum taken over window-interior
/// points (distance >= r from the edge) so the boundary does not deflate it.
class VolumeGrowth {
 public:
  explicit VolumeGrowth(SpacePtr space) : space_(std::move(space)) {}
  /// Throws InvalidInput("insufficient window") when r exceeds the window radius.
  double operator()(double r) const;

 private:
  SpacePtr space_;
};

inline VolumeGrowth volume_growth(SpacePtr space) { return VolumeGrowth(std::move(space)); }

/// Maximal separated subset with the capacity bound N(r) = V(2r+2)/nu.
struct Net {
  std::vector<PointId> centers;
  double separation = 1.0;
  std::function<double(double)> capacity_bound;
};

Net greedy_net(const SpacePtr& space, double separation = 1.0);

struct CapacityRow {
  double radius = 0.0;
  double bound = 0.0;
  std::size_t measured = 0;
};

struct NetCheck {
  bool separated = false;
  bool covering = false;
  std::vector<CapacityRow> capacity;
  bool ok() const;
};

NetCheck check_net(const SpacePtr& space, const Net& net, std::span<const double> radii);

/// Exhaustive check of symmetry, identity of indiscernibles and the triangle
/// inequality. Refuses spaces above max_points.
bool check_metric_axioms(const Space& space, std::size_t max_points = 1000);

}  // namespace coarse
