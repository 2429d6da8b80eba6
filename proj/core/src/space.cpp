#include "coarse/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "coarse/error.hpp"

namespace coarse {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

void offsets_rec(int dim, int axis, std::int64_t budget, bool exact, Coord& cur,
                 std::vector<Coord>& out) {
  if (axis == dim - 1) {
    if (exact) {
      cur[axis] = -budget;
      out.push_back(cur);
      if (budget != 0) {
        cur[axis] = budget;
        out.push_back(cur);
      }
    } else {
      for (std::int64_t v = -budget; v <= budget; ++v) {
        cur[axis] = v;
        out.push_back(cur);
      }
    }
    cur[axis] = 0;
    return;
  }
  for (std::int64_t v = -budget; v <= budget; ++v) {
    cur[axis] = v;
    offsets_rec(dim, axis + 1, budget - std::abs(v), exact, cur, out);
  }
  cur[axis] = 0;
}

}  // namespace

Coord make_coord(std::initializer_list<std::int64_t> values) {
  Coord c{};
  int i = 0;
  for (auto v : values) {
    if (i >= kMaxDim) throw InvalidInput("coordinate has more than kMaxDim components");
    c[i++] = v;
  }
  return c;
}

Coord operator+(const Coord& a, const Coord& b) {
  Coord c;
  for (int i = 0; i < kMaxDim; ++i) c[i] = a[i] + b[i];
  return c;
}

Coord operator-(const Coord& a, const Coord& b) {
  Coord c;
  for (int i = 0; i < kMaxDim; ++i) c[i] = a[i] - b[i];
  return c;
}

Coord scaled(const Coord& a, std::int64_t factor) {
  Coord c;
  for (int i = 0; i < kMaxDim; ++i) c[i] = a[i] * factor;
  return c;
}

std::int64_t l1_norm(const Coord& a) {
  std::int64_t s = 0;
  for (auto v : a) s += v < 0 ? -v : v;
  return s;
}

std::vector<Coord> ball_offsets(int dim, std::int64_t radius) {
  std::vector<Coord> out;
  if (radius < 0) return out;
  Coord cur{};
  offsets_rec(dim, 0, radius, false, cur, out);
  return out;
}

std::vector<Coord> sphere_offsets(int dim, std::int64_t radius) {
  std::vector<Coord> out;
  if (radius < 0) return out;
  Coord cur{};
  // exact-radius enumeration: earlier axes spend part of the budget, the
  // last axis takes the remainder with either sign
  offsets_rec(dim, 0, radius, true, cur, out);
  return out;
}

// ---------------------------------------------------------------------------

SpacePtr build_lattice_window(int dim, int radius, Boundary boundary, SpaceLimits limits) {
  if (dim < 1 || dim > kMaxDim) throw InvalidInput("lattice dimension must be in [1, 4]");
  if (radius < 0) throw InvalidInput("window radius must be >= 0");
  const double side = 2.0 * radius + 1.0;
  if (std::pow(side, dim) > static_cast<double>(limits.max_points)) {
    throw InvalidInput("lattice window exceeds the configured point cap (" +
                       std::to_string(limits.max_points) + ")");
  }
  auto space = std::make_shared<Space>();
  space->kind_ = Space::Kind::lattice;
  space->dim_ = dim;
  space->window_ = LatticeWindow{dim, radius, boundary};
  const std::int64_t n_side = 2 * radius + 1;
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(n_side);
  space->coords_.resize(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    Coord c{};
    std::size_t rest = idx;
    for (int axis = dim - 1; axis >= 0; --axis) {
      c[axis] = static_cast<std::int64_t>(rest % n_side) - radius;
      rest /= n_side;
    }
    space->coords_[idx] = c;
  }
  space->weights_.assign(n, 1.0);
  return space;
}

SpacePtr build_point_cloud(int dim, std::vector<Coord> points) {
  if (dim < 1 || dim > kMaxDim) throw InvalidInput("point cloud dimension must be in [1, 4]");
  if (points.empty()) throw InvalidInput("point cloud is empty");
  auto space = std::make_shared<Space>();
  space->kind_ = Space::Kind::point_cloud;
  space->dim_ = dim;
  space->coords_ = std::move(points);
  for (PointId i = 0; i < space->coords_.size(); ++i) {
    auto& c = space->coords_[i];
    for (int a = dim; a < kMaxDim; ++a) c[a] = 0;
    if (!space->cloud_index_.emplace(c, i).second) {
      throw InvalidInput("point cloud contains duplicate points");
    }
  }
  space->weights_.assign(space->coords_.size(), 1.0);
  return space;
}

SpacePtr build_graph_space(std::size_t n, std::span<const Edge> edges, SpaceLimits limits) {
  if (n == 0) throw InvalidInput("graph has no vertices");
  if (n > limits.max_graph_points) {
    throw InvalidInput("graph exceeds the configured point cap (" +
                       std::to_string(limits.max_graph_points) + ")");
  }
  std::vector<std::vector<std::pair<PointId, double>>> adj(n);
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) throw InvalidInput("edge endpoint out of range");
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw InvalidInput("edge lengths must be positive and finite");
    }
    adj[e.u].emplace_back(e.v, e.length);
    adj[e.v].emplace_back(e.u, e.length);
  }
  auto space = std::make_shared<Space>();
  space->kind_ = Space::Kind::graph;
  space->dim_ = 0;
  space->table_.assign(n * n, kInf);
  using Item = std::pair<double, PointId>;
  for (PointId src = 0; src < n; ++src) {
    double* row = &space->table_[src * n];
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    row[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > row[u]) continue;
      for (auto [v, w] : adj[u]) {
        if (d + w < row[v]) {
          row[v] = d + w;
          heap.emplace(row[v], v);
        }
      }
    }
    for (PointId v = 0; v < n; ++v) {
      if (!std::isfinite(row[v])) {
        throw InvalidInput("graph is disconnected: vertices " + std::to_string(src) + " and " +
                           std::to_string(v) + " have infinite distance");
      }
    }
  }
  space->coords_.assign(n, Coord{});
  space->weights_.assign(n, 1.0);
  return space;
}

// ---------------------------------------------------------------------------

std::size_t Space::lattice_index(const Coord& c) const {
  const std::int64_t side = 2 * window_->radius + 1;
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) idx = idx * side + static_cast<std::size_t>(c[a] + window_->radius);
  return idx;
}

Coord Space::wrap(const Coord& c) const {
  if (!periodic()) return c;
  const std::int64_t side = 2 * window_->radius + 1;
  Coord w = c;
  for (int a = 0; a < dim_; ++a) w[a] = floor_mod(c[a] + window_->radius, side) - window_->radius;
  return w;
}

std::optional<PointId> Space::find(const Coord& c) const {
  switch (kind_) {
    case Kind::lattice: {
      Coord w = wrap(c);
      for (int a = 0; a < dim_; ++a) {
        if (w[a] < -window_->radius || w[a] > window_->radius) return std::nullopt;
      }
      return lattice_index(w);
    }
    case Kind::point_cloud: {
      auto it = cloud_index_.find(c);
      if (it == cloud_index_.end()) return std::nullopt;
      return it->second;
    }
    case Kind::graph:
      break;
  }
  return std::nullopt;
}

std::int64_t Space::ambient_distance(const Coord& a, const Coord& b) const {
  std::int64_t s = 0;
  const std::int64_t side = window_ ? 2 * window_->radius + 1 : 0;
  for (int i = 0; i < dim_; ++i) {
    std::int64_t d = a[i] - b[i];
    if (d < 0) d = -d;
    if (periodic()) {
      d %= side;
      d = std::min(d, side - d);
    }
    s += d;
  }
  return s;
}

double Space::distance(PointId a, PointId b) const {
  if (kind_ == Kind::graph) return table_[a * size() + b];
  return static_cast<double>(ambient_distance(coords_[a], coords_[b]));
}

std::vector<PointId> Space::ball(PointId x, double r) const {
  std::vector<PointId> out;
  if (r < 0) return out;
  if (kind_ == Kind::graph) {
    const double* row = &table_[x * size()];
    for (PointId y = 0; y < size(); ++y)
      if (row[y] <= r) out.push_back(y);
    return out;
  }
  const auto radius = static_cast<std::int64_t>(std::floor(r));
  // enumerate offsets when the ball is small compared to the space
  const double ball_size = std::pow(2.0 * radius + 1.0, dim_);
  if (kind_ == Kind::point_cloud && ball_size > static_cast<double>(size())) {
    for (PointId y = 0; y < size(); ++y)
      if (ambient_distance(coords_[x], coords_[y]) <= radius) out.push_back(y);
    return out;
  }
  if (periodic() && 2 * radius + 1 >= 2 * window_->radius + 1) {
    for (PointId y = 0; y < size(); ++y)
      if (ambient_distance(coords_[x], coords_[y]) <= radius) out.push_back(y);
    return out;
  }
  for (const auto& o : ball_offsets(dim_, radius)) {
    if (auto id = find(coords_[x] + o)) out.push_back(*id);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Space::ball_measure(PointId x, double r) const {
  double m = 0.0;
  for (PointId y : ball(x, r)) m += weights_[y];
  return m;
}

double Space::edge_distance(PointId x) const {
  if (kind_ != Kind::lattice || periodic()) return kInf;
  std::int64_t m = 0;
  for (int a = 0; a < dim_; ++a) m = std::max<std::int64_t>(m, std::abs(coords_[x][a]));
  return static_cast<double>(window_->radius - m);
}

PointId Space::origin() const {
  if (kind_ == Kind::lattice) return lattice_index(Coord{});
  return 0;
}

double Space::nu() const {
  double m = kInf;
  for (PointId x = 0; x < size(); ++x) m = std::min(m, ball_measure(x, 0.5));
  return m;
}

SpacePtr Space::with_weights(std::vector<double> weights) const {
  if (weights.size() != size()) throw InvalidInput("weight vector size does not match space");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("weights must be positive and finite");
  }
  auto copy = std::make_shared<Space>(*this);
  copy->counting_ = std::all_of(weights.begin(), weights.end(), [](double w) { return w == 1.0; });
  copy->weights_ = std::move(weights);
  return copy;
}

// ---------------------------------------------------------------------------

double VolumeGrowth::operator()(double r) const {
  const Space& s = *space_;
  if (r < 0) return 0.0;
  if (const auto& win = s.window()) {
    if (r > win->radius) throw InvalidInput("insufficient window: r exceeds window radius");
    if (s.counting_measure()) {
      // translation invariant in the interior; the origin is interior whenever r <= W
      return s.ball_measure(s.origin(), r);
    }
  }
  double v = 0.0;
  for (PointId x = 0; x < s.size(); ++x) {
    if (s.edge_distance(x) < r) continue;
    v = std::max(v, s.ball_measure(x, r));
  }
  return v;
}

Net greedy_net(const SpacePtr& space, double separation) {
  Net net;
  net.separation = separation;
  const Space& s = *space;
  std::vector<char> blocked(s.size(), 0);
  for (PointId x = 0; x < s.size(); ++x) {
    if (blocked[x]) continue;
    net.centers.push_back(x);
    for (PointId y : s.ball(x, separation)) blocked[y] = 1;
  }
  const double nu = s.nu();
  VolumeGrowth growth(space);
  net.capacity_bound = [growth, nu](double r) { return growth(2.0 * r + 2.0) / nu; };
  return net;
}

bool NetCheck::ok() const {
  if (!separated || !covering) return false;
  return std::all_of(capacity.begin(), capacity.end(),
                     [](const CapacityRow& row) { return static_cast<double>(row.measured) <= row.bound; });
}

NetCheck check_net(const SpacePtr& space, const Net& net, std::span<const double> radii) {
  const Space& s = *space;
  NetCheck check;
  check.separated = true;
  for (std::size_t i = 0; i < net.centers.size() && check.separated; ++i)
    for (std::size_t j = i + 1; j < net.centers.size(); ++j)
      if (!(s.distance(net.centers[i], net.centers[j]) > net.separation)) {
        check.separated = false;
        break;
      }

  std::vector<char> covered(s.size(), 0);
  for (PointId z : net.centers)
    for (PointId y : s.ball(z, 1.0)) covered[y] = 1;
  check.covering = std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });

  for (double r : radii) {
    CapacityRow row;
    row.radius = r;
    row.bound = net.capacity_bound(r);
    std::vector<char> mark(s.size(), 0);
    for (PointId x = 0; x < s.size(); ++x) {
      auto bx = s.ball(x, r);
      for (PointId y : bx) mark[y] = 1;
      std::size_t count = 0;
      for (PointId z : net.centers) {
        if (s.distance(x, z) > 2.0 * r) continue;
        auto bz = s.ball(z, r);
        if (std::any_of(bz.begin(), bz.end(), [&](PointId y) { return mark[y] != 0; })) ++count;
      }
      for (PointId y : bx) mark[y] = 0;
      row.measured = std::max(row.measured, count);
    }
    check.capacity.push_back(row);
  }
  return check;
}

bool check_metric_axioms(const Space& s, std::size_t max_points) {
  const std::size_t n = s.size();
  if (n > max_points) throw InvalidInput("metric check refuses spaces above the point cap");
  std::vector<double> d(n * n);
  for (PointId x = 0; x < n; ++x)
    for (PointId y = 0; y < n; ++y) d[x * n + y] = s.distance(x, y);
  for (PointId x = 0; x < n; ++x) {
    for (PointId y = 0; y < n; ++y) {
      const double dxy = d[x * n + y];
      if (dxy != d[y * n + x]) return false;
      if ((dxy == 0.0) != (x == y)) return false;
      if (dxy < 0.0) return false;
      for (PointId z = 0; z < n; ++z) {
        if (dxy > d[x * n + z] + d[z * n + y] + 1e-12 * dxy) return false;
      }
    }
  }
  return true;
}

}  // namespace coarse
