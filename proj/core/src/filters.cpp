#include "coarse/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coarse/error.hpp"

namespace coarse {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t floor_radius(double r) { return static_cast<std::int64_t>(std::floor(r)); }

std::shared_ptr<const Subset::Predicate> make_predicate(Subset::Predicate p) {
  return std::make_shared<const Subset::Predicate>(std::move(p));
}

}  // namespace

Subset::Subset(SpacePtr space, std::vector<char> mask, std::shared_ptr<const Predicate> ambient)
    : space_(std::move(space)), mask_(std::move(mask)), ambient_(std::move(ambient)) {}

bool Subset::ambient_lattice() const { return space_->kind() == Space::Kind::lattice; }

Subset Subset::from_mask(SpacePtr space, std::vector<char> mask) {
  if (mask.size() != space->size()) throw InvalidInput("subset mask size does not match space");
  for (auto& m : mask) m = m ? 1 : 0;
  std::shared_ptr<const Predicate> ambient;
  if (space->kind() == Space::Kind::lattice) {
    auto shared = std::make_shared<const std::vector<char>>(mask);
    const Space* raw = space.get();
    ambient = make_predicate([shared, raw](const Coord& c) {
      auto id = raw->find(c);
      return id && (*shared)[*id] != 0;
    });
  }
  return Subset(std::move(space), std::move(mask), std::move(ambient));
}

Subset Subset::from_points(SpacePtr space, std::span<const PointId> points) {
  std::vector<char> mask(space->size(), 0);
  for (PointId p : points) {
    if (p >= mask.size()) throw InvalidInput("subset point out of range");
    mask[p] = 1;
  }
  return from_mask(std::move(space), std::move(mask));
}

Subset Subset::from_predicate(SpacePtr space, Predicate predicate) {
  if (space->kind() != Space::Kind::lattice) {
    throw InvalidInput("ambient predicates need a lattice window");
  }
  std::vector<char> mask(space->size(), 0);
  for (PointId x = 0; x < space->size(); ++x) mask[x] = predicate(space->coord(x)) ? 1 : 0;
  const Space* raw = space.get();
  auto ambient = make_predicate([raw, p = std::move(predicate)](const Coord& c) { return p(raw->wrap(c)); });
  return Subset(std::move(space), std::move(mask), std::move(ambient));
}

Subset Subset::everything(SpacePtr space) {
  if (space->kind() == Space::Kind::lattice) return from_predicate(std::move(space), [](const Coord&) { return true; });
  return from_mask(space, std::vector<char>(space->size(), 1));
}

Subset Subset::nothing(SpacePtr space) {
  if (space->kind() == Space::Kind::lattice) return from_predicate(std::move(space), [](const Coord&) { return false; });
  return from_mask(space, std::vector<char>(space->size(), 0));
}

bool Subset::contains_ambient(const Coord& c) const {
  if (ambient_) return (*ambient_)(c);
  auto id = space_->find(c);
  return id && mask_[*id] != 0;
}

std::vector<PointId> Subset::points() const {
  std::vector<PointId> out;
  for (PointId x = 0; x < mask_.size(); ++x)
    if (mask_[x]) out.push_back(x);
  return out;
}

std::size_t Subset::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

bool Subset::is_subset_of(const Subset& other) const {
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i] && !other.mask_[i]) return false;
  return true;
}

bool Subset::same_on_window(const Subset& other) const { return mask_ == other.mask_; }

Subset Subset::intersect(const Subset& other) const {
  std::vector<char> mask(mask_.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mask_[i] && other.mask_[i];
  std::shared_ptr<const Predicate> ambient;
  if (ambient_lattice()) {
    ambient = make_predicate([a = *this, b = other](const Coord& c) {
      return a.contains_ambient(c) && b.contains_ambient(c);
    });
  }
  return Subset(space_, std::move(mask), std::move(ambient));
}

Subset Subset::unite(const Subset& other) const {
  std::vector<char> mask(mask_.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mask_[i] || other.mask_[i];
  std::shared_ptr<const Predicate> ambient;
  if (ambient_lattice()) {
    ambient = make_predicate([a = *this, b = other](const Coord& c) {
      return a.contains_ambient(c) || b.contains_ambient(c);
    });
  }
  return Subset(space_, std::move(mask), std::move(ambient));
}

Subset Subset::complement() const {
  std::vector<char> mask(mask_.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mask_[i] ? 0 : 1;
  std::shared_ptr<const Predicate> ambient;
  if (ambient_lattice()) {
    ambient = make_predicate([a = *this](const Coord& c) { return !a.contains_ambient(c); });
  }
  return Subset(space_, std::move(mask), std::move(ambient));
}

// ---------------------------------------------------------------------------

Subset thicken(const Subset& set, double r) {
  const SpacePtr& space = set.space();
  if (r < 0) return Subset::nothing(space);
  if (space->kind() == Space::Kind::lattice) {
    auto offsets = std::make_shared<const std::vector<Coord>>(ball_offsets(space->dim(), floor_radius(r)));
    return Subset::from_predicate(space, [set, offsets](const Coord& c) {
      return std::any_of(offsets->begin(), offsets->end(),
                         [&](const Coord& o) { return set.contains_ambient(c + o); });
    });
  }
  std::vector<char> mask(space->size(), 0);
  for (PointId x = 0; x < space->size(); ++x) {
    auto b = space->ball(x, r);
    mask[x] = std::any_of(b.begin(), b.end(), [&](PointId y) { return set.contains(y); });
  }
  return Subset::from_mask(space, std::move(mask));
}

Subset shrink(const Subset& set, double r) {
  const SpacePtr& space = set.space();
  if (r < 0) return set;
  if (space->kind() == Space::Kind::lattice) {
    auto offsets = std::make_shared<const std::vector<Coord>>(ball_offsets(space->dim(), floor_radius(r)));
    return Subset::from_predicate(space, [set, offsets](const Coord& c) {
      return std::all_of(offsets->begin(), offsets->end(),
                         [&](const Coord& o) { return set.contains_ambient(c + o); });
    });
  }
  std::vector<char> mask(space->size(), 0);
  for (PointId x = 0; x < space->size(); ++x) {
    auto b = space->ball(x, r);
    mask[x] = std::all_of(b.begin(), b.end(), [&](PointId y) { return set.contains(y); });
  }
  return Subset::from_mask(space, std::move(mask));
}

double distance_to(const Subset& set, PointId x, double search_cap) {
  const Space& s = *set.space();
  if (s.kind() == Space::Kind::lattice) {
    const Coord& c = s.coord(x);
    const auto cap = floor_radius(search_cap);
    for (std::int64_t rho = 0; rho <= cap; ++rho) {
      for (const auto& o : sphere_offsets(s.dim(), rho))
        if (set.contains_ambient(c + o)) return static_cast<double>(rho);
    }
    return kInf;
  }
  double best = kInf;
  for (PointId y = 0; y < s.size(); ++y)
    if (set.contains(y)) best = std::min(best, s.distance(x, y));
  return best;
}

// ---------------------------------------------------------------------------

std::string DirectionProxy::label(int dim) const {
  std::ostringstream os;
  os << "a_n = n*" << period << "*(";
  for (int i = 0; i < dim; ++i) os << (i ? "," : "") << direction[i];
  os << ")";
  return os.str();
}

std::string FilterSpec::name() const {
  struct Visitor {
    std::string operator()(const Frechet&) const { return "frechet"; }
    std::string operator()(const HalfSpace&) const { return "half_space"; }
    std::string operator()(const Obstacle&) const { return "obstacle"; }
    std::string operator()(const Grassmann&) const { return "grassmann"; }
    std::string operator()(const Intersection&) const { return "intersection"; }
    std::string operator()(const Proxy&) const { return "direction_proxy"; }
  };
  return std::visit(Visitor{}, kind);
}

Subset FilterSpec::generator(const SpacePtr& space, double scale) const {
  const bool lattice = space->kind() == Space::Kind::lattice;
  const int dim = space->dim();
  const Space* raw = space.get();

  if (std::holds_alternative<Frechet>(kind)) {
    if (lattice) {
      return Subset::from_predicate(space, [raw, scale](const Coord& c) {
        return static_cast<double>(raw->ambient_distance(c, Coord{})) > scale;
      });
    }
    std::vector<char> mask(space->size(), 0);
    const PointId o = space->origin();
    for (PointId x = 0; x < space->size(); ++x) mask[x] = space->distance(x, o) > scale;
    return Subset::from_mask(space, std::move(mask));
  }
  if (const auto* hs = std::get_if<HalfSpace>(&kind)) {
    if (!lattice) throw InvalidInput("half-space filters need a lattice window");
    auto v = hs->direction;
    return Subset::from_predicate(space, [v, dim, scale](const Coord& c) {
      double dot = 0.0;
      for (int i = 0; i < dim; ++i) dot += v[i] * static_cast<double>(c[i]);
      return dot >= scale;
    });
  }
  if (const auto* ob = std::get_if<Obstacle>(&kind)) {
    if (lattice) {
      auto pts = ob->points;
      return Subset::from_predicate(space, [raw, pts, scale](const Coord& c) {
        return std::all_of(pts.begin(), pts.end(), [&](const Coord& p) {
          return static_cast<double>(raw->ambient_distance(c, p)) > scale;
        });
      });
    }
    std::vector<char> mask(space->size(), 1);
    for (const auto& p : ob->points) {
      const auto id = static_cast<PointId>(p[0]);
      if (id >= space->size()) throw InvalidInput("obstacle point out of range");
      for (PointId x = 0; x < space->size(); ++x)
        if (space->distance(x, id) <= scale) mask[x] = 0;
    }
    return Subset::from_mask(space, std::move(mask));
  }
  if (const auto* gr = std::get_if<Grassmann>(&kind)) {
    if (!lattice) throw InvalidInput("Grassmann filters need a lattice window");
    auto normals = gr->normals;
    auto offsets = std::make_shared<const std::vector<Coord>>(ball_offsets(dim, floor_radius(scale)));
    return Subset::from_predicate(space, [normals, offsets, dim](const Coord& c) {
      for (const auto& n : normals) {
        for (const auto& o : *offsets) {
          std::int64_t dot = 0;
          for (int i = 0; i < dim; ++i) dot += n[i] * (c[i] + o[i]);
          if (dot == 0) return false;
        }
      }
      return true;
    });
  }
  if (const auto* in = std::get_if<Intersection>(&kind)) {
    if (in->parts.empty()) return Subset::everything(space);
    Subset acc = in->parts.front().generator(space, scale);
    for (std::size_t i = 1; i < in->parts.size(); ++i) acc = acc.intersect(in->parts[i].generator(space, scale));
    return acc;
  }
  const auto& proxy = std::get<Proxy>(kind).proxy;
  if (!space->has_coordinates()) throw InvalidInput("direction proxies need a coordinate space");
  if (l1_norm(proxy.direction) == 0 || proxy.period < 1) throw InvalidInput("degenerate direction proxy");
  std::vector<char> mask(space->size(), 0);
  // walk the sequence while it stays within reach of the window
  const double reach = 2.0 * static_cast<double>(space->window() ? space->window()->radius : 0) +
                       static_cast<double>(space->size());
  for (auto n = static_cast<std::int64_t>(std::ceil(std::max(0.0, scale)));; ++n) {
    const Coord a = proxy.point(n);
    if (static_cast<double>(l1_norm(a)) > reach) break;
    if (auto id = space->find(a)) mask[*id] = 1;
    if (space->periodic() && n > static_cast<std::int64_t>(space->size()) + scale) break;
  }
  return Subset::from_mask(space, std::move(mask));
}

// ---------------------------------------------------------------------------

bool CoarseCertificate::passed() const {
  return !entries.empty() &&
         std::all_of(entries.begin(), entries.end(), [](const CertificateEntry& e) { return e.pass; });
}

CoarseCertificate is_coarse_certificate(const FilterSpec& filter, const SpacePtr& space,
                                        std::span<const double> scales, double r_max) {
  CoarseCertificate cert;
  for (double scale : scales) {
    const Subset gen = filter.generator(space, scale);
    for (std::int64_t r = 1; r <= floor_radius(r_max); ++r) {
      CertificateEntry entry;
      entry.scale = scale;
      entry.r = static_cast<double>(r);
      const Subset shrunk = shrink(gen, static_cast<double>(r));
      std::vector<double> candidates;
      for (std::int64_t k = 0; k <= r + 1; ++k) candidates.push_back(scale + static_cast<double>(k));
      for (double t : scales)
        if (t > scale) candidates.push_back(t);
      std::sort(candidates.begin(), candidates.end());
      for (double t : candidates) {
        const Subset cand = filter.generator(space, t);
        if (!cand.none() && cand.is_subset_of(shrunk)) {
          entry.pass = true;
          entry.witness_scale = t;
          break;
        }
      }
      cert.entries.push_back(entry);
    }
  }
  return cert;
}

bool generators_nested(const FilterSpec& filter, const SpacePtr& space, std::span<const double> scales) {
  std::vector<double> sorted(scales.begin(), scales.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!filter.generator(space, sorted[i]).is_subset_of(filter.generator(space, sorted[i - 1]))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

double lipschitz_constant(const Space& space, std::span<const double> values) {
  double worst = 0.0;
  for (PointId x = 0; x < space.size(); ++x)
    for (PointId y = x + 1; y < space.size(); ++y)
      worst = std::max(worst, std::abs(values[x] - values[y]) / space.distance(x, y));
  return worst;
}

Cutoff cutoff(const Subset& outer, const Subset& inner, double r, double search_cap) {
  const SpacePtr& space = outer.space();
  if (inner.space() != space) throw InvalidInput("cutoff sets live on different spaces");
  if (!(r > 0.0)) throw InvalidInput("cutoff needs r > 0");
  if (inner.none()) throw InvalidInput("cutoff inner set is empty (degenerate input)");
  if (!thicken(inner, r).is_subset_of(outer)) {
    throw InvalidInput("cutoff precondition violated: G_(r) is not contained in F");
  }
  if (search_cap < 0) {
    const double w = space->window() ? space->window()->radius : 0.0;
    search_cap = 4.0 * w + 2.0 * r + 4.0;
  }
  const Subset outside = outer.complement();
  Cutoff out;
  out.r = r;
  out.theta.assign(space->size(), 0.0);
  for (PointId x = 0; x < space->size(); ++x) {
    const double d_out = distance_to(outside, x, search_cap);
    const double d_in = distance_to(inner, x, search_cap);
    if (std::isinf(d_in) && std::isinf(d_out)) {
      throw InvalidInput("cutoff inner set is empty (degenerate input)");
    }
    if (std::isinf(d_out)) {
      out.theta[x] = 1.0;
    } else if (std::isinf(d_in)) {
      out.theta[x] = 0.0;
    } else {
      if (d_out + d_in == 0.0) throw InvariantViolation("cutoff denominator vanished");
      out.theta[x] = d_out / (d_out + d_in);
    }
  }
  out.bounds_hold = true;
  for (PointId x = 0; x < space->size(); ++x) {
    const double lo = inner.contains(x) ? 1.0 : 0.0;
    const double hi = outer.contains(x) ? 1.0 : 0.0;
    if (out.theta[x] < lo || out.theta[x] > hi) out.bounds_hold = false;
  }
  out.lipschitz = lipschitz_constant(*space, out.theta);
  return out;
}

bool coarse_envelope_member(const DirectionProxy& proxy, const Subset& set, double r_max,
                            std::int64_t horizon) {
  const Subset tail = FilterSpec::direction_proxy(proxy).generator(set.space(), static_cast<double>(horizon));
  if (tail.none()) return false;
  for (std::int64_t r = 1; r <= floor_radius(r_max); ++r) {
    if (!tail.is_subset_of(shrink(set, static_cast<double>(r)))) return false;
  }
  return true;
}

}  // namespace coarse
