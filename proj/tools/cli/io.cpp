#include "io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "coarse/error.hpp"

namespace coarse::io {
namespace {

void write_double(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // short numeric rows stay on one line
      const bool flat = j.size() <= 16 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      write_double(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

int dim_of(const Json& j) {
  const int dim = j.value("dim", 1);
  if (dim < 1 || dim > kMaxDim) throw InvalidInput("dim must be in 1.." + std::to_string(kMaxDim));
  return dim;
}

}  // namespace

std::string dump(const Json& value, int indent) {
  std::string out;
  write(out, value, indent, 0);
  out += '\n';
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

Complex parse_complex(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
  throw InvalidInput("expected a number, [re, im] or {re, im}");
}

Coord parse_coord(const Json& j, int dim) {
  if (j.is_number_integer() && dim == 1) return make_coord({j.get<std::int64_t>()});
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw InvalidInput("expected a coordinate with " + std::to_string(dim) + " entries");
  Coord c{};
  for (int i = 0; i < dim; ++i) c[i] = j[static_cast<std::size_t>(i)].get<std::int64_t>();
  return c;
}

SpacePtr parse_space(const Json& j, std::optional<int> radius_override) {
  const std::string kind = j.value("kind", "lattice");
  SpacePtr space;
  if (kind == "lattice") {
    const std::string boundary = j.value("boundary", "truncate");
    if (boundary != "truncate" && boundary != "periodic") throw InvalidInput("unknown boundary " + boundary);
    space = build_lattice_window(dim_of(j), radius_override.value_or(j.at("radius").get<int>()),
                                 boundary == "periodic" ? Boundary::periodic : Boundary::truncate);
  } else if (kind == "graph") {
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() < 2) throw InvalidInput("edge must be [u, v] or [u, v, length]");
      edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e.size() > 2 ? e[2].get<double>() : 1.0});
    }
    space = build_graph_space(j.at("vertices").get<std::size_t>(), edges);
  } else if (kind == "point_cloud") {
    const int dim = dim_of(j);
    std::vector<Coord> points;
    for (const auto& p : j.at("points")) points.push_back(parse_coord(p, dim));
    space = build_point_cloud(dim, std::move(points));
  } else {
    throw InvalidInput("unknown space kind " + kind);
  }
  if (j.contains("weights")) space = space->with_weights(j["weights"].get<std::vector<double>>());
  return space;
}

Coefficient parse_coefficient(const Json& j) {
  if (!j.is_object()) return Coefficient::constant(parse_complex(j));
  const std::string type = j.at("type").get<std::string>();
  auto values = [&](const char* key) {
    std::vector<Complex> out;
    for (const auto& v : j.at(key)) out.push_back(parse_complex(v));
    return out;
  };
  const int axis = j.value("axis", 0);
  if (type == "constant") return Coefficient::constant(parse_complex(j.at("value")));
  if (type == "step")
    return Coefficient::step(parse_complex(j.at("left")), parse_complex(j.at("right")), j.value("at", std::int64_t{0}),
                             axis);
  if (type == "periodic") return Coefficient::periodic(values("values"), axis);
  if (type == "decay") {
    Coord center{};
    if (j.contains("center")) center = parse_coord(j["center"], static_cast<int>(j["center"].size()));
    return Coefficient::decay(parse_complex(j.value("base", Json(0.0))), parse_complex(j.at("amplitude")),
                              j.at("power").get<double>(), center);
  }
  if (type == "table")
    return Coefficient::table(j.at("start").get<std::int64_t>(), values("values"),
                              parse_complex(j.value("outside", Json(0.0))), axis);
  if (type == "product") {
    const auto& factors = j.at("factors");
    if (factors.empty()) throw InvalidInput("product needs factors");
    Coefficient c = parse_coefficient(factors[0]);
    for (std::size_t i = 1; i < factors.size(); ++i) c = Coefficient::product(c, parse_coefficient(factors[i]));
    return c;
  }
  throw InvalidInput("unknown coefficient type " + type);
}

DirectionProxy parse_proxy(const Json& j, int dim) {
  if (j.is_string()) return parse_proxy(j.get<std::string>(), dim);
  DirectionProxy p;
  p.direction = parse_coord(j.at("direction"), dim);
  p.period = j.value("period", std::int64_t{1});
  if (p.period < 1 || l1_norm(p.direction) == 0) throw InvalidInput("degenerate direction proxy");
  return p;
}

DirectionProxy parse_proxy(const std::string& text, int dim) try {
  DirectionProxy p;
  std::string body = text;
  if (auto at = body.find('@'); at != std::string::npos) {
    p.period = std::stoll(body.substr(at + 1));
    body = body.substr(0, at);
  }
  std::istringstream in(body);
  std::string part;
  int i = 0;
  while (std::getline(in, part, ':')) {
    if (i >= dim) throw InvalidInput("proxy " + text + " has too many components");
    std::size_t used = 0;
    p.direction[i++] = std::stoll(part, &used);
    if (used != part.size()) throw InvalidInput("bad proxy component in " + text);
  }
  if (i != dim) throw InvalidInput("proxy " + text + " needs " + std::to_string(dim) + " components");
  if (p.period < 1 || l1_norm(p.direction) == 0) throw InvalidInput("degenerate direction proxy " + text);
  return p;
} catch (const std::logic_error&) {
  throw InvalidInput("bad direction proxy " + text);
}

AsymptoticOperatorSpec parse_asymptotic(const Json& j) {
  AsymptoticOperatorSpec spec;
  spec.dim = dim_of(j);
  for (const auto& b : j.at("bands"))
    spec.bands.push_back({parse_coord(b.at("offset"), spec.dim), parse_coefficient(b.at("coeff"))});
  if (j.contains("proxies")) {
    for (const auto& p : j["proxies"]) {
      ProxyDeclaration decl{parse_proxy(p, spec.dim), {}};
      if (p.is_object() && p.contains("limits")) {
        for (const auto& lim : p["limits"]) {
          DeclaredLimit d{parse_coord(lim.at("offset"), spec.dim), {}};
          for (const auto& v : lim.at("values")) d.values.push_back(parse_complex(v));
          if (d.values.empty()) throw InvalidInput("declared limit needs values");
          decl.limits.push_back(std::move(d));
        }
      }
      spec.proxies.push_back(std::move(decl));
    }
  }
  spec.self_adjoint = j.value("self_adjoint", false);
  if (spec.self_adjoint && !check_self_adjoint(spec)) throw InvalidInput("operator declared self-adjoint is not");
  return spec;
}

BandKernel parse_operator(const Json& j, std::optional<int> window) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "hls") {
    std::vector<int> sizes;
    if (j.contains("sizes")) {
      sizes = j["sizes"].get<std::vector<int>>();
    } else {
      for (int n = 1; n <= j.at("max_size").get<int>(); ++n) sizes.push_back(n);
    }
    return build_hls(sizes, j.value("gap_factor", 1.0)).kernel();
  }
  if (kind == "asymptotic") {
    const auto spec = parse_asymptotic(j);
    const int radius = window.value_or(j.at("window").get<int>());
    const std::string boundary = j.value("boundary", "truncate");
    return materialize(spec, build_lattice_window(spec.dim, radius,
                                                  boundary == "periodic" ? Boundary::periodic : Boundary::truncate));
  }
  const auto space = parse_space(j.at("space"), window);
  if (kind == "identity") return identity_kernel(space);
  if (kind == "adjacency") return adjacency_kernel(space);
  if (kind == "bands") {
    std::vector<Band> bands;
    for (const auto& b : j.at("bands")) bands.push_back({parse_coord(b.at("offset"), space->dim()), parse_complex(b.at("value"))});
    return lattice_kernel(space, bands);
  }
  if (kind == "entries") {
    double prop = 0.0;
    const auto& entries = j.at("entries");
    for (const auto& e : entries) prop = std::max(prop, space->distance(e.at(0).get<PointId>(), e.at(1).get<PointId>()));
    KernelBuilder b(space, prop);
    for (const auto& e : entries) {
      const auto x = e.at(0).get<PointId>(), y = e.at(1).get<PointId>();
      if (x >= space->size() || y >= space->size()) throw InvalidInput("entry index out of range");
      b.add(x, y, parse_complex(e.at(2)));
    }
    return std::move(b).build();
  }
  throw InvalidInput("unknown operator kind " + kind);
}

Json to_json(const SpectrumSet& s) {
  Json intervals = Json::array();
  for (const auto& iv : s.intervals) intervals.push_back({iv.lo, iv.hi});
  Json points = Json::array();
  for (const auto& p : s.points) points.push_back({{"value", p.value}, {"multiplicity", p.multiplicity}});
  return {{"intervals", intervals}, {"points", points}, {"provenance", to_string(s.provenance)}};
}

Json to_json(const GhostReport& r) {
  Json curves = Json::array();
  for (std::size_t i = 0; i < r.curves.size(); ++i) {
    const auto& c = r.curves[i];
    Json pts = Json::array();
    for (const auto& [h, v] : c.points) pts.push_back({h, v});
    curves.push_back({{"radius", c.radius}, {"final_value", c.final_value()}, {"verdict", bool(r.verdicts[i])},
                      {"curve", pts}});
  }
  return {{"tol", r.tol},
          {"verdict", r.verdict},
          {"unit_radius_consistent", r.unit_radius_consistent},
          {"curves", curves}};
}

Json to_json(const TruncationReport& r) {
  return {{"bound", r.bound},
          {"measured", r.measured},
          {"norm", r.norm},
          {"truncated_norm", r.truncated_norm},
          {"propagation", r.propagation},
          {"bound_holds", r.bound_holds()},
          {"contraction_holds", r.contraction_holds()}};
}

}  // namespace coarse::io
