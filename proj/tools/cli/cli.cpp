#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "coarse/error.hpp"

namespace coarse::cli {
namespace {

std::vector<double> radii_or(const RunConfig& cfg, const io::Json& doc, std::vector<double> fallback) {
  if (!cfg.radii.empty()) return cfg.radii;
  if (doc.contains("radii")) return doc["radii"].get<std::vector<double>>();
  return fallback;
}

std::string kind_name(Space::Kind k) {
  switch (k) {
    case Space::Kind::lattice: return "lattice";
    case Space::Kind::point_cloud: return "point_cloud";
    case Space::Kind::graph: return "graph";
  }
  return "unknown";
}

void write_csv(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << "index,eigenvalue\n";
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    out << i << ',' << buf << '\n';
  }
}

}  // namespace

void RunConfig::validate() const {
  if (tol && !(*tol > 0.0)) throw InvalidInput("--tol must be positive");
  if (window && (*window < 0 || *window > max_window))
    throw InvalidInput("--window must be in [0, " + std::to_string(max_window) + "]");
  for (double r : radii)
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidInput("--radii must be finite and nonnegative");
}

CommandResult cmd_space(const io::Json& doc, const RunConfig& cfg) {
  const auto space = io::parse_space(doc.at("space"), cfg.window);
  const auto radii = radii_or(cfg, doc, {0, 1, 2, 4});
  const auto growth = volume_growth(space);
  io::Json vtable = io::Json::array();
  for (double r : radii) vtable.push_back({r, growth(r)});

  const Net net = greedy_net(space, doc.value("net_separation", 1.0));
  const NetCheck check = check_net(space, net, radii);
  io::Json capacity = io::Json::array();
  for (const auto& row : check.capacity)
    capacity.push_back({{"radius", row.radius}, {"bound", row.bound}, {"measured", row.measured}});

  CommandResult result;
  auto& rep = result.report;
  rep["command"] = "space";
  rep["space"] = {{"kind", kind_name(space->kind())}, {"points", space->size()}, {"dim", space->dim()},
                  {"nu", space->nu()}};
  rep["volume_growth"] = vtable;
  rep["net"] = {{"separation", net.separation}, {"centers", net.centers.size()}, {"separated", check.separated},
                {"covering", check.covering}, {"capacity", capacity}};
  bool metric_ok = true;
  if (space->size() <= 1000) {
    metric_ok = check_metric_axioms(*space);
    rep["metric_axioms"] = metric_ok;
  }
  if (space->kind() == Space::Kind::graph && space->size() <= 64) {
    io::Json table = io::Json::array();
    for (PointId x = 0; x < space->size(); ++x) {
      io::Json row = io::Json::array();
      for (PointId y = 0; y < space->size(); ++y) row.push_back(space->distance(x, y));
      table.push_back(row);
    }
    rep["metric"] = table;
  }
  if (!check.ok() || !metric_ok) result.status = ExitCode::invariant_violation;
  return result;
}

CommandResult cmd_ghost(const io::Json& doc, const RunConfig& cfg) {
  const auto op = io::parse_operator(doc.at("operator"), cfg.window);
  const auto radii = radii_or(cfg, doc, {1});
  const double tol = cfg.tol.value_or(doc.value("tol", 0.2));
  CommandResult result;
  result.report["command"] = "ghost";
  result.report["points"] = op.size();
  result.report["ghost"] = io::to_json(ghost_report(op, radii, tol));
  return result;
}

CommandResult cmd_ess(const io::Json& doc, const RunConfig& cfg) {
  const auto spec = io::parse_asymptotic(doc.at("operator"));
  std::vector<DirectionProxy> proxies;
  for (const auto& p : cfg.proxies) proxies.push_back(io::parse_proxy(p, spec.dim));
  if (proxies.empty())
    for (const auto& d : spec.proxies) proxies.push_back(d.proxy);
  if (proxies.empty()) throw InvalidInput("no direction proxies given (--proxies or operator.proxies)");
  const double tol = cfg.tol.value_or(doc.value("tol", 0.05));
  const int window = cfg.window.value_or(doc.value("window", 500));

  const auto ess = ess_spectrum_via_localizations(spec, proxies);
  const auto section = finite_section_spectrum(spec, window);
  const auto gap = hausdorff_gap(ess, section, tol);
  const auto values = section.expanded_points();
  if (!cfg.dump_path.empty()) write_csv(cfg.dump_path, values);

  CommandResult result;
  auto& rep = result.report;
  rep["command"] = "ess";
  io::Json labels = io::Json::array();
  for (const auto& p : proxies) labels.push_back(p.label(spec.dim));
  rep["proxies"] = labels;
  rep["essential"] = io::to_json(ess);
  rep["finite_section"] = {{"radius", window},
                           {"eigenvalues", values.size()},
                           {"min", values.empty() ? 0.0 : values.front()},
                           {"max", values.empty() ? 0.0 : values.back()},
                           {"tol", tol},
                           {"one_sided", gap.one_sided},
                           {"outliers", gap.outliers}};
  return result;
}

CommandResult cmd_truncate(const io::Json& doc, const RunConfig& cfg) {
  const auto op = io::parse_operator(doc.at("operator"), cfg.window);
  const auto& w = doc.at("witness");
  const std::string kind = w.value("kind", "ball");
  CommandResult result;
  auto& rep = result.report;
  rep["command"] = "truncate";
  io::Json rows = io::Json::array();
  bool all_hold = true;
  auto add_row = [&](const Witness& phi, double radius) {
    const auto r = truncation_check(op, phi);
    io::Json row = {{"radius", radius}};
    row.update(io::to_json(r));
    rows.push_back(row);
    all_hold = all_hold && r.bound_holds() && r.contraction_holds();
  };
  if (kind == "ball") {
    std::vector<double> radii = cfg.radii;
    if (radii.empty()) radii = w.contains("radii") ? w["radii"].get<std::vector<double>>()
                                                  : std::vector<double>{w.at("radius").get<double>()};
    for (double r : radii) {
      if (r != std::floor(r)) throw InvalidInput("ball witness radius must be an integer");
      add_row(Witness::ball_average(op.space(), static_cast<int>(r)), r);
    }
  } else if (kind == "table") {
    std::vector<Witness::Profile> profiles;
    for (const auto& prof : w.at("profiles")) {
      Witness::Profile p;
      for (const auto& e : prof) p.emplace_back(e.at(0).get<PointId>(), e.at(1).get<double>());
      profiles.push_back(std::move(p));
    }
    const auto phi = Witness::table(op.space(), std::move(profiles));
    add_row(phi, phi.support_radius());
  } else {
    throw InvalidInput("unknown witness kind " + kind);
  }
  rep["rows"] = rows;
  if (!all_hold) result.status = ExitCode::invariant_violation;
  return result;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coarse-geometric spectral diagnostics for band operators", "coarse-spectra"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", cfg.spec_path, "JSON input document")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.out_path, "write the JSON report here instead of stdout");
    sub->add_option("--tol", cfg.tol, "tolerance");
    sub->add_option("--window", cfg.window, "window radius");
    sub->add_option("--radii", cfg.radii, "comma-separated radii")->delimiter(',');
    sub->add_option("--proxies", cfg.proxies, "comma-separated direction proxies, e.g. 1,-1 or 1:0,0:1")
        ->delimiter(',');
    sub->add_option("--seed", cfg.seed, "seed recorded in the report");
  };
  add_common(app.add_subcommand("space", "volume growth, net and metric checks"));
  add_common(app.add_subcommand("ghost", "ghost decay profile of an operator"));
  auto* ess = app.add_subcommand("ess", "essential spectrum via limit operators vs finite sections");
  add_common(ess);
  ess->add_option("--dump", cfg.dump_path, "CSV dump of the finite-section eigenvalues");
  add_common(app.add_subcommand("truncate", "witness truncation: measured error vs bound"));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::ok : ExitCode::invalid_input;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    cfg.validate();
    const auto doc = io::read_json(cfg.spec_path);
    CommandResult result;
    if (cfg.command == "space") {
      result = cmd_space(doc, cfg);
    } else if (cfg.command == "ghost") {
      result = cmd_ghost(doc, cfg);
    } else if (cfg.command == "ess") {
      result = cmd_ess(doc, cfg);
    } else {
      result = cmd_truncate(doc, cfg);
    }
    result.report["seed"] = cfg.seed;
    result.report["status"] = result.status;
    const std::string text = io::dump(result.report);
    if (cfg.out_path.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.out_path, std::ios::binary);
      if (!file) throw InvalidInput("cannot write " + cfg.out_path);
      file << text;
    }
    if (result.status != ExitCode::ok) err << "error: invariant check failed (see report)\n";
    return result.status;
  } catch (const Obstruction& e) {
    err << "obstruction: " << e.what() << '\n';
    return ExitCode::obstruction;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return ExitCode::invalid_input;
  } catch (const nlohmann::json::exception& e) {
    err << "invalid input: " << e.what() << '\n';
    return ExitCode::invalid_input;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return ExitCode::invariant_violation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::invariant_violation;
  }
}

}  // namespace coarse::cli
