#include "heatsum/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "heatsum/table.hpp"
#include "json.hpp"

namespace heatsum::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using geometry::EndSpec;
using geometry::kOffsetE;
using geometry::Point;
using geometry::SumSpec;
using validate::PointSpec;
using validate::RangeSpec;
using validate::ScenarioConfig;

namespace {

void expect_keys(const json& obj, const std::set<std::string>& allowed,
                 const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

double num(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
  return v.get<int>();
}

RangeSpec range_from(const json& v, const std::string& where) {
  expect_keys(v, {"lo", "hi", "count"}, where);
  RangeSpec r;
  r.lo = num(v.at("lo"), where + ".lo");
  r.hi = num(v.at("hi"), where + ".hi");
  r.count = integer(v.at("count"), where + ".count");
  return r;
}

EndSpec end_from(const json& v, int index, const std::string& base_dir) {
  expect_keys(v, {"alpha", "weight_file"}, "ends[" + std::to_string(index) + "]");
  if (v.contains("alpha") == v.contains("weight_file"))
    throw ConfigError("each end needs exactly one of alpha / weight_file");
  if (v.contains("alpha")) return EndSpec::power_law(index, num(v.at("alpha"), "alpha"));

  fs::path path = v.at("weight_file").get<std::string>();
  if (path.is_relative()) path = fs::path(base_dir) / path;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weight file " + path.string());
  std::vector<double> radii, weight;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double r, w;
    char comma;
    if (!(ss >> r >> comma >> w)) throw ConfigError("bad weight file line: " + line);
    radii.push_back(r);
    weight.push_back(w);
  }
  return EndSpec::tabulated(index, std::move(radii), std::move(weight));
}

PointSpec point_from(const json& v, int index) {
  std::string where = "points[" + std::to_string(index) + "]";
  expect_keys(v, {"center", "end", "abs", "sqrt_t"}, where);
  if (v.contains("center")) {
    if (!v.at("center").get<bool>() || v.size() != 1)
      throw ConfigError(where + ": center points take no other fields");
    return PointSpec::center();
  }
  if (!v.contains("end")) throw ConfigError(where + " needs an end index");
  int end = integer(v.at("end"), where + ".end");
  if (v.contains("abs") == v.contains("sqrt_t"))
    throw ConfigError(where + " needs exactly one of abs / sqrt_t");
  if (v.contains("abs")) return PointSpec::fixed(end, num(v.at("abs"), where + ".abs"));
  return PointSpec::sqrt_t(end, num(v.at("sqrt_t"), where + ".sqrt_t"));
}

// Deterministic temp-then-rename write; concurrent scenarios use distinct
// names so the temp paths never collide.
void atomic_write(const fs::path& target, const std::string& content) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SolverError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

Point resolve_point(const PointSpec& spec, double t) {
  switch (spec.kind) {
    case PointSpec::Kind::Center:
      return Point::center();
    case PointSpec::Kind::Fixed:
      return Point::on_end(spec.end, spec.value);
    case PointSpec::Kind::SqrtT:
      return Point::on_end(spec.end, std::max(kOffsetE, spec.value * std::sqrt(t)));
  }
  throw DomainError("unreachable");
}

struct SimRow {
  std::string quantity;
  std::optional<int> end;
  std::optional<double> t;
  std::optional<double> lambda;
  std::optional<double> abs_x;
  std::optional<double> abs_y;
  double value = 0.0;
};

std::string emit_sim_rows(const std::string& scenario, const std::vector<SimRow>& rows) {
  std::string out = "scenario,quantity,end,t,lambda,abs_x,abs_y,value\n";
  for (const auto& r : rows) {
    out += csv_escape(scenario);
    out.push_back(',');
    out += csv_escape(r.quantity);
    out.push_back(',');
    if (r.end) out += std::to_string(*r.end);
    for (const auto* v : {&r.t, &r.lambda, &r.abs_x, &r.abs_y}) {
      out.push_back(',');
      if (*v) out += format_value(**v);
    }
    out.push_back(',');
    out += format_value(r.value);
    out.push_back('\n');
  }
  return out;
}

int run_estimate(const ScenarioConfig& config, const fs::path& out_dir, bool quiet) {
  config.check(false);
  if (config.points.size() < 2)
    throw ConfigError("estimate needs at least two points");
  std::vector<TableRow> rows;
  for (double t : config.times.values()) {
    for (std::size_t i = 0; i < config.points.size(); ++i) {
      for (std::size_t j = i + 1; j < config.points.size(); ++j) {
        Point x = resolve_point(config.points[i], t);
        Point y = resolve_point(config.points[j], t);
        if (x.is_center() && y.is_center()) continue;
        auto est = estimator::kernel_estimate(config.sum, x, y, t);
        TableRow row;
        row.scenario = config.name;
        row.theorem_case = estimator::to_string(est.regime.theorem);
        row.t = t;
        if (!x.is_center()) row.abs_x = x.abs;
        if (!y.is_center()) row.abs_y = y.abs;
        row.structural = est.structural;
        rows.push_back(std::move(row));
      }
    }
  }
  if (rows.empty()) throw ConfigError("estimate produced no point pairs");
  atomic_write(out_dir / (config.name + "_estimates.csv"), emit_rows(rows));
  if (!quiet)
    std::cout << config.name << ": wrote " << rows.size() << " structural estimates\n";
  return 0;
}

int run_simulate(const ScenarioConfig& config, const fs::path& out_dir, bool quiet) {
  config.check(true);
  oracle::GridSpec spec = config.grid;
  spec.t_max = config.times.hi;
  auto grid = oracle::build_grid(config.sum, spec);
  auto times = config.times.values();
  std::vector<SimRow> rows;

  // heat kernel from the first fixed/center point to every fixed point
  std::vector<std::pair<int, double>> fixed_cells;  // (cell, abs)
  int source = grid.center_index();
  double source_abs = kOffsetE;
  bool have_source = false;
  for (const auto& p : config.points) {
    if (p.kind == PointSpec::Kind::SqrtT) continue;
    int cell = p.kind == PointSpec::Kind::Center
                   ? grid.center_index()
                   : grid.cell_at(p.end, p.value - kOffsetE);
    if (!have_source) {
      source = cell;
      source_abs = grid.abs_coordinate(cell);
      have_source = true;
    }
    fixed_cells.emplace_back(cell, grid.abs_coordinate(cell));
  }
  if (!have_source) throw ConfigError("simulate needs at least one fixed or center point");
  auto run = oracle::heat_kernel(grid, source, times, config.stepping);
  for (std::size_t s = 0; s < run.times.size(); ++s) {
    for (auto [cell, abs] : fixed_cells) {
      SimRow row;
      row.quantity = "p";
      row.t = run.times[s];
      row.abs_x = source_abs;
      row.abs_y = abs;
      row.value = run.density[s][cell];
      rows.push_back(std::move(row));
    }
  }

  // exit probability per end at the probe radius
  for (int i = 0; i < config.sum.k(); ++i) {
    int probe = grid.cell_at(i, config.r_probe);
    auto exit = oracle::exit_probability(grid, oracle::Omega::end_only(i), probe, times,
                                         config.stepping);
    for (std::size_t s = 0; s < exit.times.size(); ++s) {
      rows.push_back({"exit_prob", i, exit.times[s], std::nullopt,
                      grid.abs_coordinate(probe), std::nullopt, exit.psi[s]});
      rows.push_back({"exit_prob_rate", i, exit.times[s], std::nullopt,
                      grid.abs_coordinate(probe), std::nullopt, exit.dpsi[s]});
    }
  }

  if (config.lambdas) {
    auto samples = oracle::resolvent(grid, config.lambdas->values(), config.r_probe);
    for (const auto& s : samples) {
      rows.push_back({"gamma", std::nullopt, std::nullopt, s.lambda, std::nullopt,
                      std::nullopt, s.gamma});
      rows.push_back({"gamma_dot", std::nullopt, std::nullopt, s.lambda, std::nullopt,
                      std::nullopt, s.gamma_dot});
      for (int i = 0; i < config.sum.k(); ++i) {
        rows.push_back({"phi", i, std::nullopt, s.lambda, std::nullopt, std::nullopt,
                        s.phi[i]});
        rows.push_back({"psi_big", i, std::nullopt, s.lambda, std::nullopt, std::nullopt,
                        s.psi_big[i]});
      }
    }
  }

  atomic_write(out_dir / (config.name + "_samples.csv"), emit_sim_rows(config.name, rows));
  if (!quiet) std::cout << config.name << ": wrote " << rows.size() << " oracle samples\n";
  return 0;
}

std::string verdict_line(const std::string& name, bool pass, const std::string& detail) {
  return std::string(pass ? "[pass] " : "[FAIL] ") + name + ": " + detail + "\n";
}

int run_validate(const ScenarioConfig& config, const fs::path& out_dir, bool quiet) {
  auto reports = validate::scenario_suite(config);

  std::ostringstream summary;
  summary << "scenario " << config.name << "\n";
  bool all_pass = true;
  for (const auto& r : reports) {
    std::ostringstream detail;
    detail << "C=" << format_value(r.fitted_c) << " b=" << format_value(r.fitted_b)
           << " band=" << format_value(r.band_ratio());
    if (r.slope) detail << " slope=" << format_value(*r.slope);
    if (r.slope_target) detail << " (target " << format_value(*r.slope_target) << ")";
    if (r.outlier_count > 0) detail << " outliers=" << r.outlier_count;
    summary << verdict_line(r.theorem_case, r.pass, detail.str());
    all_pass = all_pass && r.pass;
  }

  // resolvent bound checks over the configured lambda range, reported for
  // two probe radii
  if (config.lambdas) {
    oracle::GridSpec spec = config.grid;
    spec.t_max = config.times.hi;
    auto grid = oracle::build_grid(config.sum, spec);
    auto lambdas = config.lambdas->values();
    std::string resolvent_csv = "scenario,check,direction,r_probe,lambda,value,verdict\n";
    for (double probe : {config.r_probe, 2.0 * config.r_probe}) {
      auto res = validate::check_resolvent_bounds(grid, lambdas, probe,
                                                  config.bands.band_limit);
      for (const auto& check : res.checks) {
        std::string verdict = check.skipped ? "skipped" : (check.pass ? "pass" : "fail");
        if (!check.skipped) all_pass = all_pass && check.pass;
        summary << verdict_line(check.name + " @r=" + format_value(probe),
                                check.pass || check.skipped,
                                check.skipped ? check.note
                                              : "range [" + format_value(check.min) + ", " +
                                                    format_value(check.max) + "]");
        for (const auto& [lambda, value] : check.values) {
          resolvent_csv += csv_escape(config.name) + "," + csv_escape(check.name) + "," +
                           check.direction + "," + format_value(probe) + "," +
                           format_value(lambda) + "," + format_value(value) + "," + verdict +
                           "\n";
        }
      }
      auto glue = validate::check_gluing_inequality(grid, lambdas, probe);
      summary << verdict_line(
          "gluing ratio @r=" + format_value(probe), glue.bounded,
          "range [" + format_value(glue.min_ratio) + ", " + format_value(glue.max_ratio) +
              "] (informational)");
    }
    atomic_write(out_dir / (config.name + "_resolvent.csv"), resolvent_csv);
  }

  summary << "coverage:";
  for (const auto& entry : validate::coverage_matrix(reports))
    summary << " " << entry.branch << "=" << entry.count;
  summary << "\n";
  summary << (all_pass ? "RESULT pass\n" : "RESULT fail\n");

  atomic_write(out_dir / (config.name + "_report.csv"), emit_table(reports));
  atomic_write(out_dir / (config.name + "_summary.txt"), summary.str());
  if (!quiet) std::cout << summary.str();
  return all_pass ? 0 : 1;
}

int run_classify(const ScenarioConfig& config, const fs::path& out_dir, bool quiet) {
  if (config.sum.ends.empty()) throw ConfigError("classify needs at least one end");
  std::string csv = "scenario,end,profile,class,witness\n";
  std::ostringstream text;
  for (const auto& end : config.sum.ends) {
    std::string profile = end.is_power_law()
                              ? "alpha=" + format_value(end.alpha())
                              : std::string("tabulated");
    const char* cls = "neither";
    if (end.is_critical()) cls = "critical";
    if (end.is_subcritical()) cls = "subcritical";
    csv += csv_escape(config.name) + "," + std::to_string(end.id) + "," +
           csv_escape(profile) + "," + cls + "," + format_value(end.cached_class.witness) +
           "\n";
    text << "end " << end.id << " (" << profile << "): " << cls
         << " witness=" << format_value(end.cached_class.witness) << "\n";
  }
  atomic_write(out_dir / (config.name + "_classify.csv"), csv);
  if (!quiet) std::cout << text.str();
  return 0;
}

}  // namespace

std::optional<Subcommand> parse_subcommand(const std::string& name) {
  if (name == "estimate") return Subcommand::Estimate;
  if (name == "simulate") return Subcommand::Simulate;
  if (name == "validate") return Subcommand::Validate;
  if (name == "classify") return Subcommand::Classify;
  return std::nullopt;
}

std::string default_out_dir() {
  const char* env = std::getenv("HEATKERNEL_OUT");
  return env && *env ? env : ".";
}

ScenarioConfig config_from_json_text(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  expect_keys(root,
              {"scenario", "ends", "center_mass", "grid", "times", "lambdas", "points",
               "constants", "bands", "stepping", "r_probe"},
              "config");

  std::string name = root.value("scenario", std::string("custom"));
  ScenarioConfig config;
  if (name != "custom") {
    config = ScenarioConfig::bundled(name);
  } else {
    config.name = "custom";
    if (!root.contains("ends")) throw ConfigError("custom scenarios must list their ends");
  }

  if (root.contains("ends")) {
    const auto& ends = root.at("ends");
    if (!ends.is_array() || ends.size() < 2)
      throw ConfigError("ends must be an array with k >= 2 entries");
    std::vector<EndSpec> built;
    for (std::size_t i = 0; i < ends.size(); ++i)
      built.push_back(end_from(ends[i], static_cast<int>(i), base_dir));
    config.sum = SumSpec::make(std::move(built), root.value("center_mass", 1.0));
  } else if (root.contains("center_mass")) {
    config.sum.center_mass = num(root.at("center_mass"), "center_mass");
    if (!(config.sum.center_mass > 0.0)) throw ConfigError("center_mass must be positive");
  }

  if (root.contains("grid")) {
    const auto& g = root.at("grid");
    expect_keys(g, {"r_max", "n_cells", "spacing_ratio", "r_probe"}, "grid");
    if (g.contains("r_max")) config.grid.r_max = num(g.at("r_max"), "grid.r_max");
    if (g.contains("n_cells")) config.grid.n_cells_per_end = integer(g.at("n_cells"), "grid.n_cells");
    if (g.contains("spacing_ratio"))
      config.grid.spacing_ratio = num(g.at("spacing_ratio"), "grid.spacing_ratio");
    if (g.contains("r_probe")) config.r_probe = num(g.at("r_probe"), "grid.r_probe");
  }
  if (root.contains("r_probe")) config.r_probe = num(root.at("r_probe"), "r_probe");
  if (root.contains("times")) config.times = range_from(root.at("times"), "times");
  config.grid.t_max = config.times.hi;
  if (root.contains("lambdas")) config.lambdas = range_from(root.at("lambdas"), "lambdas");
  if (root.contains("points")) {
    config.points.clear();
    const auto& pts = root.at("points");
    if (!pts.is_array()) throw ConfigError("points must be an array");
    for (std::size_t i = 0; i < pts.size(); ++i)
      config.points.push_back(point_from(pts[i], static_cast<int>(i)));
  }
  if (root.contains("constants")) {
    const auto& c = root.at("constants");
    expect_keys(c, {"c_low", "c_up", "b_low", "b_up"}, "constants");
    if (c.contains("c_low")) config.constants.c_low = num(c.at("c_low"), "constants.c_low");
    if (c.contains("c_up")) config.constants.c_up = num(c.at("c_up"), "constants.c_up");
    if (c.contains("b_low")) config.constants.b_low = num(c.at("b_low"), "constants.b_low");
    if (c.contains("b_up")) config.constants.b_up = num(c.at("b_up"), "constants.b_up");
  }
  if (root.contains("bands")) {
    const auto& b = root.at("bands");
    expect_keys(b, {"band_limit", "slope_tol"}, "bands");
    if (b.contains("band_limit"))
      config.bands.band_limit = num(b.at("band_limit"), "bands.band_limit");
    if (b.contains("slope_tol"))
      config.bands.slope_tol = num(b.at("slope_tol"), "bands.slope_tol");
  }
  if (root.contains("stepping")) {
    const auto& s = root.at("stepping");
    expect_keys(s, {"dt0", "growth", "smoothing_steps"}, "stepping");
    if (s.contains("dt0")) config.stepping.dt0 = num(s.at("dt0"), "stepping.dt0");
    if (s.contains("growth")) config.stepping.growth = num(s.at("growth"), "stepping.growth");
    if (s.contains("smoothing_steps"))
      config.stepping.smoothing_steps = integer(s.at("smoothing_steps"), "stepping.smoothing_steps");
  }
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json_text(buffer.str(), fs::path(path).parent_path().string());
}

int run(Subcommand subcommand, const std::string& config_path, const std::string& out_dir,
        const RunOptions& options) {
  try {
    ScenarioConfig config = load_config(config_path);
    if (options.band_limit) config.bands.band_limit = *options.band_limit;
    fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw SolverError("cannot create output directory " + out.string());
    switch (subcommand) {
      case Subcommand::Estimate:
        return run_estimate(config, out, options.quiet);
      case Subcommand::Simulate:
        return run_simulate(config, out, options.quiet);
      case Subcommand::Validate:
        return run_validate(config, out, options.quiet);
      case Subcommand::Classify:
        return run_classify(config, out, options.quiet);
    }
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const FitError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace heatsum::cli
