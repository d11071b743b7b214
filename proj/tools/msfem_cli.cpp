// Command-line driver: single runs, convergence sweeps, the periodic cell
// problem and the one-dimensional rate study.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msfem/analysis.hpp"
#include "msfem/basis.hpp"
#include "msfem/coarse.hpp"
#include "msfem/fine_fem.hpp"
#include "msfem/msfem1d.hpp"
#include "msfem/parallel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace msfem;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    // accept "1/8" as well as "0.125"
    if (const auto slash = s.find('/'); slash != std::string::npos) {
      return to_double(s.substr(0, slash), what) / to_double(s.substr(slash + 1), what);
    }
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParameterError("cannot parse " + what + ": '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(to_double(t, what));
  return out;
}

ScalarFunction parse_f(const std::string& name) {
  if (name == "one") return [](Point2) { return 1.0; };
  if (name == "sin_pi_half") return [](Point2 p) { return std::sin(kPi * p.x / 2) * std::sin(kPi * p.y / 2); };
  if (name == "sin_pi") return [](Point2 p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); };
  throw ParameterError("unknown f: " + name + " (one, sin_pi_half, sin_pi)");
}

bool f_vanishes(const std::string& name) { return name == "sin_pi"; }

// periodic:eps=..,ratio=..  |  rects:count=..,w=lo-hi,h=lo-hi,seed=..  |  none
PerforationSet parse_geometry(const std::string& spec, Vec2 shift) {
  if (spec == "none") return PerforationSet::none();
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    for (const auto& item : split(spec.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ParameterError("geometry: expected key=value, got '" + item + "'");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  const auto need = [&](const std::string& k) {
    if (!kv.count(k)) throw ParameterError("geometry " + kind + ": missing '" + k + "'");
    return kv.at(k);
  };
  if (kind == "periodic") {
    return periodic_discs(to_double(need("eps"), "eps"), to_double(need("ratio"), "ratio"), shift);
  }
  if (kind == "rects") {
    const auto range = [&](const std::string& k) {
      const auto parts = split(need(k), '-');
      if (parts.size() != 2) throw ParameterError("geometry rects: '" + k + "' must be lo-hi");
      return std::array<double, 2>{to_double(parts[0], k), to_double(parts[1], k)};
    };
    const auto count = static_cast<int>(to_double(need("count"), "count"));
    const auto seed = kv.count("seed") ? static_cast<std::uint64_t>(std::stoull(kv.at("seed"))) : 1ULL;
    return random_rects(count, range("w"), range("h"), seed);
  }
  throw ParameterError("unknown geometry kind: " + kind);
}

Vec2 parse_shift(const std::string& s) {
  const auto v = parse_list(s, "shift");
  if (v.size() != 2) throw ParameterError("shift must be 'sx,sy'");
  return {v[0], v[1]};
}

std::vector<int> h_to_n(const std::vector<double>& hs) {
  std::vector<int> out;
  for (double h : hs) {
    if (!(h > 0.0 && h <= 0.5)) throw ParameterError("H must lie in (0, 0.5]");
    const int n = static_cast<int>(std::lround(1.0 / h));
    if (std::abs(1.0 / n - h) > 1e-9 * h) throw ParameterError("H must be 1/n for an integer n");
    out.push_back(n);
  }
  return out;
}

void validate(int m, const std::vector<int>& ns, const PerforationSet& perf) {
  for (int n : ns) {
    if (m % n != 0) {
      throw ConfigurationError("fine grid m=" + std::to_string(m) + " is not nested in H=1/" + std::to_string(n));
    }
  }
  const double eps = perf.period();
  if (eps > 0.0 && 1.0 / m > eps / 10.0 * (1.0 + 1e-12)) {
    throw ConfigurationError("fine mesh too coarse: need h <= eps/10");
  }
}

// Options shared by solve and sweep, with their JSON keys.
struct RunOptions {
  std::string geometry = "periodic:eps=0.03,ratio=0.35";
  std::string shift = "0,0";
  std::string method = "cr";
  std::string bubbles = "on";
  std::string H = "0.125";
  std::string f = "sin_pi_half";
  int m = 512;
  double os_ratio = 3.0;
  std::string out = "out";
  int jobs = 0;
  bool no_timing = false;
  std::string config;
};

// Values from the JSON file fill every option not given on the command line.
void merge_config(CLI::App& app, RunOptions& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw ParameterError("cannot open config " + o.config);
  const json j = json::parse(in);
  const auto unset = [&](const std::string& flag) { return app.count(flag) == 0; };
  const auto as_string = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
      return s;
    }
    if (v.is_boolean()) return std::string(v.get<bool>() ? "on" : "off");
    return v.dump();
  };
  if (j.contains("geometry") && unset("--geometry")) o.geometry = as_string(j["geometry"]);
  if (j.contains("shift") && unset("--shift")) o.shift = as_string(j["shift"]);
  if (j.contains("method") && unset("--method")) o.method = as_string(j["method"]);
  if (j.contains("bubbles") && unset("--bubbles")) o.bubbles = as_string(j["bubbles"]);
  if (j.contains("H") && unset("--H")) o.H = as_string(j["H"]);
  if (j.contains("f") && unset("--f")) o.f = as_string(j["f"]);
  if (j.contains("m") && unset("--m")) o.m = j["m"].get<int>();
  if (j.contains("os_ratio") && unset("--os-ratio")) o.os_ratio = j["os_ratio"].get<double>();
  if (j.contains("out") && unset("--out")) o.out = as_string(j["out"]);
  if (j.contains("jobs") && unset("--jobs")) o.jobs = j["jobs"].get<int>();
  if (j.contains("no_timing") && unset("--no-timing")) o.no_timing = j["no_timing"].get<bool>();
}

json echo(const RunOptions& o, const std::string& command) {
  return json{{"command", command}, {"geometry", o.geometry}, {"shift", o.shift},  {"method", o.method},
              {"bubbles", o.bubbles}, {"H", o.H},              {"f", o.f},          {"m", o.m},
              {"os_ratio", o.os_ratio}, {"out", o.out},        {"jobs", o.jobs},    {"no_timing", o.no_timing}};
}

void write_echo(const fs::path& dir, const json& j) {
  std::ofstream(dir / "config.json") << j.dump(2) << "\n";
}

void add_run_options(CLI::App* cmd, RunOptions& o, bool multi) {
  cmd->add_option("--geometry", o.geometry, "none | periodic:eps=E,ratio=R | rects:count=N,w=lo-hi,h=lo-hi,seed=S");
  cmd->add_option("--shift", o.shift, "disc lattice shift in units of eps, 'sx,sy'");
  cmd->add_option("--method", o.method, multi ? "comma list of q1,mslin,msosc,msos,msos2,msos3,cr" : "q1|mslin|msosc|msos|cr");
  cmd->add_option("--H", o.H, multi ? "comma list of coarse sizes 1/n" : "coarse size 1/n");
  cmd->add_option("--f", o.f, "one | sin_pi_half | sin_pi");
  cmd->add_option("--m", o.m, "fine cells per side");
  cmd->add_option("--os-ratio", o.os_ratio, "oversampling ratio for msos");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--jobs", o.jobs, "worker threads (0: all cores)");
  cmd->add_flag("--no-timing", o.no_timing, "write wall_s = 0 for byte-reproducible CSV");
  cmd->add_option("--config", o.config, "JSON file; command-line flags take precedence");
}

std::vector<MethodSpec> method_list(const RunOptions& o, bool multi) {
  std::vector<bool> bubble_modes;
  if (o.bubbles == "on" || o.bubbles == "true" || o.bubbles == "1") {
    bubble_modes = {true};
  } else if (o.bubbles == "off" || o.bubbles == "false" || o.bubbles == "0") {
    bubble_modes = {false};
  } else if (o.bubbles == "both" && multi) {
    bubble_modes = {false, true};
  } else {
    throw ParameterError("bubbles must be on, off" + std::string(multi ? " or both" : ""));
  }
  const auto names = split(o.method, ',');
  if (names.empty() || (!multi && names.size() != 1)) throw ParameterError("expected " + std::string(multi ? "a list of methods" : "one method"));
  std::vector<MethodSpec> out;
  for (const auto& name : names) {
    for (bool b : bubble_modes) {
      MethodSpec s = parse_method(name, b);
      if (s.method == Method::MsOS && name == "msos") s.os_ratio = o.os_ratio;
      out.push_back(s);
    }
  }
  return out;
}

int cmd_solve(CLI::App& app, RunOptions o) {
  merge_config(app, o);
  const auto specs = method_list(o, false);
  const auto ns = h_to_n(parse_list(o.H, "H"));
  if (ns.size() != 1) throw ParameterError("solve takes a single H");
  const PerforationSet perf = parse_geometry(o.geometry, parse_shift(o.shift));
  validate(o.m, ns, perf);
  const ScalarFunction f = parse_f(o.f);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_echo(dir, echo(o, "solve"));

  const FineGrid grid = build_fine(o.m, perf);
  const ScalarField u_ref = solve_reference(grid, f);
  const CoarseMesh mesh = build_coarse(ns[0]);
  BuildOptions build;
  build.jobs = o.jobs;
  ErrorReport rep = run_single(grid, u_ref, f, specs[0], ns[0], build, !o.no_timing);
  if (rep.ok) {
    const MsBasisSet basis = build_basis(mesh, grid, specs[0], build);
    const CoarseSolution sol = solve_coarse(assemble_coarse(basis, f, o.jobs));
    std::ofstream sol_csv(dir / "solution.csv");
    write_solution_csv(sol_csv, sol);
    std::ofstream ref_csv(dir / "reference.csv");
    write_field_csv(ref_csv, u_ref);
  }
  std::ofstream rep_csv(dir / "report.csv");
  write_sweep_csv(rep_csv, {rep});
  write_sweep_csv(std::cout, {rep});
  if (!rep.ok) std::cerr << "error: " << rep.error << "\n";
  return rep.ok ? 0 : 1;
}

int cmd_sweep(CLI::App& app, RunOptions o) {
  merge_config(app, o);
  SweepConfig cfg;
  cfg.methods = method_list(o, true);
  cfg.n_list = h_to_n(parse_list(o.H, "H"));
  cfg.geometry = parse_geometry(o.geometry, parse_shift(o.shift));
  validate(o.m, cfg.n_list, cfg.geometry);
  cfg.geometry_tag = cfg.geometry.tag();
  cfg.f = parse_f(o.f);
  cfg.m = o.m;
  cfg.jobs = o.jobs;
  cfg.timing = !o.no_timing;
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_echo(dir, echo(o, "sweep"));
  const SweepResult res = run_sweep(cfg);
  std::ofstream csv(dir / "sweep.csv");
  write_sweep_csv(csv, res.rows);
  std::ofstream l2(dir / "l2.svg");
  write_sweep_svg(l2, res.rows, "l2");
  std::ofstream h1(dir / "h1.svg");
  write_sweep_svg(h1, res.rows, "h1");
  write_sweep_csv(std::cout, res.rows);
  for (const auto& r : res.rows) {
    if (!r.ok) std::cerr << "row " << r.method << " H=" << r.H << " failed: " << r.error << "\n";
  }
  return res.all_ok() ? 0 : 1;
}

struct CellOptions {
  std::string geometry;
  double ratio = 0.35;
  int m_cell = 256;
  std::string eps_list;
  std::string f = "sin_pi";
  int m = 512;
  std::string out = "out";
};

int cmd_cell(const CellOptions& o) {
  PerforationSet unit = o.geometry == "none" ? PerforationSet::none() : periodic_discs(1.0, o.ratio);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_echo(dir, json{{"command", "cell"}, {"geometry", o.geometry.empty() ? "periodic" : o.geometry},
                       {"ratio", o.ratio}, {"m_cell", o.m_cell}, {"eps_list", o.eps_list}, {"f", o.f}, {"m", o.m}});
  const CellProblemResult cell = solve_cell_problem(unit, o.m_cell);
  std::ofstream w(dir / "cell_w.csv");
  write_field_csv(w, cell.w);
  std::cout << "w(0,0) = " << cell.value({0.0, 0.0}) << "\n";
  if (!o.eps_list.empty()) {
    const auto eps = parse_list(o.eps_list, "eps");
    for (double e : eps) validate(o.m, {}, periodic_discs(e, o.ratio));
    const auto rows = homogenization_check(eps, o.ratio, parse_f(o.f), f_vanishes(o.f), o.m, o.m_cell);
    std::ofstream csv(dir / "homogenization.csv");
    for (std::ostream* os : {static_cast<std::ostream*>(&csv), static_cast<std::ostream*>(&std::cout)}) {
      *os << "eps,error,scaled_error,u_h1,u_h1_over_eps\n";
      for (const auto& r : rows) {
        *os << r.eps << "," << r.error << "," << r.scaled << "," << r.u_h1 << "," << r.u_h1_over_eps << "\n";
      }
    }
  }
  return 0;
}

struct OnedOptions {
  std::string eps = "0.1,0.05,0.025";
  std::string H = "0.125,0.0625,0.03125,0.015625";
  std::uint64_t seed = 42;
  std::string out = "out";
};

int cmd_oned(const OnedOptions& o) {
  const auto eps = parse_list(o.eps, "eps");
  const auto ns = h_to_n(parse_list(o.H, "H"));
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_echo(dir, json{{"command", "oned"}, {"eps", o.eps}, {"H", o.H}, {"seed", o.seed}, {"f", "sin(3x)"}});
  const auto rows = verify_estimate_1d(
      eps, ns, [](double x) { return std::sin(3 * x); }, [](double x) { return 3 * std::cos(3 * x); }, o.seed);
  std::ofstream csv(dir / "rate.csv");
  write_rate_csv(csv, rows);
  write_rate_csv(std::cout, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale finite elements on perforated domains"};
  app.require_subcommand(1);

  RunOptions solve_opts;
  solve_opts.bubbles = "off";
  auto* solve = app.add_subcommand("solve", "single coarse run against the fine reference");
  add_run_options(solve, solve_opts, false);
  bool solve_bubbles = false;
  solve->add_flag("--bubbles", solve_bubbles, "enrich with bubble functions");

  RunOptions sweep_opts;
  sweep_opts.bubbles = "both";
  sweep_opts.method = "q1,mslin,msosc,msos3,cr";
  sweep_opts.H = "0.125,0.0625,0.03125";
  auto* sweep = app.add_subcommand("sweep", "errors over methods and coarse sizes");
  add_run_options(sweep, sweep_opts, true);
  sweep->add_option("--bubbles", sweep_opts.bubbles, "on | off | both");

  CellOptions cell_opts;
  auto* cell = app.add_subcommand("cell", "periodic corrector and homogenization scalings");
  cell->add_option("--ratio", cell_opts.ratio, "disc radius / period");
  cell->add_option("--geometry", cell_opts.geometry, "'none' for an empty cell");
  cell->add_option("--m-cell", cell_opts.m_cell, "cells per side of the unit cell");
  cell->add_option("--eps", cell_opts.eps_list, "comma list of periods for the homogenization table");
  cell->add_option("--f", cell_opts.f, "one | sin_pi_half | sin_pi");
  cell->add_option("--m", cell_opts.m, "fine cells per side for the reference solves");
  cell->add_option("--out", cell_opts.out, "output directory");

  OnedOptions oned_opts;
  auto* oned = app.add_subcommand("oned", "one-dimensional convergence rate");
  oned->add_option("--eps", oned_opts.eps, "comma list of gap bounds");
  oned->add_option("--H", oned_opts.H, "comma list of coarse sizes 1/n");
  oned->add_option("--seed", oned_opts.seed, "perforation seed");
  oned->add_option("--out", oned_opts.out, "output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) {
      if (solve_bubbles) solve_opts.bubbles = "on";
      return cmd_solve(*solve, solve_opts);
    }
    if (*sweep) return cmd_sweep(*sweep, sweep_opts);
    if (*cell) return cmd_cell(cell_opts);
    if (*oned) return cmd_oned(oned_opts);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
