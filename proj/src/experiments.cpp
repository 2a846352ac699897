#include <filesystem>
#include <fstream>

#include <omp.h>

#include "ssb/bath.hpp"
#include "ssb/csv.hpp"
#include "ssb/equilibrium.hpp"
#include "ssb/pencil.hpp"
#include "ssb/run_config.hpp"
#include "ssb/sweep.hpp"

namespace ssb {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ExperimentOutput {
  std::vector<RunRecord> runs;
  std::vector<std::string> outputs;
  bool any_failed = false;
};

std::string write_json_file(const fs::path& dir, const std::string& name,
                            const json& doc) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + name);
  out << doc.dump(2) << '\n';
  return name;
}

std::string trajectory_csv(const fs::path& dir, const std::string& name,
                           const Trajectory& traj) {
  CsvWriter csv((dir / name).string(),
                {"t", "op_modulus", "op_phase", "energy", "log_norm"});
  for (int i = 0; i < traj.size(); ++i) {
    csv.row({CsvWriter::cell(traj.times[i]), CsvWriter::cell(traj.op_modulus[i]),
             CsvWriter::cell(traj.op_phase[i]), CsvWriter::cell(traj.energy[i]),
             CsvWriter::cell(traj.log_norm[i])});
  }
  return name;
}

std::vector<double> as_grid(const json& arr) {
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(v.get<double>());
  return out;
}

json fit_to_json(const std::vector<double>& xs, const std::vector<double>& ts) {
  if (xs.size() < 4) return nullptr;
  const SlopeFit fit = fit_loglog(xs, ts);
  return json{{"slope", fit.slope},
              {"std_error", fit.std_error},
              {"intercept", fit.intercept},
              {"points", fit.n}};
}

ExperimentOutput run_equilibrium(const RunConfig& config, const fs::path& dir) {
  ExperimentOutput out;
  const auto n_grid = as_grid(config.params["n_grid"]);
  const auto b_grid = as_grid(config.params["b_grid"]);
  const double theta0 = config.params["theta0"].get<double>();

  const LimitScanResult scan = limit_scan(n_grid, b_grid, theta0);

  CsvWriter csv((dir / "equilibrium_scan.csv").string(),
                {"N", "B", "cutoff", "op_modulus", "converged"});
  int unconverged = 0;
  for (const auto& p : scan.points) {
    if (!p.converged) ++unconverged;
    csv.row({CsvWriter::cell(p.n_particles), CsvWriter::cell(p.field_b),
             CsvWriter::cell(p.cutoff), CsvWriter::cell(p.op_modulus),
             CsvWriter::cell(p.converged)});
  }
  out.outputs.push_back("equilibrium_scan.csv");
  out.runs.push_back({"equilibrium-scan",
                      unconverged == 0 ? "ok" : "flagged",
                      unconverged == 0
                          ? ""
                          : std::to_string(unconverged) + " unconverged points"});
  return out;
}

std::string point_name(const char* stem, double n, double eps) {
  return std::string(stem) + "_n" + format_double(n) + "_eps" +
         format_double(eps) + ".csv";
}

ExperimentOutput run_collapse(const RunConfig& config, const fs::path& dir) {
  ExperimentOutput out;
  const auto n_grid = as_grid(config.params["n_grid"]);
  const auto eps_grid = as_grid(config.params["eps_grid"]);
  const auto gammas = as_grid(config.params["gammas"]);
  const double theta0 = config.params["theta0"].get<double>();
  const bool write_traj = config.params["write_trajectories"].get<bool>();

  CollapseOptions opts;
  opts.samples = static_cast<int>(config.params["samples"].get<long>());
  opts.budget_factor = config.params["budget_factor"].get<double>();
  opts.integrator = config.integrator;

  struct Point {
    double n;
    double eps;
  };
  std::vector<Point> points;
  for (double n : n_grid) {
    for (double eps : eps_grid) points.push_back({n, eps});
  }

  auto results = sweep_execute(
      points, config.workers, config.seed, [&](const Point& pt) {
        RotorModel params;
        params.n_particles = pt.n;
        params.theta0 = theta0;
        return collapse_time(params, pt.eps, 0.5, opts);
      });

  CsvWriter csv((dir / "collapse_times.csv").string(),
                {"N", "epsilon", "gamma", "t_collapse", "reached"});
  json times = json::array();
  // t[gamma][n][eps], NaN when missing
  std::vector<std::vector<std::vector<double>>> table(
      gammas.size(), std::vector<std::vector<double>>(
                         n_grid.size(),
                         std::vector<double>(eps_grid.size(),
                                             std::nan(""))));

  for (size_t ip = 0; ip < points.size(); ++ip) {
    const Point& pt = points[ip];
    const size_t in = ip / eps_grid.size();
    const size_t ie = ip % eps_grid.size();
    const auto& res = results[ip];
    const std::string run_name = "collapse n=" + format_double(pt.n) +
                                 " eps=" + format_double(pt.eps);
    if (!res.ok) {
      out.any_failed = true;
      out.runs.push_back({run_name, "failed", res.error});
      for (double gamma : gammas) {
        csv.row({CsvWriter::cell(pt.n), CsvWriter::cell(pt.eps),
                 CsvWriter::cell(gamma), CsvWriter::cell(0.0),
                 CsvWriter::cell(false)});
      }
      continue;
    }
    const Trajectory& traj = res.value.trajectory;
    bool all_reached = true;
    for (size_t ig = 0; ig < gammas.size(); ++ig) {
      const auto t_c = first_crossing(traj.times, traj.op_modulus, gammas[ig]);
      all_reached = all_reached && t_c.has_value();
      if (t_c) table[ig][in][ie] = *t_c;
      csv.row({CsvWriter::cell(pt.n), CsvWriter::cell(pt.eps),
               CsvWriter::cell(gammas[ig]), CsvWriter::cell(t_c.value_or(0.0)),
               CsvWriter::cell(t_c.has_value())});
      times.push_back(json{{"n", pt.n},
                           {"eps", pt.eps},
                           {"gamma", gammas[ig]},
                           {"t", t_c ? json(*t_c) : json(nullptr)},
                           {"reached", t_c.has_value()}});
    }
    out.runs.push_back({run_name, all_reached ? "ok" : "flagged",
                        all_reached ? "" : "threshold never reached"});
    if (write_traj) {
      out.outputs.push_back(trajectory_csv(
          dir, point_name("collapse_traj", pt.n, pt.eps), traj));
    }
  }
  out.outputs.push_back("collapse_times.csv");

  json fits = json::array();
  for (size_t ig = 0; ig < gammas.size(); ++ig) {
    json eps_axis = json::array();
    for (size_t in = 0; in < n_grid.size(); ++in) {
      std::vector<double> xs, ts;
      for (size_t ie = 0; ie < eps_grid.size(); ++ie) {
        if (!std::isnan(table[ig][in][ie])) {
          xs.push_back(eps_grid[ie]);
          ts.push_back(table[ig][in][ie]);
        }
      }
      eps_axis.push_back(
          json{{"fixed_n", n_grid[in]}, {"fit", fit_to_json(xs, ts)}});
    }
    json n_axis = json::array();
    for (size_t ie = 0; ie < eps_grid.size(); ++ie) {
      std::vector<double> xs, ts;
      for (size_t in = 0; in < n_grid.size(); ++in) {
        if (!std::isnan(table[ig][in][ie])) {
          xs.push_back(n_grid[in]);
          ts.push_back(table[ig][in][ie]);
        }
      }
      n_axis.push_back(
          json{{"fixed_eps", eps_grid[ie]}, {"fit", fit_to_json(xs, ts)}});
    }
    fits.push_back(json{{"gamma", gammas[ig]},
                        {"eps_axis", eps_axis},
                        {"n_axis", n_axis}});
  }
  out.outputs.push_back(write_json_file(
      dir, "timescale_fit.json",
      json{{"experiment", "collapse-sweep"},
           {"n_grid", config.params["n_grid"]},
           {"eps_grid", config.params["eps_grid"]},
           {"fits", fits},
           {"times", times}}));
  return out;
}

ExperimentOutput run_reorient(const RunConfig& config, const fs::path& dir) {
  ExperimentOutput out;
  const auto n_grid = as_grid(config.params["n_grid"]);
  const auto eps_grid = as_grid(config.params["eps_grid"]);
  const double b_packet = config.params["b_packet"].get<double>();
  const double theta_start = config.params["theta_start"].get<double>();
  const double theta_field = config.params["theta_field"].get<double>();
  const bool write_traj = config.params["write_trajectories"].get<bool>();

  ReorientOptions opts;
  opts.capture_radius = config.params["capture_radius"].get<double>();
  opts.samples = static_cast<int>(config.params["samples"].get<long>());
  opts.budget_factor = config.params["budget_factor"].get<double>();
  opts.integrator = config.integrator;

  struct Point {
    double n;
    double eps;
  };
  std::vector<Point> points;
  for (double n : n_grid) {
    for (double eps : eps_grid) points.push_back({n, eps});
  }

  auto results = sweep_execute(
      points, config.workers, config.seed, [&](const Point& pt) {
        RotorModel params;
        params.n_particles = pt.n;
        params.field_b = b_packet;
        return reorientation_time(params, theta_start, theta_field, pt.eps,
                                  opts);
      });

  CsvWriter csv((dir / "reorient_times.csv").string(),
                {"N", "epsilon", "t_reorient", "reached"});
  std::vector<std::vector<double>> table(
      n_grid.size(), std::vector<double>(eps_grid.size(), std::nan("")));

  for (size_t ip = 0; ip < points.size(); ++ip) {
    const Point& pt = points[ip];
    const size_t in = ip / eps_grid.size();
    const size_t ie = ip % eps_grid.size();
    const auto& res = results[ip];
    const std::string run_name = "reorient n=" + format_double(pt.n) +
                                 " eps=" + format_double(pt.eps);
    if (!res.ok) {
      out.any_failed = true;
      out.runs.push_back({run_name, "failed", res.error});
      csv.row({CsvWriter::cell(pt.n), CsvWriter::cell(pt.eps),
               CsvWriter::cell(0.0), CsvWriter::cell(false)});
      continue;
    }
    if (res.value.reached) table[in][ie] = res.value.time;
    csv.row({CsvWriter::cell(pt.n), CsvWriter::cell(pt.eps),
             CsvWriter::cell(res.value.time),
             CsvWriter::cell(res.value.reached)});
    out.runs.push_back({run_name, res.value.reached ? "ok" : "flagged",
                        res.value.reached ? "" : "field never captured"});
    if (write_traj) {
      out.outputs.push_back(trajectory_csv(
          dir, point_name("reorient_traj", pt.n, pt.eps),
          res.value.trajectory));
    }
  }
  out.outputs.push_back("reorient_times.csv");

  json eps_axis = json::array();
  for (size_t in = 0; in < n_grid.size(); ++in) {
    std::vector<double> xs, ts;
    for (size_t ie = 0; ie < eps_grid.size(); ++ie) {
      if (!std::isnan(table[in][ie])) {
        xs.push_back(eps_grid[ie]);
        ts.push_back(table[in][ie]);
      }
    }
    eps_axis.push_back(
        json{{"fixed_n", n_grid[in]}, {"fit", fit_to_json(xs, ts)}});
  }
  json n_axis = json::array();
  for (size_t ie = 0; ie < eps_grid.size(); ++ie) {
    std::vector<double> xs, ts;
    for (size_t in = 0; in < n_grid.size(); ++in) {
      if (!std::isnan(table[in][ie])) {
        xs.push_back(n_grid[in]);
        ts.push_back(table[in][ie]);
      }
    }
    n_axis.push_back(
        json{{"fixed_eps", eps_grid[ie]}, {"fit", fit_to_json(xs, ts)}});
  }
  out.outputs.push_back(write_json_file(
      dir, "timescale_fit.json",
      json{{"experiment", "reorient-sweep"},
           {"n_grid", config.params["n_grid"]},
           {"eps_grid", config.params["eps_grid"]},
           {"eps_axis", eps_axis},
           {"n_axis", n_axis}}));
  return out;
}

ExperimentOutput run_quench(const RunConfig& config, const fs::path& dir) {
  ExperimentOutput out;
  TfimModel model;
  model.n_spins = static_cast<int>(config.params["n_spins"].get<long>());
  model.open_boundary = config.params["open_boundary"].get<bool>();

  QuenchSchedule schedule{config.params["t_total"].get<double>()};
  QuenchOptions opts;
  opts.record_every = config.params["record_every"].get<double>();
  opts.integrator = config.integrator;
  const double epsilon = config.params["epsilon"].get<double>();
  const double field_sign = config.params["field_sign"].get<double>();

  const Trajectory traj =
      quench_sweep(model, schedule, epsilon, field_sign, opts);
  out.outputs.push_back(trajectory_csv(dir, "quench_traj.csv", traj));

  double max_abs_mx = 0.0;
  for (int i = 0; i < traj.size(); ++i) {
    max_abs_mx = std::max(max_abs_mx, traj.op_modulus[i]);
  }
  const double final_mx =
      traj.op_modulus.back() * std::cos(traj.op_phase.back());

  CsvWriter csv((dir / "quench_summary.csv").string(),
                {"n_spins", "t_total", "epsilon", "field_sign", "final_mx",
                 "max_abs_mx"});
  csv.row({CsvWriter::cell(model.n_spins), CsvWriter::cell(schedule.t_total),
           CsvWriter::cell(epsilon), CsvWriter::cell(field_sign),
           CsvWriter::cell(final_mx), CsvWriter::cell(max_abs_mx)});
  out.outputs.push_back("quench_summary.csv");
  out.runs.push_back({"quench", "ok", ""});
  return out;
}

ExperimentOutput run_bath(const RunConfig& config, const fs::path& dir) {
  ExperimentOutput out;
  CompositeSpec spec;
  spec.n_sys_spins = static_cast<int>(config.params["n_sys_spins"].get<long>());
  spec.n_bath_qubits = static_cast<int>(config.params["k_bath"].get<long>());
  spec.coupling_g = config.params["g"].get<double>();
  spec.bath_frequencies = as_grid(config.params["omega"]);
  spec.dim_budget = static_cast<int>(config.params["dim_budget"].get<long>());

  const CompositeSystem system = build_composite(spec);
  const double t_final = config.params["t_final"].get<double>();
  const int samples = static_cast<int>(config.params["samples"].get<long>());
  const DecohereResult result = decohere_run(system, t_final, samples);

  CsvWriter csv((dir / "bath_series.csv").string(),
                {"t", "purity_reduced", "coherence", "population_plus",
                 "symmetry_expectation"});
  for (const auto& s : result.samples) {
    csv.row({CsvWriter::cell(s.t), CsvWriter::cell(s.purity_reduced),
             CsvWriter::cell(s.coherence_abs),
             CsvWriter::cell(s.population_plus),
             CsvWriter::cell(s.symmetry_expectation)});
  }
  out.outputs.push_back("bath_series.csv");
  out.runs.push_back({"bath-demo", "ok", ""});

  if (spec.n_bath_qubits == 1) {
    const CatLionReport report = cat_lion_demo(spec);
    out.outputs.push_back(write_json_file(
        dir, "cat_lion.json",
        json{{"time", report.time},
             {"full_purity", report.full_purity},
             {"reduced_purity_system", report.reduced_purity_system},
             {"reduced_purity_bath", report.reduced_purity_bath},
             {"entanglement_entropy", report.entanglement_entropy},
             {"symmetry_before", report.symmetry_before},
             {"symmetry_after", report.symmetry_after}}));
  }
  return out;
}

ExperimentOutput run_pencil(const RunConfig& config, const fs::path& dir) {
  ExperimentOutput out;
  const auto b_grid = as_grid(config.params["b_grid"]);
  const auto phi0_grid = as_grid(config.params["phi0_grid"]);
  const double height = config.params["height"].get<double>();

  const auto table = pencil_limit_scan(b_grid, phi0_grid, height);
  CsvWriter csv((dir / "pencil_table.csv").string(),
                {"b", "phi0", "final_ratio"});
  for (const auto& e : table) {
    csv.row({CsvWriter::cell(e.base_radius), CsvWriter::cell(e.phi0),
             CsvWriter::cell(e.final_ratio)});
  }
  out.outputs.push_back("pencil_table.csv");
  out.runs.push_back({"pencil", "ok", ""});
  return out;
}

}  // namespace

int run_experiment(const RunConfig& config, const std::string& out_override) {
  const fs::path dir = resolve_output_dir(config, out_override);
  fs::create_directories(dir);
  if (config.workers > 0) omp_set_num_threads(config.workers);

  RunManifest manifest;
  manifest.config_hash = config_hash(config);
  manifest.started_at = iso_timestamp_now();

  ExperimentOutput out;
  try {
    if (config.experiment == "equilibrium-scan") {
      out = run_equilibrium(config, dir);
    } else if (config.experiment == "collapse-sweep") {
      out = run_collapse(config, dir);
    } else if (config.experiment == "reorient-sweep") {
      out = run_reorient(config, dir);
    } else if (config.experiment == "quench") {
      out = run_quench(config, dir);
    } else if (config.experiment == "bath-demo") {
      out = run_bath(config, dir);
    } else if (config.experiment == "pencil") {
      out = run_pencil(config, dir);
    } else {
      throw std::invalid_argument("unknown experiment " + config.experiment);
    }
  } catch (const std::exception& e) {
    out.any_failed = true;
    out.runs.push_back({config.experiment, "failed", e.what()});
  }

  manifest.runs = out.runs;
  manifest.outputs = out.outputs;
  manifest.outputs.push_back("manifest.json");
  manifest.finished_at = iso_timestamp_now();
  write_json_file(dir, "manifest.json", manifest.to_json());

  return out.any_failed ? 3 : 0;
}

}  // namespace ssb
