#include "ssb/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>

namespace ssb {

using nlohmann::json;

nlohmann::json errors_to_json(const std::vector<ConfigError>& errors) {
  json arr = json::array();
  for (const auto& e : errors) {
    arr.push_back(json{{"path", e.path}, {"message", e.message}});
  }
  return json{{"errors", arr}};
}

namespace {

const std::vector<std::string> kExperiments = {
    "equilibrium-scan", "collapse-sweep", "reorient-sweep",
    "quench",           "bath-demo",      "pencil"};

struct Checker {
  const json& doc;
  std::string prefix;
  std::vector<ConfigError>& errors;
  std::vector<std::string> known;

  void fail(const std::string& key, const std::string& message) {
    errors.push_back({prefix + key, message});
  }

  void finish_unknown_scan() {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
        fail(it.key(), "unknown field");
      }
    }
  }

  bool has(const std::string& key) {
    known.push_back(key);
    return doc.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    if (!doc[key].is_number()) {
      fail(key, "expected a number");
      return fallback;
    }
    return doc[key].get<double>();
  }

  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    if (!doc[key].is_number_integer()) {
      fail(key, "expected an integer");
      return fallback;
    }
    return doc[key].get<long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!doc[key].is_boolean()) {
      fail(key, "expected a boolean");
      return fallback;
    }
    return doc[key].get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!doc[key].is_string()) {
      fail(key, "expected a string");
      return fallback;
    }
    return doc[key].get<std::string>();
  }

  std::vector<double> grid(const std::string& key,
                           std::vector<double> fallback) {
    if (!has(key)) return fallback;
    if (!doc[key].is_array() || doc[key].empty()) {
      fail(key, "expected a non-empty array of numbers");
      return fallback;
    }
    std::vector<double> out;
    for (const auto& v : doc[key]) {
      if (!v.is_number()) {
        fail(key, "expected a non-empty array of numbers");
        return fallback;
      }
      out.push_back(v.get<double>());
    }
    return out;
  }
};

json grid_json(const std::vector<double>& grid) {
  json arr = json::array();
  for (double v : grid) arr.push_back(v);
  return arr;
}

// Per-experiment parameter validation; returns the fully defaulted block.
json validate_params(const std::string& experiment, const json& raw,
                     std::vector<ConfigError>& errors) {
  Checker c{raw, "params.", errors, {}};
  json out;

  auto require_sorted = [&](const char* key, const std::vector<double>& g,
                            bool ascending) {
    for (size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] > 0.0)) {
        c.fail(key, "entries must be positive");
        return;
      }
      if (i > 0 && (ascending ? g[i] <= g[i - 1] : g[i] >= g[i - 1])) {
        c.fail(key,
               ascending ? "entries must be strictly ascending"
                         : "entries must be strictly descending");
        return;
      }
    }
  };

  if (experiment == "equilibrium-scan") {
    const auto n_grid = c.grid("n_grid", {10.0, 100.0, 1000.0, 10000.0});
    const auto b_grid =
        c.grid("b_grid", {1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0});
    require_sorted("n_grid", n_grid, true);
    require_sorted("b_grid", b_grid, true);
    out["n_grid"] = grid_json(n_grid);
    out["b_grid"] = grid_json(b_grid);
    out["theta0"] = c.number("theta0", 0.0);
  } else if (experiment == "collapse-sweep") {
    const auto n_grid = c.grid("n_grid", {50.0, 100.0, 200.0, 400.0});
    const auto eps_grid =
        c.grid("eps_grid", {1e-3, 4.641588833612779e-3, 2.1544346900318832e-2,
                            1e-1});
    require_sorted("n_grid", n_grid, true);
    require_sorted("eps_grid", eps_grid, true);
    out["n_grid"] = grid_json(n_grid);
    out["eps_grid"] = grid_json(eps_grid);
    out["gammas"] = grid_json(c.grid("gammas", {0.3, 0.5, 0.7}));
    out["theta0"] = c.number("theta0", 0.0);
    out["samples"] = c.integer("samples", 2000);
    out["budget_factor"] = c.number("budget_factor", 50.0);
    out["write_trajectories"] = c.boolean("write_trajectories", true);
  } else if (experiment == "reorient-sweep") {
    const auto n_grid = c.grid("n_grid", {50.0, 100.0, 200.0, 400.0});
    const auto eps_grid = c.grid("eps_grid", {0.05, 0.1, 0.2, 0.4});
    require_sorted("n_grid", n_grid, true);
    require_sorted("eps_grid", eps_grid, true);
    out["n_grid"] = grid_json(n_grid);
    out["eps_grid"] = grid_json(eps_grid);
    out["b_packet"] = c.number("b_packet", 2.5e-3);
    out["theta_start"] = c.number("theta_start", M_PI / 2.0);
    out["theta_field"] = c.number("theta_field", 0.0);
    out["capture_radius"] = c.number("capture_radius", 0.1);
    out["samples"] = c.integer("samples", 2000);
    out["budget_factor"] = c.number("budget_factor", 50.0);
    out["write_trajectories"] = c.boolean("write_trajectories", true);
  } else if (experiment == "quench") {
    out["n_spins"] = c.integer("n_spins", 8);
    out["t_total"] = c.number("t_total", 50.0);
    out["epsilon"] = c.number("epsilon", 1e-2);
    out["field_sign"] = c.number("field_sign", 1.0);
    out["record_every"] = c.number("record_every", 0.1);
    out["open_boundary"] = c.boolean("open_boundary", true);
    if (out["n_spins"].get<long>() < 2 || out["n_spins"].get<long>() > 12) {
      c.fail("n_spins", "must be in [2, 12]");
    }
    if (out["field_sign"].get<double>() != 1.0 &&
        out["field_sign"].get<double>() != -1.0) {
      c.fail("field_sign", "must be +1 or -1");
    }
  } else if (experiment == "bath-demo") {
    out["n_sys_spins"] = c.integer("n_sys_spins", 1);
    out["k_bath"] = c.integer("k_bath", 8);
    out["g"] = c.number("g", 0.1);
    const double g = out["g"].get<double>();
    if (!(g > 0.0)) c.fail("g", "must be > 0");
    const auto omega = c.grid("omega", {});
    out["omega"] = grid_json(omega);
    out["t_final"] = c.number("t_final", g > 0.0 ? M_PI / g : 1.0);
    out["samples"] = c.integer("samples", 400);
    out["dim_budget"] = c.integer("dim_budget", 2048);
  } else if (experiment == "pencil") {
    const auto b_grid =
        c.grid("b_grid", {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8});
    const auto phi0_grid =
        c.grid("phi0_grid", {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8});
    require_sorted("b_grid", b_grid, false);
    require_sorted("phi0_grid", phi0_grid, false);
    out["b_grid"] = grid_json(b_grid);
    out["phi0_grid"] = grid_json(phi0_grid);
    out["height"] = c.number("height", 1.0);
    if (!(out["height"].get<double>() > 0.0)) {
      c.fail("height", "must be > 0");
    }
  }

  c.finish_unknown_scan();
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace

std::optional<RunConfig> parse_run_config(const json& doc,
                                          std::vector<ConfigError>& errors) {
  if (!doc.is_object()) {
    errors.push_back({"", "config must be a JSON object"});
    return std::nullopt;
  }
  Checker c{doc, "", errors, {}};
  RunConfig config;

  config.schema_version =
      static_cast<int>(c.integer("schema_version", kSchemaVersion));
  if (config.schema_version != kSchemaVersion) {
    c.fail("schema_version",
           "unsupported version (expected " + std::to_string(kSchemaVersion) +
               ")");
  }
  config.experiment = c.text("experiment", "");
  if (std::find(kExperiments.begin(), kExperiments.end(), config.experiment) ==
      kExperiments.end()) {
    c.fail("experiment", "must be one of: equilibrium-scan, collapse-sweep, "
                         "reorient-sweep, quench, bath-demo, pencil");
  }
  config.output_dir = c.text("output_dir", "");
  config.seed = static_cast<std::uint64_t>(c.integer("seed", 0));
  config.workers = static_cast<int>(c.integer("workers", 0));
  if (config.workers < 0) c.fail("workers", "must be >= 0");

  if (c.has("integrator")) {
    if (!doc["integrator"].is_object()) {
      c.fail("integrator", "expected an object");
    } else {
      Checker ci{doc["integrator"], "integrator.", errors, {}};
      config.integrator.tolerance = ci.number("tolerance", 1e-9);
      config.integrator.max_step = ci.number("max_step", 0.5);
      if (!(config.integrator.tolerance > 0.0)) {
        ci.fail("tolerance", "must be > 0");
      }
      if (!(config.integrator.max_step > 0.0)) {
        ci.fail("max_step", "must be > 0");
      }
      ci.finish_unknown_scan();
    }
  }

  json raw_params = json::object();
  if (c.has("params")) {
    if (!doc["params"].is_object()) {
      c.fail("params", "expected an object");
    } else {
      raw_params = doc["params"];
    }
  }
  if (!config.experiment.empty() &&
      std::find(kExperiments.begin(), kExperiments.end(), config.experiment) !=
          kExperiments.end()) {
    config.params = validate_params(config.experiment, raw_params, errors);
  }

  c.finish_unknown_scan();
  if (!errors.empty()) return std::nullopt;
  return config;
}

json canonical_json(const RunConfig& config) {
  json doc;
  doc["schema_version"] = config.schema_version;
  doc["experiment"] = config.experiment;
  doc["output_dir"] = config.output_dir;
  doc["seed"] = config.seed;
  doc["workers"] = config.workers;
  doc["integrator"] = json{{"tolerance", config.integrator.tolerance},
                           {"max_step", config.integrator.max_step}};
  doc["params"] = config.params;
  return doc;
}

std::string config_hash(const RunConfig& config) {
  const std::uint64_t h = fnv1a64(canonical_json(config).dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string resolve_output_dir(const RunConfig& config,
                               const std::string& cli_override) {
  if (!cli_override.empty()) return cli_override;
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) {
    return std::string(env);
  }
  return "ssbsim-out";
}

json RunManifest::to_json() const {
  json runs_json = json::array();
  for (const auto& r : runs) {
    runs_json.push_back(
        json{{"name", r.name}, {"status", r.status}, {"message", r.message}});
  }
  json outputs_json = json::array();
  for (const auto& f : outputs) outputs_json.push_back(f);
  return json{{"config_hash", config_hash},
              {"artifact_version", artifact_version},
              {"started_at", started_at},
              {"finished_at", finished_at},
              {"runs", runs_json},
              {"outputs", outputs_json}};
}

std::string iso_timestamp_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return std::string(buf);
}

}  // namespace ssb
