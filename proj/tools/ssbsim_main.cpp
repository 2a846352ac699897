#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssb/plot.hpp"
#include "ssb/run_config.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfigError = 2;

struct Overrides {
  std::optional<double> n;
  std::optional<double> b;
  std::optional<double> eps;
  std::optional<long> workers;
  std::optional<long> seed;
  std::string config_path;
  std::string out_dir;
};

int fail_config(const std::vector<ssb::ConfigError>& errors) {
  std::cerr << ssb::errors_to_json(errors).dump(2) << std::endl;
  return kExitConfigError;
}

void apply_overrides(json& doc, const std::string& experiment,
                     const Overrides& ov) {
  if (!doc.contains("params") || !doc["params"].is_object()) {
    doc["params"] = json::object();
  }
  json& params = doc["params"];
  if (ov.n) {
    if (experiment == "quench") {
      params["n_spins"] = static_cast<long>(*ov.n);
    } else if (experiment == "bath-demo") {
      params["k_bath"] = static_cast<long>(*ov.n);
    } else if (experiment != "pencil") {
      params["n_grid"] = json::array({*ov.n});
    }
  }
  if (ov.b) {
    if (experiment == "equilibrium-scan") {
      params["b_grid"] = json::array({*ov.b});
    } else if (experiment == "reorient-sweep") {
      params["b_packet"] = *ov.b;
    } else if (experiment == "bath-demo") {
      params["g"] = *ov.b;
    } else if (experiment == "pencil") {
      params["b_grid"] = json::array({*ov.b});
    }
  }
  if (ov.eps) {
    if (experiment == "quench") {
      params["epsilon"] = *ov.eps;
    } else if (experiment == "collapse-sweep" ||
               experiment == "reorient-sweep") {
      params["eps_grid"] = json::array({*ov.eps});
    }
  }
  if (ov.workers) doc["workers"] = *ov.workers;
  if (ov.seed) doc["seed"] = *ov.seed;
}

int run_subcommand(const std::string& experiment, const Overrides& ov) {
  json doc = json::object();
  if (!ov.config_path.empty()) {
    std::ifstream in(ov.config_path);
    if (!in) {
      return fail_config({{"", "cannot open config file " + ov.config_path}});
    }
    try {
      in >> doc;
    } catch (const json::exception& e) {
      return fail_config({{"", std::string("invalid JSON: ") + e.what()}});
    }
  }
  if (doc.contains("experiment") &&
      doc["experiment"].get<std::string>() != experiment) {
    return fail_config(
        {{"experiment", "config is for '" +
                            doc["experiment"].get<std::string>() +
                            "' but the subcommand is '" + experiment + "'"}});
  }
  doc["experiment"] = experiment;
  apply_overrides(doc, experiment, ov);

  std::vector<ssb::ConfigError> errors;
  const auto config = ssb::parse_run_config(doc, errors);
  if (!config) return fail_config(errors);

  return ssb::run_experiment(*config, ov.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spontaneous symmetry breaking and non-unitary dynamics lab"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"equilibrium", "equilibrium-scan"}, {"collapse", "collapse-sweep"},
      {"reorient", "reorient-sweep"},      {"quench", "quench"},
      {"bath", "bath-demo"},               {"pencil", "pencil"}};

  std::vector<Overrides> overrides(experiments.size());
  for (size_t i = 0; i < experiments.size(); ++i) {
    auto* sub = app.add_subcommand(experiments[i].first,
                                   "run the " + experiments[i].second +
                                       " experiment");
    auto& ov = overrides[i];
    sub->add_option("--config", ov.config_path, "run config JSON file");
    sub->add_option("--N", ov.n, "override the N grid / size parameter");
    sub->add_option("--B", ov.b, "override the field / coupling parameter");
    sub->add_option("--eps", ov.eps, "override the epsilon grid / value");
    sub->add_option("--out", ov.out_dir, "output directory");
    sub->add_option("--workers", ov.workers, "concurrent sweep workers");
    sub->add_option("--seed", ov.seed, "grid shuffling seed");
  }

  auto* plot = app.add_subcommand("plot", "render result files to SVG");
  std::string plot_kind, plot_out;
  std::vector<std::string> plot_inputs;
  plot->add_option("--kind", plot_kind,
                   "plot kind: trajectory | collapse | limit-scan")
      ->required();
  plot->add_option("--out", plot_out, "output SVG path")->required();
  plot->add_option("inputs", plot_inputs, "input CSV files");

  CLI11_PARSE(app, argc, argv);

  try {
    for (size_t i = 0; i < experiments.size(); ++i) {
      if (app.got_subcommand(experiments[i].first)) {
        return run_subcommand(experiments[i].second, overrides[i]);
      }
    }
    if (app.got_subcommand("plot")) {
      ssb::emit_plot(plot_inputs, plot_kind, plot_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
