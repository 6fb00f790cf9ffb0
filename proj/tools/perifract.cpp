#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <omp.h>

#include "perifract/config.hpp"
#include "perifract/errors.hpp"
#include "perifract/harness.hpp"
#include "perifract/simulation.hpp"
#include "perifract/verify.hpp"

namespace fs = std::filesystem;
using namespace perifract;
using nlohmann::json;

namespace {

RunConfig load_config(const std::string& path) {
  RunConfig cfg = path.empty() ? parse_config_string("") : parse_config(path);
  for (const std::string& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  return cfg;
}

void apply_threads(RunConfig& cfg, int cli_threads) {
  if (cli_threads > 0) {
    cfg.threads = cli_threads;
  } else if (cfg.threads == 0) {
    if (const char* env = std::getenv("PERIFRACT_THREADS")) {
      try {
        cfg.threads = std::stoi(env);
      } catch (const std::exception&) {
        throw ConfigError("PERIFRACT_THREADS", std::string("expected an integer, got '") + env + "'");
      }
      if (cfg.threads < 0) throw ConfigError("PERIFRACT_THREADS", "must be nonnegative");
    }
  }
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << j.dump(2) << "\n";
}

json model_json(const MaterialModel& m, int n_quad) {
  return {{"mode", to_string(m.mode)},
          {"c", m.potential.c},
          {"beta", m.potential.beta},
          {"mu_Pa", m.mu},
          {"lambda_Pa", m.lambda},
          {"cs_mps", m.cs},
          {"cl_mps", m.cl},
          {"cR_mps", rayleigh_speed(m)},
          {"r_c", m.potential.r_c()},
          {"r_plus", m.potential.r_plus()},
          {"M", m.influence.moment()},
          {"Gc_closed_form", gc_closed_form(m)},
          {"Gc_quadrature_2.5mm", gc_direct_quadrature(m, 2.5e-3, n_quad)}};
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--epsilons", "bad number '" + item + "'");
    }
  }
  return out;
}

int cmd_run(const std::string& cfg_path, const std::string& out_dir, int threads) {
  RunConfig cfg = load_config(cfg_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  apply_threads(cfg, threads);
  const RunResult r = run_simulation(cfg, true);
  std::cout << "nodes " << r.nodes << ", steps " << r.steps << ", crack length "
            << r.tips.back().ell << " m, failed nodes " << r.tips.back().n_failed << "\n"
            << "outputs in " << cfg.output_dir << "\n";
  return 0;
}

int cmd_calibrate(const std::string& cfg_path) {
  const RunConfig cfg = load_config(cfg_path);
  const InfluenceFunction J(InfluenceKind::LinearDecay);
  const MaterialModel self = calibrate(cfg.material.E, cfg.material.Gc, cfg.material.rho, J);
  const MaterialModel paper = calibrate_with_constants(cfg.material.E, cfg.material.Gc, cfg.material.rho,
                                                       J, cfg.material.c.value_or(392.7),
                                                       cfg.material.beta.value_or(1.3201e7));
  const int nq = std::max(cfg.gauss_order, 16);
  json j{{"E_Pa", cfg.material.E},
         {"Gc", cfg.material.Gc},
         {"rho", cfg.material.rho},
         {"nu", cfg.material.nu},
         {"self_consistent", model_json(self, nq)},
         {"paper", model_json(paper, nq)}};
  std::printf("%-22s %24s %24s\n", "", "self_consistent", "paper");
  for (const char* key : {"c", "beta", "mu_Pa", "lambda_Pa", "cs_mps", "cl_mps", "cR_mps", "r_c", "r_plus",
                          "M", "Gc_closed_form", "Gc_quadrature_2.5mm"}) {
    std::printf("%-22s %24.10g %24.10g\n", key, j["self_consistent"][key].get<double>(),
                j["paper"][key].get<double>());
  }
  write_json(fs::path(cfg.output_dir) / "calibrate.json", j);
  return 0;
}

int cmd_verify(const std::string& cfg_path, long long seed) {
  RunConfig cfg = load_config(cfg_path);
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  const std::vector<CheckResult> checks = run_verification_suite(cfg);
  bool ok = true;
  for (const CheckResult& c : checks) {
    std::printf("%-32s %s  value %-14.6g threshold %-10.3g %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                c.value, c.threshold, c.detail.c_str());
    ok = ok && c.pass;
  }
  write_json(fs::path(cfg.output_dir) / "verify.json", {{"pass", ok}, {"checks", to_json(checks)}});
  return ok ? 0 : 1;
}

int cmd_converge(const std::string& cfg_path, const std::string& eps_list, const std::string& out_dir,
                 bool desk, int threads) {
  RunConfig cfg = desk ? desk_scale_preset() : load_config(cfg_path);
  if (desk && !cfg_path.empty()) throw ConfigError("--desk", "cannot be combined with -c");
  apply_threads(cfg, threads);
  std::vector<double> eps = eps_list.empty() ? (desk ? desk_scale_epsilons() : std::vector<double>{cfg.domain.epsilon})
                                             : parse_list(eps_list);
  const fs::path root = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);
  const json report = run_convergence_study(cfg, eps, root);
  std::cout << report.dump(2) << "\n";
  const bool ok = report["complete"].get<bool>() && report["tip_ordering_pass"].get<bool>() &&
                  report["sz_nesting_pass"].get<bool>();
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perifract: bond-based peridynamic mode-I fracture"};
  app.require_subcommand(1);

  std::string cfg_path;
  std::string out_dir;
  int threads = 0;
  long long seed = -1;
  std::string eps_list;
  bool desk = false;

  CLI::App* run = app.add_subcommand("run", "simulate one configuration");
  run->add_option("-c,--config", cfg_path, "INI configuration")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", out_dir, "output directory (overrides output.dir)");
  run->add_option("--threads", threads, "OpenMP threads")->check(CLI::NonNegativeNumber);

  CLI::App* cal = app.add_subcommand("calibrate", "print the calibrated constants in both modes");
  cal->add_option("-c,--config", cfg_path, "INI configuration")->check(CLI::ExistingFile);

  CLI::App* ver = app.add_subcommand("verify", "run the property checks");
  ver->add_option("-c,--config", cfg_path, "INI configuration")->check(CLI::ExistingFile);
  ver->add_option("--seed", seed, "seed for the randomized checks")->check(CLI::NonNegativeNumber);

  CLI::App* conv = app.add_subcommand("converge", "multi-horizon study");
  conv->add_option("-c,--config", cfg_path, "INI configuration")->check(CLI::ExistingFile);
  conv->add_option("--epsilons", eps_list, "comma-separated horizons in m, descending");
  conv->add_option("-o,--output", out_dir, "study directory (overrides output.dir)");
  conv->add_flag("--desk", desk, "use the desk-scale preset");
  conv->add_option("--threads", threads, "OpenMP threads")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(cfg_path, out_dir, threads);
    if (*cal) return cmd_calibrate(cfg_path);
    if (*ver) return cmd_verify(cfg_path, seed);
    if (*conv) {
      if (!desk && cfg_path.empty()) throw ConfigError("-c", "converge needs a config or --desk");
      return cmd_converge(cfg_path, eps_list, out_dir, desk, threads);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
