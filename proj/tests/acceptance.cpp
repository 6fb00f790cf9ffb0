// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
// Criterion 10 runs only when PERIFRACT_LONG_TESTS is set in the environment.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <omp.h>

#include "perifract/harness.hpp"
#include "perifract/output.hpp"
#include "perifract/simulation.hpp"
#include "perifract/verify.hpp"

using namespace perifract;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Line {
  std::string id;
  bool pass;
  bool skipped;
  std::string text;
};

std::vector<Line> lines;

void report(const std::string& id, bool pass, const std::string& text) {
  lines.push_back({id, pass, false, text});
  std::printf("criterion %-3s %s  %s\n", id.c_str(), pass ? "PASS" : "FAIL", text.c_str());
  std::fflush(stdout);
}

void skip(const std::string& id, const std::string& text) {
  lines.push_back({id, true, true, text});
  std::printf("criterion %-3s SKIP  %s\n", id.c_str(), text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

double num(const json& j, double fallback) { return j.is_number() ? j.get<double>() : fallback; }

bool nondecreasing_tip(const fs::path& dir) {
  const auto rows = read_csv(dir / "crack_tip.csv", kCrackTipHeader);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k][1] < rows[k - 1][1]) return false;
  }
  return !rows.empty();
}

void verification_criteria(const MaterialModel& model) {
  const CheckResult div = check_divergence_identity(model, 20240601, 50);
  report("1", div.pass && div.seconds < 10.0,
         "divergence identity: worst relative residual " + fmt("%.3g", div.value) + " (<= 1e-10) in " +
             fmt("%.2f", div.seconds) + " s (< 10 s)");

  const CheckResult rigid = check_rigid_invariance(model, 100);
  report("2", rigid.pass, "rigid motion on 100x100: max|F| / force scale " + fmt("%.3g", rigid.value) + " (<= 1e-12)");

  const CheckResult gc = check_toughness(model, 128);
  report("3", gc.pass, "toughness across 2.5/1.25/0.625 mm: " + gc.detail);

  std::string table;
  const CheckResult ll = check_local_limit(model, &table);
  report("4", ll.pass && ll.seconds < 60.0,
         "local limit: minimum observed order " + fmt("%.3f", ll.value) + " (>= 0.9) in " +
             fmt("%.1f", ll.seconds) + " s (< 60 s)");
  std::printf("%s", table.c_str());

  const CheckResult eb = check_energy_balance(model, 2000);
  report("5", eb.pass, "pre-failure energy drift " + fmt("%.3g", eb.value) + " (<= 1e-3), " + eb.detail);
}

void desk_criteria(const fs::path& root) {
  const auto t0 = std::chrono::steady_clock::now();
  const json rep = run_convergence_study(desk_scale_preset(), desk_scale_epsilons(), root);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("desk study: %zu horizons in %.0f s, report at %s\n", rep["runs"].size(), secs,
              (root / "report.json").string().c_str());

  const json& runs = rep["runs"];
  const bool complete = rep["complete"].get<bool>();
  std::vector<fs::path> dirs;
  const json study = read_json(root / "study.json");
  for (const json& e : study["runs"]) dirs.push_back(root / e["dir"].get<std::string>());

  bool growth_ok = complete;
  std::string growth;
  for (const json& r : runs) {
    const double g = num(r.value("crack_growth_m", json()), 0.0);
    growth_ok = growth_ok && g >= 1e-3;
    growth += fmt(" %.2f mm", g * 1e3);
  }
  std::printf("desk preset crack growth:%s (each >= 1 mm): %s\n", growth.c_str(), growth_ok ? "ok" : "NOT MET");

  // 6: pre-crack residual at every horizon, advective flux at the smallest
  bool pre_ok = complete;
  std::string pre;
  for (const json& r : runs) {
    const double v = num(r.value("power_precrack_ratio", json()), 1e300);
    pre_ok = pre_ok && v <= 0.05;
    pre += fmt(" %.3g", v);
  }
  const json& fine = runs.back();
  const double adv = num(fine.value("advective_ratio_median", json()), 1e300);
  report("6", pre_ok && std::abs(adv - 1.0) <= 0.25,
         "power balance: pre-crack residual / dominant flux" + pre + " (<= 0.05); median flux_adv / (-Gc V) " +
             fmt("%.3f", adv) + " at the smallest horizon (within 25% of 1)");

  // 7
  const double sym = rep["symmetry_max_dev"].get<double>();
  report("7a", complete && sym <= 1e-8, "mode-I symmetry deviation " + fmt("%.3g", sym) + " (<= 1e-8)");
  bool mono = complete;
  for (const fs::path& d : dirs) mono = mono && nondecreasing_tip(d);
  report("7b", mono, "crack length nondecreasing in every run");
  const bool nest = rep["sz_nesting_pass"].get<bool>();
  const bool order = rep["tip_ordering_pass"].get<bool>();
  report("7c", complete && nest && order,
         std::string("softening-zone nesting ") + (nest ? "ok" : "violated") + ", larger-horizon tip ahead " +
             (order ? "ok" : "violated"));
  bool open_ok = complete;
  std::string open;
  for (const json& r : runs) {
    const double v = num(r.value("opening_fraction", json()), -1.0);
    open_ok = open_ok && v >= 0.95;
    open += fmt(" %.4f", v);
  }
  report("7d", open_ok, "fraction of crack-adjacent nodes opening away from the centerline" + open + " (>= 0.95)");

  const double kin = num(rep["kinetic_ratio_median"], -1.0);
  report("8", kin >= 0.6 && kin <= 1.4,
         "median J / (Gc V) over the steady window at the smallest horizon " + fmt("%.3f", kin) + " (in [0.6, 1.4])");
}

void determinism_criterion(const fs::path& root) {
  RunConfig base = desk_scale_preset();
  base.time.t_end = 80e-6;
  base.field_every = 8;
  const int max_threads = std::max(omp_get_max_threads(), 8);
  std::string ref;
  std::vector<std::string> mismatched;
  long first_break = -1;
  for (int threads : {1, 2, max_threads}) {
    RunConfig c = base;
    c.threads = threads;
    c.output_dir = (root / ("threads" + std::to_string(threads))).string();
    fs::remove_all(c.output_dir);
    const RunResult r = run_simulation(c, true);
    if (threads == 1) first_break = r.first_break_step;
    std::string bytes;
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(c.output_dir)) {
      if (e.is_regular_file() && e.path().filename() != "config.ini") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) bytes += fs::relative(f, c.output_dir).string() + "\n" + slurp(f);
    if (ref.empty()) {
      ref = bytes;
    } else if (bytes != ref) {
      mismatched.push_back(std::to_string(threads));
    }
  }
  std::string text = "outputs for threads {1, 2, " + std::to_string(max_threads) + "} byte-identical";
  text += first_break >= 0 ? " (bonds fail from step " + std::to_string(first_break) + ")" : " (no failures)";
  if (!mismatched.empty()) text += "; differ at threads " + mismatched.front();
  report("9", mismatched.empty() && !ref.empty(), text);
}

void long_criterion(const fs::path& root) {
  RunConfig c = parse_config_string("");
  c.output_dir = (root / "full").string();
  c.field_every = 0;
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_simulation(c, true);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double open = r.opening.checked ? double(r.opening.opening) / r.opening.checked : -1.0;
  bool mono = true;
  for (std::size_t k = 1; k < r.tips.size(); ++k) mono = mono && r.tips[k].ell >= r.tips[k - 1].ell;
  const bool pass = r.symmetry_max_dev <= 1e-8 && mono && open >= 0.95;
  report("10", pass,
         "full plate, " + std::to_string(r.nodes) + " nodes x " + std::to_string(r.steps) + " steps in " +
             fmt("%.0f s", secs) + ": symmetry " + fmt("%.3g", r.symmetry_max_dev) + ", monotone tip " +
             (mono ? "yes" : "no") + ", opening fraction " + fmt("%.4f", open) + ", crack growth " +
             fmt("%.2f mm", (r.tips.back().ell - c.domain.ell0) * 1e3));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::current_path() / "acceptance_out";
  fs::create_directories(root);
  const MaterialModel model = parse_config_string("").material_model();

  try {
    verification_criteria(model);
    desk_criteria(root / "desk");
    determinism_criterion(root / "determinism");
    if (std::getenv("PERIFRACT_LONG_TESTS")) {
      long_criterion(root);
    } else {
      skip("10", "full 76,800-node run is opt-in: set PERIFRACT_LONG_TESTS=1");
    }
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }

  json out = json::array();
  bool ok = true;
  for (const Line& l : lines) {
    out.push_back({{"criterion", l.id}, {"pass", l.pass}, {"skipped", l.skipped}, {"detail", l.text}});
    ok = ok && l.pass;
  }
  std::ofstream(root / "acceptance.json") << out.dump(2) << "\n";
  std::printf("%s\n", ok ? "all criteria pass" : "some criteria FAIL");
  return ok ? 0 : 1;
}
