#include "perifract/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "perifract/errors.hpp"
#include "perifract/output.hpp"
#include "perifract/simulation.hpp"

namespace perifract {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct StoredRun {
  double epsilon = 0.0;
  bool ok = false;
  std::string error;
  fs::path dir;
  RunConfig config;
  std::vector<std::vector<double>> tips;  // crack_tip.csv rows
  json summary;
  std::vector<std::string> fields;  // file names under fields/, sorted
};

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return json::parse(in);
}

StoredRun load_run(const fs::path& root, const json& entry) {
  StoredRun r;
  r.epsilon = entry.at("epsilon").get<double>();
  r.dir = root / entry.at("dir").get<std::string>();
  r.ok = entry.at("status").get<std::string>() == "ok";
  if (!r.ok) {
    r.error = entry.value("error", "");
    return r;
  }
  r.config = parse_config(r.dir / "config.ini");
  r.tips = read_csv(r.dir / "crack_tip.csv", kCrackTipHeader);
  r.summary = read_json(r.dir / "summary.json");
  if (fs::exists(r.dir / "fields")) {
    for (const auto& e : fs::directory_iterator(r.dir / "fields")) {
      r.fields.push_back(e.path().filename().string());
    }
    std::sort(r.fields.begin(), r.fields.end());
  }
  return r;
}

struct LatticeIndex {
  double h;
  int nx;
  int ny;
  int col(double x1) const { return static_cast<int>(std::lround(x1 / h - 0.5)); }
  int row(double x2) const { return static_cast<int>(std::lround(x2 / h + 0.5 * (ny - 1))); }
};

LatticeIndex lattice_of(const RunConfig& c) {
  const double h = c.domain.h();
  return {h, static_cast<int>(std::lround(c.domain.a / h)), static_cast<int>(std::lround(c.domain.b / h))};
}

// Fine soft nodes farther than the coarse horizon from every coarse soft node.
std::size_t nesting_violations(const FieldFrame& coarse, const LatticeIndex& lc,
                               const FieldFrame& fine, double radius) {
  std::vector<std::uint8_t> soft(static_cast<std::size_t>(lc.nx) * lc.ny, 0);
  for (std::size_t i = 0; i < coarse.x.size(); ++i) {
    if (!coarse.soft[i]) continue;
    const int cx = lc.col(coarse.x[i].x);
    const int cy = lc.row(coarse.x[i].y);
    soft[static_cast<std::size_t>(cy) * lc.nx + cx] = 1;
  }
  const int reach = static_cast<int>(std::ceil(radius / lc.h)) + 1;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < fine.x.size(); ++i) {
    if (!fine.soft[i]) continue;
    const Vec2 p = fine.x[i];
    const int cx = lc.col(p.x);
    const int cy = lc.row(p.y);
    bool found = false;
    for (int dy = -reach; dy <= reach && !found; ++dy) {
      for (int dx = -reach; dx <= reach && !found; ++dx) {
        const int x = cx + dx;
        const int y = cy + dy;
        if (x < 0 || y < 0 || x >= lc.nx || y >= lc.ny) continue;
        if (!soft[static_cast<std::size_t>(y) * lc.nx + x]) continue;
        const Vec2 q{(x + 0.5) * lc.h, (y - 0.5 * (lc.ny - 1)) * lc.h};
        found = norm(p - q) <= radius;
      }
    }
    if (!found) ++bad;
  }
  return bad;
}

// L2 norm over the coarse lattice of u_coarse minus the cell average of u_fine.
double restricted_l2(const FieldFrame& coarse, const LatticeIndex& lc, const FieldFrame& fine,
                     const LatticeIndex& lf) {
  const int r = static_cast<int>(std::lround(lc.h / lf.h));
  const std::size_t cells = static_cast<std::size_t>(lc.nx) * lc.ny;
  std::vector<Vec2> sum(cells);
  std::vector<int> count(cells, 0);
  for (std::size_t i = 0; i < fine.x.size(); ++i) {
    const int cx = lf.col(fine.x[i].x) / r;
    const int cy = lf.row(fine.x[i].y) / r;
    const std::size_t c = static_cast<std::size_t>(cy) * lc.nx + cx;
    sum[c] += fine.u[i];
    ++count[c];
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < coarse.x.size(); ++i) {
    const std::size_t c = static_cast<std::size_t>(lc.row(coarse.x[i].y)) * lc.nx + lc.col(coarse.x[i].x);
    if (!count[c]) continue;
    const Vec2 d = coarse.u[i] - (1.0 / count[c]) * sum[c];
    acc += dot(d, d);
  }
  return std::sqrt(acc * lc.h * lc.h);
}

std::string run_dir_name(std::size_t k, double eps) {
  return "eps" + std::to_string(k) + "_" + format_double(eps);
}

}  // namespace

RunConfig desk_scale_preset() {
  RunConfig c;
  c.domain.a = 0.05;
  c.domain.b = 0.075;
  c.domain.ell0 = 0.0125;
  c.domain.epsilon = 2.5e-3;
  c.load.f0 = 3.5e6;
  c.load.t_ramp = 30e-6;
  c.time.t_end = 140e-6;
  c.time.dt = 0.04e-6;
  c.time.output_every = 25;
  c.field_every = 10;
  c.output_dir = "perifract_desk";
  c.resolve();
  c.validate();
  return c;
}

std::vector<double> desk_scale_epsilons() { return {2.5e-3, 1.25e-3}; }

json run_convergence_study(const RunConfig& base, const std::vector<double>& epsilons,
                           const fs::path& root) {
  if (epsilons.empty()) throw DomainError("converge: need at least one horizon");
  for (std::size_t k = 1; k < epsilons.size(); ++k) {
    if (!(epsilons[k] < epsilons[k - 1])) throw DomainError("converge: horizons must be sorted descending");
  }
  fs::create_directories(root);
  json study;
  study["epsilons"] = epsilons;
  study["runs"] = json::array();
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    RunConfig cfg = base;
    cfg.domain.epsilon = epsilons[k];
    if (cfg.field_every == 0) cfg.field_every = 10;
    const std::string name = run_dir_name(k, epsilons[k]);
    cfg.output_dir = (root / name).string();
    json entry{{"epsilon", epsilons[k]}, {"dir", name}};
    try {
      cfg.resolve();
      cfg.validate();
      run_simulation(cfg, true);
      entry["status"] = "ok";
    } catch (const std::exception& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
    }
    study["runs"].push_back(entry);
    std::ofstream(root / "study.json", std::ios::binary) << study.dump(2) << "\n";
  }
  return build_report(root);
}

json build_report(const fs::path& root) {
  const json study = read_json(root / "study.json");
  std::vector<StoredRun> runs;
  for (const json& entry : study.at("runs")) runs.push_back(load_run(root, entry));

  json report;
  report["epsilons"] = study.at("epsilons");
  report["complete"] = std::all_of(runs.begin(), runs.end(), [](const StoredRun& r) { return r.ok; });
  json run_info = json::array();
  double sym = 0.0;
  for (const StoredRun& r : runs) {
    json info{{"epsilon", r.epsilon}, {"status", r.ok ? "ok" : "failed"}};
    if (!r.ok) {
      info["error"] = r.error;
    } else {
      sym = std::max(sym, r.summary.at("symmetry_max_dev").get<double>());
      for (const char* key : {"crack_growth_m", "n_failed_final", "opening_fraction", "power_precrack_ratio",
                              "advective_ratio_median", "kinetic_ratio_median", "prefailure_energy_drift",
                              "hypothesis2_all_frames", "strain_bound_violation_max", "max_u_l2"}) {
        info[key] = r.summary.at(key);
      }
    }
    run_info.push_back(info);
  }
  report["runs"] = run_info;
  report["symmetry_max_dev"] = sym;

  bool tips_ok = true;
  bool sz_ok = true;
  json l2 = json::array();
  json tip_checks = json::array();

  // tip comparison table over the common output times
  std::map<double, std::vector<std::optional<double>>> tip_table;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (!runs[k].ok) continue;
    for (const auto& row : runs[k].tips) {
      auto& cells = tip_table[row[0]];
      cells.resize(runs.size());
      cells[k] = row[1];
    }
  }

  std::ofstream l2_csv(root / "l2_differences.csv", std::ios::binary);
  l2_csv << "t_us,eps_coarse_m,eps_fine_m,l2_m2,sz_violations\n";
  for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
    const StoredRun& c = runs[k];
    const StoredRun& f = runs[k + 1];
    if (!c.ok || !f.ok) continue;
    std::size_t tip_fail = 0;
    std::size_t tip_compared = 0;
    double worst_lag = -1e300;
    for (const auto& [t, cells] : tip_table) {
      if (cells.size() <= k + 1 || !cells[k] || !cells[k + 1]) continue;
      ++tip_compared;
      worst_lag = std::max(worst_lag, *cells[k + 1] - *cells[k]);
      if (*cells[k] < *cells[k + 1] - c.epsilon) ++tip_fail;
    }
    tips_ok = tips_ok && tip_fail == 0;
    tip_checks.push_back({{"eps_coarse", c.epsilon},
                          {"eps_fine", f.epsilon},
                          {"frames", tip_compared},
                          {"violations", tip_fail},
                          {"max_fine_lead_m", tip_compared ? json(worst_lag) : json(nullptr)}});

    const LatticeIndex lc = lattice_of(c.config);
    const LatticeIndex lf = lattice_of(f.config);
    std::vector<std::string> common;
    std::set_intersection(c.fields.begin(), c.fields.end(), f.fields.begin(), f.fields.end(),
                          std::back_inserter(common));
    json frames = json::array();
    std::size_t sz_bad = 0;
    double last = 0.0;
    double peak = 0.0;
    for (const std::string& name : common) {
      const FieldFrame fc = read_field_csv(c.dir / "fields" / name);
      const FieldFrame ff = read_field_csv(f.dir / "fields" / name);
      const double d = restricted_l2(fc, lc, ff, lf);
      const std::size_t bad = nesting_violations(fc, lc, ff, c.epsilon);
      sz_bad += bad;
      const double t_us = std::stol(name.substr(2, 6)) * c.config.time.dt * 1e6;
      frames.push_back({{"t_us", t_us}, {"l2", d}, {"sz_violations", bad}});
      l2_csv << format_double(t_us) << ',' << format_double(c.epsilon) << ','
             << format_double(f.epsilon) << ',' << format_double(d) << ',' << bad << "\n";
      last = d;
      peak = std::max(peak, d);
    }
    sz_ok = sz_ok && sz_bad == 0;
    l2.push_back({{"eps_coarse", c.epsilon},
                  {"eps_fine", f.epsilon},
                  {"frames", frames},
                  {"final", common.empty() ? json(nullptr) : json(last)},
                  {"max", common.empty() ? json(nullptr) : json(peak)},
                  {"sz_violations", sz_bad}});
  }
  report["tip_ordering_pass"] = tips_ok;
  report["tip_ordering"] = tip_checks;
  report["sz_nesting_pass"] = sz_ok;
  report["l2_differences"] = l2;
  json factors = json::array();
  for (std::size_t k = 1; k < l2.size(); ++k) {
    if (l2[k - 1]["final"].is_null() || l2[k]["final"].is_null()) continue;
    factors.push_back(l2[k - 1]["final"].get<double>() / l2[k]["final"].get<double>());
  }
  report["l2_decrease_factors"] = factors;

  report["kinetic_ratio_median"] = nullptr;
  for (auto it = runs.rbegin(); it != runs.rend(); ++it) {
    if (!it->ok) continue;
    report["kinetic_ratio_median"] = it->summary.at("kinetic_ratio_median");
    break;
  }

  std::ofstream tip_csv(root / "tip_comparison.csv", std::ios::binary);
  tip_csv << "t_us";
  for (const StoredRun& r : runs) tip_csv << ",ell_m_eps_" << format_double(r.epsilon);
  tip_csv << "\n";
  for (const auto& [t, cells] : tip_table) {
    tip_csv << format_double(t);
    for (std::size_t k = 0; k < runs.size(); ++k) {
      tip_csv << ',';
      if (k < cells.size() && cells[k]) tip_csv << format_double(*cells[k]);
    }
    tip_csv << "\n";
  }

  std::ofstream(root / "report.json", std::ios::binary) << report.dump(2) << "\n";
  return report;
}

}  // namespace perifract
