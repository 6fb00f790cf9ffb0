#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "perifract/config.hpp"

namespace perifract {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

// 50 random (u, w, box) triples on a small notched plate with a few failed
// bonds; worst relative residual of the discrete divergence identity.
CheckResult check_divergence_identity(const MaterialModel& model, std::uint64_t seed, int pairs = 50);

// Rotation plus translation on a 100 x 100 lattice; max |F| over the force scale.
CheckResult check_rigid_invariance(const MaterialModel& model, int cells = 100);

// Direct quadrature at 2.5, 1.25, 0.625 mm against each other and the closed form.
CheckResult check_toughness(const MaterialModel& model, int n_quad = 128);

// Observed order of the force error for a quadratic field as epsilon halves.
CheckResult check_local_limit(const MaterialModel& model, std::string* table = nullptr);
// lambda / mu recovered from manufactured fields.
CheckResult check_lame_ratio(const MaterialModel& model);

// Smooth loading of a small plate for `steps` steps before any bond fails.
CheckResult check_energy_balance(const MaterialModel& model, long steps = 2000);

std::vector<CheckResult> run_verification_suite(const RunConfig& config);

nlohmann::json to_json(const std::vector<CheckResult>& checks);

}  // namespace perifract
