#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "perifract/config.hpp"
#include "perifract/geometry.hpp"
#include "perifract/material.hpp"

namespace test_support {

// Relative comparison; doctest's default scale of 1 makes small values pass trivially.
inline doctest::Approx approx(double value) { return doctest::Approx(value).scale(0.0).epsilon(1e-12); }

inline perifract::MaterialModel default_model() {
  return perifract::calibrate(3.24e9, 500.0, 1200.0, perifract::InfluenceFunction());
}

// 2 x 2 cm plate with a 5 mm notch at the 2.5 mm horizon: 32 x 32 nodes.
inline perifract::DomainSpec small_spec(double ell0 = 0.005) {
  perifract::DomainSpec s;
  s.a = 0.02;
  s.b = 0.02;
  s.ell0 = ell0;
  return s;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the test working directory.
inline std::filesystem::path scratch(const std::string& name) {
  const std::filesystem::path p = std::filesystem::current_path() / "test_scratch" / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace test_support
