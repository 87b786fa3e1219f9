#pragma once

// Analytic self-check battery behind `interface-sim check`.

#include <string>
#include <vector>

#include "interface_sim/dynamics.hpp"

namespace isim {

struct CheckOptions {
  /// Noise covariance fed to every pass; perturb it to see checks fail.
  Vec4 noise = default_noise();
};

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool passed() const;
  /// One "PASS name: detail" / "FAIL ..." line per check, then a summary.
  std::string text() const;
};

CheckReport run_checks(const CheckOptions& options = {});

}  // namespace isim
