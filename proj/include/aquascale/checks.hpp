#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "aquascale/config.hpp"

namespace aquascale {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double time_limit = 0.0;       // seconds; 0 means none
  std::string summary;           // one line with the measured quantities
  nlohmann::ordered_json measured = nlohmann::ordered_json::object();
};

// Numbered as in the verify report.
CheckResult check_gain_propriety(const Config& cfg);           // 1
CheckResult check_diagonal_covariance(const Config& cfg);      // 2
CheckResult check_extended_transfer_bound(const Config& cfg);  // 3
CheckResult check_dense_transfer_sandwich(const Config& cfg);  // 4
CheckResult check_extended_cutset_order(const Config& cfg);    // 5
CheckResult check_dense_cutset_exponents(const Config& cfg);   // 6
CheckResult check_interference_bounds(const Config& cfg);      // 7
CheckResult check_extended_mh_optimality(const Config& cfg);   // 8
CheckResult check_dense_mh_regimes(const Config& cfg);         // 9
CheckResult check_random_networks(const Config& cfg);          // 10

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass = false;
  double seconds = 0.0;
};

VerifyReport verify_all(const Config& cfg);
nlohmann::ordered_json to_json(const CheckResult& c);
nlohmann::ordered_json to_json(const VerifyReport& r);

}  // namespace aquascale
