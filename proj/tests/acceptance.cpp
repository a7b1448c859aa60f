// One line per acceptance criterion; nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "aquascale/checks.hpp"

using namespace aquascale;

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to aquascale cli>\n";
    return 2;
  }
  const Config cfg;
  int failed = 0;
  auto report = [&](int id, bool pass, const std::string& detail) {
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << std::endl;
    failed += pass ? 0 : 1;
  };

  for (auto* check : {check_gain_propriety, check_diagonal_covariance, check_extended_transfer_bound,
                      check_dense_transfer_sandwich, check_extended_cutset_order, check_dense_cutset_exponents,
                      check_interference_bounds, check_extended_mh_optimality, check_dense_mh_regimes,
                      check_random_networks}) {
    const CheckResult r = check(cfg);
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f s", r.seconds);
    report(r.id, r.pass, r.name + " (" + secs + "): " + r.summary);
  }

  // Full CLI verify: exit 0 within ten minutes.
  const std::string cmd = std::string("\"") + argv[1] + "\" verify > /dev/null 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = status == 0 && secs < 600.0;
  char detail[96];
  std::snprintf(detail, sizeof detail, "cli verify exit status %d in %.1f s (limit 600 s)", status, secs);
  report(11, ok, detail);

  return failed == 0 ? 0 : 1;
}
