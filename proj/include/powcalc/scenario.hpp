#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "powcalc/numerics.hpp"

namespace powcalc {

struct ScenarioConstants {
  int s_l = 4, s_u = 80;
  int r_l = 24, r_u = 64;
  int d_l = 4, d_u = 64;
  Rational TVC{2, 1'000'000'000'000LL};
  Rational TFC = 3000;
  Rational alpha{3, 2};
  Rational T{1, 50'000'000'000LL};
  Rational th = 300;
  Rational th_prime = 300;
  Rational delta{1, 1'000'000'000};
  Rational delta1 = 1;
  Rational delta2{1, 1000};
  Rational delta3{1, 1000};
  Rational epsilon = Rational(1) / (BigInt(1) << 64);
  Rational tau_l = 0;
  Rational tau_u{1454, 7};
  Rational mu{1, 10000};
  int report_count = 5;
  int u_d = 3;
  int u_s = 5;
  int c = 6;
  int l = 4;

  // Optional simulation keys.
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> grid;

  // Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
  bool operator==(const ScenarioConstants&) const = default;
};

// Base constants with tau_u = 1454/7 (configuration C1).
ScenarioConstants table1();
ScenarioConstants config_c2();
ScenarioConstants config_c3();

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioConstants parse_scenario_text(const std::string& text);
ScenarioConstants parse_scenario(const std::string& path);
std::string write_scenario(const ScenarioConstants& c);

// "name = value" lines describing the effective constants.
std::vector<std::pair<std::string, std::string>> describe(const ScenarioConstants& c);

}  // namespace powcalc
