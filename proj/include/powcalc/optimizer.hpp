#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "powcalc/numerics.hpp"
#include "powcalc/scenario.hpp"

namespace powcalc {

enum class Constraint {
  BoundS,
  BoundR,
  BoundD,
  Epsilon,       // epsilon >= y^(lambda+1)
  ThLambda,      // ceil(th/T - 1) < lambda
  ThPrimeGuard,  // 0 < floor(th'/T - 1)
  TauLower,      // tau_l <= T * E
  TauUpper,      // T * E <= tau_u
  Delta1,        // delta1 >= P(time < th')
  Delta,         // delta >= P(time > th)
  Delta2,        // delta2 >= P(dispute within mu)
  MuRatio,       // floor(mu/T) >= 0
  PoolSize,      // l < s
  PoolPower,     // l^c <= delta3 * s^c
};

const char* constraint_name(Constraint c);

struct FeasibilityVerdict {
  bool feasible = true;
  std::vector<Constraint> violated;
  PrecisionTier tier;
};

struct CandidateResult {
  int s = 0, r = 0, d = 0;
  double cost = 0.0;
  double robust_cost = 0.0;
  bool operator==(const CandidateResult&) const = default;
};

double cost(int s, int r, int d, const ScenarioConstants& k);
double robust_cost(int s, int r, int d, const ScenarioConstants& k);

FeasibilityVerdict check_feasible(int s, int r, int d, const ScenarioConstants& k,
                                  const PrecisionTier& tier = PrecisionTier::fast());
bool robust_feasible(int s, int r, int d, const ScenarioConstants& k,
                     const PrecisionTier& tier = PrecisionTier::fast());

struct OptimizeOptions {
  unsigned exact_digits = kDefaultExactDigits;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct OptimizeReport {
  std::vector<CandidateResult> results;
  // Tuples that passed the Fast tier but failed the Exact confirmation.
  std::vector<CandidateResult> exact_rejected;
  std::size_t grid_size = 0;
  std::size_t fast_feasible = 0;
  std::size_t fast_robust = 0;
};

OptimizeReport optimize(const ScenarioConstants& k, const OptimizeOptions& opt = {});
std::vector<CandidateResult> enumerate_optimal(const ScenarioConstants& k);

// All r in [r_l, r_u] with (s, r, d) robustly feasible.
std::vector<int> feasible_r_range(int s, int d, const ScenarioConstants& k,
                                  const PrecisionTier& tier = PrecisionTier::exact());

}  // namespace powcalc
