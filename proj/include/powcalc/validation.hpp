#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "powcalc/simulator.hpp"

namespace powcalc {

struct EmpiricalStats {
  std::size_t race_count = 0;
  std::size_t successes = 0;  // l
  bool mean_defined = false;
  double mean_winner_rounds = 0.0;
  double failure_freq = 0.0;
  bool tails_defined = false;  // false when l = 0
  double time_gt_freq = 0.0;   // q / l
  double time_lt_freq = 0.0;   // o / l
  double dispute_freq = 0.0;   // p / race_count
};

// Races in which a second miner's PoW time T * (k + 1) is at most mu, that
// is k < floor(mu/T). The closed form counts rounds 0..floor(mu/T), one more;
// the published error tables were produced with this time-based count.
std::size_t dispute_count(const CampaignRecord& c, std::int64_t mu_over_T);

EmpiricalStats empirical_stats(const CampaignRecord& c, const Rational& T, const Rational& th,
                               const Rational& th_prime, std::int64_t mu_over_T);
EmpiricalStats empirical_stats(const CampaignRecord& c, const Rational& mu, const Rational& T, const Rational& th,
                               const Rational& th_prime);

struct RoundsError {
  bool defined = false;
  double abs = 0.0;
  double rel = 0.0;
};
RoundsError rounds_errors(const CampaignRecord& c);

struct TailError {
  bool gt_applicable = false;
  double gt_abs = 0.0;
  bool lt_applicable = false;
  double lt_abs = 0.0;
};
// th = 1.2 T 2^d and th' = 0.8 T 2^d.
TailError tail_errors(const CampaignRecord& c);

struct TripleSummary {
  int s = 0, r = 0, d = 0;
  std::size_t races = 0;
  double failure_theory = 0.0;
  double failure_empirical = 0.0;
  double failure_abs = 0.0;
  RoundsError rounds;
  TailError tails;
};
TripleSummary summarize(const CampaignRecord& c);

// ---- grids and corpora ----

struct Grid {
  std::vector<int> s, r, d;
  std::size_t triples() const { return s.size() * r.size() * d.size(); }
};

// s in {4,8,...,32}, r in {8,16,32,64,128}, d in {4,8,12,16,17,18,19,20}
Grid default_grid();
// "s=4:32:4;r=8,16,32,64,128;d=4,8,12,16"; lo:hi:step ranges or lists
Grid parse_grid(const std::string& spec);
std::string grid_to_string(const Grid& g);

// One campaign per triple in s, r, d order. races = 0 means floor(10000/s).
std::vector<CampaignRecord> build_corpus(const Grid& g, SimMode mode, std::uint64_t seed, std::size_t races = 0,
                                         unsigned threads = 0);

struct CurvePoint {
  double x = 0.0;
  std::size_t count = 0;
  bool empty = true;
  double max = 0.0;
  double mean = 0.0;
};
std::vector<double> default_x_grid();
// S_x: rounds abs errors of triples whose empirical or analytic failure
// probability is below x.
std::vector<CurvePoint> threshold_curves(const std::vector<TripleSummary>& corpus, const std::vector<double>& xs);

// ---- dispute error database ----

struct ErrorEntry {
  int s = 0, r = 0, d = 0;
  double mu = 0.0;
  double T = 0.0;
  std::int64_t ratio = 0;  // floor(mu/T)
  double failure = 0.0;    // analytic failure probability of the triple
  double theoretical = 0.0;
  double empirical = 0.0;
  double abs_error = 0.0;
};

// mu in {0.02e-j | 1<=j<=8} u {1,2,10,100}; T in {0.02e-j | 1<=j<=8}
std::vector<std::string> default_mu_values();
std::vector<std::string> default_T_values();

std::vector<ErrorEntry> build_database(const std::vector<CampaignRecord>& corpus);
std::vector<ErrorEntry> build_database(const std::vector<CampaignRecord>& corpus, const std::vector<std::string>& mus,
                                       const std::vector<std::string>& Ts);

struct Clause {
  std::string field;  // s r d mu T ratio failure theoretical empirical abs_error
  std::string op;     // < <= = == != >= >
  double value = 0.0;
};
using Predicate = std::vector<Clause>;  // conjunction; empty = true

Predicate parse_predicate(const std::string& text);
bool eval(const Predicate& p, const ErrorEntry& e);

struct QueryResult {
  std::size_t a = 0, b = 0;
  bool defined() const { return a > 0; }
  long percent() const { return a ? static_cast<long>(100 * b / a) : -1; }
};
QueryResult query(const std::vector<ErrorEntry>& db, const Predicate& A, const Predicate& B);

void write_database(std::ostream& os, const std::vector<ErrorEntry>& db);
void write_curves(std::ostream& os, const std::vector<CurvePoint>& curves);

}  // namespace powcalc
