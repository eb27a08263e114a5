#include "powcalc/validation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "powcalc/parallel.hpp"

namespace powcalc {

namespace {

// Second-smallest successful round index of a race, or -1.
std::int64_t second_success(const RaceOutcome& r) {
  std::int64_t a = -1, b = -1;
  for (const auto k : r.per_miner) {
    if (k == kFailure) continue;
    if (a == -1 || k < a) {
      b = a;
      a = k;
    } else if (b == -1 || k < b) {
      b = k;
    }
  }
  return b;
}

std::int64_t to_i64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max()) return std::numeric_limits<std::int64_t>::max();
  if (v < std::numeric_limits<std::int64_t>::min()) return std::numeric_limits<std::int64_t>::min();
  return v.convert_to<std::int64_t>();
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<int> parse_axis(const std::string& body) {
  std::vector<int> out;
  if (const auto c1 = body.find(':'); c1 != std::string::npos) {
    const auto c2 = body.find(':', c1 + 1);
    const int lo = std::stoi(body.substr(0, c1));
    const int hi = std::stoi(body.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
    const int step = c2 == std::string::npos ? 1 : std::stoi(body.substr(c2 + 1));
    if (step <= 0 || hi < lo) throw std::invalid_argument("grid: bad range '" + body + "'");
    for (int v = lo; v <= hi; v += step) out.push_back(v);
    return out;
  }
  std::istringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(trim(tok)));
  return out;
}

}  // namespace

std::size_t dispute_count(const CampaignRecord& c, std::int64_t mu_over_T) {
  std::size_t p = 0;
  for (const auto& r : c.races) {
    const auto b = second_success(r);
    if (b != -1 && b < mu_over_T) ++p;
  }
  return p;
}

EmpiricalStats empirical_stats(const CampaignRecord& c, const Rational& T, const Rational& th,
                               const Rational& th_prime, std::int64_t mu_over_T) {
  if (c.races.empty()) throw std::invalid_argument("empirical_stats: empty campaign");
  EmpiricalStats st;
  st.race_count = c.races.size();
  const std::int64_t gt_cut = to_i64(floor_rat(th / T));       // T*rds > th  <=>  rds > gt_cut
  const std::int64_t lt_cut = to_i64(ceil_rat(th_prime / T));  // T*rds < th' <=>  rds < lt_cut
  std::size_t q = 0, o = 0;
  double sum = 0.0;
  for (const auto& r : c.races) {
    if (r.failed()) continue;
    ++st.successes;
    sum += static_cast<double>(r.winner_rounds);
    if (r.winner_rounds > gt_cut) ++q;
    if (r.winner_rounds < lt_cut) ++o;
  }
  st.failure_freq = static_cast<double>(st.race_count - st.successes) / st.race_count;
  if (st.successes) {
    st.mean_defined = st.tails_defined = true;
    st.mean_winner_rounds = sum / st.successes;
    st.time_gt_freq = static_cast<double>(q) / st.successes;
    st.time_lt_freq = static_cast<double>(o) / st.successes;
  }
  st.dispute_freq = static_cast<double>(dispute_count(c, mu_over_T)) / st.race_count;
  return st;
}

EmpiricalStats empirical_stats(const CampaignRecord& c, const Rational& mu, const Rational& T, const Rational& th,
                               const Rational& th_prime) {
  return empirical_stats(c, T, th, th_prime, to_i64(floor_rat(mu / T)));
}

RoundsError rounds_errors(const CampaignRecord& c) {
  RoundsError e;
  const auto st = empirical_stats(c, Rational(1), Rational(1), Rational(1), 0);
  if (!st.mean_defined) return e;
  const double E = expected_rounds(c.config.design);
  e.defined = true;
  e.abs = std::abs(E - st.mean_winner_rounds);
  e.rel = e.abs / E;
  return e;
}

TailError tail_errors(const CampaignRecord& c) {
  TailError t;
  const auto& m = c.config.design;
  const Rational T = 1;
  const Rational two_d = Rational(BigInt(1) << m.d);
  const Rational th = Rational(6, 5) * two_d;
  const Rational thp = Rational(4, 5) * two_d;
  const auto st = empirical_stats(c, T, th, thp, 0);
  if (!st.tails_defined) return t;
  if (const auto gt = prob_time_gt(m, T, th); gt.applicable) {
    t.gt_applicable = true;
    t.gt_abs = std::abs(gt.value - st.time_gt_freq);
  }
  if (const auto lt = prob_time_lt(m, T, thp); lt.applicable) {
    t.lt_applicable = true;
    t.lt_abs = std::abs(lt.value - st.time_lt_freq);
  }
  return t;
}

TripleSummary summarize(const CampaignRecord& c) {
  TripleSummary s;
  const auto& m = c.config.design;
  s.s = m.s;
  s.r = m.r;
  s.d = m.d;
  s.races = c.races.size();
  s.failure_theory = failure_prob(m);
  std::size_t fails = 0;
  for (const auto& r : c.races) fails += r.failed();
  s.failure_empirical = static_cast<double>(fails) / c.races.size();
  s.failure_abs = std::abs(s.failure_theory - s.failure_empirical);
  s.rounds = rounds_errors(c);
  s.tails = tail_errors(c);
  return s;
}

Grid default_grid() {
  return Grid{{4, 8, 12, 16, 20, 24, 28, 32}, {8, 16, 32, 64, 128}, {4, 8, 12, 16, 17, 18, 19, 20}};
}

Grid parse_grid(const std::string& spec) {
  Grid g = default_grid();
  std::istringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ';')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("grid: expected axis=values in '" + part + "'");
    const std::string axis = trim(part.substr(0, eq));
    std::vector<int> vals;
    try {
      vals = parse_axis(trim(part.substr(eq + 1)));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("grid: malformed values in '" + part + "'");
    }
    if (vals.empty()) throw std::invalid_argument("grid: empty axis '" + axis + "'");
    if (axis == "s") g.s = vals;
    else if (axis == "r") g.r = vals;
    else if (axis == "d") g.d = vals;
    else throw std::invalid_argument("grid: unknown axis '" + axis + "'");
  }
  return g;
}

std::string grid_to_string(const Grid& g) {
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  return "s=" + join(g.s) + ";r=" + join(g.r) + ";d=" + join(g.d);
}

std::vector<CampaignRecord> build_corpus(const Grid& g, SimMode mode, std::uint64_t seed, std::size_t races,
                                         unsigned threads) {
  std::vector<RaceConfig> cfgs;
  for (int s : g.s)
    for (int r : g.r)
      for (int d : g.d) cfgs.push_back(RaceConfig{MiningDesign::make(s, r, d), mode, seed, 192});
  std::vector<CampaignRecord> out(cfgs.size());
  parallel_for(cfgs.size(), threads, [&](std::size_t i) {
    const std::size_t n = races ? races : default_race_count(cfgs[i].design.s);
    out[i] = run_campaign(cfgs[i], n, 1);
  });
  return out;
}

std::vector<double> default_x_grid() {
  std::vector<double> xs;
  for (int b = 0; b <= 20; ++b) xs.push_back(0.01 + b * 0.05);
  return xs;
}

std::vector<CurvePoint> threshold_curves(const std::vector<TripleSummary>& corpus, const std::vector<double>& xs) {
  std::vector<CurvePoint> out;
  for (const double x : xs) {
    CurvePoint p;
    p.x = x;
    double sum = 0.0;
    for (const auto& t : corpus) {
      if (!t.rounds.defined) continue;
      if (!(t.failure_empirical < x || t.failure_theory < x)) continue;
      ++p.count;
      sum += t.rounds.abs;
      p.max = std::max(p.max, t.rounds.abs);
    }
    p.empty = p.count == 0;
    if (!p.empty) p.mean = sum / p.count;
    out.push_back(p);
  }
  return out;
}

std::vector<std::string> default_mu_values() {
  std::vector<std::string> v;
  for (int j = 1; j <= 8; ++j) v.push_back("0.02e-" + std::to_string(j));
  for (const char* x : {"1", "2", "10", "100"}) v.push_back(x);
  return v;
}

std::vector<std::string> default_T_values() {
  std::vector<std::string> v;
  for (int j = 1; j <= 8; ++j) v.push_back("0.02e-" + std::to_string(j));
  return v;
}

std::vector<ErrorEntry> build_database(const std::vector<CampaignRecord>& corpus) {
  return build_database(corpus, default_mu_values(), default_T_values());
}

std::vector<ErrorEntry> build_database(const std::vector<CampaignRecord>& corpus, const std::vector<std::string>& mus,
                                       const std::vector<std::string>& Ts) {
  // The key floor(mu/T) is taken on the binary64 values of the decimal
  // literals, as a tool reading these literals as doubles would.
  struct Pair {
    double mu, T;
    std::int64_t ratio;
  };
  std::vector<Pair> pairs;
  for (const auto& ms : mus)
    for (const auto& ts : Ts) {
      const double mu = std::stod(ms), T = std::stod(ts);
      pairs.push_back({mu, T, static_cast<std::int64_t>(std::floor(mu / T))});
    }
  std::vector<ErrorEntry> db;
  db.reserve(corpus.size() * pairs.size());
  for (const auto& c : corpus) {
    const auto& m = c.config.design;
    std::vector<std::int64_t> second;
    second.reserve(c.races.size());
    for (const auto& r : c.races) second.push_back(second_success(r));
    const double fail = failure_prob(m);
    std::map<std::int64_t, std::pair<double, double>> cache;
    for (const auto& p : pairs) {
      auto it = cache.find(p.ratio);
      if (it == cache.end()) {
        std::size_t cnt = 0;
        for (const auto b : second) cnt += (b != -1 && b < p.ratio);
        const double emp = static_cast<double>(cnt) / c.races.size();
        it = cache.emplace(p.ratio, std::make_pair(dispute_prob(m.s, m.d, BigInt(p.ratio)), emp)).first;
      }
      ErrorEntry e;
      e.s = m.s;
      e.r = m.r;
      e.d = m.d;
      e.mu = p.mu;
      e.T = p.T;
      e.ratio = p.ratio;
      e.failure = fail;
      e.theoretical = it->second.first;
      e.empirical = it->second.second;
      e.abs_error = std::abs(e.theoretical - e.empirical);
      db.push_back(e);
    }
  }
  return db;
}

Predicate parse_predicate(const std::string& text) {
  Predicate p;
  const std::string t = trim(text);
  if (t.empty() || t == "true") return p;
  std::string rest = t;
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    auto amp = rest.find('&', pos);
    std::string clause = trim(rest.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos));
    pos = amp == std::string::npos ? rest.size() + 1 : amp + 1;
    if (clause.empty()) throw std::invalid_argument("predicate: empty clause in '" + text + "'");
    const auto opat = clause.find_first_of("<>=!");
    if (opat == std::string::npos || opat == 0) throw std::invalid_argument("predicate: no comparator in '" + clause + "'");
    std::size_t oplen = 1;
    if (opat + 1 < clause.size() && clause[opat + 1] == '=') oplen = 2;
    Clause c;
    c.field = trim(clause.substr(0, opat));
    c.op = clause.substr(opat, oplen);
    if (c.op == "!") throw std::invalid_argument("predicate: bad comparator in '" + clause + "'");
    static const char* const fields[] = {"s", "r", "d", "mu", "T", "ratio", "failure", "theoretical", "empirical", "abs_error"};
    if (std::find_if(std::begin(fields), std::end(fields), [&](const char* f) { return c.field == f; }) == std::end(fields))
      throw std::invalid_argument("predicate: unknown field '" + c.field + "'");
    const std::string val = trim(clause.substr(opat + oplen));
    std::size_t used = 0;
    try {
      c.value = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size()) throw std::invalid_argument("predicate: bad value in '" + clause + "'");
    p.push_back(c);
  }
  return p;
}

namespace {

double field_value(const ErrorEntry& e, const std::string& f) {
  if (f == "s") return e.s;
  if (f == "r") return e.r;
  if (f == "d") return e.d;
  if (f == "mu") return e.mu;
  if (f == "T") return e.T;
  if (f == "ratio") return static_cast<double>(e.ratio);
  if (f == "failure") return e.failure;
  if (f == "theoretical") return e.theoretical;
  if (f == "empirical") return e.empirical;
  return e.abs_error;
}

}  // namespace

bool eval(const Predicate& p, const ErrorEntry& e) {
  for (const auto& c : p) {
    const double v = field_value(e, c.field);
    bool ok = false;
    if (c.op == "<") ok = v < c.value;
    else if (c.op == "<=") ok = v <= c.value;
    else if (c.op == "=" || c.op == "==") ok = v == c.value;
    else if (c.op == "!=") ok = v != c.value;
    else if (c.op == ">=") ok = v >= c.value;
    else if (c.op == ">") ok = v > c.value;
    if (!ok) return false;
  }
  return true;
}

QueryResult query(const std::vector<ErrorEntry>& db, const Predicate& A, const Predicate& B) {
  QueryResult q;
  for (const auto& e : db) {
    if (!eval(A, e)) continue;
    ++q.a;
    if (eval(B, e)) ++q.b;
  }
  return q;
}

void write_database(std::ostream& os, const std::vector<ErrorEntry>& db) {
  os << "s,r,d,mu,T,theoretical,empirical,abs_error\n";
  char buf[256];
  for (const auto& e : db) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.s, e.r, e.d, e.mu, e.T, e.theoretical,
                  e.empirical, e.abs_error);
    os << buf;
  }
}

void write_curves(std::ostream& os, const std::vector<CurvePoint>& curves) {
  os << "x,count,max_abs_error,mean_abs_error\n";
  char buf[128];
  for (const auto& p : curves) {
    if (p.empty)
      std::snprintf(buf, sizeof buf, "%.2f,0,empty,empty\n", p.x);
    else
      std::snprintf(buf, sizeof buf, "%.2f,%zu,%.17g,%.17g\n", p.x, p.count, p.max, p.mean);
    os << buf;
  }
}

}  // namespace powcalc
