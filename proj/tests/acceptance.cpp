// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "powcalc/ledger.hpp"
#include "powcalc/optimizer.hpp"
#include "powcalc/powmodel.hpp"
#include "powcalc/validation.hpp"

using namespace powcalc;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Want {
  int s, r, d;
  double cost;  // negative: not checked
};

int failures = 0;
std::vector<ScenarioConstants> reported;  // scenarios whose results criterion 10 rechecks

void verdict(int n, bool ok, const std::string& what) {
  std::printf("CRITERION %d %s: %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void note(const std::string& s) { std::printf("  %s\n", s.c_str()); }

std::string show(const std::vector<CandidateResult>& v) {
  if (v.empty()) return "(empty)";
  std::string out;
  for (const auto& c : v) {
    if (!out.empty()) out += ' ';
    out += "(" + std::to_string(c.s) + "," + std::to_string(c.r) + "," + std::to_string(c.d) + "," +
           format_ceil(c.cost, 3) + ")";
  }
  return out;
}

std::string show(const std::vector<Want>& v) {
  if (v.empty()) return "(empty)";
  std::string out;
  for (const auto& w : v) {
    if (!out.empty()) out += ' ';
    out += "(" + std::to_string(w.s) + "," + std::to_string(w.r) + "," + std::to_string(w.d);
    if (w.cost >= 0) {
      char b[32];
      std::snprintf(b, sizeof b, ",%g", w.cost);
      out += b;
    }
    out += ")";
  }
  return out;
}

// Costs compare on the 3-decimal ceiling against the published rounding.
bool matches(const std::vector<CandidateResult>& got, const std::vector<Want>& want) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].s != want[i].s || got[i].r != want[i].r || got[i].d != want[i].d) return false;
    if (want[i].cost >= 0 && std::abs(std::stod(format_ceil(got[i].cost, 3)) - want[i].cost) > 0.005 + 1e-9)
      return false;
  }
  return true;
}

std::vector<Want> run(int s, int r, int dhi, int dlo, std::vector<double> costs = {}) {
  std::vector<Want> w;
  for (int d = dhi, i = 0; d >= dlo; --d, ++i)
    w.push_back({s, r, d, i < static_cast<int>(costs.size()) ? costs[i] : -1.0});
  return w;
}

bool check_case(const std::string& label, const ScenarioConstants& k, const std::vector<Want>& want) {
  const auto got = enumerate_optimal(k);
  reported.push_back(k);
  const bool ok = matches(got, want);
  note(std::string(ok ? "ok   " : "DIFF ") + label + ": got " + show(got) + (ok ? "" : " want " + show(want)));
  return ok;
}

// ---- reconstructed robustness semantics ----
//
// The optimizer evaluates every constraint at every point of the box
// s' in [s-u_s, s], d' in [d-u_d, d+u_d]. The published tables are consistent
// with a narrower evaluation instead: pool and th/lambda checks over s', the
// failure bound at the nominal s, rate and tail checks for u_s miners, the
// dispute check at s-u_s miners, all over d' in [d-u_d, d]. This is a
// diagnostic only and is never counted towards a verdict.

double dbl(const Rational& q) { return q.convert_to<double>(); }

struct Recon {
  const ScenarioConstants& k;
  double T, th, mu, tau_u, tau_l, delta, delta2, eps;

  explicit Recon(const ScenarioConstants& c)
      : k(c), T(dbl(c.T)), th(dbl(c.th)), mu(dbl(c.mu)), tau_u(dbl(c.tau_u)), tau_l(dbl(c.tau_l)),
        delta(dbl(c.delta)), delta2(dbl(c.delta2)), eps(dbl(c.epsilon)) {}

  static double ly(int s, int d) { return s * std::log1p(-std::ldexp(1.0, -d)); }
  static double lam(int r, int s) { return std::floor(std::ldexp(1.0, r) / s); }

  double tauE(int s, int r, int d) const {
    const double l = ly(s, d), L = lam(r, s), f = std::exp((L + 1) * l), om = -std::expm1(l);
    return T * (1 - f - (L + 1) * om * f) / om;
  }
  double gt(int s, int r, int d) const {
    const double l = ly(s, d);
    return std::exp((std::ceil(th / T - 1) + 1) * l) - std::exp((lam(r, s) + 1) * l);
  }
  double disp(int s, int d) const {
    const double w = std::exp((std::floor(mu / T) + 1) * std::log1p(-std::ldexp(1.0, -d)));
    return 1 - std::pow(w, s) - s * std::pow(w, s - 1) * (1 - w);
  }

  bool feasible(int s, int r, int d) const {
    const int us = k.u_s, ud = k.u_d;
    if (s < k.s_l || s > k.s_u || r < k.r_l || r > k.r_u || d < k.d_l || d > k.d_u) return false;
    if (s - us < 1) return false;
    for (int sp = s - us; sp <= s; ++sp) {
      if (!(std::ceil(th / T - 1) < lam(r, sp))) return false;
      if (!pool_bound_holds(k.l, sp, k.c, k.delta3)) return false;
    }
    for (int dp = d - ud; dp <= d; ++dp) {
      if (dp < 1) return false;
      if (std::exp((lam(r, s) + 1) * ly(s, dp)) > eps) return false;
      const double t = tauE(us, r, dp);
      if (t > tau_u || t < tau_l) return false;
      if (gt(us, r, dp) > delta) return false;
      if (disp(s - us, dp) > delta2) return false;
    }
    return true;
  }

  std::vector<CandidateResult> optimal() const {
    std::map<int, std::pair<int, int>> best;
    for (int d = k.d_l; d <= k.d_u; ++d)
      for (int s = k.s_l; s <= k.s_u && !best.count(d); ++s)
        for (int r = k.r_l; r <= k.r_u; ++r)
          if (feasible(s, r, d)) {
            best[d] = {s, r};
            break;
          }
    std::vector<CandidateResult> out;
    if (best.empty()) return out;
    double cm = INFINITY;
    for (const auto& [d, sr] : best) cm = std::min(cm, cost(sr.first, sr.second, d, k));
    const double bound = dbl(k.alpha) * cm;
    for (auto it = best.rbegin(); it != best.rend() && static_cast<int>(out.size()) < k.report_count; ++it) {
      const double c = cost(it->second.first, it->second.second, it->first, k);
      if (c <= bound) out.push_back({it->second.first, it->second.second, it->first, c, robust_cost(it->second.first, it->second.second, it->first, k)});
    }
    return out;
  }
};

struct Diag {
  int agree = 0, total = 0;
  void add(const std::string& label, const ScenarioConstants& k, const std::vector<Want>& want) {
    const auto got = Recon(k).optimal();
    const bool ok = matches(got, want);
    agree += ok;
    ++total;
    if (!ok) note("reconstruction differs on " + label + ": " + show(got));
  }
  void report() const {
    note("diagnostic: reconstructed box semantics reproduce " + std::to_string(agree) + "/" + std::to_string(total) +
         " published cases (not counted)");
  }
};

ScenarioConstants with_tau(ScenarioConstants k, const Rational& tau) {
  k.tau_u = tau;
  return k;
}

// ---- criteria ----

void criterion1() {
  Diag dg;
  bool ok = true;
  const auto bitcoin = run(18, 48, 41, 37, {54004.4, 54002.2, 54001.1, 54000.55, 54000.27});
  const auto visa = std::vector<Want>{{18, 48, 35, 54000.07}, {18, 48, 34, 54000.035}};
  const auto t0 = std::chrono::steady_clock::now();
  for (auto [label, tau, want] : {std::tuple{"C1 tau_u=1454/7", Rational(1454, 7), bitcoin},
                                  std::tuple{"C1 tau_u=1454/100", Rational(1454, 100), bitcoin},
                                  std::tuple{"C1 tau_u=1454/7000", Rational(1454, 7000), visa}}) {
    const auto k = with_tau(table1(), tau);
    ok &= check_case(label, k, want);
    dg.add(label, k, want);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  note("runtime " + std::to_string(secs) + " s");
  dg.report();
  verdict(1, ok && secs <= 1800, "C1 tables at the three rate styles");
}

const Rational kRates[3] = {Rational(1454, 7), Rational(1454, 100), Rational(1454, 7000)};

void criterion2() {
  Diag dg;
  bool ok = true;
  {
    const auto k = config_c2();
    const auto got = enumerate_optimal(k);
    reported.push_back(k);
    const bool top = !got.empty() && got[0].s == 18 && got[0].r == 48 && got[0].d == 40;
    note(std::string(top ? "ok   " : "DIFF ") + "C2 tau_u=1454/7 top tuple: got " + show(got) + " want (18,48,40) first");
    ok &= top;
    const auto rg = Recon(k).optimal();
    const bool rtop = !rg.empty() && rg[0].s == 18 && rg[0].r == 48 && rg[0].d == 40;
    dg.agree += rtop;
    ++dg.total;
  }
  // C3 at the 1454 Bitcoin and PayPal rates and at all three 50000 rates.
  const auto want = run(24, 49, 40, 36);
  std::vector<std::pair<std::string, Rational>> taus = {{"1454/7", kRates[0]}, {"1454/100", kRates[1]},
                                                        {"50000/7", Rational(50000, 7)},
                                                        {"50000/100", Rational(50000, 100)},
                                                        {"50000/7000", Rational(50000, 7000)}};
  for (const auto& [name, tau] : taus) {
    const auto k = with_tau(config_c3(), tau);
    ok &= check_case("C3 tau_u=" + name, k, want);
    dg.add("C3 tau_u=" + name, k, want);
  }
  dg.report();
  verdict(2, ok, "C2 top tuple and C3 tables");
}

void criterion3() {
  Diag dg;
  bool ok = true;
  const auto lo = with_tau(config_c2(), Rational(6871, 100000));
  ok &= check_case("C2 tau_u=0.06871", lo, {});
  dg.add("C2 tau_u=0.06871", lo, {});

  const auto hi = with_tau(config_c2(), Rational(6872, 100000));
  const auto rep = optimize(hi);
  reported.push_back(hi);
  const auto want = std::vector<Want>{{18, 48, 34, 54000.03}};
  bool hi_ok = matches(rep.results, want);
  std::vector<int> rs = feasible_r_range(18, 34, hi);
  std::vector<int> r_want;
  for (int r = 48; r <= 64; ++r) r_want.push_back(r);
  hi_ok &= rs == r_want;
  hi_ok &= rep.fast_robust == r_want.size();  // nothing else in the grid is robustly feasible
  note(std::string(hi_ok ? "ok   " : "DIFF ") + "C2 tau_u=0.06872: got " + show(rep.results) + ", " +
       std::to_string(rep.fast_robust) + " robust triples, r range size " + std::to_string(rs.size()) +
       " want only (18,48..64,34)");
  ok &= hi_ok;
  dg.add("C2 tau_u=0.06872", hi, want);
  dg.report();
  verdict(3, ok, "feasibility boundary at tau_u between 0.06871 and 0.06872");
}

ScenarioConstants by_config(int which) {
  return which == 1 ? table1() : which == 2 ? config_c2() : config_c3();
}

void criterion4() {
  Diag dg;
  bool ok = true;
  {
    const auto k = with_tau(table1(), Rational(50000, 7000));
    const auto want = run(18, 48, 40, 36, {54002.2, 54001.1, 54000.55, 54000.27, 54000.138});
    ok &= check_case("C1 ant=50000 Visa", k, want);
    dg.add("C1 ant=50000 Visa", k, want);
  }
  for (long ant : {100000L, 500000L})
    for (int cfg = 1; cfg <= 3; ++cfg)
      for (long div : {7L, 100L, 7000L}) {
        const auto k = with_tau(by_config(cfg), Rational(ant, div));
        const auto want = cfg == 1 ? run(18, 48, 41, 37) : cfg == 2 ? run(18, 48, 40, 36) : run(24, 49, 40, 36);
        const auto label = "C" + std::to_string(cfg) + " ant=" + std::to_string(ant) + "/" + std::to_string(div);
        ok &= check_case(label, k, want);
        dg.add(label, k, want);
      }
  dg.report();
  verdict(4, ok, "larger ant: Visa column and the 100000 and 500000 sweep points");
}

bool close_rel(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

void criterion5() {
  int bad = 0, checks = 0;
  double worst = 0.0;
  // The closed forms return binary64, so the reference is rounded to it
  // first; failure probabilities near 1e-600 are 0 in that format.
  auto cmp = [&](double got, long double exact) {
    const double want = static_cast<double>(exact);
    ++checks;
    if (!close_rel(got, want, 1e-10)) ++bad;
    if (want != 0) worst = std::max(worst, std::abs(got - want) / std::abs(want));
  };
  for (int s : {1, 2, 3, 5})
    for (int d = 1; d <= 8; ++d)
      for (int r = 4; r <= 12; ++r) {
        const auto m = MiningDesign::make(s, r, d);
        const auto lam = oracle::lambda(r, s);
        cmp(expected_rounds(m), oracle::expected_rounds(s, d, lam));
        cmp(failure_prob(m), oracle::failure(s, d, lam));
        long double mass = oracle::failure(s, d, lam);
        for (const auto p : oracle::pmf(s, d, lam)) mass += p;
        ++checks;
        if (std::abs(mass - 1.0L) > 1e-10L) ++bad;
        double cf_mass = failure_prob(m);
        for (BigInt k = 0; k <= m.lam; ++k) cf_mass += round_pmf(k, m);
        ++checks;
        if (std::abs(cf_mass - 1.0) > 1e-10) ++bad;
        // thresholds in units of T, integer and fractional
        for (const auto th : {Rational(2), Rational(5, 2), Rational(5), Rational(17), Rational(33, 2)}) {
          const auto c = static_cast<std::int64_t>(ceil_rat(th - 1));
          const auto f = static_cast<std::int64_t>(floor_rat(th - 1));
          const auto gt = prob_time_gt(m, 1, th);
          if (gt.applicable) cmp(gt.value, oracle::tail_above(s, d, lam, c));
          const auto lt = prob_time_lt(m, 1, th);
          if (lt.applicable) cmp(lt.value, oracle::head_geometric(s, d, f));
        }
      }
  note(std::to_string(checks) + " comparisons, " + std::to_string(bad) + " outside 1e-10, worst relative " +
       std::to_string(worst));
  verdict(5, bad == 0, "closed forms against direct summation");
}

void criterion6() {
  int bad = 0;
  double worst = 0.0;
  for (int s = 1; s <= 4; ++s)
    for (int d = 1; d <= 3; ++d)
      for (int m = 0; m <= 2; ++m) {
        const double e = oracle::dispute_enumerated(s, d, m).convert_to<double>();
        const double got = dispute_prob(s, d, m);
        worst = std::max(worst, std::abs(got - e));
        if (std::abs(got - e) > 1e-12) ++bad;
        if (s == 1 && got != 0.0) ++bad;
      }
  char b[96];
  std::snprintf(b, sizeof b, "36 cases, max abs difference %.3g", worst);
  note(b);
  verdict(6, bad == 0, "dispute probability against exhaustive enumeration");
}

std::vector<CampaignRecord> corpus;

void build_geometric_corpus() {
  const auto t0 = std::chrono::steady_clock::now();
  corpus = build_corpus(default_grid(), SimMode::Geometric, kSeed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  note("geometric corpus: " + std::to_string(corpus.size()) + " triples, seed " + std::to_string(kSeed) + ", " +
       std::to_string(secs) + " s");
}

void criterion7() {
  double fmax = 0, fsum = 0, rsum = 0, gsum = 0, lsum = 0;
  int n = 0, nr = 0, ng = 0, nl = 0;
  for (const auto& c : corpus) {
    if (c.config.design.d > 16) continue;
    const auto t = summarize(c);
    ++n;
    fmax = std::max(fmax, t.failure_abs);
    fsum += t.failure_abs;
    if (t.failure_theory < 0.35 && t.rounds.defined) {
      rsum += t.rounds.rel;
      ++nr;
    }
    if (t.tails.gt_applicable) {
      gsum += t.tails.gt_abs;
      ++ng;
    }
    if (t.tails.lt_applicable) {
      lsum += t.tails.lt_abs;
      ++nl;
    }
  }
  const double fmean = fsum / n, rmean = nr ? rsum / nr : INFINITY, gmean = ng ? gsum / ng : INFINITY,
               lmean = nl ? lsum / nl : INFINITY;
  const bool a = fmax < 0.05 && fmean < 0.005, b = rmean < 0.02, c = gmean < 0.005 && lmean < 0.005;
  char buf[256];
  std::snprintf(buf, sizeof buf, "(a) %s failure abs error max %.4f mean %.5f over %d triples", a ? "ok  " : "FAIL",
                fmax, fmean, n);
  note(buf);
  std::snprintf(buf, sizeof buf, "(b) %s relative rounds error mean %.4f over %d triples with failure < 0.35",
                b ? "ok  " : "FAIL", rmean, nr);
  note(buf);
  std::snprintf(buf, sizeof buf, "(c) %s tail error means gt %.5f (%d) lt %.5f (%d)", c ? "ok  " : "FAIL", gmean, ng,
                lmean, nl);
  note(buf);
  verdict(7, a && b && c, "geometric simulator fit on d <= 16");
}

void criterion8() {
  const auto db = build_database(corpus);
  std::map<int, int> by_d, by_s, by_r;
  std::map<std::int64_t, int> by_ratio;
  for (const auto& e : db) {
    ++by_d[e.d];
    ++by_s[e.s];
    ++by_r[e.r];
    ++by_ratio[e.ratio];
  }
  bool counts = db.size() == 30720 && by_ratio[10] == 2240;
  for (const auto& [d, n] : by_d) counts &= n == 3840;
  for (const auto& [s, n] : by_s) counts &= n == 3840;
  for (const auto& [r, n] : by_r) counts &= n == 6144;
  note(std::string(counts ? "ok   " : "DIFF ") + "entry counts: " + std::to_string(db.size()) + " total, " +
       std::to_string(by_ratio[10]) + " with ratio 10");

  const auto B = parse_predicate("abs_error < 0.1");
  bool ok = counts;
  int worst = 0;
  auto row = [&](const std::string& field, const std::vector<std::pair<double, int>>& cells) {
    std::string line = field + ":";
    for (const auto& [x, want] : cells) {
      char v[64];
      std::snprintf(v, sizeof v, "%.0f", x);
      const auto q = query(db, parse_predicate(field + " = " + v), B);
      const long got = q.percent();
      const bool in = q.defined() && std::abs(got - want) <= 10;
      ok &= in;
      if (q.defined()) worst = std::max(worst, static_cast<int>(std::abs(got - want)));
      line += std::string(" ") + v + "=" + std::to_string(got) + "/" + std::to_string(want) + (in ? "" : "!");
    }
    note(line + "  (got/want)");
  };
  row("d", {{4, 70}, {8, 88}, {12, 89}, {16, 83}, {17, 84}, {18, 85}, {19, 86}, {20, 86}});
  row("s", {{4, 88}, {8, 87}, {12, 83}, {16, 83}, {20, 83}, {24, 82}, {28, 82}, {32, 82}});
  row("r", {{8, 59}, {16, 73}, {32, 96}, {64, 96}, {128, 96}});
  row("ratio", {{0, 90}, {1, 89}, {10, 98}, {99, 96}, {100, 96}, {500, 95}, {999, 95}, {1000, 95},
                {5000, 88}, {10000, 83}, {49999, 71}, {50000, 71}});
  note("largest deviation " + std::to_string(worst) + " points");
  verdict(8, ok, "dispute error database counts and percentages within 10 points");
}

void criterion9() {
  const auto mk = [](SimMode mode) { return RaceConfig{MiningDesign::make(4, 12, 6), mode, kSeed, 192}; };
  const auto g = summarize(run_campaign(mk(SimMode::Geometric), 10000));
  const auto geo = empirical_stats(run_campaign(mk(SimMode::Geometric), 10000), Rational(1), Rational(1), Rational(2), 0);
  const auto real = empirical_stats(run_campaign(mk(SimMode::RealHash), 10000), Rational(1), Rational(1), Rational(2), 0);
  const double df = std::abs(geo.failure_freq - real.failure_freq);
  const double dr = std::abs(geo.mean_winner_rounds - real.mean_winner_rounds) / geo.mean_winner_rounds;
  char b[200];
  std::snprintf(b, sizeof b, "failure %.4f vs %.4f (theory %.4f), mean rounds %.3f vs %.3f", geo.failure_freq,
                real.failure_freq, g.failure_theory, geo.mean_winner_rounds, real.mean_winner_rounds);
  note(b);
  verdict(9, geo.mean_defined && real.mean_defined && df < 0.02 && dr < 0.03,
          "realhash and geometric campaigns agree at (4,12,6)");
}

void criterion10() {
  bool ok = true;
  std::size_t tuples = 0;
  for (const auto& k : reported) {
    OptimizeOptions o60, o120;
    o120.exact_digits = 120;
    const auto a = optimize(k, o60);
    const auto b = optimize(k, o120);
    ok &= a.exact_rejected.empty();
    ok &= a.results == b.results;
    for (const auto& c : a.results) {
      ++tuples;
      ok &= robust_feasible(c.s, c.r, c.d, k, PrecisionTier::exact(60));
      ok &= robust_feasible(c.s, c.r, c.d, k, PrecisionTier::exact(120));
    }
  }
  note(std::to_string(reported.size()) + " scenarios, " + std::to_string(tuples) + " reported tuples rechecked");
  verdict(10, ok, "exact tier confirms every reported tuple and 120 digits change nothing");
}

void criterion11() {
  using namespace powcalc::ledger;
  const auto design = MiningDesign::make(1, 20, 6);
  Chain c;
  std::vector<AuthTriple> book;
  for (int h = 1; h <= 10; ++h) {
    std::vector<Digest> txs;
    for (int i = 0; i < 2; ++i) {
      auto t = submit("entry " + std::to_string(h) + "." + std::to_string(i));
      txs.push_back(t.digest);
      book.push_back(t);
    }
    c.append(mine_block(txs, c, design));
  }
  confirm(c, book);
  const auto base = book[0];  // mined at height 1

  auto null_loc = submit("never mined");
  auto stale = base;
  stale.input.push_back('x');
  auto wrong = base;
  wrong.location = 4;

  struct Case {
    const char* name;
    Verdict got, want;
  };
  const Case cases[] = {
      {"NULL location", audit(null_loc, c, 0), Verdict::Unverified},
      {"stale hash", audit(stale, c, 0), Verdict::Unverified},
      {"insufficient depth", audit(base, c, c.current_height()), Verdict::Unverified},
      {"membership success", audit(base, c, 3), Verdict::Verified},
      {"membership failure", audit(wrong, c, 3), Verdict::Untrustworthy},
  };
  bool ok = true;
  for (const auto& x : cases) {
    const bool hit = x.got == x.want;
    ok &= hit;
    note(std::string(hit ? "ok   " : "DIFF ") + x.name + ": " + verdict_name(x.got));
  }
  bool tamper = verify_chain(c).ok;
  for (std::size_t i = 1; i <= 10; ++i) {
    auto t = c;
    t.blocks[i].txs[0][0] ^= 1;
    const auto chk = verify_chain(t);
    tamper &= !chk.ok && chk.first_bad == i;
  }
  note(std::string(tamper ? "ok   " : "DIFF ") + "tamper detection at every height of a 10-block chain");
  verdict(11, ok && tamper, "ledger audit truth table and tamper detection");
}

}  // namespace

int main() {
  std::printf("# isa = %s\n", kernels::isa_name(kernels::active_isa()));
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  build_geometric_corpus();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  std::printf("%d of 11 criteria failed\n", failures);
  return failures ? 1 : 0;
}
