#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "powcalc/kernels.hpp"
#include "powcalc/ledger.hpp"
#include "powcalc/optimizer.hpp"
#include "powcalc/scenario.hpp"
#include "powcalc/simulator.hpp"
#include "powcalc/validation.hpp"

namespace fs = std::filesystem;
using namespace powcalc;

namespace {

struct InvariantFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string scenario;
  std::string out;
  std::uint64_t seed = 20240601;
  bool seed_set = false;
  std::string mode;
  unsigned tier_digits = kDefaultExactDigits;
  std::size_t races = 0;
  std::string grid;
  std::string corpus;
  unsigned threads = 0;
  std::uint64_t depth = 2;
};

ScenarioConstants load(const Flags& f) { return f.scenario.empty() ? table1() : parse_scenario(f.scenario); }

void print_header(const ScenarioConstants& k, const Flags& f, const char* command) {
  std::cout << "# powcalc " << command << '\n';
  std::cout << "# scenario " << (f.scenario.empty() ? "(built-in defaults)" : f.scenario) << '\n';
  for (const auto& [name, value] : describe(k)) std::cout << "# " << name << " = " << value << '\n';
}

std::uint64_t effective_seed(const ScenarioConstants& k, const Flags& f) {
  if (f.seed_set) return f.seed;
  return k.seed.value_or(f.seed);
}

SimMode effective_mode(const ScenarioConstants& k, const Flags& f) {
  if (!f.mode.empty()) return parse_mode(f.mode);
  return parse_mode(k.mode.value_or("geometric"));
}

Grid effective_grid(const ScenarioConstants& k, const Flags& f) {
  if (!f.grid.empty()) return parse_grid(f.grid);
  if (k.grid) return parse_grid(*k.grid);
  return default_grid();
}

std::string campaign_name(const MiningDesign& m) {
  return "campaign_s" + std::to_string(m.s) + "_r" + std::to_string(m.r) + "_d" + std::to_string(m.d) + ".txt";
}

int run_optimize(const Flags& f) {
  const auto k = load(f);
  print_header(k, f, "optimize");
  std::cout << "# tier_digits = " << f.tier_digits << '\n';
  OptimizeOptions opt;
  opt.exact_digits = f.tier_digits;
  opt.threads = f.threads;
  const auto rep = optimize(k, opt);
  std::cout << "# grid = " << rep.grid_size << ", fast feasible = " << rep.fast_feasible
            << ", fast robust = " << rep.fast_robust << '\n';
  for (const auto& c : rep.exact_rejected)
    std::cout << "# exact tier rejected " << c.s << ' ' << c.r << ' ' << c.d << '\n';
  if (rep.results.empty()) {
    std::cout << "no robustly feasible tuple\n";
  } else {
    std::printf("%4s %4s %4s %14s %14s\n", "s", "r", "d", "cost", "robust_cost");
    for (const auto& c : rep.results)
      std::printf("%4d %4d %4d %14s %14s\n", c.s, c.r, c.d, format_ceil(c.cost, 3).c_str(),
                  format_ceil(c.robust_cost, 3).c_str());
  }
  std::fflush(stdout);
  if (!f.out.empty()) {
    std::ofstream os(f.out);
    if (!os) throw std::runtime_error("cannot write " + f.out);
    os << "s,r,d,cost,robust_cost\n";
    for (const auto& c : rep.results)
      os << c.s << ',' << c.r << ',' << c.d << ',' << format_ceil(c.cost, 3) << ',' << format_ceil(c.robust_cost, 3)
         << '\n';
  }
  return 0;
}

std::vector<CampaignRecord> make_corpus(const ScenarioConstants& k, const Flags& f) {
  const auto g = effective_grid(k, f);
  const auto mode = effective_mode(k, f);
  const auto seed = effective_seed(k, f);
  std::cout << "# grid = " << grid_to_string(g) << '\n'
            << "# mode = " << mode_name(mode) << '\n'
            << "# seed = " << seed << '\n'
            << "# races = " << (f.races ? std::to_string(f.races) : std::string("floor(10000/s)")) << '\n'
            << "# isa = " << kernels::isa_name(kernels::active_isa()) << '\n';
  auto corpus = build_corpus(g, mode, seed, f.races, f.threads);
  for (const auto& c : corpus)
    for (const auto& r : c.races)
      if (!r.consistent()) throw InvariantFailure("race winner inconsistent with per-miner entries");
  return corpus;
}

int run_simulate(const Flags& f) {
  const auto k = load(f);
  print_header(k, f, "simulate");
  const auto corpus = make_corpus(k, f);
  const fs::path dir = f.out.empty() ? fs::path("campaigns") : fs::path(f.out);
  fs::create_directories(dir);
  std::printf("%4s %4s %4s %8s %12s %12s\n", "s", "r", "d", "races", "fail_emp", "fail_theory");
  for (const auto& c : corpus) {
    std::ofstream os(dir / campaign_name(c.config.design));
    if (!os) throw std::runtime_error("cannot write campaign under " + dir.string());
    write_campaign(os, c);
    const auto t = summarize(c);
    std::printf("%4d %4d %4d %8zu %12.6f %12.6f\n", t.s, t.r, t.d, t.races, t.failure_empirical, t.failure_theory);
  }
  std::cout << "# wrote " << corpus.size() << " campaign files to " << dir.string() << '\n';
  return 0;
}

std::vector<CampaignRecord> read_corpus(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename().string().rfind("campaign_", 0) == 0) files.push_back(e.path());
  if (files.empty()) throw std::runtime_error("no campaign files in " + dir);
  std::vector<CampaignRecord> out;
  for (const auto& p : files) {
    std::ifstream is(p);
    out.push_back(read_campaign(is));
  }
  std::sort(out.begin(), out.end(), [](const CampaignRecord& a, const CampaignRecord& b) {
    const auto& x = a.config.design;
    const auto& y = b.config.design;
    return std::tie(x.s, x.r, x.d) < std::tie(y.s, y.r, y.d);
  });
  return out;
}

void print_percent_table(const std::vector<ErrorEntry>& db, const char* field, const std::vector<double>& keys) {
  const auto B = parse_predicate("abs_error < 0.1");
  std::printf("# abs_error < 0.1 by %s\n", field);
  for (const double v : keys) {
    std::ostringstream p;
    p.precision(17);
    p << field << " = " << v;
    const auto q = query(db, parse_predicate(p.str()), B);
    if (q.defined())
      std::printf("%-8s %10.0f %8zu %8zu %4ld%%\n", field, v, q.a, q.b, q.percent());
    else
      std::printf("%-8s %10.0f %8s\n", field, v, "empty");
  }
}

int run_validate(const Flags& f) {
  const auto k = load(f);
  print_header(k, f, "validate");
  std::vector<CampaignRecord> corpus;
  if (!f.corpus.empty()) {
    std::cout << "# corpus = " << f.corpus << '\n';
    corpus = read_corpus(f.corpus);
  } else {
    corpus = make_corpus(k, f);
  }
  std::vector<TripleSummary> sums;
  for (const auto& c : corpus) sums.push_back(summarize(c));
  const auto curves = threshold_curves(sums, default_x_grid());
  const auto db = build_database(corpus);

  const fs::path dir = f.out.empty() ? fs::path("validation") : fs::path(f.out);
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "database.csv");
    write_database(os, db);
  }
  {
    std::ofstream os(dir / "curves.csv");
    write_curves(os, curves);
  }
  {
    std::ofstream os(dir / "triples.csv");
    os << "s,r,d,races,failure_theory,failure_empirical,failure_abs,rounds_abs,rounds_rel,gt_abs,lt_abs\n";
    char buf[512];
    for (const auto& t : sums) {
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%zu,%.17g,%.17g,%.17g,%s,%s,%s,%s\n", t.s, t.r, t.d, t.races,
                    t.failure_theory, t.failure_empirical, t.failure_abs,
                    t.rounds.defined ? std::to_string(t.rounds.abs).c_str() : "undefined",
                    t.rounds.defined ? std::to_string(t.rounds.rel).c_str() : "undefined",
                    t.tails.gt_applicable ? std::to_string(t.tails.gt_abs).c_str() : "n/a",
                    t.tails.lt_applicable ? std::to_string(t.tails.lt_abs).c_str() : "n/a");
      os << buf;
    }
  }

  std::cout << "# database entries = " << db.size() << '\n';
  std::cout << "# x, count, max_abs_error, mean_abs_error\n";
  for (const auto& p : curves) {
    if (p.empty)
      std::printf("%.2f %6zu %14s %14s\n", p.x, p.count, "empty", "empty");
    else
      std::printf("%.2f %6zu %14.6f %14.6f\n", p.x, p.count, p.max, p.mean);
  }
  std::vector<double> ds, ss, rs, ratios;
  {
    std::map<double, int> seen_d, seen_s, seen_r, seen_ratio;
    for (const auto& e : db) {
      seen_d[e.d];
      seen_s[e.s];
      seen_r[e.r];
      seen_ratio[static_cast<double>(e.ratio)];
    }
    for (const auto& [v, _] : seen_d) ds.push_back(v);
    for (const auto& [v, _] : seen_s) ss.push_back(v);
    for (const auto& [v, _] : seen_r) rs.push_back(v);
    for (const auto& [v, _] : seen_ratio) ratios.push_back(v);
  }
  print_percent_table(db, "d", ds);
  print_percent_table(db, "s", ss);
  print_percent_table(db, "r", rs);
  print_percent_table(db, "ratio", ratios);
  std::cout << "# wrote database.csv, curves.csv, triples.csv to " << dir.string() << '\n';
  std::fflush(stdout);
  return 0;
}

int run_ledger_demo(const Flags& f) {
  const auto k = load(f);
  print_header(k, f, "ledger-demo");
  const auto design = MiningDesign::make(1, 24, 10);
  std::cout << "# block design s = 1, r = 24, d = 10, confirmation depth k = " << f.depth << '\n';
  ledger::Chain chain;
  std::vector<ledger::AuthTriple> book;
  const char* inputs[] = {"invoice 1001", "invoice 1002", "invoice 1003", "invoice 1004", "invoice 1005"};
  for (const char* in : inputs) {
    book.push_back(ledger::submit(in));
    std::cout << "submit  " << in << "  " << ledger::hex(book.back().digest) << '\n';
  }
  auto mine = [&](std::vector<ledger::Digest> pending) {
    for (int attempt = 0;; ++attempt) {
      try {
        auto b = ledger::mine_block(pending, chain, design);
        chain.append(b);
        std::cout << "mine    height " << b.height << " txs " << b.txs.size() << " nonce "
                  << static_cast<std::uint64_t>(b.nonce) << '\n';
        return;
      } catch (const ledger::MiningFailure&) {
        // Fresh data for the retry: an extra salt leaf.
        std::cout << "mine    failure, retrying with fresh data\n";
        pending.push_back(ledger::hash_bytes({static_cast<std::uint8_t>(attempt)}));
      }
    }
  };
  mine({book[0].digest, book[1].digest});
  mine({book[2].digest});
  ledger::confirm(chain, book);
  auto show = [&](const char* label, const ledger::AuthTriple& t) {
    std::cout << "audit   " << label << " location "
              << (t.location ? std::to_string(*t.location) : std::string("NULL")) << " height "
              << chain.current_height() << " -> " << ledger::verdict_name(ledger::audit(t, chain, f.depth)) << '\n';
  };
  show("invoice 1001", book[0]);
  show("invoice 1003", book[2]);
  show("invoice 1004", book[3]);
  auto stale = book[1];
  stale.input.back() ^= 1;
  show("invoice 1002 (altered input)", stale);
  for (int i = 0; i < 2; ++i) mine({ledger::hash_bytes({0xAA, static_cast<std::uint8_t>(i)})});
  show("invoice 1003", book[2]);
  auto wrong = book[3];
  wrong.location = 1;
  show("invoice 1004 (claims height 1)", wrong);
  mine({book[3].digest, book[4].digest});
  ledger::confirm(chain, book);
  show("invoice 1005", book[4]);

  auto check = ledger::verify_chain(chain);
  std::cout << "verify  chain of " << chain.current_height() << " blocks -> " << (check.ok ? "ok" : check.reason) << '\n';
  if (!check.ok) throw InvariantFailure("freshly mined chain failed verification");
  auto tampered = chain;
  tampered.blocks[2].txs[0][0] ^= 1;
  check = ledger::verify_chain(tampered);
  std::cout << "tamper  block 2 tx 0 -> " << (check.ok ? "undetected" : "detected at height " + std::to_string(check.first_bad) + " (" + check.reason + ")") << '\n';
  if (check.ok) throw InvariantFailure("tampering went undetected");
  if (!f.out.empty()) {
    std::ofstream os(f.out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + f.out);
    ledger::write_chain(os, chain);
    std::cout << "# chain written to " << f.out << '\n';
  }
  std::cout << "# chain dump\n";
  ledger::dump_chain(std::cout, chain);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"powcalc: PoW configuration optimizer, mining simulator, and ledger audit demo"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", f.scenario, "scenario file (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output path");
    sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  };
  auto sim = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { f.seed = v; f.seed_set = true; },
                                           "campaign seed");
    sub->add_option("--mode", f.mode, "realhash or geometric")->check(CLI::IsMember({"realhash", "geometric"}));
    sub->add_option("--races", f.races, "races per triple (default floor(10000/s))");
    sub->add_option("--grid", f.grid, "grid, e.g. s=4:32:4;r=8,16;d=4,8");
  };
  auto* opt = app.add_subcommand("optimize", "enumerate robust optimal designs");
  common(opt);
  opt->add_option("--tier-digits", f.tier_digits, "exact tier precision in decimal digits")->check(CLI::Range(30u, 100000u));
  auto* simc = app.add_subcommand("simulate", "run mining-race campaigns");
  common(simc);
  sim(simc);
  auto* val = app.add_subcommand("validate", "build the error database and threshold curves");
  common(val);
  sim(val);
  val->add_option("--corpus", f.corpus, "directory of campaign files (default: regenerate)")->check(CLI::ExistingDirectory);
  auto* led = app.add_subcommand("ledger-demo", "scripted submit/mine/confirm/audit transcript");
  common(led);
  led->add_option("--depth", f.depth, "confirmation depth k");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*opt) return run_optimize(f);
    if (*simc) return run_simulate(f);
    if (*val) return run_validate(f);
    if (*led) return run_ledger_demo(f);
  } catch (const InvariantFailure& e) {
    std::cerr << "invariant failure: " << e.what() << '\n';
    return 2;
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
