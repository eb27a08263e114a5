#include "powcalc/scenario.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace powcalc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("scenario invariant violated: " + what);
}

bool is_prob(const Rational& q) { return q >= 0 && q <= 1; }

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

const char* const kIntKeys[] = {"s_l", "s_u", "r_l", "r_u", "d_l", "d_u", "report_count", "u_d", "u_s", "c", "l"};
const char* const kRatKeys[] = {"TVC",    "TFC",    "alpha",  "T",     "th",    "th_prime", "delta", "delta1",
                                "delta2", "delta3", "tau_l",  "tau_u", "mu",    "epsilon"};

int* int_field(ScenarioConstants& c, const std::string& k) {
  if (k == "s_l") return &c.s_l;
  if (k == "s_u") return &c.s_u;
  if (k == "r_l") return &c.r_l;
  if (k == "r_u") return &c.r_u;
  if (k == "d_l") return &c.d_l;
  if (k == "d_u") return &c.d_u;
  if (k == "report_count") return &c.report_count;
  if (k == "u_d") return &c.u_d;
  if (k == "u_s") return &c.u_s;
  if (k == "c") return &c.c;
  if (k == "l") return &c.l;
  return nullptr;
}

Rational* rat_field(ScenarioConstants& c, const std::string& k) {
  if (k == "TVC") return &c.TVC;
  if (k == "TFC") return &c.TFC;
  if (k == "alpha") return &c.alpha;
  if (k == "T") return &c.T;
  if (k == "th") return &c.th;
  if (k == "th_prime") return &c.th_prime;
  if (k == "delta") return &c.delta;
  if (k == "delta1") return &c.delta1;
  if (k == "delta2") return &c.delta2;
  if (k == "delta3") return &c.delta3;
  if (k == "tau_l") return &c.tau_l;
  if (k == "tau_u") return &c.tau_u;
  if (k == "mu") return &c.mu;
  if (k == "epsilon") return &c.epsilon;
  return nullptr;
}

const Rational& rat_field(const ScenarioConstants& c, const std::string& k) {
  return *rat_field(const_cast<ScenarioConstants&>(c), k);
}

}  // namespace

void ScenarioConstants::validate() const {
  require(0 < s_l && s_l <= s_u, "0 < s_l <= s_u");
  require(0 < r_l && r_l <= r_u, "0 < r_l <= r_u");
  require(0 < d_l && d_l <= d_u, "0 < d_l <= d_u");
  require(alpha >= 1, "alpha >= 1");
  require(T > 0, "T > 0");
  require(th > 0 && th_prime > 0, "th, th_prime > 0");
  require(mu >= 0, "mu >= 0");
  require(is_prob(delta), "delta in [0,1]");
  require(is_prob(delta1), "delta1 in [0,1]");
  require(is_prob(delta2), "delta2 in [0,1]");
  require(is_prob(delta3), "delta3 in [0,1]");
  require(is_prob(epsilon), "epsilon in [0,1]");
  require(tau_l <= tau_u, "tau_l <= tau_u");
  require(TVC >= 0 && TFC >= 0, "TVC, TFC >= 0");
  require(report_count > 0, "report_count > 0");
  require(u_s >= 0 && u_d >= 0, "u_s, u_d >= 0");
  require(c >= 1, "c >= 1");
  require(l >= 1, "l >= 1");
  if (mode) require(*mode == "realhash" || *mode == "geometric", "mode in {realhash, geometric}");
}

ScenarioConstants table1() { return ScenarioConstants{}; }

ScenarioConstants config_c2() {
  ScenarioConstants c;
  c.delta = Rational(1) / (BigInt(1) << 64);
  return c;
}

ScenarioConstants config_c3() {
  ScenarioConstants c = config_c2();
  c.delta3 = Rational(1, 10000);
  return c;
}

ScenarioConstants parse_scenario_text(const std::string& text) {
  ScenarioConstants c;
  std::map<std::string, std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ScenarioError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (seen.count(key)) throw ScenarioError("duplicate key '" + key + "'");
    seen[key] = val;
    try {
      if (int* f = int_field(c, key)) {
        const Rational q = parse_rational(val);
        if (boost::multiprecision::denominator(q) != 1 || q < -1'000'000 || q > 1'000'000)
          throw std::invalid_argument("not an integer");
        *f = boost::multiprecision::numerator(q).convert_to<int>();
      } else if (Rational* r = rat_field(c, key)) {
        *r = parse_rational(val);
      } else if (key == "seed") {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(val, &used, 0);
        if (used != val.size() || val.front() == '-') throw std::invalid_argument("bad seed");
        c.seed = v;
      } else if (key == "mode") {
        c.mode = val;
      } else if (key == "grid") {
        c.grid = val;
      } else {
        throw ScenarioError("unknown key '" + key + "'");
      }
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError("key '" + key + "': " + e.what());
    }
  }
  for (const char* k : kIntKeys)
    if (!seen.count(k)) throw ScenarioError(std::string("missing key '") + k + "'");
  for (const char* k : kRatKeys)
    if (!seen.count(k)) throw ScenarioError(std::string("missing key '") + k + "'");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  return c;
}

ScenarioConstants parse_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario_text(ss.str());
}

std::vector<std::pair<std::string, std::string>> describe(const ScenarioConstants& c) {
  std::vector<std::pair<std::string, std::string>> out;
  auto& mc = const_cast<ScenarioConstants&>(c);
  for (const char* k : {"s_l", "s_u", "r_l", "r_u", "d_l", "d_u"}) out.emplace_back(k, std::to_string(*int_field(mc, k)));
  for (const char* k : kRatKeys) out.emplace_back(k, rational_to_string(rat_field(c, k)));
  for (const char* k : {"report_count", "u_d", "u_s", "c", "l"}) out.emplace_back(k, std::to_string(*int_field(mc, k)));
  if (c.seed) out.emplace_back("seed", std::to_string(*c.seed));
  if (c.mode) out.emplace_back("mode", *c.mode);
  if (c.grid) out.emplace_back("grid", *c.grid);
  return out;
}

std::string write_scenario(const ScenarioConstants& c) {
  std::string out;
  for (const auto& [k, v] : describe(c)) out += k + " = " + v + "\n";
  return out;
}

}  // namespace powcalc
