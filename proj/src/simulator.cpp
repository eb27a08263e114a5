#include "powcalc/simulator.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "powcalc/kernels.hpp"
#include "powcalc/parallel.hpp"

namespace powcalc {

namespace {

using kernels::u128;

std::mt19937_64 race_rng(const RaceConfig& cfg, std::uint64_t race_index) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(cfg.seed),
                    hi(cfg.seed),
                    lo(race_index),
                    hi(race_index),
                    static_cast<std::uint32_t>(cfg.design.s),
                    static_cast<std::uint32_t>(cfg.design.r),
                    static_cast<std::uint32_t>(cfg.design.d)};
  return std::mt19937_64(seq);
}

// Uniform on (0, 1] from the top 53 bits.
double unit_open_closed(std::uint64_t x) { return static_cast<double>((x >> 11) + 1) * 0x1.0p-53; }

u128 to_u128_clamped(const BigInt& v) {
  const BigInt maxv = (BigInt(1) << 128) - 1;
  const BigInt c = v > maxv ? maxv : v;
  u128 out = 0;
  out = static_cast<u128>(static_cast<std::uint64_t>(c >> 64)) << 64;
  out |= static_cast<std::uint64_t>(c & BigInt(std::numeric_limits<std::uint64_t>::max()));
  return out;
}

void fill_uniforms(const RaceConfig& cfg, std::uint64_t race_index, double* u) {
  auto rng = race_rng(cfg, race_index);
  for (int j = 0; j < cfg.design.s; ++j) u[j] = unit_open_closed(rng());
}

std::int64_t mine_real(std::uint32_t j, std::uint64_t race_index, const RaceConfig& cfg) {
  kernels::ScanJob job;
  job.prefix = miner_data(cfg.seed, race_index, j);
  job.nonce_bytes = 16;
  const BigInt begin = cfg.design.lam * j;
  return kernels::scan(job, to_u128_clamped(begin), to_u128_clamped(cfg.design.lam), cfg.design.d);
}

RaceOutcome finish(std::vector<std::int64_t> per) {
  RaceOutcome o;
  o.per_miner = std::move(per);
  for (const auto k : o.per_miner)
    if (k != kFailure && (o.winner_rounds == kFailure || k + 1 < o.winner_rounds)) o.winner_rounds = k + 1;
  return o;
}

}  // namespace

const char* mode_name(SimMode m) { return m == SimMode::RealHash ? "realhash" : "geometric"; }

SimMode parse_mode(const std::string& s) {
  if (s == "realhash") return SimMode::RealHash;
  if (s == "geometric") return SimMode::Geometric;
  throw std::invalid_argument("unknown mode '" + s + "' (expected realhash or geometric)");
}

bool RaceOutcome::consistent() const {
  std::int64_t best = kFailure;
  for (const auto k : per_miner)
    if (k != kFailure && (best == kFailure || k + 1 < best)) best = k + 1;
  return best == winner_rounds;
}

std::vector<NonceRange> partition_nonces(const MiningDesign& m) {
  std::vector<NonceRange> out;
  out.reserve(m.s);
  for (int j = 0; j < m.s; ++j) out.push_back({m.lam * j, m.lam * j + m.lam});
  return out;
}

std::vector<std::uint8_t> miner_data(std::uint64_t seed, std::uint64_t race_index, std::uint32_t miner_index) {
  std::vector<std::uint8_t> out(24, 0);
  const std::uint64_t fields[3] = {seed, race_index, miner_index};
  for (int f = 0; f < 3; ++f)
    for (int b = 0; b < 8; ++b) out[8 * f + b] = static_cast<std::uint8_t>(fields[f] >> (56 - 8 * b));
  return out;
}

std::int64_t mine_single(std::uint32_t miner_index, std::uint64_t race_index, const RaceConfig& cfg) {
  if (static_cast<int>(miner_index) >= cfg.design.s) throw std::out_of_range("miner index beyond s");
  if (cfg.mode == SimMode::RealHash) return mine_real(miner_index, race_index, cfg);
  std::vector<double> u(cfg.design.s), k(cfg.design.s);
  fill_uniforms(cfg, race_index, u.data());
  kernels::geometric_rounds(u.data() + miner_index, 1, ln_one_minus_pow2(cfg.design.d),
                            cfg.design.lam.convert_to<double>(), k.data());
  return static_cast<std::int64_t>(k[0]);
}

RaceOutcome run_race(const RaceConfig& cfg, std::uint64_t race_index) {
  const int s = cfg.design.s;
  std::vector<std::int64_t> per(s);
  if (cfg.mode == SimMode::RealHash) {
    for (int j = 0; j < s; ++j) per[j] = mine_real(static_cast<std::uint32_t>(j), race_index, cfg);
  } else {
    std::vector<double> u(s), k(s);
    fill_uniforms(cfg, race_index, u.data());
    kernels::geometric_rounds(u.data(), u.size(), ln_one_minus_pow2(cfg.design.d),
                              cfg.design.lam.convert_to<double>(), k.data());
    for (int j = 0; j < s; ++j) per[j] = static_cast<std::int64_t>(k[j]);
  }
  return finish(std::move(per));
}

CampaignRecord run_campaign(const RaceConfig& cfg, std::size_t race_count, unsigned threads) {
  if (race_count < 1) throw std::invalid_argument("race_count must be >= 1");
  CampaignRecord rec;
  rec.config = cfg;
  rec.races.resize(race_count);
  const int s = cfg.design.s;
  if (cfg.mode == SimMode::Geometric) {
    // Uniforms come from per-race streams; the sampler then runs over the
    // whole campaign in one pass.
    std::vector<double> u(race_count * s), k(race_count * s);
    for (std::size_t i = 0; i < race_count; ++i) fill_uniforms(cfg, i, u.data() + i * s);
    kernels::geometric_rounds(u.data(), u.size(), ln_one_minus_pow2(cfg.design.d),
                              cfg.design.lam.convert_to<double>(), k.data());
    for (std::size_t i = 0; i < race_count; ++i) {
      std::vector<std::int64_t> per(s);
      for (int j = 0; j < s; ++j) per[j] = static_cast<std::int64_t>(k[i * s + j]);
      rec.races[i] = finish(std::move(per));
    }
    return rec;
  }
  parallel_for(race_count, threads, [&](std::size_t i) { rec.races[i] = run_race(cfg, i); });
  return rec;
}

void write_campaign(std::ostream& os, const CampaignRecord& c) {
  const auto& m = c.config.design;
  os << m.s << ' ' << m.r << ' ' << m.d << ' ' << c.config.seed << ' ' << mode_name(c.config.mode) << ' '
     << c.races.size() << '\n';
  for (const auto& race : c.races) {
    for (std::size_t j = 0; j < race.per_miner.size(); ++j) os << (j ? " " : "") << race.per_miner[j];
    os << '\n';
  }
}

CampaignRecord read_campaign(std::istream& is) {
  CampaignRecord c;
  int s = 0, r = 0, d = 0;
  std::string mode;
  std::size_t n = 0;
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("campaign: missing header");
  std::istringstream hs(header);
  if (!(hs >> s >> r >> d >> c.config.seed >> mode >> n)) throw std::runtime_error("campaign: malformed header");
  c.config.design = MiningDesign::make(s, r, d);
  c.config.mode = parse_mode(mode);
  c.races.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::int64_t> per(s);
    for (int j = 0; j < s; ++j)
      if (!(is >> per[j]) || per[j] < kFailure) throw std::runtime_error("campaign: malformed race record");
    c.races.push_back(finish(std::move(per)));
  }
  return c;
}

}  // namespace powcalc
