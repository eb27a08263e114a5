#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "powcalc/kernels.hpp"
#include "powcalc/simulator.hpp"
#include "powcalc/validation.hpp"

using namespace powcalc;

namespace {

RaceConfig cfg(int s, int r, int d, SimMode mode, std::uint64_t seed = 5) {
  return RaceConfig{MiningDesign::make(s, r, d), mode, seed, 192};
}

struct IsaGuard {
  kernels::Isa prev;
  explicit IsaGuard(kernels::Isa isa) : prev(kernels::set_isa(isa)) {}
  ~IsaGuard() { kernels::set_isa(prev); }
};

}  // namespace

TEST_CASE("nonce partitions are disjoint and cover s * lambda values") {
  for (int s : {1, 3, 7})
    for (int r : {4, 9}) {
      const auto m = MiningDesign::make(s, r, 2);
      const auto parts = partition_nonces(m);
      REQUIRE(parts.size() == static_cast<std::size_t>(s));
      for (int j = 0; j < s; ++j) {
        CHECK(parts[j].end - parts[j].begin == m.lam);
        if (j) CHECK(parts[j].begin == parts[j - 1].end);
      }
      CHECK(parts.back().end <= (BigInt(1) << r));
    }
}

TEST_CASE("miner data is a fixed-width big-endian counter block") {
  const auto a = miner_data(1, 2, 3);
  REQUIRE(a.size() == 24);
  CHECK(a[7] == 1);
  CHECK(a[15] == 2);
  CHECK(a[23] == 3);
  std::set<std::vector<std::uint8_t>> seen;
  for (std::uint64_t race = 0; race < 20; ++race)
    for (std::uint32_t j = 0; j < 20; ++j) seen.insert(miner_data(9, race, j));
  CHECK(seen.size() == 400);
}

TEST_CASE("races are deterministic and consistent") {
  for (auto mode : {SimMode::Geometric, SimMode::RealHash}) {
    const auto c = cfg(4, 10, 5, mode);
    const auto a = run_campaign(c, 50);
    const auto b = run_campaign(c, 50, 1);
    REQUIRE(a.races.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(a.races[i].per_miner == b.races[i].per_miner);
      CHECK(a.races[i].consistent());
      CHECK(a.races[i].per_miner == run_race(c, i).per_miner);
      for (const auto k : a.races[i].per_miner) {
        CHECK(k >= kFailure);
        CHECK(BigInt(k) < c.design.lam);
      }
    }
    for (std::uint32_t j = 0; j < 4; ++j) CHECK(mine_single(j, 3, c) == a.races[3].per_miner[j]);
    CHECK_THROWS(mine_single(4, 0, c));
  }
}

TEST_CASE("different seeds give different campaigns") {
  const auto a = run_campaign(cfg(8, 16, 8, SimMode::Geometric, 1), 30);
  const auto b = run_campaign(cfg(8, 16, 8, SimMode::Geometric, 2), 30);
  int same = 0;
  for (std::size_t i = 0; i < 30; ++i) same += a.races[i].per_miner == b.races[i].per_miner;
  CHECK(same < 3);
}

TEST_CASE("realhash entries are first qualifying nonces in the miner's partition") {
  const auto c = cfg(3, 9, 4, SimMode::RealHash, 77);
  const auto race = run_race(c, 2);
  for (int j = 0; j < 3; ++j) {
    auto msg = miner_data(77, 2, static_cast<std::uint32_t>(j));
    msg.resize(24 + 16);
    const std::int64_t lam = c.design.lam.convert_to<std::int64_t>();
    std::int64_t first = kFailure;
    for (std::int64_t k = 0; k < lam && first == kFailure; ++k) {
      kernels::encode_nonce(static_cast<kernels::u128>(j * lam + k), 16, msg.data() + 24);
      const auto dg = kernels::sha256d(msg.data(), msg.size());
      if (kernels::leading_zero_bits(dg.data()) >= 4) first = k;
    }
    CHECK(race.per_miner[j] == first);
  }
}

TEST_CASE("campaigns do not depend on the dispatched ISA") {
  for (auto mode : {SimMode::Geometric, SimMode::RealHash}) {
    const auto c = cfg(5, 12, 6, mode, 31);
    CampaignRecord a, b;
    {
      IsaGuard g(kernels::Isa::Scalar);
      a = run_campaign(c, 200);
    }
    {
      IsaGuard g(kernels::Isa::Avx2);
      b = run_campaign(c, 200);
    }
    for (std::size_t i = 0; i < 200; ++i) CHECK(a.races[i].per_miner == b.races[i].per_miner);
  }
}

TEST_CASE("campaign files round trip") {
  const auto c = run_campaign(cfg(3, 5, 3, SimMode::Geometric, 8), 40);
  std::stringstream ss;
  write_campaign(ss, c);
  const std::string text = ss.str();
  CHECK(text.rfind("3 5 3 8 geometric 40\n", 0) == 0);
  const auto back = read_campaign(ss);
  CHECK(back.config.design.s == 3);
  CHECK(back.config.seed == 8);
  REQUIRE(back.races.size() == 40);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(back.races[i].per_miner == c.races[i].per_miner);
    CHECK(back.races[i].winner_rounds == c.races[i].winner_rounds);
  }
  std::stringstream bad("3 5 3 8 geometric 2\n1 2 3\n1 x 3\n");
  CHECK_THROWS(read_campaign(bad));
  std::stringstream bad_mode("3 5 3 8 magic 0\n");
  CHECK_THROWS(read_campaign(bad_mode));
}

TEST_CASE("geometric sampling matches the model on small designs") {
  // 20000 races: binomial standard error of a frequency is below 0.0036
  for (auto [s, r, d] : {std::tuple{1, 8, 8}, std::tuple{2, 6, 4}, std::tuple{4, 8, 6}}) {
    const auto c = run_campaign(cfg(s, r, d, SimMode::Geometric, 12), 20000);
    const auto t = summarize(c);
    CAPTURE(s);
    CAPTURE(d);
    CHECK(std::abs(t.failure_empirical - t.failure_theory) < 0.015);
  }
}

TEST_CASE("mode names") {
  CHECK(parse_mode("realhash") == SimMode::RealHash);
  CHECK(parse_mode("geometric") == SimMode::Geometric);
  CHECK_THROWS(parse_mode("fast"));
  CHECK(default_race_count(4) == 2500);
  CHECK(default_race_count(32) == 312);
}
