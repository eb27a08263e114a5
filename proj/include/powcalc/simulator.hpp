#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "powcalc/powmodel.hpp"

namespace powcalc {

enum class SimMode { RealHash, Geometric };

const char* mode_name(SimMode m);
SimMode parse_mode(const std::string& s);

struct RaceConfig {
  MiningDesign design;
  SimMode mode = SimMode::Geometric;
  std::uint64_t seed = 0;
  unsigned data_bits = 192;  // per-miner data prefix: seed, race index, miner index
};

inline constexpr std::int64_t kFailure = -1;

struct RaceOutcome {
  std::vector<std::int64_t> per_miner;  // 0-based success round, or kFailure
  std::int64_t winner_rounds = kFailure;  // k_min + 1, or kFailure

  bool failed() const { return winner_rounds == kFailure; }
  bool consistent() const;
};

struct CampaignRecord {
  RaceConfig config;
  std::vector<RaceOutcome> races;
};

struct NonceRange {
  BigInt begin, end;  // [begin, end)
};

std::vector<NonceRange> partition_nonces(const MiningDesign& m);

// Fixed-width big-endian counter block identifying a miner's input data.
std::vector<std::uint8_t> miner_data(std::uint64_t seed, std::uint64_t race_index, std::uint32_t miner_index);

std::int64_t mine_single(std::uint32_t miner_index, std::uint64_t race_index, const RaceConfig& cfg);
RaceOutcome run_race(const RaceConfig& cfg, std::uint64_t race_index);
CampaignRecord run_campaign(const RaceConfig& cfg, std::size_t race_count, unsigned threads = 0);

inline std::size_t default_race_count(int s) { return s >= 10000 ? 1 : static_cast<std::size_t>(10000 / s); }

void write_campaign(std::ostream& os, const CampaignRecord& c);
CampaignRecord read_campaign(std::istream& is);

}  // namespace powcalc
