#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "powcalc/kernels.hpp"
#include "powcalc/powmodel.hpp"

namespace powcalc::ledger {

using Digest = kernels::Digest;

Digest hash_bytes(const std::vector<std::uint8_t>& data);
std::string hex(const Digest& d);

struct AuthTriple {
  std::vector<std::uint8_t> input;
  Digest digest{};
  std::optional<std::uint64_t> location;  // block height, or NULL
};

AuthTriple submit(const std::vector<std::uint8_t>& input);
AuthTriple submit(const std::string& input);

struct Block {
  std::uint64_t height = 0;
  Digest prev{};
  Digest merkle_root{};
  kernels::u128 nonce = 0;
  std::uint32_t d = 0;
  std::vector<Digest> txs;

  static constexpr std::size_t kPrefixBytes = 8 + 32 + 32 + 4;
  static constexpr std::size_t kNonceBytes = 16;

  std::vector<std::uint8_t> header_prefix() const;  // everything but the nonce
  std::vector<std::uint8_t> header() const;
  Digest header_digest() const;
};

Digest merkle_root(const std::vector<Digest>& leaves);

struct MerkleProof {
  bool member = false;
  std::size_t index = 0;
  std::vector<Digest> path;  // sibling digests, leaf level first
};
MerkleProof merkle_membership(const Digest& digest, const Block& block);
bool verify_proof(const Digest& leaf, const MerkleProof& proof, const Digest& root);

class MiningFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Chain {
  std::vector<Block> blocks;  // blocks[0] is genesis

  Chain();  // genesis only
  std::uint64_t current_height() const { return blocks.size(); }
  const Block& tip() const { return blocks.back(); }

  void append(Block b);  // throws std::invalid_argument if b does not extend the tip
};

// Block over `pending`, mined with one miner scanning the design's nonce
// space [0, 2^r). Throws MiningFailure if no nonce reaches d leading zeros.
Block mine_block(const std::vector<Digest>& pending, const Chain& chain, const MiningDesign& design);

// Sets the location of NULL-location triples to the lowest height holding
// their digest.
void confirm(const Chain& chain, std::vector<AuthTriple>& triples);

enum class Verdict { Verified, Unverified, Untrustworthy };
const char* verdict_name(Verdict v);

Verdict audit(const AuthTriple& t, const Chain& chain, std::uint64_t k);

struct ChainCheck {
  bool ok = true;
  std::uint64_t first_bad = 0;  // height of the first invalid block
  std::string reason;
};
bool block_valid(const Block& b, const Block* parent, std::string* reason = nullptr);
ChainCheck verify_chain(const Chain& chain);

void write_chain(std::ostream& os, const Chain& chain);
Chain read_chain(std::istream& is);
void dump_chain(std::ostream& os, const Chain& chain);

}  // namespace powcalc::ledger
