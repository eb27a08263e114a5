#include "powcalc/ledger.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>

namespace powcalc::ledger {

namespace {

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int b = bytes - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_digest(std::vector<std::uint8_t>& out, const Digest& d) { out.insert(out.end(), d.begin(), d.end()); }

Digest hash_pair(const Digest& a, const Digest& b) {
  std::uint8_t buf[64];
  std::copy(a.begin(), a.end(), buf);
  std::copy(b.begin(), b.end(), buf + 32);
  return kernels::sha256d(buf, sizeof buf);
}

kernels::u128 to_u128(const BigInt& v) {
  const BigInt maxv = (BigInt(1) << 128) - 1;
  const BigInt c = v > maxv ? maxv : v;
  kernels::u128 hi = static_cast<std::uint64_t>(c >> 64);
  return (hi << 64) | static_cast<std::uint64_t>(c & BigInt(std::numeric_limits<std::uint64_t>::max()));
}

Block genesis() {
  Block g;
  g.merkle_root = merkle_root({});
  return g;
}

std::uint64_t read_be(std::istream& is, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw std::runtime_error("chain: truncated record");
    v = (v << 8) | static_cast<std::uint8_t>(c);
  }
  return v;
}

Digest read_digest(std::istream& is) {
  Digest d{};
  if (!is.read(reinterpret_cast<char*>(d.data()), 32)) throw std::runtime_error("chain: truncated digest");
  return d;
}

}  // namespace

Digest hash_bytes(const std::vector<std::uint8_t>& data) { return kernels::sha256d(data.data(), data.size()); }

std::string hex(const Digest& d) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (auto b : d) {
    s += digits[b >> 4];
    s += digits[b & 15];
  }
  return s;
}

AuthTriple submit(const std::vector<std::uint8_t>& input) {
  if (input.empty()) throw std::invalid_argument("submit: empty input");
  AuthTriple t;
  t.input = input;
  t.digest = hash_bytes(input);
  return t;
}

AuthTriple submit(const std::string& input) { return submit(std::vector<std::uint8_t>(input.begin(), input.end())); }

std::vector<std::uint8_t> Block::header_prefix() const {
  std::vector<std::uint8_t> out;
  out.reserve(kPrefixBytes + kNonceBytes);
  put_be(out, height, 8);
  put_digest(out, prev);
  put_digest(out, merkle_root);
  put_be(out, d, 4);
  return out;
}

std::vector<std::uint8_t> Block::header() const {
  auto out = header_prefix();
  out.resize(kPrefixBytes + kNonceBytes);
  kernels::encode_nonce(nonce, kNonceBytes, out.data() + kPrefixBytes);
  return out;
}

Digest Block::header_digest() const {
  const auto h = header();
  return kernels::sha256d(h.data(), h.size());
}

Digest merkle_root(const std::vector<Digest>& leaves) {
  if (leaves.empty()) return Digest{};
  std::vector<Digest> level = leaves;
  while (level.size() > 1) {
    if (level.size() % 2) level.push_back(level.back());
    std::vector<Digest> next;
    for (std::size_t i = 0; i < level.size(); i += 2) next.push_back(hash_pair(level[i], level[i + 1]));
    level = std::move(next);
  }
  return level[0];
}

MerkleProof merkle_membership(const Digest& digest, const Block& block) {
  MerkleProof p;
  const auto it = std::find(block.txs.begin(), block.txs.end(), digest);
  if (it == block.txs.end()) return p;
  p.index = static_cast<std::size_t>(it - block.txs.begin());
  std::vector<Digest> level = block.txs;
  std::size_t idx = p.index;
  while (level.size() > 1) {
    if (level.size() % 2) level.push_back(level.back());
    p.path.push_back(level[idx ^ 1]);
    std::vector<Digest> next;
    for (std::size_t i = 0; i < level.size(); i += 2) next.push_back(hash_pair(level[i], level[i + 1]));
    level = std::move(next);
    idx /= 2;
  }
  p.member = verify_proof(digest, p, block.merkle_root);
  return p;
}

bool verify_proof(const Digest& leaf, const MerkleProof& proof, const Digest& root) {
  Digest cur = leaf;
  std::size_t idx = proof.index;
  for (const auto& sib : proof.path) {
    cur = (idx & 1) ? hash_pair(sib, cur) : hash_pair(cur, sib);
    idx /= 2;
  }
  return cur == root;
}

Chain::Chain() { blocks.push_back(genesis()); }

void Chain::append(Block b) {
  std::string why;
  if (!block_valid(b, &blocks.back(), &why)) throw std::invalid_argument("append: " + why);
  blocks.push_back(std::move(b));
}

Block mine_block(const std::vector<Digest>& pending, const Chain& chain, const MiningDesign& design) {
  if (pending.empty()) throw std::invalid_argument("mine_block: no pending digests");
  Block b;
  b.height = chain.current_height();
  b.prev = chain.tip().header_digest();
  b.txs = pending;
  b.merkle_root = merkle_root(pending);
  b.d = static_cast<std::uint32_t>(design.d);
  kernels::ScanJob job;
  job.prefix = b.header_prefix();
  job.nonce_bytes = Block::kNonceBytes;
  const auto hit = kernels::scan(job, 0, to_u128(design.lam), design.d);
  if (hit < 0) throw MiningFailure("mine_block: nonce space exhausted at d=" + std::to_string(design.d));
  b.nonce = static_cast<kernels::u128>(hit);
  return b;
}

void confirm(const Chain& chain, std::vector<AuthTriple>& triples) {
  for (auto& t : triples) {
    if (t.location) continue;
    for (const auto& b : chain.blocks) {
      if (std::find(b.txs.begin(), b.txs.end(), t.digest) != b.txs.end()) {
        t.location = b.height;
        break;
      }
    }
  }
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Verified: return "Verified";
    case Verdict::Unverified: return "Unverified";
    default: return "Untrustworthy";
  }
}

Verdict audit(const AuthTriple& t, const Chain& chain, std::uint64_t k) {
  if (!t.location) return Verdict::Unverified;
  if (t.input.empty() || hash_bytes(t.input) != t.digest) return Verdict::Unverified;
  const std::uint64_t loc = *t.location;
  if (loc >= chain.blocks.size()) return Verdict::Untrustworthy;
  if (k > chain.current_height() || loc > chain.current_height() - k) return Verdict::Unverified;
  return merkle_membership(t.digest, chain.blocks[loc]).member ? Verdict::Verified : Verdict::Untrustworthy;
}

bool block_valid(const Block& b, const Block* parent, std::string* reason) {
  auto fail = [&](const char* why) {
    if (reason) *reason = why;
    return false;
  };
  if (b.merkle_root != merkle_root(b.txs)) return fail("merkle root mismatch");
  if (!parent) {
    if (b.height != 0) return fail("genesis height");
    if (b.prev != Digest{}) return fail("genesis prev digest");
    if (!b.txs.empty()) return fail("genesis carries transactions");
    return true;
  }
  if (b.height != parent->height + 1) return fail("height not consecutive");
  if (b.prev != parent->header_digest()) return fail("prev digest mismatch");
  const auto h = b.header_digest();
  if (kernels::leading_zero_bits(h.data()) < static_cast<int>(b.d)) return fail("proof of work below difficulty");
  return true;
}

ChainCheck verify_chain(const Chain& chain) {
  ChainCheck c;
  for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
    if (!block_valid(chain.blocks[i], i ? &chain.blocks[i - 1] : nullptr, &c.reason)) {
      c.ok = false;
      c.first_bad = i;
      return c;
    }
  }
  c.reason.clear();
  return c;
}

// Record: u32 length, then height, prev, merkle_root, d, nonce, tx count, txs.
void write_chain(std::ostream& os, const Chain& chain) {
  std::vector<std::uint8_t> out;
  put_be(out, chain.blocks.size(), 8);
  for (const auto& b : chain.blocks) {
    std::vector<std::uint8_t> rec = b.header();
    put_be(rec, b.txs.size(), 4);
    for (const auto& t : b.txs) put_digest(rec, t);
    put_be(out, rec.size(), 4);
    out.insert(out.end(), rec.begin(), rec.end());
  }
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

Chain read_chain(std::istream& is) {
  Chain c;
  c.blocks.clear();
  const auto n = read_be(is, 8);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = read_be(is, 4);
    Block b;
    b.height = read_be(is, 8);
    b.prev = read_digest(is);
    b.merkle_root = read_digest(is);
    b.d = static_cast<std::uint32_t>(read_be(is, 4));
    const auto hi = read_be(is, 8), lo = read_be(is, 8);
    b.nonce = (static_cast<kernels::u128>(hi) << 64) | lo;
    const auto ntx = read_be(is, 4);
    if (len != Block::kPrefixBytes + Block::kNonceBytes + 4 + 32 * ntx) throw std::runtime_error("chain: bad record length");
    for (std::uint64_t t = 0; t < ntx; ++t) b.txs.push_back(read_digest(is));
    c.blocks.push_back(std::move(b));
  }
  if (c.blocks.empty()) throw std::runtime_error("chain: no genesis block");
  return c;
}

void dump_chain(std::ostream& os, const Chain& chain) {
  for (const auto& b : chain.blocks) {
    const auto lo = static_cast<std::uint64_t>(b.nonce);
    os << "block " << b.height << " d=" << b.d << " nonce=" << lo << " txs=" << b.txs.size() << '\n'
       << "  prev   " << hex(b.prev) << '\n'
       << "  merkle " << hex(b.merkle_root) << '\n'
       << "  hash   " << hex(b.header_digest()) << '\n';
    for (const auto& t : b.txs) os << "    tx " << hex(t) << '\n';
  }
}

}  // namespace powcalc::ledger
