#include "pwhiten/permutation.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <utility>

#include "binary_io.hpp"
#include "pwhiten/entropy_source.hpp"
#include "pwhiten/error.hpp"

namespace pwhiten {

namespace {

constexpr std::uint8_t kPoolMagic[4] = {'P', 'W', 'P', 'L'};

std::size_t checked_size(unsigned n_qubits, unsigned max_qubits) {
  if (n_qubits < 1) {
    throw Error(ErrorKind::usage, "n_qubits must be at least 1");
  }
  if (n_qubits > max_qubits) {
    throw Error(ErrorKind::usage,
                "n_qubits " + std::to_string(n_qubits) +
                    " exceeds the configured maximum of " +
                    std::to_string(max_qubits));
  }
  return std::size_t{1} << n_qubits;
}

std::vector<std::uint32_t> iota_map(std::size_t n) {
  std::vector<std::uint32_t> s(n);
  std::iota(s.begin(), s.end(), std::uint32_t{0});
  return s;
}

}  // namespace

bool is_bijection(std::span<const std::uint32_t> map) {
  std::vector<bool> seen(map.size(), false);
  for (const auto v : map) {
    if (v >= map.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

IndexPermutation::IndexPermutation(std::vector<std::uint32_t> map)
    : map_(std::move(map)) {
  if (map_.empty()) {
    throw Error(ErrorKind::format, "permutation must not be empty");
  }
  if (!is_bijection(map_)) {
    throw Error(ErrorKind::format, "index map is not a bijection");
  }
}

IndexPermutation IndexPermutation::identity(std::size_t size) {
  return IndexPermutation(iota_map(size));
}

BitVector apply(const IndexPermutation& perm, const BitVector& chunk) {
  if (chunk.size() != perm.size()) {
    throw Error(ErrorKind::contract,
                "chunk has " + std::to_string(chunk.size()) +
                    " bits, permutation expects " + std::to_string(perm.size()));
  }
  BitVector out(chunk.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out.set(i, chunk.get(perm[i]));
  return out;
}

IndexPermutation invert(const IndexPermutation& perm) {
  std::vector<std::uint32_t> inverse(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    inverse[perm[i]] = static_cast<std::uint32_t>(i);
  }
  return IndexPermutation(std::move(inverse));
}

IndexPermutation compose(const IndexPermutation& a, const IndexPermutation& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::contract, "compose: permutation sizes differ");
  }
  std::vector<std::uint32_t> map(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) map[i] = b[a[i]];
  return IndexPermutation(std::move(map));
}

const char* to_string(ShuffleMode mode) noexcept {
  switch (mode) {
    case ShuffleMode::naive: return "naive";
    case ShuffleMode::unbiased: return "unbiased";
  }
  return "unknown";
}

ShuffleMode shuffle_mode_from_string(const std::string& name) {
  if (name == "naive") return ShuffleMode::naive;
  if (name == "unbiased") return ShuffleMode::unbiased;
  throw Error(ErrorKind::usage, "unknown shuffle mode '" + name +
                                    "' (expected naive or unbiased)");
}

IndexPermutation generate_naive_shuffle(unsigned n_qubits, EntropySource& rng,
                                        unsigned max_qubits) {
  const std::size_t n = checked_size(n_qubits, max_qubits);
  // All N draws happen before any swap.
  std::vector<std::uint32_t> k(n);
  for (auto& draw : k) {
    draw = static_cast<std::uint32_t>(rng.random_int(1, n) - 1);
  }
  auto s = iota_map(n);
  for (std::size_t i = n; i-- > 0;) std::swap(s[k[i]], s[i]);
  return IndexPermutation(std::move(s));
}

IndexPermutation generate_unbiased_shuffle(unsigned n_qubits,
                                           EntropySource& rng,
                                           unsigned max_qubits) {
  const std::size_t n = checked_size(n_qubits, max_qubits);
  auto s = iota_map(n);
  for (std::size_t i = n; i >= 2; --i) {
    const auto r = rng.random_int(1, i);
    std::swap(s[i - 1], s[i - r]);
  }
  return IndexPermutation(std::move(s));
}

IndexPermutation generate_permutation(ShuffleMode mode, unsigned n_qubits,
                                      EntropySource& rng, unsigned max_qubits) {
  return mode == ShuffleMode::naive
             ? generate_naive_shuffle(n_qubits, rng, max_qubits)
             : generate_unbiased_shuffle(n_qubits, rng, max_qubits);
}

MatrixPool::MatrixPool(unsigned n_qubits,
                       std::vector<IndexPermutation> permutations,
                       std::string generator_tag)
    : n_qubits_(n_qubits),
      permutations_(std::move(permutations)),
      generator_tag_(std::move(generator_tag)) {
  if (n_qubits_ < 1 || n_qubits_ > kMaxLoadableQubits) {
    throw Error(ErrorKind::usage, "pool n_qubits out of range");
  }
  if (permutations_.empty()) {
    throw Error(ErrorKind::usage, "pool must hold at least one permutation");
  }
  if (permutations_.size() > UINT32_MAX) {
    throw Error(ErrorKind::usage, "pool too large");
  }
  for (const auto& p : permutations_) {
    if (p.size() != chunk_bits()) {
      throw Error(ErrorKind::format,
                  "pool member size does not match 2^n_qubits");
    }
  }
}

MatrixPool generate_pool(unsigned n_qubits, std::size_t count, ShuffleMode mode,
                         EntropySource& rng, std::string generator_tag,
                         unsigned max_qubits) {
  if (count == 0) {
    throw Error(ErrorKind::usage, "pool count must be at least 1");
  }
  checked_size(n_qubits, max_qubits);
  std::vector<IndexPermutation> perms;
  perms.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    perms.push_back(generate_permutation(mode, n_qubits, rng, max_qubits));
  }
  return MatrixPool(n_qubits, std::move(perms), std::move(generator_tag));
}

void pool_save(const MatrixPool& pool, std::ostream& out) {
  const auto& tag = pool.generator_tag();
  if (tag.size() > UINT16_MAX) {
    throw Error(ErrorKind::usage, "generator tag longer than 65535 bytes");
  }
  detail::LeWriter w(out);
  w.bytes(kPoolMagic);
  w.uint<std::uint16_t>(kPoolFormatVersion);
  w.uint<std::uint8_t>(static_cast<std::uint8_t>(pool.n_qubits()));
  w.uint<std::uint8_t>(0);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(pool.count()));
  w.uint<std::uint16_t>(static_cast<std::uint16_t>(tag.size()));
  w.bytes({reinterpret_cast<const std::uint8_t*>(tag.data()), tag.size()});

  std::vector<std::uint8_t> record(pool.chunk_bits() * 4);
  for (const auto& perm : pool.permutations()) {
    for (std::size_t i = 0; i < perm.size(); ++i) {
      for (std::size_t b = 0; b < 4; ++b) {
        record[4 * i + b] = static_cast<std::uint8_t>(perm[i] >> (8 * b));
      }
    }
    w.bytes(record);
    w.uint<std::uint32_t>(detail::crc32_of(record));
  }
  out.flush();
  if (!out) throw Error(ErrorKind::io, "failed to write pool");
}

MatrixPool pool_load(std::istream& in) {
  detail::LeReader r(in, "pool");
  std::uint8_t magic[4];
  r.bytes(magic);
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kPoolMagic))) {
    throw Error(ErrorKind::format, "pool: bad magic (not a PWPL file)");
  }
  if (const auto version = r.uint<std::uint16_t>();
      version != kPoolFormatVersion) {
    throw Error(ErrorKind::format,
                "pool: unsupported version " + std::to_string(version));
  }
  const unsigned n_qubits = r.uint<std::uint8_t>();
  if (r.uint<std::uint8_t>() != 0) {
    throw Error(ErrorKind::format, "pool: reserved byte is not zero");
  }
  if (n_qubits < 1 || n_qubits > kMaxLoadableQubits) {
    throw Error(ErrorKind::format,
                "pool: n_qubits " + std::to_string(n_qubits) + " out of range");
  }
  const auto count = r.uint<std::uint32_t>();
  if (count == 0) throw Error(ErrorKind::format, "pool: count is zero");
  std::string tag(r.uint<std::uint16_t>(), '\0');
  r.bytes({reinterpret_cast<std::uint8_t*>(tag.data()), tag.size()});

  const std::size_t n = std::size_t{1} << n_qubits;
  constexpr std::size_t kSlice = 1U << 16;
  std::vector<IndexPermutation> perms;
  std::vector<std::uint8_t> slice;
  for (std::uint32_t m = 0; m < count; ++m) {
    std::vector<std::uint32_t> map;
    map.reserve(std::min(n, kSlice));
    std::uint32_t crc = 0;
    for (std::size_t done = 0; done < n;) {
      const auto take = std::min(kSlice, n - done);
      slice.resize(take * 4);
      r.bytes(slice);
      crc = detail::crc32_of(slice, crc);
      for (std::size_t i = 0; i < take; ++i) {
        map.push_back(std::uint32_t{slice[4 * i]} |
                      std::uint32_t{slice[4 * i + 1]} << 8 |
                      std::uint32_t{slice[4 * i + 2]} << 16 |
                      std::uint32_t{slice[4 * i + 3]} << 24);
      }
      done += take;
    }
    if (r.uint<std::uint32_t>() != crc) {
      throw Error(ErrorKind::format,
                  "pool: CRC mismatch in record " + std::to_string(m));
    }
    if (!is_bijection(map)) {
      throw Error(ErrorKind::format,
                  "pool: record " + std::to_string(m) + " is not a bijection");
    }
    perms.emplace_back(std::move(map));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorKind::format, "pool: trailing bytes after last record");
  }
  return MatrixPool(n_qubits, std::move(perms), std::move(tag));
}

}  // namespace pwhiten
