#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pwhiten/bit_vector.hpp"

namespace pwhiten {

class EntropySource;

/// A bijection on the bit positions of an N-bit chunk, the compact form of
/// an N x N permutation matrix P. Row i of P has its single one in column
/// map[i], so applying P to a chunk as a column vector gives
/// out[i] = in[map[i]].
class IndexPermutation {
 public:
  /// Validates that `map` is a bijection on {0..N-1}; throws ErrorKind::format
  /// otherwise.
  explicit IndexPermutation(std::vector<std::uint32_t> map);

  static IndexPermutation identity(std::size_t size);

  std::size_t size() const noexcept { return map_.size(); }
  std::span<const std::uint32_t> map() const noexcept { return map_; }
  std::uint32_t operator[](std::size_t i) const noexcept { return map_[i]; }

  friend bool operator==(const IndexPermutation&,
                         const IndexPermutation&) = default;

 private:
  std::vector<std::uint32_t> map_;
};

/// Returns true when `map` is a bijection on {0..map.size()-1}.
bool is_bijection(std::span<const std::uint32_t> map);

/// out[i] = chunk[perm.map[i]]. Throws ErrorKind::contract on length mismatch.
BitVector apply(const IndexPermutation& perm, const BitVector& chunk);
IndexPermutation invert(const IndexPermutation& perm);
/// apply(compose(a, b), c) == apply(a, apply(b, c)).
IndexPermutation compose(const IndexPermutation& a, const IndexPermutation& b);

enum class ShuffleMode {
  naive,     // full-range draws K[i] in [1, N], then swaps from N down to 1
  unbiased,  // textbook Fisher-Yates
};

const char* to_string(ShuffleMode mode) noexcept;
ShuffleMode shuffle_mode_from_string(const std::string& name);

inline constexpr unsigned kDefaultMaxQubits = 16;

/// The three-loop generator: draw K[1..N] from RandomInt(1, N), start from
/// S[i] = i, then for i = N down to 1 swap S[K[i]] and S[i]. Not uniform for
/// N > 2; kept because it is the published procedure.
IndexPermutation generate_naive_shuffle(unsigned n_qubits, EntropySource& rng,
                                        unsigned max_qubits = kDefaultMaxQubits);

/// Uniform Fisher-Yates. For i = N down to 2 draws r = RandomInt(1, i) and
/// swaps S[i] with S[i + 1 - r], so r = 1 leaves position i in place.
IndexPermutation generate_unbiased_shuffle(
    unsigned n_qubits, EntropySource& rng,
    unsigned max_qubits = kDefaultMaxQubits);

IndexPermutation generate_permutation(ShuffleMode mode, unsigned n_qubits,
                                      EntropySource& rng,
                                      unsigned max_qubits = kDefaultMaxQubits);

/// An ordered set of same-size permutations; immutable once built.
class MatrixPool {
 public:
  MatrixPool(unsigned n_qubits, std::vector<IndexPermutation> permutations,
             std::string generator_tag);

  unsigned n_qubits() const noexcept { return n_qubits_; }
  std::size_t chunk_bits() const noexcept { return std::size_t{1} << n_qubits_; }
  std::size_t count() const noexcept { return permutations_.size(); }
  const std::string& generator_tag() const noexcept { return generator_tag_; }
  const IndexPermutation& operator[](std::size_t i) const noexcept {
    return permutations_[i];
  }
  std::span<const IndexPermutation> permutations() const noexcept {
    return permutations_;
  }

  friend bool operator==(const MatrixPool&, const MatrixPool&) = default;

 private:
  unsigned n_qubits_;
  std::vector<IndexPermutation> permutations_;
  std::string generator_tag_;
};

MatrixPool generate_pool(unsigned n_qubits, std::size_t count, ShuffleMode mode,
                         EntropySource& rng, std::string generator_tag,
                         unsigned max_qubits = kDefaultMaxQubits);

/// Pool file layout, little-endian:
///   "PWPL" | u16 version = 1 | u8 n_qubits | u8 reserved = 0 | u32 count |
///   u16 tag length | tag bytes |
///   count x ( N x u32 map | u32 CRC-32 of the map bytes )
void pool_save(const MatrixPool& pool, std::ostream& out);
MatrixPool pool_load(std::istream& in);

inline constexpr std::uint16_t kPoolFormatVersion = 1;
/// Largest n_qubits accepted from a pool file.
inline constexpr unsigned kMaxLoadableQubits = 28;

}  // namespace pwhiten
