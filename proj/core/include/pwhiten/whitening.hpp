#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pwhiten/entropy_source.hpp"
#include "pwhiten/permutation.hpp"

namespace pwhiten {

/// How a stream of `input_bits` splits into N-bit chunks: chunk k covers bits
/// [k*N, (k+1)*N) and whatever is left over forms the tail.
struct ChunkFraming {
  std::uint64_t full_chunks = 0;
  std::uint64_t tail_bits = 0;

  friend bool operator==(const ChunkFraming&, const ChunkFraming&) = default;
};

ChunkFraming frame(std::uint64_t input_bits, std::uint64_t chunk_bits);

enum class TailPolicy { passthrough };

struct WhitenConfig {
  unsigned n_qubits = 13;
  std::size_t pool_count = 32;
  ShuffleMode shuffle_mode = ShuffleMode::naive;
  SourceKind selection_source = SourceKind::os;
  TailPolicy tail_policy = TailPolicy::passthrough;
  bool record_selections = false;
  /// Worker threads for the chunk transform; 0 picks hardware concurrency.
  unsigned workers = 1;
};

/// Pool index chosen for each full chunk, in chunk order. Entry k belongs to
/// chunk k.
struct SelectionTrace {
  std::uint32_t chunk_bits = 0;
  std::vector<std::uint32_t> indices;

  friend bool operator==(const SelectionTrace&, const SelectionTrace&) = default;
};

/// Streams `input` to `output`, replacing every full chunk k with
/// apply(pool[s_k], chunk k) where s_k = selector.random_index(M) is drawn
/// in chunk order. A trailing partial chunk is copied unchanged, so output
/// length always equals input length. The returned trace is empty unless
/// cfg.record_selections is set.
SelectionTrace whiten_stream(std::istream& input, const MatrixPool& pool,
                             const WhitenConfig& cfg, EntropySource& selector,
                             std::ostream& output);

/// Inverse of whiten_stream given the recorded selections. Every trace index
/// is checked against the pool before any byte is written; when the input is
/// seekable its chunk count is checked up front too.
void unwhiten_stream(std::istream& input, const MatrixPool& pool,
                     const SelectionTrace& trace, std::ostream& output,
                     unsigned workers = 1);

/// Applies per-chunk permutations to a byte-aligned block holding exactly
/// `selections.size()` chunks. Exposed for benchmarks and tests.
void permute_block(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                   std::span<const IndexPermutation* const> selections);

/// Trace file layout, little-endian:
///   "PWTR" | u16 version = 1 | u32 chunk_bits | u64 count |
///   count x u32 pool index | u32 CRC-32 of every preceding byte
void trace_save(const SelectionTrace& trace, std::ostream& out);
SelectionTrace trace_load(std::istream& in);

inline constexpr std::uint16_t kTraceFormatVersion = 1;

}  // namespace pwhiten
