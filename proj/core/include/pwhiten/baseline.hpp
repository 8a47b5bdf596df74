#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace pwhiten {

/// out[i] = a[i] ^ b[i], stopping at the shorter stream. Both inputs must be
/// non-empty. Returns the number of bytes written.
std::uint64_t xor_combine(std::istream& a, std::istream& b, std::ostream& out);

/// Von Neumann pair extractor over the global bit stream: 01 -> 0, 10 -> 1,
/// 00 and 11 -> nothing. Pairs may straddle byte and buffer boundaries; the
/// half pair is carried in `pending`.
class VonNeumannExtractor {
 public:
  /// Feeds bytes and appends complete output bytes to `out`.
  void feed(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& out);
  /// Discards an unpaired trailing bit and flushes the last partial output
  /// byte, zero-padded on the right.
  void finish(std::vector<std::uint8_t>& out);

  std::uint64_t output_bits() const noexcept { return output_bits_; }
  std::optional<bool> pending() const noexcept { return pending_; }

 private:
  void emit(bool bit, std::vector<std::uint8_t>& out);

  std::optional<bool> pending_;
  std::uint8_t acc_ = 0;
  unsigned acc_bits_ = 0;
  std::uint64_t output_bits_ = 0;
};

/// Runs the extractor over a whole stream; returns the true output bit count.
std::uint64_t von_neumann(std::istream& input, std::ostream& out);

}  // namespace pwhiten
