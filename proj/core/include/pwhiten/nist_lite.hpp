#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>

namespace pwhiten {

inline constexpr double kNistSignificance = 0.01;
inline constexpr std::uint64_t kNistMinBits = 100;
inline constexpr std::uint64_t kBlockFrequencyBits = 128;

/// Four SP 800-22 tests: frequency (monobit), frequency within 128-bit
/// blocks, runs, and cumulative sums in both directions.
struct NistLiteReport {
  std::uint64_t bit_count = 0;
  /// Sum of +1/-1 over all bits and its normalized form |S| / sqrt(n).
  std::int64_t monobit_sum = 0;
  double monobit_statistic = 0.0;

  double p_monobit = 0.0;
  double p_block_frequency = 0.0;
  double p_runs = 0.0;
  double p_cusum_forward = 0.0;
  double p_cusum_backward = 0.0;

  bool pass_monobit() const noexcept { return p_monobit >= kNistSignificance; }
  bool pass_block_frequency() const noexcept {
    return p_block_frequency >= kNistSignificance;
  }
  bool pass_runs() const noexcept { return p_runs >= kNistSignificance; }
  bool pass_cusum_forward() const noexcept {
    return p_cusum_forward >= kNistSignificance;
  }
  bool pass_cusum_backward() const noexcept {
    return p_cusum_backward >= kNistSignificance;
  }
  bool pass_all() const noexcept {
    return pass_monobit() && pass_block_frequency() && pass_runs() &&
           pass_cusum_forward() && pass_cusum_backward();
  }
};

/// Streaming bit-level accumulator (bits MSB-first within each byte).
class NistLiteAccumulator {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Feeds only the first `bits` bits of `bytes`.
  void feed_bits(std::span<const std::uint8_t> bytes, std::uint64_t bits);
  std::uint64_t bit_count() const noexcept { return bits_; }
  /// Throws ErrorKind::precondition below 100 bits.
  NistLiteReport report() const;

 private:
  void push_bit(bool bit);

  std::uint64_t bits_ = 0;
  std::int64_t walk_ = 0;
  std::int64_t walk_min_ = 0;
  std::int64_t walk_max_ = 0;
  std::uint64_t forward_max_ = 0;
  std::uint64_t runs_ = 0;
  bool previous_ = false;

  std::uint64_t block_ones_ = 0;
  std::uint64_t block_fill_ = 0;
  std::uint64_t full_blocks_ = 0;
  /// Sum over complete blocks of (ones/M - 1/2)^2, accumulated exactly as
  /// sum of (2*ones - M)^2.
  std::uint64_t block_deviation_ = 0;
};

NistLiteReport nist_lite(std::istream& input);

/// Cumulative-sums p-value for maximum excursion z over n steps.
double cusum_p_value(std::uint64_t n, std::uint64_t z);

}  // namespace pwhiten
