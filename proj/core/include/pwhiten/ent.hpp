#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>

namespace pwhiten {

/// The five byte-mode statistics of the classic `ent` tool.
struct EntReport {
  std::uint64_t byte_count = 0;
  double entropy_bits_per_byte = 0.0;
  /// Raw statistic over 256 bins (255 degrees of freedom), not a p-value.
  double chi_square = 0.0;
  double arithmetic_mean = 0.0;
  double monte_carlo_pi = 0.0;
  /// Lag-1 circular correlation; 0 when undefined.
  double serial_correlation = 0.0;
  /// False when the stream has zero variance.
  bool serial_correlation_defined = true;

  friend bool operator==(const EntReport&, const EntReport&) = default;
};

struct SerialCorrelation {
  double value = 0.0;
  bool defined = true;
};

/// Single-pass accumulator. All running sums are exact integers; floating
/// point appears only in report().
class EntAccumulator {
 public:
  void feed(std::span<const std::uint8_t> bytes);

  std::uint64_t byte_count() const noexcept { return count_; }
  const std::array<std::uint64_t, 256>& histogram() const noexcept {
    return histogram_;
  }

  double entropy() const;
  double chi_square() const;
  double mean() const;
  /// 4 * inside / points over disjoint 6-byte points; needs >= 6 bytes.
  double monte_carlo_pi() const;
  /// Needs >= 2 bytes.
  SerialCorrelation serial_correlation() const;

  /// Throws ErrorKind::precondition below 6 bytes.
  EntReport report() const;

 private:
  std::uint64_t count_ = 0;
  std::array<std::uint64_t, 256> histogram_{};
  std::uint64_t sum_ = 0;
  std::uint64_t sum_squares_ = 0;
  std::uint64_t sum_lagged_ = 0;
  std::uint8_t first_ = 0;
  std::uint8_t last_ = 0;

  std::array<std::uint8_t, 6> point_{};
  unsigned point_fill_ = 0;
  std::uint64_t points_ = 0;
  std::uint64_t inside_ = 0;
};

inline constexpr std::size_t kMinEntBytes = 6;

EntReport ent_analyze(std::istream& input);
double monte_carlo_pi(std::istream& input);
SerialCorrelation serial_correlation(std::istream& input);

}  // namespace pwhiten
