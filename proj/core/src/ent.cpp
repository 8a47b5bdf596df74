#include "pwhiten/ent.hpp"

#include <cmath>
#include <istream>
#include <vector>

#include "pwhiten/error.hpp"

namespace pwhiten {

namespace {

constexpr std::uint64_t kCircleRadius = (std::uint64_t{1} << 24) - 1;
constexpr std::uint64_t kCircleRadiusSquared = kCircleRadius * kCircleRadius;

template <typename Acc>
void feed_stream(std::istream& input, Acc& acc) {
  std::vector<std::uint8_t> buf(1U << 16);
  for (;;) {
    input.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size()));
    if (input.bad()) throw Error(ErrorKind::io, "read failed");
    const auto got = static_cast<std::size_t>(input.gcount());
    if (got == 0) break;
    acc.feed(std::span(buf).first(got));
  }
}

}  // namespace

void EntAccumulator::feed(std::span<const std::uint8_t> bytes) {
  for (const auto b : bytes) {
    ++histogram_[b];
    sum_ += b;
    sum_squares_ += std::uint64_t{b} * b;
    if (count_ == 0) {
      first_ = b;
    } else {
      sum_lagged_ += std::uint64_t{last_} * b;
    }
    last_ = b;
    ++count_;

    point_[point_fill_++] = b;
    if (point_fill_ == 6) {
      point_fill_ = 0;
      const std::uint64_t x = std::uint64_t{point_[0]} << 16 |
                              std::uint64_t{point_[1]} << 8 | point_[2];
      const std::uint64_t y = std::uint64_t{point_[3]} << 16 |
                              std::uint64_t{point_[4]} << 8 | point_[5];
      ++points_;
      if (x * x + y * y <= kCircleRadiusSquared) ++inside_;
    }
  }
}

double EntAccumulator::entropy() const {
  if (count_ == 0) throw Error(ErrorKind::precondition, "entropy of empty input");
  const double n = static_cast<double>(count_);
  double h = 0.0;
  for (const auto c : histogram_) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double EntAccumulator::chi_square() const {
  if (count_ == 0) throw Error(ErrorKind::precondition, "chi-square of empty input");
  const double expected = static_cast<double>(count_) / 256.0;
  double chi = 0.0;
  for (const auto c : histogram_) {
    const double d = static_cast<double>(c) - expected;
    chi += d * d / expected;
  }
  return chi;
}

double EntAccumulator::mean() const {
  if (count_ == 0) throw Error(ErrorKind::precondition, "mean of empty input");
  return static_cast<double>(sum_) / static_cast<double>(count_);
}

double EntAccumulator::monte_carlo_pi() const {
  if (points_ == 0) {
    throw Error(ErrorKind::precondition,
                "Monte Carlo pi needs at least 6 bytes");
  }
  return 4.0 * static_cast<double>(inside_) / static_cast<double>(points_);
}

SerialCorrelation EntAccumulator::serial_correlation() const {
  if (count_ < 2) {
    throw Error(ErrorKind::precondition,
                "serial correlation needs at least 2 bytes");
  }
  using i128 = __int128;
  const i128 n = count_;
  const i128 sx = sum_;
  const i128 lagged = i128{sum_lagged_} + i128{last_} * first_;
  const i128 numerator = n * lagged - sx * sx;
  const i128 denominator = n * i128{sum_squares_} - sx * sx;
  if (denominator == 0) return {0.0, false};
  return {static_cast<double>(static_cast<long double>(numerator) /
                              static_cast<long double>(denominator)),
          true};
}

EntReport EntAccumulator::report() const {
  if (count_ < kMinEntBytes) {
    throw Error(ErrorKind::precondition,
                "ent analysis needs at least 6 bytes, got " +
                    std::to_string(count_));
  }
  EntReport r;
  r.byte_count = count_;
  r.entropy_bits_per_byte = entropy();
  r.chi_square = chi_square();
  r.arithmetic_mean = mean();
  r.monte_carlo_pi = monte_carlo_pi();
  const auto scc = serial_correlation();
  r.serial_correlation = scc.value;
  r.serial_correlation_defined = scc.defined;
  return r;
}

EntReport ent_analyze(std::istream& input) {
  EntAccumulator acc;
  feed_stream(input, acc);
  return acc.report();
}

double monte_carlo_pi(std::istream& input) {
  EntAccumulator acc;
  feed_stream(input, acc);
  return acc.monte_carlo_pi();
}

SerialCorrelation serial_correlation(std::istream& input) {
  EntAccumulator acc;
  feed_stream(input, acc);
  return acc.serial_correlation();
}

}  // namespace pwhiten
