#include "pwhiten/nist_lite.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "pwhiten/error.hpp"

namespace pwhiten {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

void NistLiteAccumulator::push_bit(bool bit) {
  if (bits_ != 0 && bit != previous_) ++runs_;
  if (bits_ == 0) runs_ = 1;
  previous_ = bit;

  // walk_min_/walk_max_ track S_0..S_{k-1}: the backward cusum needs the
  // prefix range excluding the final sum.
  walk_min_ = std::min(walk_min_, walk_);
  walk_max_ = std::max(walk_max_, walk_);
  walk_ += bit ? 1 : -1;
  forward_max_ = std::max<std::uint64_t>(
      forward_max_, static_cast<std::uint64_t>(walk_ < 0 ? -walk_ : walk_));

  ++bits_;
  if (bit) ++block_ones_;
  if (++block_fill_ == kBlockFrequencyBits) {
    const auto d = static_cast<std::int64_t>(2 * block_ones_) -
                   static_cast<std::int64_t>(kBlockFrequencyBits);
    block_deviation_ += static_cast<std::uint64_t>(d * d);
    ++full_blocks_;
    block_ones_ = 0;
    block_fill_ = 0;
  }
}

void NistLiteAccumulator::feed(std::span<const std::uint8_t> bytes) {
  for (const auto b : bytes) {
    for (int shift = 7; shift >= 0; --shift) push_bit((b >> shift) & 1U);
  }
}

void NistLiteAccumulator::feed_bits(std::span<const std::uint8_t> bytes,
                                    std::uint64_t bits) {
  if (bits > bytes.size() * 8) {
    throw Error(ErrorKind::contract, "feed_bits: not enough bytes");
  }
  for (std::uint64_t i = 0; i < bits; ++i) {
    push_bit((bytes[i >> 3] >> (7 - (i & 7))) & 1U);
  }
}

double cusum_p_value(std::uint64_t n_bits, std::uint64_t z_max) {
  if (n_bits == 0 || z_max == 0) {
    throw Error(ErrorKind::contract, "cusum_p_value: n and z must be positive");
  }
  const auto n = static_cast<std::int64_t>(n_bits);
  const auto z = static_cast<std::int64_t>(z_max);
  const double zd = static_cast<double>(z);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  double sum1 = 0.0;
  for (std::int64_t k = (-n / z + 1) / 4; k <= (n / z - 1) / 4; ++k) {
    sum1 += normal_cdf(static_cast<double>(4 * k + 1) * zd / sqrt_n) -
            normal_cdf(static_cast<double>(4 * k - 1) * zd / sqrt_n);
  }
  double sum2 = 0.0;
  for (std::int64_t k = (-n / z - 3) / 4; k <= (n / z - 1) / 4; ++k) {
    sum2 += normal_cdf(static_cast<double>(4 * k + 3) * zd / sqrt_n) -
            normal_cdf(static_cast<double>(4 * k + 1) * zd / sqrt_n);
  }
  return clamp01(1.0 - sum1 + sum2);
}

NistLiteReport NistLiteAccumulator::report() const {
  if (bits_ < kNistMinBits) {
    throw Error(ErrorKind::precondition,
                "NIST-lite needs at least 100 bits, got " + std::to_string(bits_));
  }
  NistLiteReport r;
  const double n = static_cast<double>(bits_);
  r.bit_count = bits_;

  r.monobit_sum = walk_;
  r.monobit_statistic = std::abs(static_cast<double>(walk_)) / std::sqrt(n);
  r.p_monobit = clamp01(std::erfc(r.monobit_statistic / std::sqrt(2.0)));

  if (full_blocks_ > 0) {
    // chi^2 = 4M * sum (pi_i - 1/2)^2 = sum (2 ones_i - M)^2 / M
    const double chi = static_cast<double>(block_deviation_) /
                       static_cast<double>(kBlockFrequencyBits);
    // gamma_q(a, 0) is 1; Boost overflows evaluating it for large a.
    r.p_block_frequency =
        chi == 0.0 ? 1.0
                   : clamp01(boost::math::gamma_q(
                         static_cast<double>(full_blocks_) / 2.0, chi / 2.0));
  } else {
    // Under one block: treat the whole sequence as a single block.
    const double chi = static_cast<double>(walk_) * static_cast<double>(walk_) / n;
    r.p_block_frequency = clamp01(boost::math::gamma_q(0.5, chi / 2.0));
  }

  const std::uint64_t ones = (bits_ + static_cast<std::uint64_t>(walk_)) / 2;
  const double pi = static_cast<double>(ones) / n;
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
    r.p_runs = 0.0;  // frequency pre-test failed
  } else {
    const double expected = 2.0 * n * pi * (1.0 - pi);
    r.p_runs = clamp01(std::erfc(std::abs(static_cast<double>(runs_) - expected) /
                                 (2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi))));
  }

  r.p_cusum_forward = cusum_p_value(bits_, forward_max_);
  const auto backward =
      std::max(std::abs(walk_ - walk_min_), std::abs(walk_ - walk_max_));
  r.p_cusum_backward =
      cusum_p_value(bits_, static_cast<std::uint64_t>(std::max<std::int64_t>(backward, 1)));
  return r;
}

NistLiteReport nist_lite(std::istream& input) {
  NistLiteAccumulator acc;
  std::vector<std::uint8_t> buf(1U << 16);
  for (;;) {
    input.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size()));
    if (input.bad()) throw Error(ErrorKind::io, "read failed");
    const auto got = static_cast<std::size_t>(input.gcount());
    if (got == 0) break;
    acc.feed(std::span(buf).first(got));
  }
  return acc.report();
}

}  // namespace pwhiten
