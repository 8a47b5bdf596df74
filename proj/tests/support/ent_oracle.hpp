#pragma once

// Naive two-pass, in-memory versions of the ENT statistics. Written from the
// textbook definitions and deliberately not sharing code with EntAccumulator:
// natural-log entropy, floating-point Monte Carlo geometry, and mean-centred
// serial correlation.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>

namespace pwhiten::testing {

struct OracleEnt {
  double entropy = 0;
  double chi_square = 0;
  double mean = 0;
  double pi = 0;
  double scc = 0;
  bool scc_defined = true;
};

inline OracleEnt oracle_ent(std::span<const std::uint8_t> data) {
  OracleEnt r;
  const double n = static_cast<double>(data.size());
  std::map<int, double> counts;
  long double total = 0;
  for (auto b : data) {
    counts[b] += 1;
    total += b;
  }
  for (const auto& [value, c] : counts) {
    const double p = c / n;
    r.entropy -= p * std::log(p) / std::log(2.0);
  }
  const double expected = n / 256.0;
  for (int v = 0; v < 256; ++v) {
    const auto it = counts.find(v);
    const double c = it == counts.end() ? 0.0 : it->second;
    r.chi_square += (c - expected) * (c - expected) / expected;
  }
  const long double mean = total / static_cast<long double>(data.size());
  r.mean = static_cast<double>(mean);

  std::size_t inside = 0, points = 0;
  const double radius = 16777215.0;
  for (std::size_t i = 0; i + 6 <= data.size(); i += 6) {
    const double x = data[i] * 65536.0 + data[i + 1] * 256.0 + data[i + 2];
    const double y = data[i + 3] * 65536.0 + data[i + 4] * 256.0 + data[i + 5];
    ++points;
    if (x * x + y * y <= radius * radius) ++inside;
  }
  r.pi = points == 0 ? 0.0 : 4.0 * static_cast<double>(inside) / static_cast<double>(points);

  long double cross = 0, var = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const long double a = data[i] - mean;
    const long double b = data[(i + 1) % data.size()] - mean;
    cross += a * b;
    var += a * a;
  }
  if (var == 0) {
    r.scc = 0;
    r.scc_defined = false;
  } else {
    r.scc = static_cast<double>(cross / var);
  }
  return r;
}

}  // namespace pwhiten::testing
