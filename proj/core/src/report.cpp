#include "pwhiten/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>

#include "pwhiten/error.hpp"

namespace pwhiten {

namespace {

constexpr std::string_view kCsvHeader = "parameter,value";

int precision_of(EntParameter p) noexcept {
  switch (p) {
    case EntParameter::entropy: return 6;
    case EntParameter::chi_square: return 2;
    case EntParameter::arithmetic_mean: return 4;
    case EntParameter::monte_carlo_pi: return 9;
    case EntParameter::serial_correlation: return 6;
  }
  return 6;
}

// printf rounds the exact binary value to nearest, ties to even.
std::string fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, value);
  return buf;
}

std::string full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string padded(std::string_view s, std::size_t width) {
  std::string out(s);
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view text, std::string_view key) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::format, "report CSV: bad number for '" +
                                       std::string(key) + "': '" +
                                       std::string(text) + "'");
  }
  return value;
}

}  // namespace

const char* display_name(EntParameter p) noexcept {
  switch (p) {
    case EntParameter::entropy: return "Entropy";
    case EntParameter::chi_square: return "Chi-Square Distribution";
    case EntParameter::arithmetic_mean: return "Arithmetic Mean";
    case EntParameter::monte_carlo_pi: return "Monte Carlo value of Pi";
    case EntParameter::serial_correlation: return "Serial Correlation Coefficient";
  }
  return "?";
}

const char* csv_key(EntParameter p) noexcept {
  switch (p) {
    case EntParameter::entropy: return "entropy";
    case EntParameter::chi_square: return "chi_square";
    case EntParameter::arithmetic_mean: return "arithmetic_mean";
    case EntParameter::monte_carlo_pi: return "monte_carlo_pi";
    case EntParameter::serial_correlation: return "serial_correlation";
  }
  return "?";
}

double ideal_value(EntParameter p) noexcept {
  switch (p) {
    case EntParameter::entropy: return 8.0;
    case EntParameter::chi_square: return 256.0;
    case EntParameter::arithmetic_mean: return 127.5;
    case EntParameter::monte_carlo_pi: return std::numbers::pi;
    case EntParameter::serial_correlation: return 0.0;
  }
  return 0.0;
}

double value_of(const EntReport& r, EntParameter p) noexcept {
  switch (p) {
    case EntParameter::entropy: return r.entropy_bits_per_byte;
    case EntParameter::chi_square: return r.chi_square;
    case EntParameter::arithmetic_mean: return r.arithmetic_mean;
    case EntParameter::monte_carlo_pi: return r.monte_carlo_pi;
    case EntParameter::serial_correlation: return r.serial_correlation;
  }
  return 0.0;
}

std::string format_value(EntParameter p, double value) {
  return fixed(value, precision_of(p));
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::improved: return "improved";
    case Verdict::unchanged: return "unchanged";
    case Verdict::worsened: return "worsened";
  }
  return "?";
}

std::vector<ParameterVerdict> compare_reports(const EntReport& before,
                                              const EntReport& after) {
  std::vector<ParameterVerdict> out;
  for (const auto p : kEntParameters) {
    ParameterVerdict v{};
    v.parameter = p;
    v.before = value_of(before, p);
    v.after = value_of(after, p);
    v.before_distance = std::abs(v.before - ideal_value(p));
    v.after_distance = std::abs(v.after - ideal_value(p));
    if (v.after_distance < v.before_distance) {
      v.verdict = Verdict::improved;
    } else if (v.after_distance > v.before_distance) {
      v.verdict = Verdict::worsened;
    } else {
      v.verdict = Verdict::unchanged;
    }
    out.push_back(v);
  }
  return out;
}

void write_ent_text(const EntReport& r, std::ostream& out) {
  constexpr std::size_t w = 32;
  out << padded("Bytes analysed", w) << r.byte_count << '\n';
  for (const auto p : kEntParameters) {
    out << padded(display_name(p), w);
    if (p == EntParameter::serial_correlation && !r.serial_correlation_defined) {
      out << "undefined (all values equal)\n";
    } else {
      out << format_value(p, value_of(r, p)) << '\n';
    }
  }
}

void write_nist_text(const NistLiteReport& r, std::ostream& out) {
  constexpr std::size_t w = 32;
  const auto row = [&](std::string_view name, double p, bool pass) {
    out << padded(name, w) << fixed(p, 6) << (pass ? "  pass" : "  FAIL") << '\n';
  };
  out << padded("Bits analysed", w) << r.bit_count << '\n';
  row("Frequency (monobit)", r.p_monobit, r.pass_monobit());
  row("Block frequency (M=128)", r.p_block_frequency, r.pass_block_frequency());
  row("Runs", r.p_runs, r.pass_runs());
  row("Cumulative sums (forward)", r.p_cusum_forward, r.pass_cusum_forward());
  row("Cumulative sums (backward)", r.p_cusum_backward, r.pass_cusum_backward());
}

void write_comparison_text(const std::vector<ParameterVerdict>& verdicts,
                           std::string_view before_label,
                           std::string_view after_label, std::ostream& out) {
  constexpr std::size_t w = 32;
  constexpr std::size_t col = 16;
  out << padded("Parameter", w) << padded(before_label, col)
      << padded(after_label, col) << padded("Ideal Value", col) << "Verdict\n";
  for (const auto& v : verdicts) {
    out << padded(display_name(v.parameter), w)
        << padded(format_value(v.parameter, v.before), col)
        << padded(format_value(v.parameter, v.after), col)
        << padded(format_value(v.parameter, ideal_value(v.parameter)), col)
        << to_string(v.verdict) << '\n';
  }
}

void write_report_csv(const EntReport& ent, const NistLiteReport* nist,
                      std::ostream& out) {
  out << kCsvHeader << '\n';
  out << "byte_count," << ent.byte_count << '\n';
  for (const auto p : kEntParameters) {
    out << csv_key(p) << ',' << full(value_of(ent, p)) << '\n';
  }
  out << "serial_correlation_defined," << (ent.serial_correlation_defined ? 1 : 0)
      << '\n';
  if (nist != nullptr) {
    out << "nist_bit_count," << nist->bit_count << '\n';
    out << "nist_monobit_sum," << nist->monobit_sum << '\n';
    out << "nist_monobit_statistic," << full(nist->monobit_statistic) << '\n';
    out << "nist_p_monobit," << full(nist->p_monobit) << '\n';
    out << "nist_p_block_frequency," << full(nist->p_block_frequency) << '\n';
    out << "nist_p_runs," << full(nist->p_runs) << '\n';
    out << "nist_p_cusum_forward," << full(nist->p_cusum_forward) << '\n';
    out << "nist_p_cusum_backward," << full(nist->p_cusum_backward) << '\n';
  }
}

bool looks_like_report_csv(std::string_view head) {
  return head.substr(0, kCsvHeader.size()) == kCsvHeader;
}

EntReport read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw Error(ErrorKind::format, "report CSV: missing 'parameter,value' header");
  }
  std::map<std::string, std::string, std::less<>> fields;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string_view::npos) {
      throw Error(ErrorKind::format, "report CSV: malformed line '" + line + "'");
    }
    fields[std::string(trim(t.substr(0, comma)))] =
        std::string(trim(t.substr(comma + 1)));
  }

  EntReport r;
  double* targets[] = {&r.entropy_bits_per_byte, &r.chi_square,
                       &r.arithmetic_mean, &r.monte_carlo_pi,
                       &r.serial_correlation};
  for (std::size_t i = 0; i < kEntParameters.size(); ++i) {
    const char* key = csv_key(kEntParameters[i]);
    const auto it = fields.find(key);
    if (it == fields.end()) {
      throw Error(ErrorKind::format,
                  std::string("report CSV: missing parameter '") + key + "'");
    }
    *targets[i] = parse_double(it->second, key);
  }
  if (const auto it = fields.find("byte_count"); it != fields.end()) {
    r.byte_count = static_cast<std::uint64_t>(parse_double(it->second, "byte_count"));
  }
  if (const auto it = fields.find("serial_correlation_defined");
      it != fields.end()) {
    r.serial_correlation_defined = parse_double(it->second, it->first) != 0.0;
  }
  return r;
}

void write_figure_csv(const std::vector<FigureRow>& rows, std::ostream& out) {
  out << "label,chi_square,arithmetic_mean\n";
  for (const auto& row : rows) {
    out << row.label << ',' << fixed(row.chi_square, 2) << ','
        << fixed(row.arithmetic_mean, 4) << '\n';
  }
}

}  // namespace pwhiten
