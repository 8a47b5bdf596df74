#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pwhiten/ent.hpp"
#include "pwhiten/nist_lite.hpp"

namespace pwhiten {

enum class EntParameter {
  entropy,
  chi_square,
  arithmetic_mean,
  monte_carlo_pi,
  serial_correlation,
};

inline constexpr std::array<EntParameter, 5> kEntParameters = {
    EntParameter::entropy, EntParameter::chi_square,
    EntParameter::arithmetic_mean, EntParameter::monte_carlo_pi,
    EntParameter::serial_correlation};

/// Row label as it appears in the comparison tables.
const char* display_name(EntParameter p) noexcept;
/// Machine key used in CSV files.
const char* csv_key(EntParameter p) noexcept;
double ideal_value(EntParameter p) noexcept;
double value_of(const EntReport& report, EntParameter p) noexcept;
/// Fixed-point rendering with the per-parameter precision of the tables
/// (entropy 6, chi-square 2, mean 4, pi 9, correlation 6 decimals).
std::string format_value(EntParameter p, double value);

enum class Verdict { improved, unchanged, worsened };

const char* to_string(Verdict v) noexcept;

struct ParameterVerdict {
  EntParameter parameter;
  double before;
  double after;
  double before_distance;
  double after_distance;
  Verdict verdict;
};

/// A parameter improved iff |value - ideal| strictly decreased; equal
/// distance is "unchanged".
std::vector<ParameterVerdict> compare_reports(const EntReport& before,
                                              const EntReport& after);

void write_ent_text(const EntReport& report, std::ostream& out);
void write_nist_text(const NistLiteReport& report, std::ostream& out);
void write_comparison_text(const std::vector<ParameterVerdict>& verdicts,
                           std::string_view before_label,
                           std::string_view after_label, std::ostream& out);

/// `parameter,value` CSV. NIST rows are appended when present.
void write_report_csv(const EntReport& ent, const NistLiteReport* nist,
                      std::ostream& out);
/// Parses the ENT rows of a report CSV; unknown keys are ignored. Throws
/// ErrorKind::format on a missing header, missing parameter or bad number.
EntReport read_report_csv(std::istream& in);
/// True when `head` starts with the report CSV header line.
bool looks_like_report_csv(std::string_view head);

struct FigureRow {
  std::string label;
  double chi_square;
  double arithmetic_mean;
};

/// `label,chi_square,arithmetic_mean` rows for external plotting.
void write_figure_csv(const std::vector<FigureRow>& rows, std::ostream& out);

}  // namespace pwhiten
