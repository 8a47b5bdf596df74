#include "pwhiten/report.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "pwhiten/error.hpp"

namespace pwhiten {
namespace {

EntReport ideal_report() {
  EntReport r;
  r.byte_count = 1000;
  r.entropy_bits_per_byte = 8.0;
  r.chi_square = 256.0;
  r.arithmetic_mean = 127.5;
  r.monte_carlo_pi = 3.141592653;
  r.serial_correlation = 0.0;
  return r;
}

Verdict verdict_for(const std::vector<ParameterVerdict>& v, EntParameter p) {
  for (const auto& x : v) {
    if (x.parameter == p) return x.verdict;
  }
  ADD_FAILURE() << "missing parameter";
  return Verdict::unchanged;
}

TEST(Compare, SerialCorrelationMagnitudeDecrease) {
  auto before = ideal_report(), after = ideal_report();
  before.serial_correlation = -0.000024;
  after.serial_correlation = 0.000022;
  EXPECT_EQ(verdict_for(compare_reports(before, after), EntParameter::serial_correlation),
            Verdict::improved);
}

TEST(Compare, IdenticalReportsChangeNothing) {
  auto r = ideal_report();
  r.chi_square = 281.74;
  r.arithmetic_mean = 127.5035;
  for (const auto& v : compare_reports(r, r)) EXPECT_EQ(v.verdict, Verdict::unchanged);
}

TEST(Compare, ChiSquareJudgedByDistanceTo256) {
  auto before = ideal_report(), after = ideal_report();
  before.chi_square = 265.55;
  after.chi_square = 236.57;
  const auto v = compare_reports(before, after);
  EXPECT_EQ(verdict_for(v, EntParameter::chi_square), Verdict::worsened);
  EXPECT_NEAR(v[1].before_distance, 9.55, 1e-9);
  EXPECT_NEAR(v[1].after_distance, 19.43, 1e-9);
}

TEST(Compare, MeanTowardIdealImproves) {
  auto before = ideal_report(), after = ideal_report();
  before.arithmetic_mean = 127.5035;
  after.arithmetic_mean = 127.4985;
  EXPECT_EQ(verdict_for(compare_reports(before, after), EntParameter::arithmetic_mean),
            Verdict::improved);
}

TEST(Compare, IdealsMatchTableColumn) {
  EXPECT_EQ(ideal_value(EntParameter::entropy), 8.0);
  EXPECT_EQ(ideal_value(EntParameter::chi_square), 256.0);
  EXPECT_EQ(ideal_value(EntParameter::arithmetic_mean), 127.5);
  EXPECT_EQ(format_value(EntParameter::monte_carlo_pi,
                         ideal_value(EntParameter::monte_carlo_pi)),
            "3.141592654");
  EXPECT_EQ(ideal_value(EntParameter::serial_correlation), 0.0);
}

TEST(Format, TablePrecision) {
  EXPECT_EQ(format_value(EntParameter::entropy, 7.9999994), "7.999999");
  EXPECT_EQ(format_value(EntParameter::chi_square, 256.994), "256.99");
  EXPECT_EQ(format_value(EntParameter::arithmetic_mean, 127.50241), "127.5024");
  EXPECT_EQ(format_value(EntParameter::monte_carlo_pi, 3.1414051554), "3.141405155");
  EXPECT_EQ(format_value(EntParameter::serial_correlation, -0.0000241), "-0.000024");
  // Exact binary ties round to even.
  EXPECT_EQ(format_value(EntParameter::chi_square, 0.125), "0.12");
  EXPECT_EQ(format_value(EntParameter::chi_square, 0.375), "0.38");
}

TEST(Text, EntRowsMirrorTableLayout) {
  auto r = ideal_report();
  std::ostringstream out;
  write_ent_text(r, out);
  const auto text = out.str();
  EXPECT_NE(text.find("Entropy                         8.000000\n"), std::string::npos);
  EXPECT_NE(text.find("Chi-Square Distribution         256.00\n"), std::string::npos);
  EXPECT_NE(text.find("Arithmetic Mean                 127.5000\n"), std::string::npos);
  EXPECT_NE(text.find("Serial Correlation Coefficient  0.000000\n"), std::string::npos);

  r.serial_correlation_defined = false;
  std::ostringstream undefined;
  write_ent_text(r, undefined);
  EXPECT_NE(undefined.str().find("undefined"), std::string::npos);
}

TEST(Csv, RoundTripsEntValues) {
  EntReport r;
  r.byte_count = 123456;
  r.entropy_bits_per_byte = 7.9999982;
  r.chi_square = 271.3300000001;
  r.arithmetic_mean = 127.50021;
  r.monte_carlo_pi = 3.141684931;
  r.serial_correlation = 0.000022;
  NistLiteReport nist;
  nist.bit_count = 987654;
  std::stringstream buf;
  write_report_csv(r, &nist, buf);
  EXPECT_TRUE(looks_like_report_csv(buf.str()));
  EXPECT_EQ(read_report_csv(buf), r);
}

TEST(Csv, AcceptsHandWrittenReport) {
  std::istringstream in(
      "parameter,value\n"
      "# comment lines are skipped\n"
      "entropy, 8.000000\n"
      "chi_square,281.74\r\n"
      "arithmetic_mean,127.5035\n"
      "monte_carlo_pi,3.141483117\n"
      "serial_correlation,-0.000015\n");
  const auto r = read_report_csv(in);
  EXPECT_EQ(r.arithmetic_mean, 127.5035);
  EXPECT_EQ(r.chi_square, 281.74);
  EXPECT_EQ(r.byte_count, 0U);
  EXPECT_TRUE(r.serial_correlation_defined);
}

TEST(Csv, RejectsMalformedReports) {
  const auto fails = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_report_csv(in);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::format;
    }
    return false;
  };
  EXPECT_TRUE(fails(""));
  EXPECT_TRUE(fails("param,value\n"));
  EXPECT_TRUE(fails("parameter,value\nentropy,8\n"));
  EXPECT_TRUE(fails("parameter,value\nentropy,8\nchi_square,abc\narithmetic_mean,1\n"
                    "monte_carlo_pi,3\nserial_correlation,0\n"));
  EXPECT_TRUE(fails("parameter,value\nentropy 8\n"));
}

TEST(Figure, OneRowPerInput) {
  std::ostringstream out;
  write_figure_csv({{"raw", 281.74, 127.5035}, {"whitened", 254.6, 127.4985}}, out);
  EXPECT_EQ(out.str(),
            "label,chi_square,arithmetic_mean\n"
            "raw,281.74,127.5035\n"
            "whitened,254.60,127.4985\n");
}

}  // namespace
}  // namespace pwhiten
