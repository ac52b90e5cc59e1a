#include "xilab/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <set>
#include <sys/wait.h>
#include <unistd.h>

using namespace xilab;
using namespace xilab::cli;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_in_process(std::vector<std::string> args) {
  args.insert(args.begin(), "xilab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path temp_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("xilab_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Runs the installed executable; stdout is captured through a file.
Outcome run_binary(const std::string& args, const std::string& tag) {
  const auto out = temp_dir() / (tag + ".out");
  const auto err = temp_dir() / (tag + ".err");
  const std::string cmd = std::string(XILAB_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Outcome r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> notes;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Csv parse_csv(const std::string& text) {
  Csv c;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      c.header = split(line);
      first = false;
    } else if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      c.notes.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
    } else {
      c.rows.push_back(split(line));
    }
  }
  return c;
}

std::string note(const Csv& c, const std::string& key) {
  for (const auto& [k, v] : c.notes)
    if (k == key) return v;
  return "";
}

int column(const Csv& c, const std::string& name) {
  for (std::size_t i = 0; i < c.header.size(); ++i)
    if (c.header[i] == name) return static_cast<int>(i);
  return -1;
}

void expect_same_payload(const std::vector<std::string>& args) {
  auto csv_args = args;
  csv_args.insert(csv_args.begin(), {"--format", "csv"});
  auto json_args = args;
  json_args.insert(json_args.begin(), {"--format", "json"});
  const Outcome a = run_in_process(csv_args);
  const Outcome b = run_in_process(json_args);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const Csv csv = parse_csv(a.out);
  const auto doc = nlohmann::json::parse(b.out);
  ASSERT_EQ(doc["columns"].get<std::vector<std::string>>(), csv.header);
  ASSERT_EQ(doc["rows"].size(), csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    for (std::size_t j = 0; j < csv.header.size(); ++j) {
      EXPECT_EQ(doc["rows"][i][csv.header[j]].get<std::string>(), csv.rows[i][j]);
    }
  }
  ASSERT_EQ(doc["notes"].size(), csv.notes.size());
  for (const auto& [k, v] : csv.notes) EXPECT_EQ(doc["notes"][k].get<std::string>(), v);
}

std::string fixture_with(const std::vector<std::pair<std::string, std::string>>& edits) {
  std::string text = embedded::kTable1Csv;
  for (const auto& [from, to] : edits) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    if (pos != std::string::npos) text.replace(pos, from.size(), to);
  }
  return text;
}

}  // namespace

TEST(ParseComplex, AcceptedForms) {
  const PrecisionContext ctx(30);
  PrecisionScope scope(ctx);
  EXPECT_EQ(parse_complex("1.5-2i", ctx), Complex(1.5, -2.0));
  EXPECT_EQ(parse_complex("-3i", ctx), Complex(0.0, -3.0));
  EXPECT_EQ(parse_complex("i", ctx), Complex(0.0, 1.0));
  EXPECT_EQ(parse_complex("-i", ctx), Complex(0.0, -1.0));
  EXPECT_EQ(parse_complex("7", ctx), Complex(7.0, 0.0));
  EXPECT_EQ(parse_complex("0.5+0i", ctx), Complex(0.5, 0.0));
  EXPECT_EQ(parse_complex("2e-3+1E2i", ctx), Complex(Real("2e-3"), Real(100)));
  EXPECT_EQ(parse_complex(" 1 + 2i ", ctx), Complex(1.0, 2.0));
  EXPECT_EQ(parse_complex(".25", ctx), Complex(0.25, 0.0));
  // Decimal strings are read at working precision, not through double.
  EXPECT_EQ(parse_complex("0.1", ctx).re, Real("0.1"));
}

TEST(ParseComplex, RejectedForms) {
  const PrecisionContext ctx(30);
  for (const char* bad : {"", "abc", "1+2j", "1..2", "1+2i3", "--1", "1e", "i2"}) {
    EXPECT_THROW(parse_complex(bad, ctx), UsageError) << bad;
  }
}

TEST(ParseAlpha0, SymbolicTokens) {
  const PrecisionContext ctx(30);
  PrecisionScope scope(ctx);
  const Real a = a0(ctx);
  EXPECT_EQ(parse_alpha0("+iA0", ctx), Complex(Real(0), a));
  EXPECT_EQ(parse_alpha0("iA0", ctx), Complex(Real(0), a));
  EXPECT_EQ(parse_alpha0("-iA0", ctx), Complex(Real(0), Real(-a)));
  EXPECT_EQ(parse_alpha0("0", ctx), Complex());
  EXPECT_EQ(parse_alpha0("1-1i", ctx), Complex(1.0, -1.0));
}

TEST(ParseRect, FourOrderedNumbers) {
  const Rect r = parse_rect("0.501,60,0.001,105");
  EXPECT_EQ(r.sigma_lo, 0.501);
  EXPECT_EQ(r.t_hi, 105);
  EXPECT_THROW(parse_rect("1,2,3"), UsageError);
  EXPECT_THROW(parse_rect("1,2,3,x"), UsageError);
  EXPECT_THROW(parse_rect("2,1,0,1"), UsageError);
}

TEST(Constants, ReportsBothRoutes) {
  const Outcome r = run_in_process({"constants"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  ASSERT_EQ(c.rows.size(), 6u);
  EXPECT_EQ(c.rows[0][0], "A0");
  EXPECT_NEAR(std::stod(c.rows[0][1]), 2.80668, 1e-5);
  EXPECT_LT(std::stod(c.rows[0][3]), 1e-35);
  EXPECT_EQ(c.rows[1][1].substr(0, 7), "0.89339");
  EXPECT_EQ(c.rows[2][1].substr(0, 7), "0.49712");
  for (const auto& row : c.rows) EXPECT_LT(std::stod(row[3]), 1e-30) << row[0];
  // digits - 5 significant figures
  EXPECT_EQ(c.rows[0][1].size(), std::string("2.").size() + 34);
}

TEST(Eval, Targets) {
  Outcome r = run_in_process({"eval", "xi", "--s", "0.5+0i"});
  ASSERT_EQ(r.code, 0) << r.err;
  Csv c = parse_csv(r.out);
  ASSERT_EQ(c.header, (std::vector<std::string>{"re", "im", "abs"}));
  EXPECT_EQ(c.rows[0][0].substr(0, 7), "0.49712");

  r = run_in_process({"eval", "family", "--m", "-1", "--lambda", "0", "--z", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  c = parse_csv(r.out);
  EXPECT_LT(std::abs(std::stod(c.rows[0][2])), 1e-29);

  r = run_in_process({"eval", "xiinv", "--s", "12.26164+10.74143i"});
  ASSERT_EQ(r.code, 0) << r.err;
  c = parse_csv(r.out);
  EXPECT_LT(std::stod(c.rows[0][2]), 1e-4);
}

TEST(ExitCodes, UsageErrors) {
  EXPECT_EQ(run_in_process({}).code, kUsage);
  EXPECT_EQ(run_in_process({"bogus"}).code, kUsage);
  EXPECT_EQ(run_in_process({"eval", "xi", "--s", "1+2j"}).code, kUsage);
  EXPECT_EQ(run_in_process({"eval", "xi"}).code, kUsage);
  EXPECT_EQ(run_in_process({"eval", "zeta", "--s", "2"}).code, kUsage);
  EXPECT_EQ(run_in_process({"--digits", "19", "constants"}).code, kUsage);
  EXPECT_EQ(run_in_process({"--jobs", "0", "constants"}).code, kUsage);
  EXPECT_EQ(run_in_process({"--format", "xml", "constants"}).code, kUsage);
  EXPECT_EQ(run_in_process({"zeros", "--rect", "1,2,3"}).code, kUsage);
  EXPECT_EQ(run_in_process({"zeros", "--rect", "1,2,3,4", "--alpha0", "foo"}).code, kUsage);
  EXPECT_EQ(run_in_process({"scan-real", "--lambda", "1+1i"}).code, kUsage);
  const Outcome help = run_in_process({"--help"});
  EXPECT_EQ(help.code, kOk);
  EXPECT_NE(help.out.find("table1"), std::string::npos);
}

TEST(ExitCodes, NumericDomainErrors) {
  Outcome r = run_in_process({"eval", "family", "--z", "0+3i"});
  EXPECT_EQ(r.code, kNumeric);
  EXPECT_NE(r.err.find("|Im z|"), std::string::npos);
  EXPECT_EQ(run_in_process({"eval", "family", "--m", "-2", "--z", "1"}).code, kNumeric);
  EXPECT_EQ(run_in_process({"scan-real", "--tmax", "600"}).code, kNumeric);
}

TEST(Config, DigitsFromEnvironment) {
  ::setenv("XI_PREC_DIGITS", "25", 1);
  const Outcome r = run_in_process({"constants"});
  ::unsetenv("XI_PREC_DIGITS");
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  EXPECT_EQ(c.rows[0][1].size(), std::string("2.").size() + 19);
  // An explicit flag wins over the environment.
  ::setenv("XI_PREC_DIGITS", "25", 1);
  const Outcome f = run_in_process({"--digits", "30", "constants"});
  ::unsetenv("XI_PREC_DIGITS");
  EXPECT_EQ(parse_csv(f.out).rows[0][1].size(), std::string("2.").size() + 24);
}

TEST(Config, OutputFileMatchesStdout) {
  const auto path = (temp_dir() / "constants.csv").string();
  const Outcome to_file = run_in_process({"--out", path, "constants"});
  ASSERT_EQ(to_file.code, 0);
  EXPECT_TRUE(to_file.out.empty());
  EXPECT_EQ(read_file(path), run_in_process({"constants"}).out);
}

TEST(Format, JsonAndCsvCarryTheSamePayload) {
  expect_same_payload({"constants"});
  expect_same_payload({"eval", "xi", "--s", "2+3i"});
  expect_same_payload({"scan-real", "--lambda", "20", "--tmax", "20"});
  expect_same_payload({"zeros", "--alpha0", "0", "--rect", "0.501,13,0.001,11", "--full-plane"});
}

TEST(Zeros, EmptySquareHasNoRows) {
  const Outcome r = run_in_process({"zeros", "--alpha0", "0", "--rect", "2,3,2,3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  EXPECT_EQ(c.header,
            (std::vector<std::string>{"idx", "re", "im", "abs", "residual", "orbit"}));
  EXPECT_TRUE(c.rows.empty());
  EXPECT_EQ(note(c, "winding_count"), "0");
}

TEST(Zeros, FullPlaneAddsOrbit) {
  const Outcome r = run_in_process(
      {"zeros", "--alpha0", "0", "--rect", "0.501,13,0.001,11", "--full-plane"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  ASSERT_EQ(c.rows.size(), 4u);
  std::set<std::string> tags;
  for (const auto& row : c.rows) {
    tags.insert(row[5]);
    EXPECT_NEAR(std::abs(std::stod(row[1]) - 0.5), 11.76164, 1e-5);
    EXPECT_NEAR(std::abs(std::stod(row[2])), 10.74143, 1e-5);
  }
  EXPECT_EQ(tags, (std::set<std::string>{"base", "reflected", "conjugate",
                                         "reflected-conjugate"}));
}

TEST(Zeros, ExceptionalValueOnLine) {
  const Outcome r = run_in_process({"zeros", "--alpha0", "+iA0", "--rect", "-1.5,2.5,0.1,30"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  int on_line = 0;
  for (const auto& row : c.rows)
    if (std::abs(std::stod(row[1]) - 0.5) < 1e-3) ++on_line;
  EXPECT_GE(on_line, 1);
  EXPECT_EQ(note(c, "critical_line_unmatched"), "0");
}

TEST(ScanReal, NonPositiveLambdaOnlyOrigin) {
  for (const char* lambda : {"0", "-1"}) {
    const Outcome r = run_in_process({"scan-real", "--lambda", lambda, "--tmax", "50"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Csv c = parse_csv(r.out);
    ASSERT_EQ(c.rows.size(), 1u) << lambda;
    EXPECT_EQ(c.rows[0][1], "0.0000000000");
  }
}

TEST(ScanReal, LambdaTwentyLocked) {
  const Outcome r = run_in_process({"scan-real", "--lambda", "20", "--tmax", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  const std::vector<std::string> expected = {"0.0000000000",  "3.5657127969",
                                             "6.8298727936",  "10.1720149279",
                                             "13.0058917691", "16.5945411302",
                                             "18.3265502447"};
  ASSERT_EQ(c.rows.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(c.rows[i][1], expected[i]);
}

TEST(Binary, ZerosOutputIsByteIdenticalAcrossRunsAndJobs) {
  const std::string args = "zeros --alpha0 0 --rect 0.501,25,0.001,30";
  const Outcome a = run_binary(args, "det_a");
  const Outcome b = run_binary(args, "det_b");
  const Outcome c = run_binary("--jobs 2 " + args, "det_c");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(parse_csv(a.out).rows.size(), 3u);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Binary, Table1AgainstPrintedFixture) {
  // The printed fixture carries the row-3 ordinate typo, so the check fails
  // on exactly that coordinate and on the row's inconsistent modulus.
  const Outcome r = run_binary("table1 --check", "table1_printed");
  EXPECT_EQ(r.code, kCheckMismatch) << r.err;
  const Csv c = parse_csv(r.out);
  ASSERT_EQ(c.rows.size(), 20u);
  EXPECT_EQ(note(c, "monotone_sigma"), "true");
  EXPECT_EQ(note(c, "monotone_t"), "true");
  EXPECT_EQ(note(c, "check"), "fail");
  EXPECT_EQ(note(c, "offending"), "k3:rho_im;fixture_k3:rho_abs");
  const int match = column(c, "match");
  for (const auto& row : c.rows) EXPECT_EQ(row[match], row[0] == "3" ? "false" : "true");
}

TEST(Binary, Table1CheckPassesWithCorrectedRowThree) {
  const auto path = temp_dir() / "table1_fixed.csv";
  std::ofstream(path, std::ios::binary)
      << fixture_with({{"3,19.91864,24.52433,", "3,19.91864,24.52533,"}});
  const Outcome r = run_binary("--jobs 2 table1 --check --fixture " + path.string(), "table1_fixed");
  EXPECT_EQ(r.code, kOk) << r.err;
  const Csv c = parse_csv(r.out);
  EXPECT_EQ(c.rows.size(), 20u);
  EXPECT_EQ(note(c, "check"), "pass");
  EXPECT_EQ(note(c, "fixture"), path.string());
}

TEST(Binary, Table1CheckFailsOnCorruptedFixture) {
  const auto path = temp_dir() / "table1_corrupt.csv";
  std::ofstream(path, std::ios::binary)
      << fixture_with({{"3,19.91864,24.52433,", "3,19.91864,24.52533,"},
                       {"7,29.82109,", "7,29.83109,"}});
  const Outcome r = run_binary("table1 --check --fixture " + path.string(), "table1_corrupt");
  EXPECT_EQ(r.code, kCheckMismatch);
  const Csv c = parse_csv(r.out);
  EXPECT_NE(note(c, "offending").find("k7:rho_re"), std::string::npos);
  EXPECT_EQ(note(c, "offending").find("k3:"), std::string::npos);
}

TEST(Binary, MissingFixtureIsNumericError) {
  const Outcome r = run_binary("table1 --fixture /nonexistent/table1.csv", "table1_missing");
  EXPECT_EQ(r.code, kNumeric);
  EXPECT_NE(r.err.find("cannot open fixture"), std::string::npos);
}
