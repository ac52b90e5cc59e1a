#ifndef XILAB_CLI_HPP
#define XILAB_CLI_HPP

// Command implementations behind the xilab executable.  Each command builds
// a Report (column names, string cells, trailing notes) that is written as
// CSV or JSON with identical payloads.
//
// Exit codes: 0 ok, 1 check mismatch, 2 usage or parse error, 3 numeric
// domain error.

#include "xilab/complex.hpp"
#include "xilab/precision.hpp"
#include "xilab/reference_data.hpp"
#include "xilab/special_functions.hpp"
#include "xilab/xi_core.hpp"
#include "xilab/xi_integrals.hpp"
#include "xilab/zero_lab.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace xilab::cli {

enum ExitCode { kOk = 0, kCheckMismatch = 1, kUsage = 2, kNumeric = 3 };

enum class Format { csv, json };

struct CommandConfig {
  int digits = kDefaultDigits;
  Format format = Format::csv;
  std::string out_path;  // empty: standard output
  int jobs = 1;

  PrecisionContext context() const { return PrecisionContext(digits); }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> notes;
  int exit_code = kOk;
};

// digits - 5 significant figures.
inline std::string fmt(const Real& x, const CommandConfig& cfg) {
  return format_real(x, cfg.digits - 5);
}

inline std::string fmt_fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

inline std::string fmt_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

inline void write_csv(const Report& r, std::ostream& os) {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  line(r.columns);
  for (const auto& row : r.rows) line(row);
  for (const auto& [k, v] : r.notes) os << "# " << k << '=' << v << '\n';
}

inline void write_json(const Report& r, std::ostream& os) {
  nlohmann::ordered_json doc;
  doc["columns"] = r.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.columns.size() && i < row.size(); ++i)
      obj[r.columns[i]] = row[i];
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  nlohmann::ordered_json notes = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.notes) notes[k] = v;
  doc["notes"] = std::move(notes);
  os << doc.dump(2) << '\n';
}

inline void write_report(const Report& r, const CommandConfig& cfg,
                         std::ostream& fallback) {
  std::ofstream file;
  std::ostream* os = &fallback;
  if (!cfg.out_path.empty()) {
    file.open(cfg.out_path, std::ios::binary);
    if (!file) throw UsageError("cannot write " + cfg.out_path);
    os = &file;
  }
  if (cfg.format == Format::json) {
    write_json(r, *os);
  } else {
    write_csv(r, *os);
  }
}

// "a", "a+bi", "a-bi", "bi", "-i" with decimal or exponent notation.
inline Complex parse_complex(std::string text, const PrecisionContext& ctx) {
  text.erase(std::remove_if(text.begin(), text.end(),
                            [](unsigned char c) { return std::isspace(c); }),
             text.end());
  static const std::regex number(
      R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  if (text.empty()) throw UsageError("empty complex number");
  PrecisionScope scope(ctx);
  auto to_real = [&](const std::string& s) {
    if (!std::regex_match(s, number))
      throw UsageError("cannot parse number '" + s + "'");
    return Real(s.front() == '+' ? s.substr(1) : s);
  };
  if (text.back() != 'i') return Complex(to_real(text), Real(0));
  const std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' &&
        body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string re = split == std::string::npos ? "" : body.substr(0, split);
  std::string im = split == std::string::npos ? body : body.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return Complex(re.empty() ? Real(0) : to_real(re), to_real(im));
}

// Accepts the symbolic tokens +iA0, iA0, -iA0 besides plain complex numbers.
inline Complex parse_alpha0(const std::string& text, const PrecisionContext& ctx) {
  if (text == "+iA0" || text == "iA0") return Complex(Real(0), a0(ctx));
  if (text == "-iA0") return Complex(Real(0), Real(-a0(ctx)));
  return parse_complex(text, ctx);
}

inline Rect parse_rect(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw UsageError("");
    } catch (const std::exception&) {
      throw UsageError("cannot parse rect component '" + cell + "'");
    }
  }
  if (v.size() != 4)
    throw UsageError("--rect needs four numbers sigma_lo,sigma_hi,t_lo,t_hi");
  if (!(v[0] < v[1]) || !(v[2] < v[3]))
    throw UsageError("--rect needs sigma_lo < sigma_hi and t_lo < t_hi");
  return Rect(v[0], v[1], v[2], v[3]);
}

inline Report cmd_constants(const CommandConfig& cfg) {
  const PrecisionContext ctx = cfg.context();
  PrecisionScope scope(ctx);
  Report r;
  r.columns = {"quantity", "value", "alt_value", "delta", "alt_route"};
  auto add = [&](const std::string& name, const Real& v,
                 const std::optional<Real>& alt, const std::string& route) {
    if (alt) {
      r.rows.push_back({name, fmt(v, cfg), fmt(*alt, cfg),
                        format_real(abs(v - *alt), 3), route});
    } else {
      r.rows.push_back({name, fmt(v, cfg), "", "", route});
    }
  };
  const Real one(1);
  const Real pi = pi_of(ctx);
  const Real phi0 = phi(Real(0), ctx);
  const Real th0 = theta(one, 0, ctx);
  const Real th1 = theta(one, 1, ctx);
  const Real th2 = theta(one, 2, ctx);
  add("A0", a0(ctx), a0_theta_route(ctx), "(pi/2)(4 theta''(1) + 6 theta'(1))");
  add("Phi(0)", phi0, phi_polya_form(Real(0), ctx), "Polya operator form");
  add("xi(1/2)", xi(Complex(Real(1) / 2), ctx).re,
      xi_family(0, Real(0), Complex(0), ctx).re, "Fourier integral Xi(0)");
  // theta(1) = pi^{1/4} / Gamma(3/4)
  const Real closed = exp(log(pi) / 4 - log_gamma(Complex(Real(3) / 4), ctx).re);
  add("theta(1)", th0, closed, "pi^(1/4)/Gamma(3/4)");
  // The functional equation at x = 1 forces theta'(1) = -theta(1)/4.
  add("theta'(1)", th1, Real(-th0 / 4), "-theta(1)/4");
  add("theta''(1)", th2, Real(phi0 / 2 - 3 * th1 / 2),
      "Phi(0)/2 - (3/2) theta'(1)");
  return r;
}

inline Report cmd_eval(const CommandConfig& cfg, const std::string& target,
                       const std::string& point, const std::string& alpha0,
                       const std::string& lambda, int m) {
  const PrecisionContext ctx = cfg.context();
  PrecisionScope scope(ctx);
  Complex v;
  if (target == "xi") {
    v = xi(parse_complex(point, ctx), ctx);
  } else if (target == "xiinv") {
    v = xi_inv_path(parse_complex(point, ctx), parse_alpha0(alpha0, ctx), ctx);
  } else if (target == "family") {
    const Complex lam = parse_complex(lambda, ctx);
    if (lam.im != 0) throw UsageError("--lambda must be real");
    v = xi_family(m, lam.re, parse_complex(point, ctx), ctx);
  } else {
    throw UsageError("eval target must be xi, xiinv or family");
  }
  Report r;
  r.columns = {"re", "im", "abs"};
  r.rows.push_back({fmt(v.re, cfg), fmt(v.im, cfg), fmt(abs(v), cfg)});
  return r;
}

inline Report cmd_zeros(const CommandConfig& cfg, const std::string& alpha0_text,
                        const Rect& rect, bool full_plane) {
  const PrecisionContext ctx = cfg.context();
  PrecisionScope scope(ctx);
  const Complex alpha0 = parse_alpha0(alpha0_text, ctx);
  SearchOptions opts;
  opts.jobs = cfg.jobs;
  ValueSetResult res = find_value_set_detailed(alpha0, rect, ctx, opts);
  std::vector<ZeroRecord> zeros = res.zeros;
  if (full_plane && alpha0.re == 0 && alpha0.im == 0)
    zeros = expand_orbits(zeros);
  std::stable_sort(zeros.begin(), zeros.end(),
                   [](const ZeroRecord& a, const ZeroRecord& b) {
                     const Real da = abs(a.location);
                     const Real db = abs(b.location);
                     if (da != db) return da < db;
                     if (a.location.re != b.location.re)
                       return a.location.re < b.location.re;
                     return a.location.im < b.location.im;
                   });
  Report r;
  r.columns = {"idx", "re", "im", "abs", "residual", "orbit"};
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    const auto& z = zeros[i];
    r.rows.push_back({std::to_string(i + 1), fmt(z.location.re, cfg),
                      fmt(z.location.im, cfg), fmt(abs(z.location), cfg),
                      format_real(z.residual, 3), orbit_name(z.orbit)});
  }
  r.notes.emplace_back("winding_count", std::to_string(res.count));
  if (!res.line_roots.empty() || !res.unmatched_line_roots.empty()) {
    r.notes.emplace_back("critical_line_roots",
                         std::to_string(res.line_roots.size()));
    r.notes.emplace_back("critical_line_unmatched",
                         std::to_string(res.unmatched_line_roots.size()));
  }
  return r;
}

inline Report cmd_scan_real(const CommandConfig& cfg, const std::string& lambda,
                            double t_max) {
  const PrecisionContext ctx = cfg.context();
  PrecisionScope scope(ctx);
  const Complex lam = parse_complex(lambda, ctx);
  if (lam.im != 0) throw UsageError("--lambda must be real");
  Report r;
  r.columns = {"lambda", "t_zero"};
  for (double t : real_axis_zero_scan(lam.re, t_max, ctx))
    r.rows.push_back({lambda, fmt_fixed(t, 10)});
  return r;
}

// Rectangle holding the tabulated zeros.
inline Rect table1_rect() { return Rect(0.501, 60, 0.001, 105); }

inline constexpr double kTable1Tolerance = 1e-5;

inline Report cmd_table1(const CommandConfig& cfg, bool check,
                         const std::string& fixture_path = "") {
  const std::vector<Table1Row> fixture = fixture_path.empty()
                                             ? table1_zeros()
                                             : load_table1_file(fixture_path);
  const PrecisionContext ctx = cfg.context();
  PrecisionScope scope(ctx);
  Report r;
  r.columns = {"k",       "rho_re",  "rho_im",      "rho_abs",         "ref_re",
               "ref_im",  "ref_abs", "d_re",        "d_im",            "d_sigma",
               "d_t",     "gamma_tilde", "ref_gamma_tilde", "residual", "match"};
  r.notes.emplace_back("fixture", fixture_path.empty()
                                      ? std::string("embedded sha256:") +
                                            table1_sha256()
                                      : fixture_path);
  const auto issues = table1_consistency_issues(fixture);
  for (const auto& is : issues) {
    r.notes.emplace_back("fixture_issue_k" + std::to_string(is.k) + "_" + is.column,
                         "printed=" + fmt_fixed(is.printed, 5) +
                             " derived=" + fmt_fixed(is.derived, 6));
  }

  SearchOptions opts;
  opts.jobs = cfg.jobs;
  ValueSetResult res = find_value_set_detailed(Complex(), table1_rect(), ctx, opts);
  std::vector<ZeroRecord> zeros = res.zeros;
  std::stable_sort(zeros.begin(), zeros.end(),
                   [](const ZeroRecord& a, const ZeroRecord& b) {
                     return abs(a.location) < abs(b.location);
                   });
  r.notes.emplace_back("zeros_in_search_rect", std::to_string(zeros.size()));
  if (zeros.size() > 20) zeros.resize(20);

  std::vector<std::string> mismatches;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const auto& z = zeros[i];
    const Table1Row* row = nullptr;
    for (const auto& fr : fixture)
      if (fr.k == k) row = &fr;
    const double re = to_double(z.location.re);
    const double im = to_double(z.location.im);
    std::vector<std::string> cells{
        std::to_string(k), fmt(z.location.re, cfg), fmt(z.location.im, cfg),
        fmt(abs(z.location), cfg)};
    bool ok = row != nullptr;
    if (row) {
      const double dre = re - row->rho_re;
      const double dim = im - row->rho_im;
      if (std::abs(dre) > kTable1Tolerance) {
        ok = false;
        mismatches.push_back("k" + std::to_string(k) + ":rho_re");
      }
      if (std::abs(dim) > kTable1Tolerance) {
        ok = false;
        mismatches.push_back("k" + std::to_string(k) + ":rho_im");
      }
      cells.insert(cells.end(),
                   {fmt_fixed(row->rho_re, 5), fmt_fixed(row->rho_im, 5),
                    fmt_fixed(row->rho_abs, 5), fmt_short(dre),
                    fmt_short(dim)});
    } else {
      mismatches.push_back("k" + std::to_string(k) + ":missing");
      cells.insert(cells.end(), {"", "", "", "", ""});
    }
    if (i == 0) {
      cells.insert(cells.end(), {"", ""});
    } else {
      cells.push_back(fmt(z.location.re - zeros[i - 1].location.re, cfg));
      cells.push_back(fmt(z.location.im - zeros[i - 1].location.im, cfg));
    }
    if (row && row->gamma_odd && row->gamma_even && row->gamma_tilde) {
      const double regen = regenerate_gamma_tilde(*row->gamma_odd,
                                                  *row->gamma_even);
      if (std::abs(regen - *row->gamma_tilde) > kTable1Tolerance + 1e-12) {
        ok = false;
        mismatches.push_back("k" + std::to_string(k) + ":gamma_tilde");
      }
      cells.push_back(fmt_fixed(regen, 5));
      cells.push_back(fmt_fixed(*row->gamma_tilde, 5));
    } else {
      cells.insert(cells.end(), {"", ""});
    }
    cells.push_back(format_real(z.residual, 3));
    cells.push_back(ok ? "true" : "false");
    r.rows.push_back(std::move(cells));
  }
  if (zeros.size() < 20) mismatches.push_back("fewer_than_20_zeros");

  const MonotonicityReport mono = monotonicity_report(zeros);
  r.notes.emplace_back("monotone_sigma", mono.sigma_increasing ? "true" : "false");
  r.notes.emplace_back("monotone_t", mono.t_increasing ? "true" : "false");

  if (check) {
    std::string list;
    for (const auto& m : mismatches) list += (list.empty() ? "" : ";") + m;
    for (const auto& is : issues) {
      list += (list.empty() ? "" : ";") + std::string("fixture_k") +
              std::to_string(is.k) + ":" + is.column;
    }
    r.notes.emplace_back("check", list.empty() ? "pass" : "fail");
    if (!list.empty()) {
      r.notes.emplace_back("offending", list);
      r.exit_code = kCheckMismatch;
    }
  }
  return r;
}

// Parses argv, runs one subcommand and writes its report.  Diagnostics go to
// err; the return value is the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"xilab: the Riemann xi function, its integral and value sets"};
  app.require_subcommand(1);
  CommandConfig cfg;
  std::string format = "csv";
  app.add_option("--digits", cfg.digits, "decimal digits of precision (>= 20)")
      ->envname("XI_PREC_DIGITS")
      ->capture_default_str();
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", cfg.out_path, "output file (default stdout)");
  app.add_option("--jobs", cfg.jobs, "parallel jobs (>= 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* constants = app.add_subcommand("constants", "A0, Phi(0), xi(1/2), theta(1) by two routes");

  auto* eval = app.add_subcommand("eval", "evaluate xi, xiinv or family at one point");
  std::string target, point_s, point_z, alpha0 = "0", lambda = "0";
  int m = 0;
  eval->add_option("target", target, "xi | xiinv | family")->required()
      ->check(CLI::IsMember({"xi", "xiinv", "family"}));
  eval->add_option("--s", point_s, "point in the s-plane, a+bi");
  eval->add_option("--z", point_z, "point in the z-plane, a+bi");
  eval->add_option("--alpha0", alpha0, "constant of integration for xiinv");
  eval->add_option("--lambda", lambda, "deformation parameter");
  eval->add_option("--m", m, "family index (>= -1)");

  auto* zeros = app.add_subcommand("zeros", "value set of xiinv in a rectangle");
  std::string zero_alpha0 = "0", rect_text;
  bool full_plane = false;
  zeros->add_option("--alpha0", zero_alpha0, "0, +iA0, -iA0 or a+bi");
  zeros->add_option("--rect", rect_text, "sigma_lo,sigma_hi,t_lo,t_hi")->required();
  zeros->add_flag("--full-plane", full_plane, "add symmetry images (alpha0 = 0)");

  auto* scan = app.add_subcommand("scan-real", "real zeros of the integral family member");
  std::string scan_lambda = "0";
  double t_max = 50;
  scan->add_option("--lambda", scan_lambda, "deformation parameter");
  scan->add_option("--tmax", t_max, "scan range (<= 500)")->capture_default_str();

  auto* table = app.add_subcommand("table1", "recompute the table of first-quadrant zeros");
  bool check = false;
  std::string fixture;
  table->add_flag("--check", check, "exit 1 unless every coordinate matches within 1e-5");
  table->add_option("--fixture", fixture, "alternative fixture CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  cfg.format = format == "json" ? Format::json : Format::csv;
  if (cfg.digits < kMinDigits) {
    err << "error: --digits must be at least " << kMinDigits << '\n';
    return kUsage;
  }

  try {
    Report report;
    if (*constants) {
      report = cmd_constants(cfg);
    } else if (*eval) {
      std::string point;
      if (target == "family") {
        if (point_z.empty()) throw UsageError("eval family needs --z");
        point = point_z;
      } else {
        if (point_s.empty()) throw UsageError("eval " + target + " needs --s");
        point = point_s;
      }
      report = cmd_eval(cfg, target, point, alpha0, lambda, m);
    } else if (*zeros) {
      report = cmd_zeros(cfg, zero_alpha0, parse_rect(rect_text), full_plane);
    } else if (*scan) {
      report = cmd_scan_real(cfg, scan_lambda, t_max);
    } else if (*table) {
      report = cmd_table1(cfg, check, fixture);
    }
    write_report(report, cfg, out);
    return report.exit_code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  }
}

}  // namespace xilab::cli

#endif  // XILAB_CLI_HPP
