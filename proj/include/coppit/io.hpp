#pragma once

// Archive ingestion (JSON lines, CSV ensemble shorthand), result files
// (CSV / JSON) and SVG rendering.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coppit/calibration.hpp"
#include "coppit/copula.hpp"
#include "coppit/error.hpp"
#include "coppit/forecast.hpp"

namespace coppit::io {

using json = nlohmann::ordered_json;

enum class Format { Csv, Json };

inline Format format_from_string(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw InvalidParameter("format must be csv or json");
}

// %.17g round-trips every finite double.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(std::string_view s) {
  std::string t(s);
  while (!t.empty() && (t.back() == ' ' || t.back() == '\r')) t.pop_back();
  std::size_t pos = 0;
  while (pos < t.size() && t[pos] == ' ') ++pos;
  t.erase(0, pos);
  if (t.empty()) throw InvalidInput("empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw InvalidInput("not a number: '" + t + "'");
  return v;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = line.find(sep, start);
    out.emplace_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forecast descriptors

inline json to_json(const ArchimedeanCopula& c) {
  return {{"family", std::string(to_string(c.family()))}, {"theta", c.theta()}, {"dim", c.dim()}};
}

inline double number_field(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw InvalidInput(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline std::vector<double> vector_field(const json& j) {
  if (!j.is_array()) throw InvalidInput("expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw InvalidInput("expected an array of numbers");
    const double v = x.get<double>();
    if (!std::isfinite(v)) throw InvalidInput("non-finite value");
    out.push_back(v);
  }
  return out;
}

inline ArchimedeanCopula copula_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("copula must be an object");
  if (!j.contains("family") || !j.at("family").is_string()) throw InvalidInput("copula needs a 'family' string");
  const Family fam = family_from_string(j.at("family").get<std::string>());
  const auto dim = static_cast<std::size_t>(number_field(j, "dim"));
  const bool has_tau = j.contains("tau");
  const bool has_theta = j.contains("theta");
  if (fam == Family::Independence && !has_tau && !has_theta) return {fam, 1.0, dim};
  if (has_tau == has_theta) throw InvalidInput("copula needs exactly one of 'tau' and 'theta'");
  if (has_tau) return ArchimedeanCopula::from_tau(fam, number_field(j, "tau"), dim);
  return {fam, number_field(j, "theta"), dim};
}

inline json to_json(const Forecast& f) {
  if (const auto* e = f.ensemble()) return {{"type", "ensemble"}, {"points", e->points()}};
  if (const auto* g = f.mv_gaussian()) return {{"type", "mvgauss"}, {"mean", g->mean()}, {"cov", g->cov()}};
  const auto* cm = f.copula_marginal();
  json margins = json::array();
  for (const auto& m : cm->margins) margins.push_back({{"dist", "normal"}, {"mu", m.mu}, {"sigma", m.sigma}});
  return {{"type", "copula_marginal"}, {"copula", to_json(cm->copula)}, {"margins", margins}};
}

inline Forecast forecast_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw InvalidInput("forecast needs a 'type' string");
  const std::string type = j.at("type").get<std::string>();
  if (type == "ensemble") {
    if (!j.contains("points") || !j.at("points").is_array()) throw InvalidInput("ensemble needs 'points'");
    std::vector<Point> pts;
    for (const auto& p : j.at("points")) pts.push_back(vector_field(p));
    return Ensemble(std::move(pts));
  }
  if (type == "mvgauss") {
    if (!j.contains("mean") || !j.contains("cov")) throw InvalidInput("mvgauss needs 'mean' and 'cov'");
    std::vector<std::vector<double>> cov;
    if (!j.at("cov").is_array()) throw InvalidInput("'cov' must be a matrix");
    for (const auto& row : j.at("cov")) cov.push_back(vector_field(row));
    return MvGaussian(vector_field(j.at("mean")), std::move(cov));
  }
  if (type == "copula_marginal") {
    if (!j.contains("copula") || !j.contains("margins") || !j.at("margins").is_array())
      throw InvalidInput("copula_marginal needs 'copula' and 'margins'");
    std::vector<NormalMargin> margins;
    for (const auto& m : j.at("margins")) {
      if (!m.is_object()) throw InvalidInput("margin must be an object");
      if (m.value("dist", std::string("normal")) != "normal")
        throw Unsupported("only normal margins are supported");
      margins.emplace_back(number_field(m, "mu"), number_field(m, "sigma"));
    }
    return CopulaMarginal(copula_from_json(j.at("copula")), std::move(margins));
  }
  throw InvalidInput("unknown forecast type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Case archives

struct Case {
  Forecast forecast;
  Point y;
};

struct CaseArchive {
  std::size_t dim = 0;
  std::vector<Case> cases;
  json metadata = json::object();

  std::size_t size() const noexcept { return cases.size(); }
};

namespace detail {

inline void check_case(const std::string& file, std::size_t line, CaseArchive& ar, const Case& c) {
  if (c.forecast.dim() != c.y.size())
    throw ValidationError(file, line,
                          "forecast dim " + std::to_string(c.forecast.dim()) + " but outcome dim " +
                              std::to_string(c.y.size()));
  if (ar.cases.empty() && ar.dim == 0) ar.dim = c.y.size();
  if (c.y.size() != ar.dim)
    throw ValidationError(file, line,
                          "case dim " + std::to_string(c.y.size()) + " differs from archive dim " +
                              std::to_string(ar.dim));
  for (double v : c.y)
    if (!std::isfinite(v)) throw ValidationError(file, line, "outcome coordinate not finite");
}

inline CaseArchive read_jsonl(std::istream& in, const std::string& file) {
  CaseArchive ar;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(file, lineno, std::string("malformed JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("metadata") && !j.contains("forecast")) {
      ar.metadata = j.at("metadata");
      continue;
    }
    if (!j.is_object() || !j.contains("forecast") || !j.contains("y"))
      throw ParseError(file, lineno, "case needs 'forecast' and 'y'");
    std::optional<Case> c;
    try {
      c.emplace(Case{forecast_from_json(j.at("forecast")), vector_field(j.at("y"))});
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(file, lineno, e.what());
    }
    check_case(file, lineno, ar, *c);
    ar.cases.push_back(std::move(*c));
  }
  return ar;
}

// First non-blank line: "# d=<d>,m=<m>". Then one row per case:
// y_1..y_d, x1_1..x1_d, ..., xm_1..xm_d.
inline CaseArchive read_ensemble_csv(std::istream& in, const std::string& file) {
  CaseArchive ar;
  std::string line;
  std::size_t lineno = 0;
  std::size_t d = 0, m = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!have_header) {
      std::string h = line;
      if (!h.empty() && h[0] == '#') h.erase(0, 1);
      for (const auto& field : split(h)) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw ParseError(file, lineno, "header must read '# d=<d>,m=<m>'");
        std::string key = field.substr(0, eq);
        key.erase(std::remove(key.begin(), key.end(), ' '), key.end());
        double val = 0;
        try {
          val = parse_double(field.substr(eq + 1));
        } catch (const Error& e) {
          throw ParseError(file, lineno, e.what());
        }
        if (key == "d") d = static_cast<std::size_t>(val);
        else if (key == "m") m = static_cast<std::size_t>(val);
        else throw ParseError(file, lineno, "unknown header key '" + key + "'");
      }
      if (d == 0 || m == 0) throw ParseError(file, lineno, "header must declare d >= 1 and m >= 1");
      ar.dim = d;
      ar.metadata["d"] = d;
      ar.metadata["m"] = m;
      have_header = true;
      continue;
    }
    if (line[0] == '#') continue;
    const auto fields = split(line);
    if (fields.size() != d * (m + 1))
      throw ValidationError(file, lineno,
                            "expected " + std::to_string(d * (m + 1)) + " fields, got " +
                                std::to_string(fields.size()));
    std::vector<double> vals;
    try {
      for (const auto& f : fields) vals.push_back(parse_double(f));
    } catch (const Error& e) {
      throw ParseError(file, lineno, e.what());
    }
    for (double v : vals)
      if (!std::isfinite(v)) throw ValidationError(file, lineno, "non-finite value");
    Point y(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(d));
    std::vector<Point> pts;
    for (std::size_t k = 0; k < m; ++k) {
      const auto b = vals.begin() + static_cast<std::ptrdiff_t>(d * (k + 1));
      pts.emplace_back(b, b + static_cast<std::ptrdiff_t>(d));
    }
    Case c{Ensemble(std::move(pts)), std::move(y)};
    check_case(file, lineno, ar, c);
    ar.cases.push_back(std::move(c));
  }
  if (!have_header) throw ParseError(file, lineno, "missing '# d=<d>,m=<m>' header");
  return ar;
}

}  // namespace detail

inline bool is_csv_path(const std::filesystem::path& p) { return p.extension() == ".csv"; }

inline CaseArchive read_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  CaseArchive ar = is_csv_path(path) ? detail::read_ensemble_csv(in, path.string())
                                     : detail::read_jsonl(in, path.string());
  if (ar.cases.empty()) throw InvalidInput(path.string() + ": archive has no cases");
  return ar;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw InvalidInput("write failed: " + path.string());
}

// Always JSON lines; the metadata object, if any, goes on the first line.
inline void write_archive(const CaseArchive& ar, const std::filesystem::path& path) {
  auto out = open_out(path);
  if (!ar.metadata.empty()) out << json{{"metadata", ar.metadata}}.dump() << '\n';
  for (const auto& c : ar.cases) out << json{{"forecast", to_json(c.forecast)}, {"y", c.y}}.dump() << '\n';
  finish(out, path);
}

// ---------------------------------------------------------------------------
// Result files

inline void write_records(std::span<const CopPitRecord> recs, const std::filesystem::path& path,
                          Format fmt = Format::Csv) {
  auto out = open_out(path);
  if (fmt == Format::Csv) {
    out << "h,k_left,k_right,v,u,rank\n";
    for (const auto& r : recs) {
      out << fmt17(r.h_at_y) << ',' << fmt17(r.k_left) << ',' << fmt17(r.k_right) << ',' << fmt17(r.v) << ','
          << fmt17(r.u) << ',';
      if (r.rank) out << *r.rank;
      out << '\n';
    }
  } else {
    json arr = json::array();
    for (const auto& r : recs) {
      json o = {{"h", r.h_at_y}, {"k_left", r.k_left}, {"k_right", r.k_right}, {"v", r.v}, {"u", r.u}};
      o["rank"] = r.rank ? json(*r.rank) : json(nullptr);
      arr.push_back(o);
    }
    out << arr.dump(1) << '\n';
  }
  finish(out, path);
}

inline std::vector<CopPitRecord> read_records(const std::filesystem::path& path, Format fmt = Format::Csv) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::vector<CopPitRecord> recs;
  if (fmt == Format::Json) {
    const json arr = json::parse(in);
    for (const auto& o : arr) {
      CopPitRecord r{o.at("h").get<double>(), o.at("k_left").get<double>(), o.at("k_right").get<double>(),
                     o.at("v").get<double>(), o.at("u").get<double>(), std::nullopt};
      if (!o.at("rank").is_null()) r.rank = o.at("rank").get<int>();
      recs.push_back(r);
    }
    return recs;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (++lineno == 1) continue;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 6) throw ParseError(path.string(), lineno, "expected 6 fields");
    try {
      CopPitRecord r{parse_double(f[0]), parse_double(f[1]), parse_double(f[2]),
                     parse_double(f[3]), parse_double(f[4]), std::nullopt};
      if (!f[5].empty() && f[5] != "\r") r.rank = static_cast<int>(parse_double(f[5]));
      recs.push_back(r);
    } catch (const Error& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  return recs;
}

inline void write_histogram(const HistogramResult& h, const std::filesystem::path& path, Format fmt = Format::Csv) {
  auto out = open_out(path);
  if (fmt == Format::Csv) {
    out << "bin_lo,bin_hi,count\n";
    for (int i = 0; i < h.bin_count; ++i)
      out << fmt17(h.bin_lo(i)) << ',' << fmt17(h.bin_hi(i)) << ',' << h.counts[static_cast<std::size_t>(i)] << '\n';
    out << "# chi2=" << fmt17(h.chi_square_stat) << ",df=" << h.chi_square_df << ",ks=" << fmt17(h.ks_stat) << '\n';
  } else {
    json o = {{"bins", h.bin_count}, {"counts", h.counts}, {"total", h.total},
              {"chi2", h.chi_square_stat}, {"df", h.chi_square_df}, {"ks", h.ks_stat}};
    out << o.dump(1) << '\n';
  }
  finish(out, path);
}

inline HistogramResult read_histogram(const std::filesystem::path& path, Format fmt = Format::Csv) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  HistogramResult h;
  if (fmt == Format::Json) {
    const json o = json::parse(in);
    h.bin_count = o.at("bins").get<int>();
    h.counts = o.at("counts").get<std::vector<long long>>();
    h.total = o.at("total").get<long long>();
    h.chi_square_stat = o.at("chi2").get<double>();
    h.chi_square_df = o.at("df").get<int>();
    h.ks_stat = o.at("ks").get<double>();
    return h;
  }
  std::string line;
  std::size_t lineno = 0;
  bool have_stats = false;
  while (std::getline(in, line)) {
    if (++lineno == 1 || line.empty()) continue;
    try {
      if (line.rfind("# ", 0) == 0) {
        for (const auto& kv : split(line.substr(2))) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) throw InvalidInput("bad stats line");
          const std::string key = kv.substr(0, eq);
          const double v = parse_double(kv.substr(eq + 1));
          if (key == "chi2") h.chi_square_stat = v;
          else if (key == "df") h.chi_square_df = static_cast<int>(v);
          else if (key == "ks") h.ks_stat = v;
        }
        have_stats = true;
        continue;
      }
      const auto f = split(line);
      if (f.size() != 3) throw InvalidInput("expected 3 fields");
      const auto c = static_cast<long long>(parse_double(f[2]));
      h.counts.push_back(c);
      h.total += c;
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  if (!have_stats) throw ParseError(path.string(), lineno, "missing '# chi2=...' line");
  h.bin_count = static_cast<int>(h.counts.size());
  return h;
}

inline void write_curve(const ClicalCurve& c, const std::filesystem::path& path, Format fmt = Format::Csv) {
  auto out = open_out(path);
  if (fmt == Format::Csv) {
    out << "w,lhs,rhs\n";
    for (std::size_t i = 0; i < c.grid.size(); ++i)
      out << fmt17(c.grid[i]) << ',' << fmt17(c.lhs[i]) << ',' << fmt17(c.rhs[i]) << '\n';
  } else {
    json o = {{"w", c.grid}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"max_abs_gap", c.max_abs_gap}};
    out << o.dump(1) << '\n';
  }
  finish(out, path);
}

inline ClicalCurve read_curve(const std::filesystem::path& path, Format fmt = Format::Csv) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  ClicalCurve c;
  if (fmt == Format::Json) {
    const json o = json::parse(in);
    c.grid = o.at("w").get<std::vector<double>>();
    c.lhs = o.at("lhs").get<std::vector<double>>();
    c.rhs = o.at("rhs").get<std::vector<double>>();
    c.max_abs_gap = o.at("max_abs_gap").get<double>();
    return c;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (++lineno == 1 || line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 3) throw ParseError(path.string(), lineno, "expected 3 fields");
    try {
      c.grid.push_back(parse_double(f[0]));
      c.lhs.push_back(parse_double(f[1]));
      c.rhs.push_back(parse_double(f[2]));
    } catch (const Error& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
    c.max_abs_gap = std::max(c.max_abs_gap, std::abs(c.lhs.back() - c.rhs.back()));
  }
  return c;
}

// ---------------------------------------------------------------------------
// SVG

struct SvgOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
};

namespace detail {

inline constexpr double kW = 640, kH = 480;
inline constexpr double kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline void svg_head(std::ostream& out, const SvgOptions& opt) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\" width=\"640\" height=\"480\">\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!opt.title.empty())
    out << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(opt.title) << "</text>\n";
  if (!opt.x_label.empty())
    out << "<text x=\"" << num(kLeft + (kW - kLeft - kRight) / 2) << "\" y=\"" << num(kH - 12)
        << "\" text-anchor=\"middle\">" << escape(opt.x_label) << "</text>\n";
  if (!opt.y_label.empty())
    out << "<text x=\"16\" y=\"" << num(kTop + (kH - kTop - kBottom) / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << num(kTop + (kH - kTop - kBottom) / 2)
        << ")\">" << escape(opt.y_label) << "</text>\n";
  // axes as a path so that rect elements are bars only
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  out << "<path d=\"M" << num(x0) << ' ' << num(y1) << " L" << num(x0) << ' ' << num(y0) << " L" << num(x1) << ' '
      << num(y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
}

inline void tick(std::ostream& out, double x, double y, const std::string& label, bool vertical_axis) {
  if (vertical_axis)
    out << "<text x=\"" << num(x - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << label << "</text>\n";
  else
    out << "<text x=\"" << num(x) << "\" y=\"" << num(y + 16) << "\" text-anchor=\"middle\">" << label << "</text>\n";
}

}  // namespace detail

// Bars on the density scale (count / (total * width)), with the uniform
// density 1 as a dashed line.
inline void render_histogram_svg(const HistogramResult& h, const std::filesystem::path& path,
                                 const SvgOptions& opt = {}) {
  using namespace detail;
  if (h.bin_count <= 0 || h.total <= 0) throw InvalidInput("cannot render an empty histogram");
  std::vector<double> dens;
  for (long long c : h.counts) dens.push_back(static_cast<double>(c) * h.bin_count / static_cast<double>(h.total));
  const double top = std::max(1.5, std::ceil(*std::max_element(dens.begin(), dens.end()) * 4.0 + 0.5) / 4.0);
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + x * pw; };
  auto sy = [&](double y) { return kH - kBottom - y / top * ph; };

  std::ostringstream out;
  svg_head(out, opt);
  for (int i = 0; i < h.bin_count; ++i) {
    const double x = sx(h.bin_lo(i)), w = sx(h.bin_hi(i)) - x;
    const double y = sy(dens[static_cast<std::size_t>(i)]);
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\""
        << num(kH - kBottom - y) << "\" fill=\"#9db4d3\" stroke=\"#30465f\" stroke-width=\"0.5\"/>\n";
  }
  out << "<line x1=\"" << num(sx(0)) << "\" y1=\"" << num(sy(1)) << "\" x2=\"" << num(sx(1)) << "\" y2=\""
      << num(sy(1)) << "\" stroke=\"#b22222\" stroke-dasharray=\"6,4\"/>\n";
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) tick(out, sx(t), kH - kBottom, num(t), false);
  for (double t = 0.0; t <= top + 1e-9; t += 0.5) tick(out, kLeft, sy(t), num(t), true);
  out << "</g>\n</svg>\n";

  auto file = open_out(path);
  file << out.str();
  finish(file, path);
}

// lhs (empirical law of H(y)) against rhs (mean Kendall function), with the
// diagonal for reference.
inline void render_curve_svg(const ClicalCurve& c, const std::filesystem::path& path, const SvgOptions& opt = {}) {
  using namespace detail;
  if (c.grid.empty() || c.lhs.size() != c.grid.size() || c.rhs.size() != c.grid.size())
    throw InvalidInput("cannot render an empty curve");
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + x * pw; };
  auto sy = [&](double y) { return kH - kBottom - y * ph; };

  std::ostringstream out;
  svg_head(out, opt);
  out << "<line x1=\"" << num(sx(0)) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(sx(1)) << "\" y2=\""
      << num(sy(1)) << "\" stroke=\"#888888\" stroke-dasharray=\"6,4\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    if (i) out << ' ';
    out << num(sx(c.rhs[i])) << ',' << num(sy(c.lhs[i]));
  }
  out << "\"/>\n";
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    tick(out, sx(t), kH - kBottom, num(t), false);
    tick(out, kLeft, sy(t), num(t), true);
  }
  out << "</g>\n</svg>\n";

  auto file = open_out(path);
  file << out.str();
  finish(file, path);
}

// ---------------------------------------------------------------------------
// Run manifest. The timestamp sits in its own top-level key; it is the only
// field that differs between identical runs.

inline void write_manifest(const std::filesystem::path& dir, const json& run, const std::string& timestamp) {
  json m = run;
  m["timestamp"] = timestamp;
  const auto path = dir / "manifest.json";
  auto out = open_out(path);
  out << m.dump(2) << '\n';
  finish(out, path);
}

}  // namespace coppit::io
