// coppit: command-line front end.
//
// Exit codes: 0 ok, 1 usage error, 2 data or validation error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coppit/coppit.hpp"

namespace fs = std::filesystem;
using coppit::io::json;

namespace {

struct Common {
  std::string in;
  std::string out;
  std::uint64_t seed = coppit::kDefaultSeed;
  int bins = coppit::kDefaultBins;
  int grid = coppit::kDefaultGrid;
  std::string kendall = "auto";
  std::size_t kendall_n = coppit::kDefaultKendallSamples;
  std::string cone = "sw";
  std::string format = "csv";
  unsigned threads = 1;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

coppit::io::Format fmt_of(const Common& c) { return coppit::io::format_from_string(c.format); }

std::string ext(const Common& c) { return c.format == "json" ? ".json" : ".csv"; }

json base_manifest(const std::string& command, const Common& c) {
  return {{"tool", "coppit"},
          {"version", coppit::kVersion},
          {"command", command},
          {"seed", c.seed},
          {"flags",
           {{"in", c.in},
            {"bins", c.bins},
            {"grid", c.grid},
            {"kendall", c.kendall},
            {"kendall_n", c.kendall_n},
            {"cone", c.cone},
            {"format", c.format},
            {"threads", c.threads}}}};
}

void write_hist_pair(const coppit::HistogramResult& h, const fs::path& dir, const std::string& stem,
                     const Common& c, const std::string& title) {
  coppit::io::write_histogram(h, dir / (stem + ext(c)), fmt_of(c));
  coppit::io::render_histogram_svg(h, dir / (stem + ".svg"), {title, "", "density"});
}

void write_curve_pair(const coppit::ClicalCurve& k, const fs::path& dir, const std::string& stem, const Common& c,
                      const std::string& title) {
  coppit::io::write_curve(k, dir / (stem + ext(c)), fmt_of(c));
  coppit::io::render_curve_svg(k, dir / (stem + ".svg"), {title, "mean Kendall function", "empirical law of H(y)"});
}

fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw coppit::InvalidInput("cannot create output directory " + out + ": " + ec.message());
  return dir;
}

// Per-case records for an archive: CopPIT under the chosen cone and, for
// ensemble forecasts, the multivariate rank.
struct ArchiveRun {
  std::vector<coppit::CopPitRecord> records;
  std::vector<std::vector<double>> kgrid;
};

ArchiveRun run_archive(const coppit::io::CaseArchive& ar, const Common& c, bool need_grid) {
  using namespace coppit;
  const auto strategy = kendall_strategy_from_string(c.kendall);
  const OrthantCone cone =
      c.cone == "sw" ? OrthantCone::lower(ar.dim) : OrthantCone::parse(c.cone);
  if (cone.dim() != ar.dim) throw DimensionMismatch(ar.dim, cone.dim());
  ArchiveRun run;
  run.records.resize(ar.size());
  if (need_grid) run.kgrid.resize(ar.size());
  const ClicalAccumulator shape(c.grid);
  parallel_for(ar.size(), c.threads, [&](std::size_t j) {
    const auto& cs = ar.cases[j];
    Rng krng = Rng::substream(c.seed, {sim::kKendall, j});
    const KendallFn kfn = build_kendall(cs.forecast, strategy, krng, c.kendall_n, cone);
    const double v = Rng::substream(c.seed, {sim::kRandomize, j}).uniform01();
    auto rec = cone.is_lower() ? coppit::coppit(cs.forecast, kfn, cs.y, v)
                               : coppit_directional(cs.forecast, cone, kfn, cs.y, v);
    if (const auto* e = cs.forecast.ensemble()) {
      Rng rrng = Rng::substream(c.seed, {sim::kRank, j});
      if (cone.is_lower()) {
        rec.rank = multivariate_rank(e->points(), cs.y, rrng);
      } else {
        const auto refl = e->reflected(cone);
        rec.rank = multivariate_rank(refl.points(), cone.reflect(cs.y), rrng);
      }
    }
    run.records[j] = rec;
    if (need_grid) run.kgrid[j] = shape.evaluate(kfn);
  });
  return run;
}

std::vector<double> u_values(const std::vector<coppit::CopPitRecord>& recs) {
  std::vector<double> u;
  for (const auto& r : recs) u.push_back(r.u);
  return u;
}

int cmd_coppit(const Common& c) {
  const auto ar = coppit::io::read_archive(c.in);
  const auto dir = prepare_out(c.out);
  const auto run = run_archive(ar, c, false);
  coppit::io::write_records(run.records, dir / ("records" + ext(c)), fmt_of(c));
  write_hist_pair(coppit::histogram(u_values(run.records), c.bins), dir, "hist", c, "CopPIT");
  coppit::io::write_manifest(dir, base_manifest("coppit", c), utc_timestamp());
  return 0;
}

int cmd_rank_hist(const Common& c) {
  const auto ar = coppit::io::read_archive(c.in);
  std::size_t m = 0;
  for (const auto& cs : ar.cases) {
    const auto* e = cs.forecast.ensemble();
    if (!e) throw coppit::InvalidInput("rank-hist needs ensemble forecasts");
    if (m == 0) m = e->size();
    if (e->size() != m) throw coppit::InvalidInput("rank-hist needs a common ensemble size");
  }
  const auto dir = prepare_out(c.out);
  const auto run = run_archive(ar, c, false);
  std::vector<int> ranks;
  for (const auto& r : run.records) ranks.push_back(*r.rank);
  coppit::io::write_records(run.records, dir / ("records" + ext(c)), fmt_of(c));
  write_hist_pair(coppit::rank_histogram(ranks, static_cast<int>(m)), dir, "rank_hist", c, "multivariate rank");
  coppit::io::write_manifest(dir, base_manifest("rank-hist", c), utc_timestamp());
  return 0;
}

int cmd_pit(const Common& c) {
  const auto ar = coppit::io::read_archive(c.in);
  const auto dir = prepare_out(c.out);
  std::vector<std::vector<double>> pits(ar.dim, std::vector<double>(ar.size()));
  for (std::size_t j = 0; j < ar.size(); ++j) {
    const double v = coppit::Rng::substream(c.seed, {coppit::sim::kRandomize, j}).uniform01();
    for (std::size_t i = 0; i < ar.dim; ++i) pits[i][j] = coppit::marginal_pit(ar.cases[j].forecast, i, ar.cases[j].y[i], v);
  }
  {
    const auto path = dir / "pit.csv";
    auto out = coppit::io::open_out(path);
    for (std::size_t i = 0; i < ar.dim; ++i) out << (i ? "," : "") << "pit_" << (i + 1);
    out << '\n';
    for (std::size_t j = 0; j < ar.size(); ++j) {
      for (std::size_t i = 0; i < ar.dim; ++i) out << (i ? "," : "") << coppit::io::fmt17(pits[i][j]);
      out << '\n';
    }
    coppit::io::finish(out, path);
  }
  for (std::size_t i = 0; i < ar.dim; ++i)
    write_hist_pair(coppit::histogram(pits[i], c.bins), dir, "pit_hist_" + std::to_string(i + 1), c,
                    "PIT margin " + std::to_string(i + 1));
  coppit::io::write_manifest(dir, base_manifest("pit", c), utc_timestamp());
  return 0;
}

int cmd_clical(const Common& c) {
  const auto ar = coppit::io::read_archive(c.in);
  const auto dir = prepare_out(c.out);
  const auto run = run_archive(ar, c, true);
  coppit::ClicalAccumulator acc(c.grid);
  for (std::size_t j = 0; j < ar.size(); ++j) acc.add(run.records[j].h_at_y, run.kgrid[j]);
  const auto curve = acc.finish();
  write_curve_pair(curve, dir, "clical", c, "climatological copula calibration");
  auto man = base_manifest("clical", c);
  man["max_abs_gap"] = curve.max_abs_gap;
  coppit::io::write_manifest(dir, man, utc_timestamp());
  return 0;
}

void write_pit_hists(const fs::path& dir, const Common& c, const std::vector<double>& p1,
                     const std::vector<double>& p2) {
  write_hist_pair(coppit::histogram(p1, c.bins), dir, "pit_hist_1", c, "PIT margin 1");
  write_hist_pair(coppit::histogram(p2, c.bins), dir, "pit_hist_2", c, "PIT margin 2");
}

int cmd_sim_bivariate(const Common& c, std::size_t J, bool directional, const std::vector<std::string>& labels) {
  coppit::sim::BivariateScenario sc;
  sc.J = J;
  sc.seed = c.seed;
  sc.directional = directional;
  sc.kendall_n = c.kendall_n;
  sc.grid = c.grid;
  sc.threads = c.threads;
  if (!labels.empty()) sc.forecasters = labels;
  const auto res = coppit::sim::run_bivariate(sc);
  const auto root = prepare_out(c.out);
  const auto cones = coppit::sim::quadrants();
  for (const auto& b : res.batches) {
    const auto dir = prepare_out((root / b.label).string());
    std::vector<coppit::CopPitRecord> recs;
    for (const auto& cs : b.cases) recs.push_back(cs.coppit);
    coppit::io::write_records(recs, dir / ("records" + ext(c)), fmt_of(c));
    write_hist_pair(coppit::histogram(b.coppit_values(), c.bins), dir, "hist", c, "CopPIT " + b.label);
    write_pit_hists(dir, c, b.pit_values(1), b.pit_values(2));
    write_curve_pair(b.clical, dir, "clical", c, "clical " + b.label);
    if (directional) {
      for (std::size_t q = 0; q < cones.size(); ++q) {
        const std::string tag = cones[q].to_string();
        write_hist_pair(coppit::histogram(b.directional_values(q), c.bins), dir, "hist_" + tag, c,
                        "CopPIT " + b.label + " " + tag);
        write_curve_pair(b.clical_directional[q], dir, "clical_" + tag, c, "clical " + b.label + " " + tag);
      }
    }
  }
  auto man = base_manifest("simulate bivariate", c);
  man["flags"]["j"] = J;
  man["flags"]["directional"] = directional;
  man["forecasters"] = sc.forecasters;
  coppit::io::write_manifest(root, man, utc_timestamp());
  return 0;
}

int cmd_sim_highdim(const Common& c, std::size_t J, std::size_t m, std::size_t d,
                    const std::vector<std::string>& variants) {
  coppit::sim::HighDimScenario sc;
  sc.J = J;
  sc.m = m;
  sc.d = d;
  sc.seed = c.seed;
  sc.kendall_n = c.kendall_n;
  sc.grid = c.grid;
  sc.threads = c.threads;
  if (!variants.empty()) {
    sc.variants.clear();
    for (const auto& v : variants) sc.variants.push_back(coppit::sim::highdim_variant_from_string(v));
  }
  const auto res = coppit::sim::run_highdim(sc);
  const auto root = prepare_out(c.out);
  json vnames = json::array();
  for (const auto& b : res.batches) {
    const std::string name(coppit::sim::to_string(b.variant));
    vnames.push_back(name);
    const auto dir = prepare_out((root / name).string());
    std::vector<coppit::CopPitRecord> recs;
    for (const auto& cs : b.cases) recs.push_back(cs.coppit);
    coppit::io::write_records(recs, dir / ("records" + ext(c)), fmt_of(c));
    write_hist_pair(coppit::histogram(b.coppit_values(), c.bins), dir, "hist", c, "CopPIT " + name);
    write_hist_pair(coppit::rank_histogram(b.ranks(), static_cast<int>(m)), dir, "rank_hist", c,
                    "multivariate rank " + name);
    write_curve_pair(b.clical, dir, "clical", c, "clical " + name);
  }
  auto man = base_manifest("simulate highdim", c);
  man["flags"]["j"] = J;
  man["flags"]["m"] = m;
  man["flags"]["d"] = d;
  man["variants"] = vnames;
  coppit::io::write_manifest(root, man, utc_timestamp());
  return 0;
}

int cmd_sim_demo(const Common& c, std::size_t J, std::size_t m, const std::vector<std::string>& variants) {
  coppit::sim::DemoScenario sc;
  sc.J = J;
  sc.m = m;
  sc.seed = c.seed;
  sc.kendall_n = c.kendall_n;
  sc.grid = c.grid;
  sc.threads = c.threads;
  if (!variants.empty()) {
    sc.variants.clear();
    for (const auto& v : variants) sc.variants.push_back(coppit::sim::demo_variant_from_string(v));
  }
  const auto res = coppit::sim::run_demo_emos(sc);
  const auto root = prepare_out(c.out);
  json vnames = json::array();
  for (const auto& b : res.batches) {
    const std::string name(coppit::sim::to_string(b.variant));
    vnames.push_back(name);
    const auto dir = prepare_out((root / name).string());
    std::vector<coppit::CopPitRecord> recs;
    std::vector<double> p1, p2;
    for (const auto& cs : b.cases) {
      recs.push_back(cs.coppit);
      p1.push_back(cs.pit1);
      p2.push_back(cs.pit2);
    }
    coppit::io::write_records(recs, dir / ("records" + ext(c)), fmt_of(c));
    write_hist_pair(coppit::histogram(b.coppit_values(), c.bins), dir, "hist", c, "CopPIT " + name);
    write_hist_pair(coppit::rank_histogram(b.ranks(), static_cast<int>(m)), dir, "rank_hist", c,
                    "multivariate rank " + name);
    write_pit_hists(dir, c, p1, p2);
    write_curve_pair(b.clical, dir, "clical", c, "clical " + name);
  }
  auto man = base_manifest("simulate demo-emos", c);
  man["flags"]["j"] = J;
  man["flags"]["m"] = m;
  man["variants"] = vnames;
  coppit::io::write_manifest(root, man, utc_timestamp());
  return 0;
}

// Render a histogram or curve result file (CSV or JSON) to SVG.
int cmd_render(const std::string& in, const std::string& out, const std::string& title) {
  const fs::path p(in);
  const auto fmt = p.extension() == ".json" ? coppit::io::Format::Json : coppit::io::Format::Csv;
  bool is_curve = false;
  if (fmt == coppit::io::Format::Csv) {
    std::ifstream f(p);
    if (!f) throw coppit::InvalidInput("cannot open " + in);
    std::string header;
    std::getline(f, header);
    if (header.rfind("w,lhs,rhs", 0) == 0) is_curve = true;
    else if (header.rfind("bin_lo,bin_hi,count", 0) != 0)
      throw coppit::ParseError(in, 1, "not a histogram or curve file");
  } else {
    std::ifstream f(p);
    if (!f) throw coppit::InvalidInput("cannot open " + in);
    is_curve = json::parse(f).contains("lhs");
  }
  if (is_curve)
    coppit::io::render_curve_svg(coppit::io::read_curve(p, fmt), out, {title, "mean Kendall function", "empirical law of H(y)"});
  else
    coppit::io::render_histogram_svg(coppit::io::read_histogram(p, fmt), out, {title, "", "density"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibration diagnostics for multivariate probabilistic forecasts"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&](CLI::App* sub, bool needs_in) {
    auto* in = sub->add_option("--in", c.in, "case archive (.jsonl or .csv ensemble shorthand)");
    if (needs_in) in->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "output directory")->required();
    sub->add_option("--seed", c.seed, "master seed")->envname("COPPIT_SEED");
    sub->add_option("--bins", c.bins, "histogram bins")->check(CLI::Range(2, 100000));
    sub->add_option("--grid", c.grid, "clical grid size")->check(CLI::Range(2, 100000));
    sub->add_option("--kendall", c.kendall, "Kendall function strategy")
        ->check(CLI::IsMember({"auto", "analytic", "mc", "pseudo"}));
    sub->add_option("--kendall-n", c.kendall_n, "Monte Carlo size for Kendall functions")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    sub->add_option("--format", c.format, "result format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  };

  const CLI::Validator cone_check(
      [](std::string& s) -> std::string {
        try {
          coppit::OrthantCone::parse(s);
        } catch (const coppit::Error& e) {
          return e.what();
        }
        return {};
      },
      "CONE");

  auto* s_coppit = app.add_subcommand("coppit", "CopPIT records and histogram for an archive");
  add_common(s_coppit, true);
  s_coppit->add_option("--cone,--cone-signs", c.cone, "orthant cone: sw, se, ne, nw or a sign string such as +-+")
      ->check(cone_check);
  auto* s_rank = app.add_subcommand("rank-hist", "multivariate rank histogram for an ensemble archive");
  add_common(s_rank, true);
  auto* s_pit = app.add_subcommand("pit", "marginal PIT histograms");
  add_common(s_pit, true);
  auto* s_clical = app.add_subcommand("clical", "climatological copula calibration curve");
  add_common(s_clical, true);
  s_clical->add_option("--cone,--cone-signs", c.cone, "orthant cone")->check(cone_check);

  auto* s_sim = app.add_subcommand("simulate", "simulation studies");
  s_sim->require_subcommand(1);
  std::size_t J = 4000, m = 8, d = 50;
  bool no_directional = false;
  std::vector<std::string> labels, variants;
  auto* s_biv = s_sim->add_subcommand("bivariate", "eight-forecaster bivariate study");
  add_common(s_biv, false);
  s_biv->add_option("--j", J, "cases")->check(CLI::PositiveNumber);
  s_biv->add_option("--forecasters", labels, "subset of TTT,TTF,...,FFF")->delimiter(',');
  s_biv->add_flag("--no-directional", no_directional, "skip quadrant CopPITs");
  auto* s_hd = s_sim->add_subcommand("highdim", "d = 50 Frank/Joe study");
  add_common(s_hd, false);
  s_hd->add_option("--j", J, "cases")->check(CLI::PositiveNumber);
  s_hd->add_option("--m", m, "ensemble size for ranks")->check(CLI::PositiveNumber);
  s_hd->add_option("--d", d, "dimension")->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
  s_hd->add_option("--variant", variants, "true-frank, shrunk-frank, joe-swap")->delimiter(',');
  auto* s_demo = s_sim->add_subcommand("demo-emos", "synthetic Gaussian post-processing demo");
  add_common(s_demo, false);
  s_demo->add_option("--j", J, "cases")->check(CLI::PositiveNumber);
  s_demo->add_option("--m", m, "raw ensemble size")->check(CLI::PositiveNumber);
  s_demo->add_option("--variant", variants, "emos, independent-emos, raw-ensemble")->delimiter(',');

  std::string r_in, r_out, r_title;
  auto* s_render = app.add_subcommand("render", "render a histogram or curve file to SVG");
  s_render->add_option("--in", r_in, "histogram or curve file")->required()->check(CLI::ExistingFile);
  s_render->add_option("--out", r_out, "SVG path")->required();
  s_render->add_option("--title", r_title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*s_coppit) return cmd_coppit(c);
    if (*s_rank) return cmd_rank_hist(c);
    if (*s_pit) return cmd_pit(c);
    if (*s_clical) return cmd_clical(c);
    if (*s_biv) return cmd_sim_bivariate(c, J, !no_directional, labels);
    if (*s_hd) return cmd_sim_highdim(c, J, m, d, variants);
    if (*s_demo) return cmd_sim_demo(c, J, m, variants);
    if (*s_render) return cmd_render(r_in, r_out, r_title);
  } catch (const coppit::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const coppit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
