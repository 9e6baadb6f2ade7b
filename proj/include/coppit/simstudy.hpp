#pragma once

// Simulation scenarios: the bivariate eight-forecaster study, the d = 50
// Frank/Joe discretization study, and a synthetic bivariate Gaussian
// post-processing demo.
//
// Randomness: every draw comes from Rng::substream(seed, {purpose, ...ids, j})
// so a case's draws do not depend on which other forecasters, variants or
// cases are run, nor on thread scheduling.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coppit/calibration.hpp"
#include "coppit/copula.hpp"
#include "coppit/error.hpp"
#include "coppit/forecast.hpp"
#include "coppit/kendall.hpp"
#include "coppit/parallel.hpp"
#include "coppit/rng.hpp"
#include "coppit/samplers.hpp"

namespace coppit::sim {

enum Purpose : std::uint64_t {
  kLatent = 1,
  kOutcome = 2,
  kRandomize = 3,
  kKendall = 4,
  kRank = 5,
  kEnsemble = 6,
};

// Cases are processed in chunks so per-case Kendall grids never pile up.
inline constexpr std::size_t kChunk = 256;

// ---------------------------------------------------------------------------
// Bivariate study

inline constexpr std::array<std::string_view, 8> kBivariateLabels = {"TTT", "TTF", "TFT", "TFF",
                                                                     "FTT", "FTF", "FFT", "FFF"};

// Quadrant cones in the order sw, se, ne, nw.
inline std::array<OrthantCone, 4> quadrants() {
  return {OrthantCone::parse("sw"), OrthantCone::parse("se"), OrthantCone::parse("ne"),
          OrthantCone::parse("nw")};
}

struct Forecaster {
  std::string label;
  bool mean_ok = true;
  bool variance_ok = true;
  bool copula_ok = true;

  static Forecaster parse(std::string_view label) {
    if (label.size() != 3) throw InvalidParameter("forecaster label must be three of T/F");
    auto flag = [&](char c) {
      if (c == 'T') return true;
      if (c == 'F') return false;
      throw InvalidParameter("forecaster label must be three of T/F, got '" + std::string(label) + "'");
    };
    return {std::string(label), flag(label[0]), flag(label[1]), flag(label[2])};
  }

  std::size_t index() const {
    for (std::size_t i = 0; i < kBivariateLabels.size(); ++i)
      if (kBivariateLabels[i] == label) return i;
    return 0;
  }
};

struct GumbelNormalParams {
  double mu1 = 0.0;
  double var2 = 1.0;
  double tau = 0.5;

  bool operator==(const GumbelNormalParams&) const = default;

  Forecast forecast() const {
    return CopulaMarginal(ArchimedeanCopula::from_tau(Family::Gumbel, tau, 2),
                          {NormalMargin(mu1, 1.0), NormalMargin(0.0, std::sqrt(var2))});
  }
};

inline GumbelNormalParams truth_params(double b1, double b2) { return {2.0 - b1, 1.0 / b2, 0.5 * (b1 + b2)}; }

inline GumbelNormalParams forecaster_params(const Forecaster& f, double b1, double b2) {
  const GumbelNormalParams t = truth_params(b1, b2);
  return {f.mean_ok ? t.mu1 : 0.8 * t.mu1, f.variance_ok ? t.var2 : 0.8 / b2, f.copula_ok ? t.tau : 0.6 * t.tau};
}

struct BivariateScenario {
  std::size_t J = 4000;
  std::vector<std::string> forecasters{kBivariateLabels.begin(), kBivariateLabels.end()};
  std::uint64_t seed = kDefaultSeed;
  bool directional = true;
  std::size_t kendall_n = kDefaultKendallSamples;
  int grid = kDefaultGrid;
  unsigned threads = 1;
};

struct BivariateCase {
  double b1 = 0.0;
  double b2 = 0.0;
  GumbelNormalParams announced;
  Point y;
  CopPitRecord coppit;
  double pit1 = 0.0;
  double pit2 = 0.0;
  std::array<CopPitRecord, 4> directional{};  // sw, se, ne, nw; empty unless enabled
};

struct ForecasterBatch {
  std::string label;
  std::vector<BivariateCase> cases;
  ClicalCurve clical;
  std::array<ClicalCurve, 4> clical_directional{};

  std::vector<double> coppit_values() const {
    std::vector<double> u;
    for (const auto& c : cases) u.push_back(c.coppit.u);
    return u;
  }
  std::vector<double> pit_values(int margin) const {
    std::vector<double> u;
    for (const auto& c : cases) u.push_back(margin == 1 ? c.pit1 : c.pit2);
    return u;
  }
  std::vector<double> directional_values(std::size_t cone) const {
    std::vector<double> u;
    for (const auto& c : cases) u.push_back(c.directional[cone].u);
    return u;
  }
};

struct BivariateResult {
  std::vector<ForecasterBatch> batches;

  const ForecasterBatch& at(std::string_view label) const {
    for (const auto& b : batches)
      if (b.label == label) return b;
    throw InvalidParameter("no forecaster '" + std::string(label) + "' in result");
  }
};

struct LatentDraw {
  double b1;
  double b2;
};

inline LatentDraw draw_latent(std::uint64_t seed, std::size_t j) {
  Rng rng = Rng::substream(seed, {kLatent, j});
  const double b1 = beta(rng, 2.0, 5.0);
  const double b2 = beta(rng, 5.0, 2.0);
  return {b1, b2};
}

inline BivariateResult run_bivariate(const BivariateScenario& sc) {
  if (sc.J == 0) throw InvalidParameter("J must be >= 1");
  std::vector<Forecaster> fs;
  for (const auto& l : sc.forecasters) fs.push_back(Forecaster::parse(l));
  const auto cones = quadrants();

  BivariateResult result;
  for (const auto& f : fs) {
    ForecasterBatch b;
    b.label = f.label;
    b.cases.resize(sc.J);
    result.batches.push_back(std::move(b));
  }
  std::vector<ClicalAccumulator> acc(fs.size(), ClicalAccumulator(sc.grid));
  std::vector<std::array<ClicalAccumulator, 4>> acc_dir(
      fs.size(), {ClicalAccumulator(sc.grid), ClicalAccumulator(sc.grid), ClicalAccumulator(sc.grid),
                  ClicalAccumulator(sc.grid)});

  struct Grids {
    std::vector<double> k;
    std::array<std::vector<double>, 4> kdir;
  };

  for (std::size_t start = 0; start < sc.J; start += kChunk) {
    const std::size_t stop = std::min(sc.J, start + kChunk);
    std::vector<std::vector<Grids>> grids(stop - start, std::vector<Grids>(fs.size()));
    parallel_for(stop - start, sc.threads, [&](std::size_t off) {
      const std::size_t j = start + off;
      const LatentDraw lat = draw_latent(sc.seed, j);
      const Forecast truth = truth_params(lat.b1, lat.b2).forecast();
      Rng out_rng = Rng::substream(sc.seed, {kOutcome, j});
      Point y(2);
      truth.sample_into(out_rng, y);
      const ClicalAccumulator& shape = acc.front();

      // Kendall functions depend only on the copula; cache by copula flag and cone.
      std::map<std::pair<bool, std::size_t>, std::vector<double>> kgrid_cache;
      std::map<std::pair<bool, std::size_t>, KendallFn> kfn_cache;

      for (std::size_t fi = 0; fi < fs.size(); ++fi) {
        const Forecaster& f = fs[fi];
        const GumbelNormalParams p = forecaster_params(f, lat.b1, lat.b2);
        const Forecast fc = p.forecast();
        const double v = Rng::substream(sc.seed, {kRandomize, f.index(), j}).uniform01();
        BivariateCase& c = result.batches[fi].cases[j];
        c.b1 = lat.b1;
        c.b2 = lat.b2;
        c.announced = p;
        c.y = y;
        c.pit1 = marginal_pit(fc, 0, y[0], v);
        c.pit2 = marginal_pit(fc, 1, y[1], v);

        auto kendall_for = [&](std::size_t cone) -> const KendallFn& {
          const auto key = std::make_pair(f.copula_ok, cone);
          auto it = kfn_cache.find(key);
          if (it == kfn_cache.end()) {
            if (cone == 0) {
              it = kfn_cache.emplace(key, build_analytic(fc)).first;
            } else {
              Rng krng = Rng::substream(sc.seed, {kKendall, f.copula_ok ? 1u : 0u, cone, j});
              it = kfn_cache.emplace(key, build_monte_carlo(fc, krng, sc.kendall_n, cones[cone])).first;
            }
            kgrid_cache.emplace(key, shape.evaluate(it->second));
          }
          return it->second;
        };

        c.coppit = coppit(fc, kendall_for(0), y, v);
        grids[off][fi].k = kgrid_cache.at({f.copula_ok, 0});
        if (sc.directional) {
          for (std::size_t q = 0; q < cones.size(); ++q) {
            c.directional[q] = coppit_directional(fc, cones[q], kendall_for(q), y, v);
            grids[off][fi].kdir[q] = kgrid_cache.at({f.copula_ok, q});
          }
        }
      }
    });
    for (std::size_t off = 0; off < stop - start; ++off) {
      const std::size_t j = start + off;
      for (std::size_t fi = 0; fi < fs.size(); ++fi) {
        const auto& c = result.batches[fi].cases[j];
        acc[fi].add(c.coppit.h_at_y, grids[off][fi].k);
        if (sc.directional)
          for (std::size_t q = 0; q < 4; ++q) acc_dir[fi][q].add(c.directional[q].h_at_y, grids[off][fi].kdir[q]);
      }
    }
  }
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    result.batches[fi].clical = acc[fi].finish();
    if (sc.directional)
      for (std::size_t q = 0; q < 4; ++q) result.batches[fi].clical_directional[q] = acc_dir[fi][q].finish();
  }
  return result;
}

// ---------------------------------------------------------------------------
// High-dimensional study

enum class HighDimVariant { TrueFrank, ShrunkFrank, JoeSwap };

inline std::string_view to_string(HighDimVariant v) {
  switch (v) {
    case HighDimVariant::TrueFrank: return "true-frank";
    case HighDimVariant::ShrunkFrank: return "shrunk-frank";
    case HighDimVariant::JoeSwap: return "joe-swap";
  }
  return "?";
}

inline HighDimVariant highdim_variant_from_string(std::string_view s) {
  if (s == "true-frank") return HighDimVariant::TrueFrank;
  if (s == "shrunk-frank") return HighDimVariant::ShrunkFrank;
  if (s == "joe-swap") return HighDimVariant::JoeSwap;
  throw InvalidParameter("variant must be true-frank, shrunk-frank or joe-swap");
}

struct HighDimScenario {
  std::size_t d = 50;
  std::size_t J = 4000;
  std::size_t m = 8;
  std::vector<HighDimVariant> variants{HighDimVariant::TrueFrank, HighDimVariant::ShrunkFrank,
                                       HighDimVariant::JoeSwap};
  std::uint64_t seed = kDefaultSeed;
  std::size_t kendall_n = kDefaultKendallSamples;
  int grid = kDefaultGrid;
  unsigned threads = 1;
};

struct HighDimCase {
  double b1 = 0.0;
  double b2 = 0.0;
  double tau_true = 0.0;
  double tau_forecast = 0.0;
  CopPitRecord coppit;  // rank holds the m-member multivariate rank
};

struct HighDimBatch {
  HighDimVariant variant;
  std::vector<HighDimCase> cases;
  ClicalCurve clical;

  std::vector<double> coppit_values() const {
    std::vector<double> u;
    for (const auto& c : cases) u.push_back(c.coppit.u);
    return u;
  }
  std::vector<int> ranks() const {
    std::vector<int> r;
    for (const auto& c : cases) r.push_back(*c.coppit.rank);
    return r;
  }
};

struct HighDimResult {
  std::size_t m = 8;
  std::vector<HighDimBatch> batches;

  const HighDimBatch& at(HighDimVariant v) const {
    for (const auto& b : batches)
      if (b.variant == v) return b;
    throw InvalidParameter("variant not in result");
  }
};

inline ArchimedeanCopula highdim_forecast_copula(HighDimVariant v, double tau, std::size_t d) {
  switch (v) {
    case HighDimVariant::TrueFrank: return ArchimedeanCopula::from_tau(Family::Frank, tau, d);
    case HighDimVariant::ShrunkFrank: return ArchimedeanCopula::from_tau(Family::Frank, 0.8 * tau, d);
    case HighDimVariant::JoeSwap: return ArchimedeanCopula::from_tau(Family::Joe, tau, d);
  }
  throw InvalidParameter("unknown variant");
}

inline HighDimResult run_highdim(const HighDimScenario& sc) {
  if (sc.J == 0 || sc.m == 0 || sc.d < 2) throw InvalidParameter("highdim needs J, m >= 1 and d >= 2");
  HighDimResult result;
  result.m = sc.m;
  for (auto v : sc.variants) result.batches.push_back({v, std::vector<HighDimCase>(sc.J), {}});
  std::vector<ClicalAccumulator> acc(sc.variants.size(), ClicalAccumulator(sc.grid));
  const std::vector<NormalMargin> margins(sc.d, NormalMargin(0.0, 1.0));

  for (std::size_t start = 0; start < sc.J; start += kChunk) {
    const std::size_t stop = std::min(sc.J, start + kChunk);
    std::vector<std::vector<std::vector<double>>> grids(stop - start,
                                                         std::vector<std::vector<double>>(sc.variants.size()));
    parallel_for(stop - start, sc.threads, [&](std::size_t off) {
      const std::size_t j = start + off;
      const LatentDraw lat = draw_latent(sc.seed, j);
      const double tau = 0.5 * (lat.b1 + lat.b2);
      const ArchimedeanCopula truth_cop = ArchimedeanCopula::from_tau(Family::Frank, tau, sc.d);
      if (!(truth_cop.theta() > 0.0)) throw NumericError("frank frailty needs theta > 0");
      const Forecast truth = CopulaMarginal(truth_cop, margins);
      Rng out_rng = Rng::substream(sc.seed, {kOutcome, j});
      Point y(sc.d);
      truth.sample_into(out_rng, y);

      for (std::size_t vi = 0; vi < sc.variants.size(); ++vi) {
        const auto variant = sc.variants[vi];
        const auto vid = static_cast<std::uint64_t>(variant);
        const Forecast fc = CopulaMarginal(highdim_forecast_copula(variant, tau, sc.d), margins);
        Rng krng = Rng::substream(sc.seed, {kKendall, vid, j});
        const KendallFn kfn = build_monte_carlo(fc, krng, sc.kendall_n);
        const double v = Rng::substream(sc.seed, {kRandomize, vid, j}).uniform01();
        HighDimCase& c = result.batches[vi].cases[j];
        c.b1 = lat.b1;
        c.b2 = lat.b2;
        c.tau_true = tau;
        c.tau_forecast = fc.copula_marginal()->copula.tau();
        c.coppit = coppit(fc, kfn, y, v);
        Rng erng = Rng::substream(sc.seed, {kEnsemble, vid, j});
        const std::vector<Point> members = fc.sample(erng, sc.m);
        Rng rrng = Rng::substream(sc.seed, {kRank, vid, j});
        c.coppit.rank = multivariate_rank(members, y, rrng);
        grids[off][vi] = acc[vi].evaluate(kfn);
      }
    });
    for (std::size_t off = 0; off < stop - start; ++off)
      for (std::size_t vi = 0; vi < sc.variants.size(); ++vi)
        acc[vi].add(result.batches[vi].cases[start + off].coppit.h_at_y, grids[off][vi]);
  }
  for (std::size_t vi = 0; vi < sc.variants.size(); ++vi) result.batches[vi].clical = acc[vi].finish();
  return result;
}

// ---------------------------------------------------------------------------
// Synthetic bivariate Gaussian post-processing demo
//
// Truth per case: mean_i ~ N(0, 3^2), sd_i ~ U(1, 3), correlation ~ U(0.2, 0.9).
// "emos" announces the truth, "independent-emos" the same law with zero
// correlation, "raw-ensemble" m members drawn from an underdispersed law with
// the covariance scaled by 0.6^2.

enum class DemoVariant { Emos, IndependentEmos, RawEnsemble };

inline std::string_view to_string(DemoVariant v) {
  switch (v) {
    case DemoVariant::Emos: return "emos";
    case DemoVariant::IndependentEmos: return "independent-emos";
    case DemoVariant::RawEnsemble: return "raw-ensemble";
  }
  return "?";
}

inline DemoVariant demo_variant_from_string(std::string_view s) {
  if (s == "emos") return DemoVariant::Emos;
  if (s == "independent-emos") return DemoVariant::IndependentEmos;
  if (s == "raw-ensemble") return DemoVariant::RawEnsemble;
  throw InvalidParameter("variant must be emos, independent-emos or raw-ensemble");
}

struct DemoScenario {
  std::size_t J = 4000;
  std::size_t m = 8;
  std::vector<DemoVariant> variants{DemoVariant::Emos, DemoVariant::IndependentEmos, DemoVariant::RawEnsemble};
  std::uint64_t seed = kDefaultSeed;
  std::size_t kendall_n = kDefaultKendallSamples;
  int grid = kDefaultGrid;
  unsigned threads = 1;
};

struct DemoCase {
  Point y;
  double rho = 0.0;
  CopPitRecord coppit;
  double pit1 = 0.0;
  double pit2 = 0.0;
};

struct DemoBatch {
  DemoVariant variant;
  std::vector<DemoCase> cases;
  ClicalCurve clical;

  std::vector<double> coppit_values() const {
    std::vector<double> u;
    for (const auto& c : cases) u.push_back(c.coppit.u);
    return u;
  }
  std::vector<int> ranks() const {
    std::vector<int> r;
    for (const auto& c : cases) r.push_back(*c.coppit.rank);
    return r;
  }
};

struct DemoResult {
  std::size_t m = 8;
  std::vector<DemoBatch> batches;

  const DemoBatch& at(DemoVariant v) const {
    for (const auto& b : batches)
      if (b.variant == v) return b;
    throw InvalidParameter("variant not in result");
  }
};

inline DemoResult run_demo_emos(const DemoScenario& sc) {
  if (sc.J == 0 || sc.m == 0) throw InvalidParameter("demo needs J, m >= 1");
  DemoResult result;
  result.m = sc.m;
  for (auto v : sc.variants) result.batches.push_back({v, std::vector<DemoCase>(sc.J), {}});
  std::vector<ClicalAccumulator> acc(sc.variants.size(), ClicalAccumulator(sc.grid));

  for (std::size_t start = 0; start < sc.J; start += kChunk) {
    const std::size_t stop = std::min(sc.J, start + kChunk);
    std::vector<std::vector<std::vector<double>>> grids(stop - start,
                                                         std::vector<std::vector<double>>(sc.variants.size()));
    parallel_for(stop - start, sc.threads, [&](std::size_t off) {
      const std::size_t j = start + off;
      Rng lat = Rng::substream(sc.seed, {kLatent, j});
      const std::vector<double> mean{normal(lat, 0.0, 3.0), normal(lat, 0.0, 3.0)};
      const double s1 = 1.0 + 2.0 * lat.uniform01();
      const double s2 = 1.0 + 2.0 * lat.uniform01();
      const double rho = 0.2 + 0.7 * lat.uniform01();
      auto cov_of = [&](double scale, double r) {
        return std::vector<std::vector<double>>{{scale * s1 * s1, scale * r * s1 * s2},
                                                {scale * r * s1 * s2, scale * s2 * s2}};
      };
      const MvGaussian truth(mean, cov_of(1.0, rho));
      Rng out_rng = Rng::substream(sc.seed, {kOutcome, j});
      Point y(2);
      truth.sample_into(out_rng, y);

      for (std::size_t vi = 0; vi < sc.variants.size(); ++vi) {
        const auto variant = sc.variants[vi];
        const auto vid = static_cast<std::uint64_t>(variant);
        std::optional<Forecast> fc;
        switch (variant) {
          case DemoVariant::Emos: fc.emplace(truth); break;
          case DemoVariant::IndependentEmos: fc.emplace(MvGaussian(mean, cov_of(1.0, 0.0))); break;
          case DemoVariant::RawEnsemble: {
            Rng erng = Rng::substream(sc.seed, {kEnsemble, vid, j});
            const Forecast raw = MvGaussian(mean, cov_of(0.36, rho));
            fc.emplace(Ensemble(raw.sample(erng, sc.m)));
            break;
          }
        }
        Rng krng = Rng::substream(sc.seed, {kKendall, vid, j});
        const KendallFn kfn = build_kendall(*fc, KendallStrategy::Auto, krng, sc.kendall_n);
        const double v = Rng::substream(sc.seed, {kRandomize, vid, j}).uniform01();
        DemoCase& c = result.batches[vi].cases[j];
        c.y = y;
        c.rho = rho;
        c.coppit = coppit(*fc, kfn, y, v);
        c.pit1 = marginal_pit(*fc, 0, y[0], v);
        c.pit2 = marginal_pit(*fc, 1, y[1], v);
        Rng rrng = Rng::substream(sc.seed, {kRank, vid, j});
        if (const auto* e = fc->ensemble()) {
          c.coppit.rank = multivariate_rank(e->points(), y, rrng);
        } else {
          Rng erng = Rng::substream(sc.seed, {kEnsemble, vid, j});
          c.coppit.rank = multivariate_rank(fc->sample(erng, sc.m), y, rrng);
        }
        grids[off][vi] = acc[vi].evaluate(kfn);
      }
    });
    for (std::size_t off = 0; off < stop - start; ++off)
      for (std::size_t vi = 0; vi < sc.variants.size(); ++vi)
        acc[vi].add(result.batches[vi].cases[start + off].coppit.h_at_y, grids[off][vi]);
  }
  for (std::size_t vi = 0; vi < sc.variants.size(); ++vi) result.batches[vi].clical = acc[vi].finish();
  return result;
}

}  // namespace coppit::sim
