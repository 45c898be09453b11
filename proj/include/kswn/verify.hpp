#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kswn/awareness.hpp"
#include "kswn/experiments.hpp"
#include "kswn/netgen.hpp"
#include "kswn/rng.hpp"
#include "kswn/routing.hpp"

namespace kswn {

struct CheckLine {
  std::string check;
  std::string parameter;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::optional<double> threshold;  // absent for informational rows
  std::optional<bool> pass;
};

struct CheckReport {
  std::string name;
  std::vector<CheckLine> lines;
  std::vector<std::string> notes;
  bool passed = true;
};

class InsufficientSamples : public std::invalid_argument {
 public:
  InsufficientSamples(const std::string& what, std::uint64_t required)
      : std::invalid_argument(what + " needs at least " + std::to_string(required) + " samples"),
        required_(required) {}
  std::uint64_t required() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

namespace detail {

inline double binomial_stderr(double p, double count) {
  return count > 0 ? std::sqrt(std::max(0.0, p * (1.0 - p)) / count) : 0.0;
}

inline std::string fmt(double v) { return format_fixed4(v); }

}  // namespace detail

// ---------------------------------------------------------------------------
// K-link law

struct KLinkLawOptions {
  std::uint32_t n = 1024;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  double max_deviation = 0.05;
};

inline constexpr std::uint64_t kMinKLinkSamples = 100'000;

/// Histogram of sampled K-link distances; index d counts draws of distance d.
inline std::vector<std::uint64_t> sample_distance_counts(std::uint32_t n, std::uint64_t samples, std::uint64_t seed) {
  const auto breakpoints = harmonic_cdf_intervals(n);
  std::vector<std::uint64_t> counts(n, 0);
  Engine rng(derive_seed(seed, n, 0x6b6c696eULL));
  for (std::uint64_t i = 0; i < samples; ++i) ++counts[harmonic_offset(uniform_open_closed(rng), breakpoints)];
  return counts;
}

/// Draws K-link distances and compares them with 1/(d H_{n-1}) over dyadic
/// bins [d, 2d) for d = 1, 2, 4, ...; the last bin runs to n-1. Per bin the
/// estimate is observed/expected, which is d H_{n-1} P(d) when the bin holds a
/// single distance. Passes when every |estimate - 1| stays below the bound.
inline CheckReport check_klink_law(const KLinkLawOptions& opt) {
  if (opt.n < 2) throw std::invalid_argument("klink check needs n >= 2");
  if (opt.samples < kMinKLinkSamples) throw InsufficientSamples("klink check", kMinKLinkSamples);

  const auto counts = sample_distance_counts(opt.n, opt.samples, opt.seed);

  double harmonic = 0.0;
  for (std::uint32_t k = 1; k < opt.n; ++k) harmonic += 1.0 / k;

  CheckReport rep{"klink", {}, {}, true};
  const double samples = static_cast<double>(opt.samples);
  const double lg = std::log2(static_cast<double>(opt.n));
  double worst = 0.0, c1 = INFINITY, c2 = 0.0;
  for (std::uint64_t lo = 1; lo < opt.n; lo *= 2) {
    // The bin starting at the last power of two <= n/2 absorbs the tail.
    const std::uint64_t hi = 2 * lo > opt.n / 2 ? opt.n - 1 : 2 * lo - 1;
    double mass = 0.0;
    std::uint64_t observed = 0;
    for (auto k = lo; k <= hi; ++k) {
      mass += 1.0 / (static_cast<double>(k) * harmonic);
      observed += counts[k];
    }
    const double ratio = static_cast<double>(observed) / (samples * mass);
    const double se = detail::binomial_stderr(mass, samples) / mass;
    worst = std::max(worst, std::abs(ratio - 1.0));
    // Implied constant d lg n P(d).
    const double implied = ratio * lg / harmonic;
    c1 = std::min(c1, implied);
    c2 = std::max(c2, implied);
    rep.lines.push_back({"klink", "d=" + std::to_string(lo) + ".." + std::to_string(hi), ratio, se, std::nullopt,
                         std::nullopt});
    if (hi == opt.n - 1) break;
  }
  rep.passed = worst < opt.max_deviation;
  rep.lines.push_back({"klink", "max_deviation", worst, 0.0, opt.max_deviation, rep.passed});
  rep.lines.push_back({"klink", "implied_c1", c1, 0.0, std::nullopt, std::nullopt});
  rep.lines.push_back({"klink", "implied_c2", c2, 0.0, std::nullopt, std::nullopt});
  rep.notes.push_back("n=" + std::to_string(opt.n) + " samples=" + std::to_string(opt.samples) +
                      " H_{n-1}=" + detail::fmt(harmonic));
  return rep;
}

// ---------------------------------------------------------------------------
// Awareness size

struct AwarenessSizeOptions {
  std::uint32_t n = 1u << 16;
  std::optional<int> depth;  // unset: max(1, floor(lg lg n))
  double sigma = 4.0;
  std::uint64_t origins = 2000;
  std::uint64_t seed = 1;
  double min_fraction = 0.5;
  std::uint64_t origins_per_network = 250;
  unsigned jobs = 1;
};

struct AwarenessSizeResult {
  double fraction = 0.0;  // share of origins with |A_x(depth)| >= lg n / sigma
  double stderr_ = 0.0;
  std::map<std::size_t, std::uint64_t> histogram;
  CheckReport report;
};

inline constexpr std::uint64_t kMinOrigins = 500;

/// Samples origins over fresh KSWN* instances (one per batch of origins) and
/// measures how often the awareness reaches lg n / sigma nodes.
inline AwarenessSizeResult check_awareness_size(const AwarenessSizeOptions& opt) {
  if (opt.origins < kMinOrigins) throw InsufficientSamples("awareness check", kMinOrigins);
  if (!(opt.sigma > 0)) throw std::invalid_argument("sigma must be positive");
  const int depth = opt.depth ? *opt.depth : default_awareness_depth(opt.n);
  if (depth < 0) throw std::invalid_argument("awareness depth must be >= 0");
  const double bar = std::log2(static_cast<double>(opt.n)) / opt.sigma;
  const auto batches = (opt.origins + opt.origins_per_network - 1) / opt.origins_per_network;

  std::vector<std::vector<std::size_t>> sizes(batches);
  parallel_for(batches, opt.jobs, [&](std::size_t b) {
    NetworkConfig cfg{opt.n, 1, true, std::nullopt, derive_seed(opt.seed, opt.n, 2 * b)};
    const auto net = build_network(cfg);
    Engine rng(derive_seed(opt.seed, opt.n, 2 * b + 1));
    const auto count = std::min(opt.origins_per_network, opt.origins - b * opt.origins_per_network);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto x = static_cast<NodeId>(uniform_below(rng, opt.n));
      sizes[b].push_back(build_awareness(net, x, depth).size());
    }
  });

  AwarenessSizeResult res;
  std::uint64_t hits = 0;
  for (const auto& batch : sizes)
    for (const auto s : batch) {
      ++res.histogram[s];
      if (static_cast<double>(s) >= bar) ++hits;
    }
  const auto total = static_cast<double>(opt.origins);
  res.fraction = static_cast<double>(hits) / total;
  res.stderr_ = detail::binomial_stderr(res.fraction, total);
  res.report.name = "awareness";
  res.report.passed = res.fraction >= opt.min_fraction;
  const std::string param = "n=" + std::to_string(opt.n) + " depth=" + std::to_string(depth) +
                            " sigma=" + detail::fmt(opt.sigma);
  res.report.lines.push_back({"awareness", param, res.fraction, res.stderr_, opt.min_fraction, res.report.passed});
  std::string hist = "|A_x| histogram:";
  for (const auto& [size, count] : res.histogram) hist += " " + std::to_string(size) + ":" + std::to_string(count);
  res.report.notes.push_back(hist);
  return res;
}

// ---------------------------------------------------------------------------
// Half-distance jump

/// Whether A_x(depth) holds a member with a K-neighbour within half of
/// ring_distance(x, t) of t.
inline bool half_distance_hit(const SmallWorldNet& net, NodeId x, NodeId t, int depth) {
  const auto aw = build_awareness(net, x, depth);
  return find_good_intermediate(aw, net, x, t).has_value();
}

struct HalfDistanceOptions {
  std::uint32_t n = 1u << 16;
  std::optional<int> depth;
  std::uint64_t origins = 2000;
  std::uint64_t seed = 1;
  double min_probability = 0.05;
  std::uint64_t origins_per_network = 250;
  unsigned jobs = 1;
};

/// Estimates the half-distance jump probability with targets at the
/// switch-over distance ceil((lg n)^2 lg lg n) and at the maximum n-1.
inline CheckReport check_half_distance(const HalfDistanceOptions& opt) {
  if (opt.origins < kMinOrigins) throw InsufficientSamples("half-distance check", kMinOrigins);
  const int depth = opt.depth ? *opt.depth : default_awareness_depth(opt.n);
  const auto near = static_cast<std::uint32_t>(std::ceil(long_range_threshold(opt.n)));
  if (near >= opt.n) throw std::invalid_argument("n too small: threshold distance exceeds the ring");
  const std::uint32_t distances[] = {near, opt.n - 1};
  const auto batches = (opt.origins + opt.origins_per_network - 1) / opt.origins_per_network;

  std::vector<std::array<std::uint64_t, 2>> hits(batches, {0, 0});
  parallel_for(batches, opt.jobs, [&](std::size_t b) {
    NetworkConfig cfg{opt.n, 1, true, std::nullopt, derive_seed(opt.seed, opt.n, 2 * b)};
    const auto net = build_network(cfg);
    Engine rng(derive_seed(opt.seed, opt.n, 2 * b + 1));
    const auto count = std::min(opt.origins_per_network, opt.origins - b * opt.origins_per_network);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto x = static_cast<NodeId>(uniform_below(rng, opt.n));
      for (std::size_t j = 0; j < 2; ++j) {
        const auto t = static_cast<NodeId>((std::uint64_t{x} + distances[j]) % opt.n);
        hits[b][j] += half_distance_hit(net, x, t, depth) ? 1 : 0;
      }
    }
  });

  CheckReport rep{"half", {}, {}, true};
  const auto total = static_cast<double>(opt.origins);
  for (std::size_t j = 0; j < 2; ++j) {
    std::uint64_t h = 0;
    for (const auto& b : hits) h += b[j];
    const double p = static_cast<double>(h) / total;
    const bool ok = p >= opt.min_probability;
    rep.passed = rep.passed && ok;
    rep.lines.push_back({"half",
                         "n=" + std::to_string(opt.n) + " depth=" + std::to_string(depth) +
                             " dist=" + std::to_string(distances[j]),
                         p, detail::binomial_stderr(p, total), opt.min_probability, ok});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Scaling fits

enum class ScalingLaw { constant, lg_squared, lg_lglg };

inline double scaling_law_value(ScalingLaw law, std::uint32_t n) {
  const double lg = std::log2(static_cast<double>(n));
  switch (law) {
    case ScalingLaw::constant: return 1.0;
    case ScalingLaw::lg_squared: return lg * lg;
    case ScalingLaw::lg_lglg: return lg * std::log2(lg);
  }
  return 1.0;
}

inline std::string_view scaling_law_name(ScalingLaw law) {
  switch (law) {
    case ScalingLaw::constant: return "1";
    case ScalingLaw::lg_squared: return "lg^2 n";
    case ScalingLaw::lg_lglg: return "lg n lglg n";
  }
  return "?";
}

/// max r / min r for r(n) = mean_hops(n) / law(n).
inline double flatness_ratio(const std::map<std::uint32_t, double>& mean_by_n, ScalingLaw law) {
  double lo = INFINITY, hi = 0.0;
  for (const auto& [n, mean] : mean_by_n) {
    const double r = mean / scaling_law_value(law, n);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return lo > 0 ? hi / lo : INFINITY;
}

struct ScalingThresholds {
  double greedy = 1.6;
  double near_optimal = 1.7;
};

struct SchemeFit {
  Scheme scheme;
  ScalingLaw law;
  ScalingLaw contrast;
  double flatness = 0.0;
  double contrast_flatness = 0.0;
};

inline ScalingLaw expected_law(Scheme s) {
  return needs_augmented(s) ? ScalingLaw::lg_lglg : ScalingLaw::lg_squared;
}

/// Flatness of mean hops under each scheme's expected law and under the other
/// law for contrast. Greedy schemes must stay within the greedy bound; the
/// near-optimal schemes within theirs and flatter than under lg^2 n. The
/// local-awareness baseline is reported without a bound.
inline CheckReport fit_scaling(const std::vector<MetricsRow>& rows, const ScalingThresholds& th = {},
                               std::vector<SchemeFit>* fits = nullptr) {
  CheckReport rep{"scaling", {}, {}, true};
  bool any = false;
  for (const auto scheme : kAllSchemes) {
    const auto by_n = mean_hops_by_n(rows, scheme);
    if (by_n.empty()) continue;
    if (by_n.size() < 3)
      throw std::invalid_argument("scaling fit for " + std::string(scheme_name(scheme)) +
                                  " needs at least 3 distinct n, got " + std::to_string(by_n.size()));
    any = true;
    const auto law = expected_law(scheme);
    const auto contrast = law == ScalingLaw::lg_squared ? ScalingLaw::lg_lglg : ScalingLaw::lg_squared;
    SchemeFit fit{scheme, law, contrast, flatness_ratio(by_n, law), flatness_ratio(by_n, contrast)};
    if (fits) fits->push_back(fit);

    const std::string name(scheme_name(scheme));
    std::optional<double> bound;
    std::optional<bool> ok;
    if (is_greedy(scheme)) {
      bound = th.greedy;
      ok = fit.flatness <= th.greedy;
    } else if (needs_augmented(scheme)) {
      bound = th.near_optimal;
      ok = fit.flatness <= th.near_optimal && fit.flatness < fit.contrast_flatness;
    }
    if (ok) rep.passed = rep.passed && *ok;
    rep.lines.push_back({"scaling", name + " flatness " + std::string(scaling_law_name(law)), fit.flatness, 0.0,
                         bound, ok});
    rep.lines.push_back({"scaling", name + " flatness " + std::string(scaling_law_name(contrast)),
                         fit.contrast_flatness, 0.0, std::nullopt, std::nullopt});
  }
  if (!any) throw std::invalid_argument("scaling fit needs metrics rows");
  return rep;
}

// ---------------------------------------------------------------------------
// Output

inline constexpr std::string_view kCheckCsvHeader = "check,parameter,estimate,stderr,threshold,pass";

inline void write_check_csv(std::ostream& out, const std::vector<CheckReport>& reports) {
  out << kCheckCsvHeader << '\n';
  for (const auto& r : reports)
    for (const auto& l : r.lines)
      out << l.check << ',' << l.parameter << ',' << detail::fmt(l.estimate) << ',' << detail::fmt(l.stderr_) << ','
          << (l.threshold ? detail::fmt(*l.threshold) : "") << ',' << (l.pass ? (*l.pass ? "pass" : "fail") : "")
          << '\n';
}

inline void write_check_text(std::ostream& out, const CheckReport& r) {
  out << "== " << r.name << ": " << (r.passed ? "PASS" : "FAIL") << '\n';
  for (const auto& l : r.lines) {
    out << "  " << l.parameter << "  estimate=" << detail::fmt(l.estimate);
    if (l.stderr_ > 0) out << " +/- " << detail::fmt(l.stderr_);
    if (l.threshold) out << "  threshold=" << detail::fmt(*l.threshold) << (*l.pass ? "  ok" : "  FAILED");
    out << '\n';
  }
  for (const auto& note : r.notes) out << "  " << note << '\n';
}

}  // namespace kswn
