#include "fpboot/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpboot/error.hpp"

namespace fpboot {

std::string_view to_string(BootstrapMethod method) noexcept {
  switch (method) {
    case BootstrapMethod::Standard: return "standard";
    case BootstrapMethod::Ppb: return "ppb";
    case BootstrapMethod::MirrorMatch: return "mirror";
  }
  return "?";
}

BootstrapMethod parse_method(std::string_view name) {
  if (name == "standard") return BootstrapMethod::Standard;
  if (name == "ppb") return BootstrapMethod::Ppb;
  if (name == "mirror" || name == "mirror-match" || name == "mirror_match")
    return BootstrapMethod::MirrorMatch;
  throw InvalidArgument("unknown bootstrap method '" + std::string(name) +
                        "' (expected standard|ppb|mirror)");
}

FpcFactors fpc(std::size_t n, std::size_t N) {
  if (N < 2) throw InvalidArgument("fpc: population size must be >= 2");
  if (n == 0 || n > N) throw InvalidArgument("fpc: need 1 <= n <= N");
  const double dn = static_cast<double>(n);
  const double dN = static_cast<double>(N);
  return {(dN - dn) / dN, (dN - dn) / (dN - 1.0)};
}

double bootstrap_variance(std::span<const double> estimates) {
  if (estimates.size() < 2) throw InvalidArgument("bootstrap_variance: need B >= 2");
  return sample_variance(estimates);
}

double bootstrap_variance(const BootstrapReplicates& reps) { return bootstrap_variance(reps.estimates); }

double analytic_mean_variance(BootstrapMethod method, double s2, std::size_t n, std::size_t N) {
  if (n == 0 || n > N) throw InvalidArgument("analytic_mean_variance: need 1 <= n <= N");
  const double dn = static_cast<double>(n);
  double v = s2 * (dn - 1.0) / (dn * dn);
  if (is_finite_population_method(method)) v *= 1.0 - dn / static_cast<double>(N);
  return v;
}

double analytic_mean_variance(BootstrapMethod method, std::span<const double> values, std::size_t N) {
  return analytic_mean_variance(method, sample_variance(values), values.size(), N);
}

namespace {

// Accumulates one replicate as a multiplicity per sample position and sums in
// position order, so the estimate depends only on which units were drawn.
class ReplicateTally {
 public:
  explicit ReplicateTally(std::span<const double> values)
      : values_(values), counts_(values.size(), 0) {}

  void add(std::size_t pos) noexcept { ++counts_[pos]; }

  // Mean of the m drawn values and, if requested, their s^2. Clears the tally.
  double finish(std::size_t m, double* s2) noexcept {
    const std::size_t n = values_.size();
    const double pivot = values_[0];
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += static_cast<double>(counts_[i]) * (values_[i] - pivot);
    const double mean = pivot + sum / static_cast<double>(m);
    if (s2) {
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = values_[i] - mean;
        ss += static_cast<double>(counts_[i]) * d * d;
      }
      *s2 = m > 1 ? ss / static_cast<double>(m - 1) : 0.0;
    }
    std::fill(counts_.begin(), counts_.end(), 0u);
    return mean;
  }

 private:
  std::span<const double> values_;
  std::vector<std::uint32_t> counts_;
};

void check_common(std::span<const double> values, std::size_t B, const BootstrapOptions& opts,
                  std::size_t min_n, const char* who) {
  if (values.size() < min_n)
    throw InvalidArgument(std::string(who) + ": sample size must be >= " + std::to_string(min_n));
  if (opts.t_variances && values.size() < 2)
    throw InvalidArgument(std::string(who) + ": bootstrap-t variances need n >= 2");
  if (B == 0) throw InvalidArgument(std::string(who) + ": B must be >= 1");
}

void check_population_size(std::size_t n, std::size_t N, const char* who) {
  if (N < n)
    throw InvalidArgument(std::string(who) + ": population size " + std::to_string(N) +
                          " is smaller than the sample size " + std::to_string(n));
}

// Records replicate b: the estimate and, when requested, the closed-form variance.
struct ReplicateSink {
  BootstrapReplicates reps;
  BootstrapMethod method;
  std::size_t n;
  std::size_t N;
  bool want_t;

  ReplicateSink(BootstrapMethod m, std::size_t B, std::size_t n_, std::size_t N_, bool t)
      : method(m), n(n_), N(N_), want_t(t) {
    reps.method = m;
    reps.estimates.reserve(B);
    if (t) reps.t_variances.emplace().reserve(B);
  }

  void push(ReplicateTally& tally, std::size_t m) {
    double s2 = 0.0;
    reps.estimates.push_back(tally.finish(m, want_t ? &s2 : nullptr));
    if (want_t) reps.t_variances->push_back(analytic_mean_variance(method, s2, n, N));
  }
};

}  // namespace

BootstrapReplicates standard_bootstrap(std::span<const double> values, std::size_t B,
                                       RngStream& rng, const BootstrapOptions& opts) {
  check_common(values, B, opts, 2, "standard_bootstrap");
  const std::size_t n = values.size();
  ReplicateTally tally(values);
  // N only scales the finite-population engines; n stands in here.
  ReplicateSink sink(BootstrapMethod::Standard, B, n, n, opts.t_variances);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t i = 0; i < n; ++i) tally.add(rng.uniform_index(n));
    sink.push(tally, n);
  }
  return std::move(sink.reps);
}

PseudoPopulation build_pseudo_population(const Sample& sample, std::size_t N, RngStream& rng) {
  const std::size_t n = sample.n();
  if (n == 0) throw InvalidArgument("build_pseudo_population: empty sample");
  check_population_size(n, N, "build_pseudo_population");

  PseudoPopulation pp;
  pp.k = N / n;
  pp.remainder = N - pp.k * n;
  pp.source.reserve(N);
  for (std::size_t c = 0; c < pp.k; ++c)
    for (std::size_t i = 0; i < n; ++i) pp.source.push_back(i);
  if (pp.remainder > 0) {
    IndexSampler sampler(n);
    for (std::uint32_t i : sampler.draw(pp.remainder, rng)) pp.source.push_back(i);
  }
  pp.units.reserve(N);
  for (std::size_t i : pp.source) pp.units.push_back(sample.values[i]);
  return pp;
}

BootstrapReplicates ppb_bootstrap(std::span<const double> values, std::size_t N, std::size_t B,
                                  RngStream& rng, const BootstrapOptions& opts) {
  check_common(values, B, opts, 1, "ppb_bootstrap");
  const std::size_t n = values.size();
  check_population_size(n, N, "ppb_bootstrap");

  const std::size_t k = N / n;
  const std::size_t r = N - k * n;
  std::vector<std::uint32_t> source(N);
  for (std::size_t j = 0; j < k * n; ++j) source[j] = static_cast<std::uint32_t>(j % n);

  IndexSampler remainder_sampler(n);
  auto complete = [&] {
    auto picked = remainder_sampler.draw(r, rng);
    std::copy(picked.begin(), picked.end(), source.begin() + static_cast<std::ptrdiff_t>(k * n));
  };
  if (r > 0 && opts.completion == PpbCompletion::Fixed) complete();

  IndexSampler unit_sampler(N);
  ReplicateTally tally(values);
  ReplicateSink sink(BootstrapMethod::Ppb, B, n, N, opts.t_variances);
  for (std::size_t b = 0; b < B; ++b) {
    if (r > 0 && opts.completion == PpbCompletion::PerReplicate) complete();
    for (std::uint32_t unit : unit_sampler.draw(n, rng)) tally.add(source[unit]);
    sink.push(tally, n);
  }
  return std::move(sink.reps);
}

MirrorMatchPlan mirror_match_plan(std::size_t n, std::size_t N) {
  if (n < 2) throw InvalidArgument("mirror_match_plan: need n >= 2");
  check_population_size(n, N, "mirror_match_plan");

  const double dn = static_cast<double>(n);
  const double f = dn / static_cast<double>(N);

  MirrorMatchPlan plan;
  const auto rounded = static_cast<std::size_t>(std::llround(f * dn));
  plan.n_prime = std::clamp<std::size_t>(rounded, 1, n);
  plan.f_prime = static_cast<double>(plan.n_prime) / dn;
  if (plan.n_prime == n) {
    plan.k_target = 1.0;
  } else {
    plan.k_target = dn * (1.0 - plan.f_prime) / (static_cast<double>(plan.n_prime) * (1.0 - f));
    // Rounding n' up near f = 1 can push the target just below one copy.
    plan.k_target = std::max(plan.k_target, 1.0);
  }
  plan.k_low = static_cast<std::size_t>(std::floor(plan.k_target));
  plan.k_high = static_cast<std::size_t>(std::ceil(plan.k_target));
  plan.p_high = plan.k_high == plan.k_low ? 0.0 : plan.k_target - static_cast<double>(plan.k_low);
  return plan;
}

BootstrapReplicates mirror_match_bootstrap(std::span<const double> values, std::size_t N,
                                           std::size_t B, RngStream& rng,
                                           const BootstrapOptions& opts) {
  check_common(values, B, opts, 2, "mirror_match_bootstrap");
  const std::size_t n = values.size();
  const MirrorMatchPlan plan = mirror_match_plan(n, N);

  IndexSampler sampler(n);
  ReplicateTally tally(values);
  ReplicateSink sink(BootstrapMethod::MirrorMatch, B, n, N, opts.t_variances);
  for (std::size_t b = 0; b < B; ++b) {
    std::size_t k = plan.k_low;
    if (plan.p_high > 0.0 && rng.uniform() < plan.p_high) k = plan.k_high;
    for (std::size_t c = 0; c < k; ++c)
      for (std::uint32_t pos : sampler.draw(plan.n_prime, rng)) tally.add(pos);
    sink.push(tally, k * plan.n_prime);
  }
  return std::move(sink.reps);
}

BootstrapReplicates standard_bootstrap(const Sample& sample, std::size_t B, EstimatorKind kind,
                                       RngStream& rng, const BootstrapOptions& opts) {
  const auto values = statistic_values(kind, sample.values);
  return standard_bootstrap(values, B, rng, opts);
}

BootstrapReplicates ppb_bootstrap(const Sample& sample, std::size_t N, std::size_t B,
                                  EstimatorKind kind, RngStream& rng,
                                  const BootstrapOptions& opts) {
  const auto values = statistic_values(kind, sample.values);
  return ppb_bootstrap(values, N, B, rng, opts);
}

BootstrapReplicates mirror_match_bootstrap(const Sample& sample, std::size_t N, std::size_t B,
                                           EstimatorKind kind, RngStream& rng,
                                           const BootstrapOptions& opts) {
  const auto values = statistic_values(kind, sample.values);
  return mirror_match_bootstrap(values, N, B, rng, opts);
}

BootstrapReplicates run_bootstrap(BootstrapMethod method, std::span<const double> values,
                                  std::size_t N, std::size_t B, RngStream& rng,
                                  const BootstrapOptions& opts) {
  switch (method) {
    case BootstrapMethod::Standard: return standard_bootstrap(values, B, rng, opts);
    case BootstrapMethod::Ppb: return ppb_bootstrap(values, N, B, rng, opts);
    case BootstrapMethod::MirrorMatch: return mirror_match_bootstrap(values, N, B, rng, opts);
  }
  throw InvalidArgument("run_bootstrap: unknown method");
}

}  // namespace fpboot
