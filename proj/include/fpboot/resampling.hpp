#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fpboot/estimators.hpp"
#include "fpboot/rng.hpp"
#include "fpboot/sampling.hpp"

namespace fpboot {

enum class BootstrapMethod { Standard, Ppb, MirrorMatch };

std::string_view to_string(BootstrapMethod method) noexcept;
BootstrapMethod parse_method(std::string_view name);

constexpr bool is_finite_population_method(BootstrapMethod m) noexcept {
  return m != BootstrapMethod::Standard;
}

// Finite population correction factors for an SRSWOR sample of n out of N.
struct FpcFactors {
  double one_minus_f;    // 1 - n/N
  double bias_adjusted;  // (N - n)/(N - 1)
};

FpcFactors fpc(std::size_t n, std::size_t N);

// V*' = (N - n)/(N - 1) * V*.
inline double corrected_variance(double v_star, const FpcFactors& factors) noexcept {
  return factors.bias_adjusted * v_star;
}

struct BootstrapReplicates {
  BootstrapMethod method = BootstrapMethod::Standard;
  std::vector<double> estimates;
  // Per-replicate variance estimates for bootstrap-t; same length as estimates.
  std::optional<std::vector<double>> t_variances;

  std::size_t B() const noexcept { return estimates.size(); }
};

double bootstrap_variance(std::span<const double> estimates);
double bootstrap_variance(const BootstrapReplicates& reps);

// k whole copies of the sample followed by r = N - k*n records drawn without
// replacement from the sample. source[j] is the sample position behind units[j].
struct PseudoPopulation {
  std::size_t k = 0;
  std::size_t remainder = 0;
  std::vector<std::size_t> source;
  std::vector<PublicationRecord> units;
};

PseudoPopulation build_pseudo_population(const Sample& sample, std::size_t N, RngStream& rng);

// Mirror-match subsample size and repeat count. k is randomized between
// k_low and k_high so that E[k] = k_target.
struct MirrorMatchPlan {
  std::size_t n_prime = 0;
  double f_prime = 0.0;
  double k_target = 0.0;
  std::size_t k_low = 0;
  std::size_t k_high = 0;
  double p_high = 0.0;
};

MirrorMatchPlan mirror_match_plan(std::size_t n, std::size_t N);

enum class PpbCompletion {
  PerReplicate,  // redraw the r remainder units for every replicate
  Fixed,         // draw them once and keep the pseudo-population fixed
};

struct BootstrapOptions {
  bool t_variances = false;
  PpbCompletion completion = PpbCompletion::PerReplicate;
};

// Closed-form variance of a mean-type estimate, s2 (n-1)/n^2, scaled by 1 - f
// for the finite-population engines. Used both for the per-replicate
// bootstrap-t variances and for the matching variance of the original estimate.
double analytic_mean_variance(BootstrapMethod method, double s2, std::size_t n, std::size_t N);
double analytic_mean_variance(BootstrapMethod method, std::span<const double> values, std::size_t N);

// Engines over precomputed statistic values (see statistic_values()).
BootstrapReplicates standard_bootstrap(std::span<const double> values, std::size_t B,
                                       RngStream& rng, const BootstrapOptions& opts = {});
BootstrapReplicates ppb_bootstrap(std::span<const double> values, std::size_t N, std::size_t B,
                                  RngStream& rng, const BootstrapOptions& opts = {});
BootstrapReplicates mirror_match_bootstrap(std::span<const double> values, std::size_t N,
                                           std::size_t B, RngStream& rng,
                                           const BootstrapOptions& opts = {});

BootstrapReplicates standard_bootstrap(const Sample& sample, std::size_t B, EstimatorKind kind,
                                       RngStream& rng, const BootstrapOptions& opts = {});
BootstrapReplicates ppb_bootstrap(const Sample& sample, std::size_t N, std::size_t B,
                                  EstimatorKind kind, RngStream& rng,
                                  const BootstrapOptions& opts = {});
BootstrapReplicates mirror_match_bootstrap(const Sample& sample, std::size_t N, std::size_t B,
                                           EstimatorKind kind, RngStream& rng,
                                           const BootstrapOptions& opts = {});

// Dispatch on method; N is taken from sample.population_size.
BootstrapReplicates run_bootstrap(BootstrapMethod method, std::span<const double> values,
                                  std::size_t N, std::size_t B, RngStream& rng,
                                  const BootstrapOptions& opts = {});

}  // namespace fpboot
