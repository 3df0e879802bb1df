#include "fpboot/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fpboot/error.hpp"
#include "fpboot/normal.hpp"

namespace fpboot {

std::string_view to_string(CiMethod method) noexcept {
  switch (method) {
    case CiMethod::Normal: return "normal";
    case CiMethod::Percentile: return "percentile";
    case CiMethod::Bca: return "bca";
    case CiMethod::BootstrapT: return "boot-t";
  }
  return "?";
}

CiMethod parse_ci(std::string_view name) {
  if (name == "normal" || name == "asymptotic") return CiMethod::Normal;
  if (name == "percentile") return CiMethod::Percentile;
  if (name == "bca") return CiMethod::Bca;
  if (name == "boot-t" || name == "bootstrap-t" || name == "boot_t") return CiMethod::BootstrapT;
  throw InvalidArgument("unknown interval type '" + std::string(name) +
                        "' (expected normal|percentile|bca|boot-t)");
}

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("empirical_quantile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("empirical_quantile: q must lie in [0, 1]");
  const double B = static_cast<double>(sorted.size());
  const double rank = std::ceil(q * B - 1e-9);
  const auto r = static_cast<std::size_t>(std::clamp(rank, 1.0, B));
  return sorted[r - 1];
}

double empirical_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw InvalidArgument("empirical_quantile: empty input");
  return sorted_quantile(sorted_copy(values), q);
}

ConfidenceInterval ci_normal(double theta_hat, double variance, double level) {
  check_level(level);
  if (!(variance >= 0.0)) throw InvalidArgument("ci_normal: variance must be >= 0");
  const double half = normal_quantile(0.5 + 0.5 * level) * std::sqrt(variance);
  return {CiMethod::Normal, level, theta_hat - half, theta_hat + half};
}

ConfidenceInterval ci_percentile(const BootstrapReplicates& reps, double level) {
  check_level(level);
  if (reps.B() < 2) throw InvalidArgument("ci_percentile: need B >= 2");
  const auto sorted = sorted_copy(reps.estimates);
  const double alpha = 1.0 - level;
  return {CiMethod::Percentile, level, sorted_quantile(sorted, alpha / 2),
          sorted_quantile(sorted, 1.0 - alpha / 2)};
}

double acceleration_from_jackknife(std::span<const double> loo) {
  if (loo.empty()) throw InvalidArgument("acceleration_from_jackknife: empty input");
  const double bar = mean(loo);
  double s2 = 0.0, s3 = 0.0;
  for (double t : loo) {
    const double d = bar - t;
    s2 += d * d;
    s3 += d * d * d;
  }
  if (s2 == 0.0) return 0.0;
  return s3 / (6.0 * std::pow(s2, 1.5));
}

double jackknife_acceleration(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 3) throw InvalidArgument("jackknife_acceleration: need n >= 3");
  double sum = 0.0;
  for (double v : values) sum += v;
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) loo[i] = (sum - values[i]) / static_cast<double>(n - 1);
  return acceleration_from_jackknife(loo);
}

double jackknife_acceleration(const Sample& sample, EstimatorKind kind) {
  return jackknife_acceleration(statistic_values(kind, sample.values));
}

double bca_bias_correction(std::span<const double> estimates, double theta_hat, BcaTies ties) {
  if (estimates.empty()) throw InvalidArgument("bca_bias_correction: empty input");
  std::size_t below = 0, equal = 0;
  for (double t : estimates) {
    below += t < theta_hat ? 1 : 0;
    equal += t == theta_hat ? 1 : 0;
  }
  double p0 = static_cast<double>(below);
  if (ties == BcaTies::Half) p0 += 0.5 * static_cast<double>(equal);
  p0 /= static_cast<double>(estimates.size());
  if (p0 <= 0.0 || p0 >= 1.0)
    throw DegenerateDistribution("BCa: bootstrap distribution lies entirely on one side of the estimate");
  return normal_quantile(p0);
}

ConfidenceInterval ci_bca(const BootstrapReplicates& reps, double theta_hat, double accel,
                          double level, BcaTies ties) {
  check_level(level);
  if (reps.B() < 2) throw InvalidArgument("ci_bca: need B >= 2");
  const double z0 = bca_bias_correction(reps.estimates, theta_hat, ties);
  const double alpha = 1.0 - level;

  auto adjusted = [&](double z) {
    const double num = z0 + z;
    const double den = 1.0 - accel * num;
    if (!(den > 0.0)) throw DegenerateDistribution("BCa: acceleration too large for this level");
    return normal_cdf(z0 + num / den);
  };
  // Phi^-1(alpha/2) and Phi^-1(1 - alpha/2) are exact negatives.
  const double z_hi = normal_quantile(1.0 - alpha / 2);
  const double a1 = adjusted(-z_hi);
  const double a2 = adjusted(z_hi);

  const auto sorted = sorted_copy(reps.estimates);
  return {CiMethod::Bca, level, sorted_quantile(sorted, a1), sorted_quantile(sorted, a2)};
}

ConfidenceInterval ci_bootstrap_t(const BootstrapReplicates& reps, double theta_hat, double v_hat,
                                  double level) {
  check_level(level);
  if (!reps.t_variances) throw InvalidArgument("ci_bootstrap_t: replicates carry no variances");
  if (reps.t_variances->size() != reps.B())
    throw InvalidArgument("ci_bootstrap_t: variance count does not match B");
  if (!(v_hat >= 0.0)) throw InvalidArgument("ci_bootstrap_t: v_hat must be >= 0");
  if (reps.B() < 2) throw InvalidArgument("ci_bootstrap_t: need B >= 2");
  if (v_hat == 0.0) return {CiMethod::BootstrapT, level, theta_hat, theta_hat};

  std::vector<double> t;
  t.reserve(reps.B());
  for (std::size_t b = 0; b < reps.B(); ++b) {
    const double v = (*reps.t_variances)[b];
    if (v < 0.0) throw InvalidArgument("ci_bootstrap_t: negative replicate variance");
    if (v == 0.0) continue;
    const double stat = (reps.estimates[b] - theta_hat) / std::sqrt(v);
    if (std::isfinite(stat)) t.push_back(stat);
  }
  const std::size_t dropped = reps.B() - t.size();
  if (t.empty() || static_cast<double>(dropped) > 0.01 * static_cast<double>(reps.B()))
    throw DegenerateDistribution("bootstrap-t: " + std::to_string(dropped) + " of " +
                                 std::to_string(reps.B()) + " replicates have zero variance");

  std::sort(t.begin(), t.end());
  const double alpha = 1.0 - level;
  const double se = std::sqrt(v_hat);
  const double lower = theta_hat - sorted_quantile(t, 1.0 - alpha / 2) * se;
  const double upper = theta_hat - sorted_quantile(t, alpha / 2) * se;
  return {CiMethod::BootstrapT, level, lower, upper};
}

}  // namespace fpboot
