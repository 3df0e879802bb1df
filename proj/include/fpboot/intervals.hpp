#pragma once

#include <span>
#include <string_view>

#include "fpboot/estimators.hpp"
#include "fpboot/resampling.hpp"
#include "fpboot/sampling.hpp"

namespace fpboot {

enum class CiMethod { Normal, Percentile, Bca, BootstrapT };

std::string_view to_string(CiMethod method) noexcept;
CiMethod parse_ci(std::string_view name);

struct ConfidenceInterval {
  CiMethod method = CiMethod::Normal;
  double level = 0.95;
  double lower = 0.0;
  double upper = 0.0;

  double length() const noexcept { return upper - lower; }
  bool contains(double theta) const noexcept { return lower <= theta && theta <= upper; }
};

// The ceil(q*B)-th order statistic, rank clamped to [1, B]. q*B within 1e-9
// of an integer counts as that integer, so q = 0.025 at B = 1000 is rank 25
// even when q carries representation error from 1 - level.
double empirical_quantile(std::span<const double> values, double q);

// Same rule on already sorted input.
double sorted_quantile(std::span<const double> sorted, double q);

ConfidenceInterval ci_normal(double theta_hat, double variance, double level);

ConfidenceInterval ci_percentile(const BootstrapReplicates& reps, double level);

// Jackknife acceleration from leave-one-out estimates; 0 when they all coincide.
double acceleration_from_jackknife(std::span<const double> leave_one_out);

// Leave-one-out acceleration for a mean-type statistic over the given values.
double jackknife_acceleration(std::span<const double> values);
double jackknife_acceleration(const Sample& sample, EstimatorKind kind);

enum class BcaTies {
  Strict,  // p0 = #{theta* < theta_hat} / B
  Half,    // ties with theta_hat count one half
};

// z0 = Phi^-1(p0). Throws DegenerateDistribution when p0 is 0 or 1.
double bca_bias_correction(std::span<const double> estimates, double theta_hat,
                           BcaTies ties = BcaTies::Strict);

ConfidenceInterval ci_bca(const BootstrapReplicates& reps, double theta_hat, double accel,
                          double level, BcaTies ties = BcaTies::Strict);

// Studentized interval. Replicates whose variance is 0 are dropped; more than
// 1% dropped is a DegenerateDistribution. v_hat == 0 yields the point
// interval at theta_hat since both endpoints scale with sqrt(v_hat).
ConfidenceInterval ci_bootstrap_t(const BootstrapReplicates& reps, double theta_hat, double v_hat,
                                  double level);

}  // namespace fpboot
