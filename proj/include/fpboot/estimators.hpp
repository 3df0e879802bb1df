#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpboot/sampling.hpp"

namespace fpboot {

enum class EstimatorKind { Mncs, PpTop10 };

std::string_view to_string(EstimatorKind kind) noexcept;
EstimatorKind parse_estimator(std::string_view name);

struct EstimateResult {
  EstimatorKind kind;
  double value;  // dimensionless for MNCS, percent for PP(top 10%)
  std::size_t n;
};

// Mean field-normalized citation score.
double mncs(std::span<const PublicationRecord> records);

// Share of records flagged top-10%, in percent.
double pp_top10(std::span<const PublicationRecord> records);

double estimate(EstimatorKind kind, std::span<const PublicationRecord> records);
EstimateResult estimate_result(EstimatorKind kind, std::span<const PublicationRecord> records);

// Both estimators are means of a per-record value: ncs for MNCS, 100*flag for
// PP(top 10%). The resampling engines work on these values directly.
std::vector<double> statistic_values(EstimatorKind kind, std::span<const PublicationRecord> records);

double mean(std::span<const double> values);

// Unbiased s^2 (denominator n-1).
double sample_variance(std::span<const double> values);

// Population variance sigma^2 (denominator N). Used for oracles on a full population.
double population_variance(std::span<const double> values);

// Standard error of a sample mean under SRSWOR: sqrt(s2/n) * sqrt((N-n)/(N-1)).
double se_mean_fpc(double s2, std::size_t n, std::size_t N);

}  // namespace fpboot
