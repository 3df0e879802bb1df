#include "fpboot/estimators.hpp"

#include <cmath>

#include "fpboot/error.hpp"

namespace fpboot {

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::Mncs: return "mncs";
    case EstimatorKind::PpTop10: return "pp_top10";
  }
  return "?";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "mncs") return EstimatorKind::Mncs;
  if (name == "pp_top10" || name == "pp" || name == "pptop10") return EstimatorKind::PpTop10;
  throw InvalidArgument("unknown estimator '" + std::string(name) + "' (expected mncs|pp_top10)");
}

namespace {

double record_value(EstimatorKind kind, const PublicationRecord& r) noexcept {
  return kind == EstimatorKind::Mncs ? r.ncs : (r.top10 ? 100.0 : 0.0);
}

// Mean taken as first + mean(x - first): a constant input returns that constant
// exactly. mean() and the bootstrap tally use the same arithmetic, so a census
// resample reproduces the population value bit for bit.
double record_mean(EstimatorKind kind, std::span<const PublicationRecord> records) {
  const double pivot = record_value(kind, records.front());
  double sum = 0.0;
  for (const auto& r : records) sum += record_value(kind, r) - pivot;
  return pivot + sum / static_cast<double>(records.size());
}

}  // namespace

double mncs(std::span<const PublicationRecord> records) {
  if (records.empty()) throw InvalidArgument("mncs: empty input");
  return record_mean(EstimatorKind::Mncs, records);
}

double pp_top10(std::span<const PublicationRecord> records) {
  if (records.empty()) throw InvalidArgument("pp_top10: empty input");
  return record_mean(EstimatorKind::PpTop10, records);
}

double estimate(EstimatorKind kind, std::span<const PublicationRecord> records) {
  return kind == EstimatorKind::Mncs ? mncs(records) : pp_top10(records);
}

EstimateResult estimate_result(EstimatorKind kind, std::span<const PublicationRecord> records) {
  return {kind, estimate(kind, records), records.size()};
}

std::vector<double> statistic_values(EstimatorKind kind, std::span<const PublicationRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(record_value(kind, r));
  return out;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("mean: empty input");
  const double pivot = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - pivot;
  return pivot + sum / static_cast<double>(values.size());
}

namespace {

// Deviations are taken from the first value before centering, so a constant
// sequence gives exactly zero.
double sum_sq_dev(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("empty input");
  const double shift = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - shift;
  const double m = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) {
    const double d = (v - shift) - m;
    ss += d * d;
  }
  return ss;
}

}  // namespace

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw InvalidArgument("sample_variance: need at least 2 values");
  return sum_sq_dev(values) / static_cast<double>(values.size() - 1);
}

double population_variance(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("population_variance: empty input");
  return sum_sq_dev(values) / static_cast<double>(values.size());
}

double se_mean_fpc(double s2, std::size_t n, std::size_t N) {
  if (n == 0 || n > N) throw InvalidArgument("se_mean_fpc: need 1 <= n <= N");
  if (!(s2 >= 0.0)) throw InvalidArgument("se_mean_fpc: s2 must be >= 0");
  if (n == N) return 0.0;
  const double fpc = static_cast<double>(N - n) / static_cast<double>(N - 1);
  return std::sqrt(s2 / static_cast<double>(n)) * std::sqrt(fpc);
}

}  // namespace fpboot
