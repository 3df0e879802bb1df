#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpboot/estimators.hpp"
#include "fpboot/intervals.hpp"
#include "fpboot/resampling.hpp"
#include "fpboot/sampling.hpp"

namespace fpboot {

// Log-normal stand-in population with both true parameters pinned.
struct SynthSpec {
  std::size_t N = 6224;
  double target_mncs = 1.275;
  double target_pp = 13.7;  // percent
  double shape = 1.0;       // log-normal sigma
};

// ncs ~ exp(shape * Z), rescaled so the population mean is target_mncs; the
// floor(target_pp/100 * N) largest scores (ties broken by lower index) are flagged.
Population synth_population(const SynthSpec& spec, RngStream& rng);

// Where the population came from; echoed in reports so a run can be rebuilt.
struct PopulationSource {
  std::string path;                 // empty for synthetic populations
  std::optional<SynthSpec> synth;   // set for synthetic populations
  std::optional<std::uint64_t> synth_seed;
  std::string content_hash;         // FNV-1a 64 of the population file bytes, hex
  std::size_t N = 0;
};

struct StudyConfig {
  PopulationSource population;
  std::vector<std::size_t> sample_sizes;
  std::size_t B = 1000;
  std::size_t R = 1000;
  std::vector<BootstrapMethod> methods;
  // Empty means the default pairing per method: normal, percentile and BCa
  // for the standard bootstrap; normal, percentile and bootstrap-t otherwise.
  std::vector<CiMethod> ci_types;
  std::vector<EstimatorKind> estimators;
  double level = 0.95;
  std::uint64_t master_seed = 0;
  PpbCompletion ppb_completion = PpbCompletion::PerReplicate;
  BcaTies bca_ties = BcaTies::Strict;
  // Worker threads; 0 = hardware concurrency. Never changes results.
  unsigned threads = 0;
};

std::vector<CiMethod> default_ci_types(BootstrapMethod method);
std::vector<CiMethod> effective_ci_types(const StudyConfig& config, BootstrapMethod method);

// Throws ValidationError when the config cannot run against a population of size N.
void validate(const StudyConfig& config, std::size_t N);

struct CellReport {
  std::size_t n = 0;
  BootstrapMethod method = BootstrapMethod::Standard;
  CiMethod ci_type = CiMethod::Normal;
  EstimatorKind estimator = EstimatorKind::Mncs;
  double coverage = 0.0;      // covered / R_effective
  double avg_length = 0.0;
  double avg_variance = 0.0;  // mean bootstrap variance of the estimator over repetitions
  std::size_t covered = 0;
  std::size_t R_effective = 0;  // repetitions where the interval could be built
  std::size_t fallbacks = 0;    // BCa repetitions that fell back to the percentile interval

  friend bool operator==(const CellReport&, const CellReport&) = default;
};

struct TrueValue {
  EstimatorKind estimator;
  double value;
};

struct StudyReport {
  StudyConfig config;
  std::vector<TrueValue> true_values;
  std::vector<CellReport> cells;
};

// Stream identifiers. The SRSWOR sample of repetition r depends only on
// (n, r), so every method sees the same samples; each bootstrap stream is
// keyed by (n, method, estimator, r).
std::uint64_t sample_stream_id(std::size_t n, std::size_t r);
std::uint64_t bootstrap_stream_id(std::size_t n, BootstrapMethod method, EstimatorKind estimator,
                                  std::size_t r);
// Stream used to generate a synthetic population from a seed.
std::uint64_t synth_stream_id();

struct CellParams {
  std::size_t n = 0;
  BootstrapMethod method = BootstrapMethod::Standard;
  EstimatorKind estimator = EstimatorKind::Mncs;
  std::vector<CiMethod> ci_types;
};

// R repetitions of: draw a sample, bootstrap it, build each requested
// interval, check it against the population value. One CellReport per ci type.
std::vector<CellReport> run_cell(const Population& pop, const CellParams& cell,
                                 const StudyConfig& config);

StudyReport coverage_study(const Population& pop, const StudyConfig& config);

struct SweepRow {
  std::size_t n;
  BootstrapMethod method;
  CiMethod ci_type;
  EstimatorKind estimator;
  double avg_length;
};

struct SweepTable {
  std::vector<std::size_t> sample_sizes;
  std::vector<SweepRow> rows;
};

SweepTable length_sweep(const Population& pop, const StudyConfig& config);
SweepTable sweep_from_report(const StudyReport& report);

}  // namespace fpboot
