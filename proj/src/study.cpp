#include "fpboot/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "fpboot/error.hpp"
#include "fpboot/hash.hpp"

namespace fpboot {

Population synth_population(const SynthSpec& spec, RngStream& rng) {
  if (spec.N == 0) throw InvalidArgument("synth: N must be >= 1");
  if (!(spec.target_mncs > 0.0) || !std::isfinite(spec.target_mncs))
    throw InvalidArgument("synth: target MNCS must be positive");
  if (!(spec.target_pp > 0.0 && spec.target_pp < 100.0))
    throw InvalidArgument("synth: target PP(top 10%) must lie in (0, 100)");
  if (!(spec.shape > 0.0) || !std::isfinite(spec.shape))
    throw InvalidArgument("synth: shape must be positive");

  std::vector<double> raw(spec.N);
  for (double& x : raw) x = std::exp(spec.shape * rng.normal());
  double sum = 0.0;
  for (double x : raw) sum += x;
  const double scale = spec.target_mncs / (sum / static_cast<double>(spec.N));

  std::vector<PublicationRecord> records(spec.N);
  for (std::size_t i = 0; i < spec.N; ++i) records[i].ncs = raw[i] * scale;

  const auto flagged =
      static_cast<std::size_t>(std::floor(spec.target_pp / 100.0 * static_cast<double>(spec.N)));
  std::vector<std::size_t> order(spec.N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].ncs > records[b].ncs;
  });
  for (std::size_t i = 0; i < flagged; ++i) records[order[i]].top10 = true;
  return Population(std::move(records));
}

std::vector<CiMethod> default_ci_types(BootstrapMethod method) {
  if (method == BootstrapMethod::Standard)
    return {CiMethod::Normal, CiMethod::Percentile, CiMethod::Bca};
  return {CiMethod::Normal, CiMethod::Percentile, CiMethod::BootstrapT};
}

std::vector<CiMethod> effective_ci_types(const StudyConfig& config, BootstrapMethod method) {
  return config.ci_types.empty() ? default_ci_types(method) : config.ci_types;
}

void validate(const StudyConfig& config, std::size_t N) {
  if (config.B < 2) throw ValidationError("B must be >= 2");
  if (config.R < 1) throw ValidationError("reps must be >= 1");
  if (config.R > std::numeric_limits<std::uint32_t>::max())
    throw ValidationError("reps must fit in 32 bits");
  if (!(config.level > 0.0 && config.level < 1.0))
    throw ValidationError("level must lie in (0, 1)");
  bool wants_bca = std::find(config.ci_types.begin(), config.ci_types.end(), CiMethod::Bca) !=
                   config.ci_types.end();
  if (config.ci_types.empty())
    wants_bca = std::find(config.methods.begin(), config.methods.end(),
                          BootstrapMethod::Standard) != config.methods.end();
  for (std::size_t n : config.sample_sizes) {
    if (n < 2) throw ValidationError("sample sizes must be >= 2");
    if (n > N)
      throw ValidationError("sample size " + std::to_string(n) + " exceeds population size " +
                            std::to_string(N));
    if (wants_bca && n < 3) throw ValidationError("BCa intervals need sample sizes >= 3");
  }
}

namespace {

std::uint64_t make_stream_id(std::uint32_t tag, std::size_t r) {
  return (static_cast<std::uint64_t>(tag) << 32) | static_cast<std::uint32_t>(r);
}

}  // namespace

std::uint64_t sample_stream_id(std::size_t n, std::size_t r) {
  return make_stream_id(fnv1a32("sample|n=" + std::to_string(n)), r);
}

std::uint64_t bootstrap_stream_id(std::size_t n, BootstrapMethod method, EstimatorKind estimator,
                                  std::size_t r) {
  std::string key = "boot|n=" + std::to_string(n);
  key += "|method=";
  key += to_string(method);
  key += "|estimator=";
  key += to_string(estimator);
  return make_stream_id(fnv1a32(key), r);
}

std::uint64_t synth_stream_id() { return make_stream_id(fnv1a32("synth"), 0); }

namespace {

struct Outcome {
  bool ok = false;
  bool covered = false;
  bool fallback = false;
  double length = 0.0;
};

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<CellReport> run_cell(const Population& pop, const CellParams& cell,
                                 const StudyConfig& config) {
  const std::size_t N = pop.size();
  const std::size_t R = config.R;
  const std::size_t n_ci = cell.ci_types.size();
  const double theta = estimate(cell.estimator, pop.records());

  const bool want_t = std::find(cell.ci_types.begin(), cell.ci_types.end(),
                                CiMethod::BootstrapT) != cell.ci_types.end();
  const bool want_bca =
      std::find(cell.ci_types.begin(), cell.ci_types.end(), CiMethod::Bca) != cell.ci_types.end();

  std::vector<double> variances(R, 0.0);
  std::vector<Outcome> outcomes(R * n_ci);

  parallel_for(R, config.threads, [&](std::size_t r) {
    RngStream sample_rng(config.master_seed, sample_stream_id(cell.n, r));
    const Sample sample = srswor(pop, cell.n, sample_rng);
    const auto values = statistic_values(cell.estimator, sample.values);
    const double theta_hat = mean(values);

    RngStream boot_rng(config.master_seed,
                       bootstrap_stream_id(cell.n, cell.method, cell.estimator, r));
    BootstrapOptions opts;
    opts.t_variances = want_t;
    opts.completion = config.ppb_completion;
    const auto reps = run_bootstrap(cell.method, values, N, config.B, boot_rng, opts);
    const double variance = bootstrap_variance(reps);
    variances[r] = variance;
    const double accel = want_bca ? jackknife_acceleration(values) : 0.0;

    for (std::size_t c = 0; c < n_ci; ++c) {
      Outcome& out = outcomes[r * n_ci + c];
      std::optional<ConfidenceInterval> ci;
      try {
        switch (cell.ci_types[c]) {
          case CiMethod::Normal: ci = ci_normal(theta_hat, variance, config.level); break;
          case CiMethod::Percentile: ci = ci_percentile(reps, config.level); break;
          case CiMethod::Bca:
            try {
              ci = ci_bca(reps, theta_hat, accel, config.level, config.bca_ties);
            } catch (const DegenerateDistribution&) {
              ci = ci_percentile(reps, config.level);
              out.fallback = true;
            }
            break;
          case CiMethod::BootstrapT:
            ci = ci_bootstrap_t(reps, theta_hat,
                                analytic_mean_variance(cell.method, values, N), config.level);
            break;
        }
      } catch (const DegenerateDistribution&) {
        ci.reset();
      }
      if (ci) {
        out.ok = true;
        out.covered = ci->contains(theta);
        out.length = ci->length();
      }
    }
  });

  double variance_sum = 0.0;
  for (double v : variances) variance_sum += v;

  std::vector<CellReport> cells;
  cells.reserve(n_ci);
  for (std::size_t c = 0; c < n_ci; ++c) {
    CellReport rep;
    rep.n = cell.n;
    rep.method = cell.method;
    rep.ci_type = cell.ci_types[c];
    rep.estimator = cell.estimator;
    double length_sum = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const Outcome& out = outcomes[r * n_ci + c];
      rep.fallbacks += out.fallback ? 1 : 0;
      if (!out.ok) continue;
      ++rep.R_effective;
      rep.covered += out.covered ? 1 : 0;
      length_sum += out.length;
    }
    if (rep.R_effective > 0) {
      rep.coverage = static_cast<double>(rep.covered) / static_cast<double>(rep.R_effective);
      rep.avg_length = length_sum / static_cast<double>(rep.R_effective);
    }
    rep.avg_variance = variance_sum / static_cast<double>(R);
    cells.push_back(rep);
  }
  return cells;
}

StudyReport coverage_study(const Population& pop, const StudyConfig& config) {
  validate(config, pop.size());
  StudyReport report;
  report.config = config;
  report.config.population.N = pop.size();
  for (EstimatorKind e : config.estimators) report.true_values.push_back({e, estimate(e, pop.records())});

  for (std::size_t n : config.sample_sizes)
    for (BootstrapMethod m : config.methods)
      for (EstimatorKind e : config.estimators) {
        CellParams cell{n, m, e, effective_ci_types(config, m)};
        for (auto& c : run_cell(pop, cell, config)) report.cells.push_back(c);
      }
  return report;
}

SweepTable sweep_from_report(const StudyReport& report) {
  SweepTable table;
  table.sample_sizes = report.config.sample_sizes;
  for (const auto& c : report.cells)
    table.rows.push_back({c.n, c.method, c.ci_type, c.estimator, c.avg_length});
  return table;
}

SweepTable length_sweep(const Population& pop, const StudyConfig& config) {
  return sweep_from_report(coverage_study(pop, config));
}

}  // namespace fpboot
