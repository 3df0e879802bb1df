// fpboot command-line front end. Talks to the library only through fpboot.h.
//
//   fpboot synth    --n 6224 --mncs 1.275 --pp 13.7 --seed 42 --out pop.csv
//   fpboot estimate --population sample.csv --estimator mncs --method ppb --N 6224
//   fpboot simulate --config study.json --out report.csv
//   fpboot sweep    --population pop.csv --sizes 100,500,1000,2000,4000,6224
//
// Exit codes: 0 success, 1 usage or validation error, 2 io or parse error.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpboot/fpboot.h"

namespace {

int exit_code(fpb_status status) {
  switch (status) {
    case FPB_OK: return 0;
    case FPB_ERR_IO:
    case FPB_ERR_PARSE: return 2;
    default: return 1;
  }
}

struct Failure {
  fpb_status status;
};

void check(fpb_status status) {
  if (status == FPB_OK) return;
  std::fprintf(stderr, "fpboot: %s: %s\n", fpb_status_name(status), fpb_last_error());
  throw Failure{status};
}

// Owning wrappers over the C handles.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using PopulationHandle = Handle<fpb_population, fpb_population_free>;
using ConfigHandle = Handle<fpb_config, fpb_config_free>;
using ReportHandle = Handle<fpb_report, fpb_report_free>;

template <typename E>
std::vector<E> parse_names(const std::vector<std::string>& names, fpb_status (*parse)(const char*, E*)) {
  std::vector<E> out;
  for (const auto& name : names) {
    E value;
    check(parse(name.c_str(), &value));
    out.push_back(value);
  }
  return out;
}

// Flags shared by simulate and sweep; each overrides the config file value.
struct StudyFlags {
  std::string config;
  std::string population;
  std::vector<std::size_t> sizes;
  std::size_t B = 0;
  std::size_t reps = 0;
  std::vector<std::string> methods;
  std::vector<std::string> cis;
  std::vector<std::string> estimators;
  double level = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 0;
  bool threads_set = false;
  std::string out;
  std::string format;
  bool fixed_completion = false;
};

void add_study_flags(CLI::App* cmd, StudyFlags& f, const char* sizes_flag) {
  cmd->add_option("--config", f.config, "JSON run-config file");
  cmd->add_option("--population", f.population, "population CSV (ncs,top10)");
  cmd->add_option(sizes_flag, f.sizes, "sample sizes (repeatable or comma separated)")->delimiter(',');
  cmd->add_option("--B", f.B, "bootstrap replicates per sample (default 1000)");
  cmd->add_option("--reps", f.reps, "repetitions per cell (default 1000)");
  cmd->add_option("--method", f.methods, "standard|ppb|mirror (repeatable)")->delimiter(',');
  cmd->add_option("--ci", f.cis, "normal|percentile|bca|boot-t (repeatable)")->delimiter(',');
  cmd->add_option("--estimator", f.estimators, "mncs|pp_top10 (repeatable)")->delimiter(',');
  cmd->add_option("--level", f.level, "confidence level (default 0.95)");
  cmd->add_option_function<std::uint64_t>("--seed", [&f](const std::uint64_t& v) {
    f.seed = v;
    f.seed_set = true;
  }, "master seed");
  cmd->add_option_function<unsigned>("--threads", [&f](const unsigned& v) {
    f.threads = v;
    f.threads_set = true;
  }, "worker threads, 0 = all cores (never affects results)");
  cmd->add_option("--out", f.out, "output path, - for stdout");
  cmd->add_option("--format", f.format, "csv|json (default csv)");
  cmd->add_flag("--fixed-completion", f.fixed_completion,
                "complete the pseudo-population once instead of per replicate");
}

struct StudyDefaults {
  std::vector<fpb_method> methods;
  std::vector<fpb_ci> cis;
  std::vector<fpb_estimator> estimators;
};

void build_config(ConfigHandle& cfg, const StudyFlags& f, const StudyDefaults& defaults) {
  if (!f.config.empty()) check(fpb_config_load(f.config.c_str(), cfg.out()));
  else check(fpb_config_new(cfg.out()));
  fpb_config* c = cfg.get();

  if (!f.population.empty()) check(fpb_config_set_population_path(c, f.population.c_str()));
  if (!fpb_config_has_population(c)) {
    std::fprintf(stderr, "fpboot: no population given (--population or a config file)\n");
    throw Failure{FPB_ERR_VALIDATION};
  }
  if (!f.sizes.empty()) check(fpb_config_set_sample_sizes(c, f.sizes.data(), f.sizes.size()));
  if (fpb_config_sample_size_count(c) == 0) {
    std::fprintf(stderr, "fpboot: no sample sizes given\n");
    throw Failure{FPB_ERR_VALIDATION};
  }
  if (f.B) check(fpb_config_set_B(c, f.B));
  if (f.reps) check(fpb_config_set_reps(c, f.reps));
  if (f.level != 0.0) check(fpb_config_set_level(c, f.level));
  if (f.seed_set) check(fpb_config_set_seed(c, f.seed));
  if (f.threads_set) check(fpb_config_set_threads(c, f.threads));
  if (f.fixed_completion) check(fpb_config_set_ppb_fixed_completion(c, 1));

  if (!f.methods.empty()) {
    auto m = parse_names(f.methods, fpb_parse_method);
    check(fpb_config_set_methods(c, m.data(), m.size()));
  } else if (fpb_config_method_count(c) == 0) {
    check(fpb_config_set_methods(c, defaults.methods.data(), defaults.methods.size()));
  }
  if (!f.cis.empty()) {
    auto ci = parse_names(f.cis, fpb_parse_ci);
    check(fpb_config_set_ci_types(c, ci.data(), ci.size()));
  } else if (fpb_config_ci_count(c) == 0 && !defaults.cis.empty()) {
    check(fpb_config_set_ci_types(c, defaults.cis.data(), defaults.cis.size()));
  }
  if (!f.estimators.empty()) {
    auto e = parse_names(f.estimators, fpb_parse_estimator);
    check(fpb_config_set_estimators(c, e.data(), e.size()));
  } else if (fpb_config_estimator_count(c) == 0) {
    check(fpb_config_set_estimators(c, defaults.estimators.data(), defaults.estimators.size()));
  }
}

std::string output_path(const StudyFlags& f, const fpb_config* cfg) {
  if (!f.out.empty()) return f.out;
  if (const char* out = fpb_config_out(cfg)) return out;
  return "-";
}

fpb_format output_format(const StudyFlags& f, const fpb_config* cfg) {
  fpb_format fmt = FPB_FORMAT_CSV;
  if (!f.format.empty()) check(fpb_parse_format(f.format.c_str(), &fmt));
  else fpb_config_format(cfg, &fmt);
  return fmt;
}

int run_simulate(const StudyFlags& f) {
  ConfigHandle cfg;
  build_config(cfg, f, {{FPB_STANDARD, FPB_PPB, FPB_MIRROR}, {}, {FPB_MNCS, FPB_PP_TOP10}});
  ReportHandle report;
  check(fpb_study_run(cfg.get(), report.out()));
  check(fpb_report_write(report.get(), output_format(f, cfg.get()), output_path(f, cfg.get()).c_str()));
  return 0;
}

int run_sweep(const StudyFlags& f) {
  ConfigHandle cfg;
  build_config(cfg, f,
               {{FPB_STANDARD, FPB_PPB, FPB_MIRROR}, {FPB_CI_NORMAL, FPB_CI_PERCENTILE}, {FPB_MNCS}});
  ReportHandle report;
  check(fpb_study_run(cfg.get(), report.out()));
  const std::string path = output_path(f, cfg.get());
  if (output_format(f, cfg.get()) == FPB_FORMAT_JSON)
    check(fpb_report_write(report.get(), FPB_FORMAT_JSON, path.c_str()));
  else
    check(fpb_report_write_sweep(report.get(), path.c_str()));
  return 0;
}

struct EstimateFlags {
  std::string population;
  std::string estimator = "mncs";
  std::string method = "standard";
  std::string ci = "normal";
  std::size_t B = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  std::size_t population_size = 0;
};

int run_estimate(const EstimateFlags& f) {
  PopulationHandle sample;
  check(fpb_population_load(f.population.c_str(), sample.out()));

  fpb_estimate_request req;
  fpb_estimate_request_init(&req);
  check(fpb_parse_estimator(f.estimator.c_str(), &req.estimator));
  check(fpb_parse_method(f.method.c_str(), &req.method));
  check(fpb_parse_ci(f.ci.c_str(), &req.ci));
  req.B = f.B;
  req.level = f.level;
  req.seed = f.seed;
  req.population_size = f.population_size;

  fpb_estimate_result r;
  check(fpb_estimate(sample.get(), &req, &r));
  std::printf("%s %.12g\n", fpb_estimator_name(req.estimator), r.estimate);
  std::printf("n %zu\n", r.n);
  std::printf("N %zu\n", r.population_size);
  std::printf("method %s\n", fpb_method_name(req.method));
  std::printf("bootstrap_variance %.12g\n", r.bootstrap_variance);
  std::printf("se_fpc %.12g\n", r.se_fpc);
  std::printf("ci %s%s %.12g %.12g %.12g\n", fpb_ci_name(req.ci), r.fell_back ? "(percentile fallback)" : "",
              f.level, r.lower, r.upper);
  return 0;
}

struct SynthFlags {
  std::size_t N = 6224;
  double mncs = 1.275;
  double pp = 13.7;
  double shape = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_synth(const SynthFlags& f) {
  PopulationHandle pop;
  check(fpb_population_synth(f.N, f.mncs, f.pp, f.shape, f.seed, pop.out()));
  check(fpb_population_save(pop.get(), f.out.c_str()));
  std::fprintf(stderr, "wrote %zu records to %s (hash %s)\n", fpb_population_size(pop.get()),
               f.out.c_str(), fpb_population_hash(pop.get()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bootstrap confidence intervals for samples from finite populations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fpb_version());

  EstimateFlags est;
  auto* estimate = app.add_subcommand("estimate", "point estimate and one bootstrap interval for a sample file");
  estimate->add_option("--population", est.population, "sample CSV (ncs,top10)")->required();
  estimate->add_option("--estimator", est.estimator, "mncs|pp_top10");
  estimate->add_option("--method", est.method, "standard|ppb|mirror");
  estimate->add_option("--ci", est.ci, "normal|percentile|bca|boot-t");
  estimate->add_option("--B", est.B, "bootstrap replicates");
  estimate->add_option("--level", est.level, "confidence level");
  estimate->add_option("--seed", est.seed, "seed");
  estimate->add_option("--N,--population-size", est.population_size,
                       "size of the population the sample came from (default: the sample is the population)");

  StudyFlags sim;
  auto* simulate = app.add_subcommand("simulate", "coverage study over repeated samples");
  add_study_flags(simulate, sim, "--n");

  StudyFlags sw;
  auto* sweep = app.add_subcommand("sweep", "average interval length against sample size");
  add_study_flags(sweep, sw, "--sizes,--n");

  SynthFlags syn;
  auto* synth = app.add_subcommand("synth", "write a synthetic log-normal population");
  synth->add_option("--n,--N", syn.N, "population size");
  synth->add_option("--mncs", syn.mncs, "population MNCS");
  synth->add_option("--pp", syn.pp, "population PP(top 10%), percent");
  synth->add_option("--shape", syn.shape, "log-normal shape");
  synth->add_option("--seed", syn.seed, "seed");
  synth->add_option("--out", syn.out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*estimate) return run_estimate(est);
    if (*simulate) return run_simulate(sim);
    if (*sweep) return run_sweep(sw);
    if (*synth) return run_synth(syn);
  } catch (const Failure& f) {
    return exit_code(f.status);
  }
  return 1;
}
