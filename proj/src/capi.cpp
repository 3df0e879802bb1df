#include "fpboot/fpboot.h"

#include <algorithm>
#include <exception>
#include <string>
#include <vector>

#include "fpboot/error.hpp"
#include "fpboot/estimators.hpp"
#include "fpboot/hash.hpp"
#include "fpboot/intervals.hpp"
#include "fpboot/io.hpp"
#include "fpboot/resampling.hpp"
#include "fpboot/study.hpp"

struct fpb_population {
  fpboot::Population pop;
  std::string hash;
};

struct fpb_config {
  fpboot::RunConfig run;
};

struct fpb_report {
  fpboot::StudyReport report;
};

namespace {

thread_local std::string g_last_error;

fpb_status fail(fpb_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, mapping the core's exception types onto status codes.
template <typename Fn>
fpb_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return FPB_OK;
  } catch (const fpboot::InvalidArgument& e) {
    return fail(FPB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const fpboot::ValidationError& e) {
    return fail(FPB_ERR_VALIDATION, e.what());
  } catch (const fpboot::DegenerateDistribution& e) {
    return fail(FPB_ERR_DEGENERATE, e.what());
  } catch (const fpboot::IoError& e) {
    return fail(FPB_ERR_IO, e.what());
  } catch (const fpboot::ParseError& e) {
    return fail(FPB_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FPB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FPB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FPB_ERR_INTERNAL, "unknown error");
  }
}

#define FPB_REQUIRE(cond, msg) \
  do {                         \
    if (!(cond)) return fail(FPB_ERR_INVALID_ARGUMENT, msg); \
  } while (0)

fpboot::EstimatorKind to_cpp(fpb_estimator e) {
  switch (e) {
    case FPB_MNCS: return fpboot::EstimatorKind::Mncs;
    case FPB_PP_TOP10: return fpboot::EstimatorKind::PpTop10;
  }
  throw fpboot::InvalidArgument("invalid estimator value");
}

fpboot::BootstrapMethod to_cpp(fpb_method m) {
  switch (m) {
    case FPB_STANDARD: return fpboot::BootstrapMethod::Standard;
    case FPB_PPB: return fpboot::BootstrapMethod::Ppb;
    case FPB_MIRROR: return fpboot::BootstrapMethod::MirrorMatch;
  }
  throw fpboot::InvalidArgument("invalid method value");
}

fpboot::CiMethod to_cpp(fpb_ci c) {
  switch (c) {
    case FPB_CI_NORMAL: return fpboot::CiMethod::Normal;
    case FPB_CI_PERCENTILE: return fpboot::CiMethod::Percentile;
    case FPB_CI_BCA: return fpboot::CiMethod::Bca;
    case FPB_CI_BOOT_T: return fpboot::CiMethod::BootstrapT;
  }
  throw fpboot::InvalidArgument("invalid interval value");
}

fpb_estimator to_c(fpboot::EstimatorKind e) {
  return e == fpboot::EstimatorKind::Mncs ? FPB_MNCS : FPB_PP_TOP10;
}

fpb_method to_c(fpboot::BootstrapMethod m) {
  switch (m) {
    case fpboot::BootstrapMethod::Standard: return FPB_STANDARD;
    case fpboot::BootstrapMethod::Ppb: return FPB_PPB;
    case fpboot::BootstrapMethod::MirrorMatch: return FPB_MIRROR;
  }
  return FPB_STANDARD;
}

fpb_ci to_c(fpboot::CiMethod c) {
  switch (c) {
    case fpboot::CiMethod::Normal: return FPB_CI_NORMAL;
    case fpboot::CiMethod::Percentile: return FPB_CI_PERCENTILE;
    case fpboot::CiMethod::Bca: return FPB_CI_BCA;
    case fpboot::CiMethod::BootstrapT: return FPB_CI_BOOT_T;
  }
  return FPB_CI_NORMAL;
}

fpboot::ReportFormat to_cpp(fpb_format f) {
  switch (f) {
    case FPB_FORMAT_CSV: return fpboot::ReportFormat::Csv;
    case FPB_FORMAT_JSON: return fpboot::ReportFormat::Json;
  }
  throw fpboot::InvalidArgument("invalid format value");
}

template <typename C, typename In>
std::vector<C> convert_list(const In* items, std::size_t count) {
  std::vector<C> out;
  for (std::size_t i = 0; i < count; ++i) {
    C v = to_cpp(items[i]);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

// The returned pointer stays valid for the life of the process.
const char* intern(std::string_view s) {
  static const std::string names[] = {"mncs", "pp_top10", "standard", "ppb", "mirror",
                                      "normal", "percentile", "bca", "boot-t"};
  for (const auto& n : names)
    if (n == s) return n.c_str();
  return "?";
}

fpb_population* wrap(fpboot::Population pop) {
  auto* p = new fpb_population{std::move(pop), {}};
  p->hash = fpboot::to_hex(fpboot::fnv1a64(fpboot::population_csv(p->pop)));
  return p;
}

}  // namespace

extern "C" {

const char* fpb_version(void) { return "1.0.0"; }

const char* fpb_last_error(void) { return g_last_error.c_str(); }

const char* fpb_status_name(fpb_status status) {
  switch (status) {
    case FPB_OK: return "ok";
    case FPB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FPB_ERR_VALIDATION: return "validation error";
    case FPB_ERR_DEGENERATE: return "degenerate distribution";
    case FPB_ERR_IO: return "io error";
    case FPB_ERR_PARSE: return "parse error";
    case FPB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

fpb_status fpb_parse_estimator(const char* name, fpb_estimator* out) {
  FPB_REQUIRE(name && out, "null argument");
  return guarded([&] { *out = to_c(fpboot::parse_estimator(name)); });
}

fpb_status fpb_parse_method(const char* name, fpb_method* out) {
  FPB_REQUIRE(name && out, "null argument");
  return guarded([&] { *out = to_c(fpboot::parse_method(name)); });
}

fpb_status fpb_parse_ci(const char* name, fpb_ci* out) {
  FPB_REQUIRE(name && out, "null argument");
  return guarded([&] { *out = to_c(fpboot::parse_ci(name)); });
}

fpb_status fpb_parse_format(const char* name, fpb_format* out) {
  FPB_REQUIRE(name && out, "null argument");
  return guarded([&] {
    *out = fpboot::parse_format(name) == fpboot::ReportFormat::Csv ? FPB_FORMAT_CSV
                                                                   : FPB_FORMAT_JSON;
  });
}

const char* fpb_estimator_name(fpb_estimator e) {
  return e == FPB_MNCS ? intern("mncs") : e == FPB_PP_TOP10 ? intern("pp_top10") : "?";
}

const char* fpb_method_name(fpb_method m) {
  try {
    return intern(fpboot::to_string(to_cpp(m)));
  } catch (...) {
    return "?";
  }
}

const char* fpb_ci_name(fpb_ci c) {
  try {
    return intern(fpboot::to_string(to_cpp(c)));
  } catch (...) {
    return "?";
  }
}

// ---- populations -------------------------------------------------------------

fpb_status fpb_population_load(const char* path, fpb_population** out) {
  FPB_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::string hash;
    auto pop = fpboot::load_population(path, &hash);
    *out = new fpb_population{std::move(pop), std::move(hash)};
  });
}

fpb_status fpb_population_from_records(const double* ncs, const uint8_t* top10, size_t count,
                                       fpb_population** out) {
  FPB_REQUIRE(out, "null argument");
  *out = nullptr;
  FPB_REQUIRE(count == 0 || (ncs && top10), "null record arrays");
  return guarded([&] {
    std::vector<fpboot::PublicationRecord> records(count);
    for (size_t i = 0; i < count; ++i) records[i] = {ncs[i], top10[i] != 0};
    *out = wrap(fpboot::Population(std::move(records)));
  });
}

fpb_status fpb_population_synth(size_t N, double mncs, double pp, double shape, uint64_t seed,
                                fpb_population** out) {
  FPB_REQUIRE(out, "null argument");
  *out = nullptr;
  return guarded([&] {
    fpboot::RngStream rng(seed, fpboot::synth_stream_id());
    *out = wrap(fpboot::synth_population({N, mncs, pp, shape}, rng));
  });
}

fpb_status fpb_population_save(const fpb_population* pop, const char* path) {
  FPB_REQUIRE(pop && path, "null argument");
  return guarded([&] { fpboot::save_population(pop->pop, path); });
}

size_t fpb_population_size(const fpb_population* pop) { return pop ? pop->pop.size() : 0; }

const char* fpb_population_hash(const fpb_population* pop) { return pop ? pop->hash.c_str() : ""; }

fpb_status fpb_population_estimate(const fpb_population* pop, fpb_estimator e, double* out) {
  FPB_REQUIRE(pop && out, "null argument");
  return guarded([&] { *out = fpboot::estimate(to_cpp(e), pop->pop.records()); });
}

void fpb_population_free(fpb_population* pop) { delete pop; }

// ---- single-sample inference ---------------------------------------------------

fpb_status fpb_fpc(size_t n, size_t N, double* one_minus_f, double* bias_adjusted) {
  FPB_REQUIRE(one_minus_f && bias_adjusted, "null argument");
  return guarded([&] {
    const auto f = fpboot::fpc(n, N);
    *one_minus_f = f.one_minus_f;
    *bias_adjusted = f.bias_adjusted;
  });
}

void fpb_estimate_request_init(fpb_estimate_request* req) {
  if (!req) return;
  req->estimator = FPB_MNCS;
  req->method = FPB_STANDARD;
  req->ci = FPB_CI_NORMAL;
  req->B = 1000;
  req->level = 0.95;
  req->seed = 0;
  req->population_size = 0;
}

fpb_status fpb_estimate(const fpb_population* sample, const fpb_estimate_request* req,
                        fpb_estimate_result* out) {
  FPB_REQUIRE(sample && req && out, "null argument");
  return guarded([&] {
    using namespace fpboot;
    const std::size_t n = sample->pop.size();
    const std::size_t N = req->population_size ? req->population_size : n;
    const auto recs = sample->pop.records();
    const Sample s = make_sample(std::vector<PublicationRecord>(recs.begin(), recs.end()), N);
    const auto kind = to_cpp(req->estimator);
    const auto method = to_cpp(req->method);
    const auto ci_type = to_cpp(req->ci);
    const auto values = statistic_values(kind, s.values);

    fpb_estimate_result r{};
    r.n = n;
    r.population_size = N;
    r.estimate = estimate(kind, s.values);
    if (n < 2) throw InvalidArgument("bootstrap inference needs at least 2 records");
    r.se_fpc = se_mean_fpc(sample_variance(values), n, N);

    RngStream rng(req->seed, 0);
    BootstrapOptions opts;
    opts.t_variances = ci_type == CiMethod::BootstrapT;
    const auto reps = run_bootstrap(method, values, N, req->B, rng, opts);
    r.bootstrap_variance = bootstrap_variance(reps);

    ConfidenceInterval ci;
    switch (ci_type) {
      case CiMethod::Normal: ci = ci_normal(r.estimate, r.bootstrap_variance, req->level); break;
      case CiMethod::Percentile: ci = ci_percentile(reps, req->level); break;
      case CiMethod::Bca:
        try {
          ci = ci_bca(reps, r.estimate, jackknife_acceleration(values), req->level);
        } catch (const DegenerateDistribution&) {
          ci = ci_percentile(reps, req->level);
          r.fell_back = 1;
        }
        break;
      case CiMethod::BootstrapT:
        ci = ci_bootstrap_t(reps, r.estimate, analytic_mean_variance(method, values, N), req->level);
        break;
    }
    r.lower = ci.lower;
    r.upper = ci.upper;
    *out = r;
  });
}

// ---- configuration -------------------------------------------------------------

fpb_status fpb_config_load(const char* path, fpb_config** out) {
  FPB_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new fpb_config{fpboot::load_run_config(path)}; });
}

fpb_status fpb_config_new(fpb_config** out) {
  FPB_REQUIRE(out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new fpb_config{}; });
}

void fpb_config_free(fpb_config* cfg) { delete cfg; }

fpb_status fpb_config_set_population_path(fpb_config* cfg, const char* path) {
  FPB_REQUIRE(cfg && path, "null argument");
  return guarded([&] {
    cfg->run.study.population = {};
    cfg->run.study.population.path = path;
  });
}

fpb_status fpb_config_set_synth(fpb_config* cfg, size_t N, double mncs, double pp, double shape) {
  FPB_REQUIRE(cfg, "null argument");
  return guarded([&] {
    cfg->run.study.population = {};
    cfg->run.study.population.synth = fpboot::SynthSpec{N, mncs, pp, shape};
  });
}

fpb_status fpb_config_set_sample_sizes(fpb_config* cfg, const size_t* sizes, size_t count) {
  FPB_REQUIRE(cfg && (sizes || count == 0), "null argument");
  return guarded([&] { cfg->run.study.sample_sizes.assign(sizes, sizes + count); });
}

fpb_status fpb_config_set_B(fpb_config* cfg, size_t B) {
  FPB_REQUIRE(cfg, "null argument");
  if (B < 2) return fail(FPB_ERR_VALIDATION, "B must be >= 2");
  cfg->run.study.B = B;
  return FPB_OK;
}

fpb_status fpb_config_set_reps(fpb_config* cfg, size_t reps) {
  FPB_REQUIRE(cfg, "null argument");
  if (reps < 1) return fail(FPB_ERR_VALIDATION, "reps must be >= 1");
  cfg->run.study.R = reps;
  return FPB_OK;
}

fpb_status fpb_config_set_level(fpb_config* cfg, double level) {
  FPB_REQUIRE(cfg, "null argument");
  if (!(level > 0.0 && level < 1.0)) return fail(FPB_ERR_VALIDATION, "level must lie in (0, 1)");
  cfg->run.study.level = level;
  return FPB_OK;
}

fpb_status fpb_config_set_seed(fpb_config* cfg, uint64_t seed) {
  FPB_REQUIRE(cfg, "null argument");
  cfg->run.study.master_seed = seed;
  return FPB_OK;
}

fpb_status fpb_config_set_threads(fpb_config* cfg, unsigned threads) {
  FPB_REQUIRE(cfg, "null argument");
  cfg->run.study.threads = threads;
  return FPB_OK;
}

fpb_status fpb_config_set_methods(fpb_config* cfg, const fpb_method* methods, size_t count) {
  FPB_REQUIRE(cfg && (methods || count == 0), "null argument");
  return guarded(
      [&] { cfg->run.study.methods = convert_list<fpboot::BootstrapMethod>(methods, count); });
}

fpb_status fpb_config_set_ci_types(fpb_config* cfg, const fpb_ci* cis, size_t count) {
  FPB_REQUIRE(cfg && (cis || count == 0), "null argument");
  return guarded([&] { cfg->run.study.ci_types = convert_list<fpboot::CiMethod>(cis, count); });
}

fpb_status fpb_config_set_estimators(fpb_config* cfg, const fpb_estimator* estimators,
                                     size_t count) {
  FPB_REQUIRE(cfg && (estimators || count == 0), "null argument");
  return guarded([&] {
    cfg->run.study.estimators = convert_list<fpboot::EstimatorKind>(estimators, count);
  });
}

fpb_status fpb_config_set_ppb_fixed_completion(fpb_config* cfg, int fixed) {
  FPB_REQUIRE(cfg, "null argument");
  cfg->run.study.ppb_completion =
      fixed ? fpboot::PpbCompletion::Fixed : fpboot::PpbCompletion::PerReplicate;
  return FPB_OK;
}

int fpb_config_has_population(const fpb_config* cfg) {
  return cfg && (!cfg->run.study.population.path.empty() || cfg->run.study.population.synth) ? 1 : 0;
}

size_t fpb_config_sample_size_count(const fpb_config* cfg) {
  return cfg ? cfg->run.study.sample_sizes.size() : 0;
}

size_t fpb_config_method_count(const fpb_config* cfg) { return cfg ? cfg->run.study.methods.size() : 0; }

size_t fpb_config_ci_count(const fpb_config* cfg) { return cfg ? cfg->run.study.ci_types.size() : 0; }

size_t fpb_config_estimator_count(const fpb_config* cfg) {
  return cfg ? cfg->run.study.estimators.size() : 0;
}

const char* fpb_config_out(const fpb_config* cfg) {
  return cfg && cfg->run.out ? cfg->run.out->c_str() : nullptr;
}

int fpb_config_format(const fpb_config* cfg, fpb_format* out) {
  if (!cfg || !out || !cfg->run.format) return 1;
  *out = *cfg->run.format == fpboot::ReportFormat::Csv ? FPB_FORMAT_CSV : FPB_FORMAT_JSON;
  return 0;
}

// ---- studies and reports -----------------------------------------------------------

fpb_status fpb_study_run(const fpb_config* cfg, fpb_report** out) {
  FPB_REQUIRE(cfg && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    fpboot::StudyConfig config = cfg->run.study;
    const fpboot::Population pop = fpboot::resolve_population(config);
    *out = new fpb_report{fpboot::coverage_study(pop, config)};
  });
}

size_t fpb_report_cell_count(const fpb_report* report) {
  return report ? report->report.cells.size() : 0;
}

fpb_status fpb_report_cell(const fpb_report* report, size_t index, fpb_cell* out) {
  FPB_REQUIRE(report && out, "null argument");
  FPB_REQUIRE(index < report->report.cells.size(), "cell index out of range");
  const auto& c = report->report.cells[index];
  *out = {c.n,          to_c(c.method),   to_c(c.ci_type), to_c(c.estimator), c.coverage,
          c.avg_length, c.avg_variance,   c.covered,       c.R_effective,     c.fallbacks};
  return FPB_OK;
}

fpb_status fpb_report_true_value(const fpb_report* report, fpb_estimator e, double* out) {
  FPB_REQUIRE(report && out, "null argument");
  return guarded([&] {
    const auto kind = to_cpp(e);
    for (const auto& tv : report->report.true_values)
      if (tv.estimator == kind) {
        *out = tv.value;
        return;
      }
    throw fpboot::InvalidArgument("estimator not part of this report");
  });
}

fpb_status fpb_report_write(const fpb_report* report, fpb_format format, const char* path) {
  FPB_REQUIRE(report && path, "null argument");
  return guarded([&] { fpboot::emit_report(report->report, to_cpp(format), path); });
}

fpb_status fpb_report_write_sweep(const fpb_report* report, const char* path) {
  FPB_REQUIRE(report && path, "null argument");
  return guarded([&] {
    fpboot::write_text_file(path, fpboot::sweep_csv(fpboot::sweep_from_report(report->report)));
  });
}

fpb_status fpb_report_load_json(const char* path, fpb_report** out) {
  FPB_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new fpb_report{fpboot::parse_report_json(fpboot::read_text_file(path))};
  });
}

void fpb_report_free(fpb_report* report) { delete report; }

}  // extern "C"
