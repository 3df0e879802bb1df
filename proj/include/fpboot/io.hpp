#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpboot/sampling.hpp"
#include "fpboot/study.hpp"

namespace fpboot {

// Population CSV: header `ncs,top10`, then one `<ncs>,<0|1|true|false>` row
// per record. LF newlines (a trailing CR is tolerated).
Population parse_population_csv(std::string_view text);
Population load_population(const std::string& path, std::string* content_hash = nullptr);

// Writes ncs with 17 significant digits so a reload is bit-exact.
std::string population_csv(const Population& pop);
void save_population(const Population& pop, const std::string& path);

std::string read_text_file(const std::string& path);
// "-" writes to stdout.
void write_text_file(const std::string& path, std::string_view content);

enum class ReportFormat { Csv, Json };
ReportFormat parse_format(std::string_view name);

// Run-config file: a JSON object mirroring StudyConfig plus output settings.
// Unknown keys are rejected.
struct RunConfig {
  StudyConfig study;
  std::optional<std::string> out;
  std::optional<ReportFormat> format;
};

// base_dir resolves a relative "population" path.
RunConfig parse_run_config(std::string_view json_text, const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);

// Loads or generates the population a config points at and records its hash and N.
Population resolve_population(StudyConfig& config);

std::string report_csv(const StudyReport& report);
std::string report_json(const StudyReport& report);
StudyReport parse_report_json(std::string_view text);
std::vector<CellReport> parse_report_csv(std::string_view text);
void emit_report(const StudyReport& report, ReportFormat format, const std::string& path);

// Wide table: one row per n, one column per (method, ci type, estimator) average length.
std::string sweep_csv(const SweepTable& table);

}  // namespace fpboot
