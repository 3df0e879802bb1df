#include "fpboot/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fpboot/error.hpp"
#include "fpboot/hash.hpp"

namespace fpboot {

using nlohmann::json;

std::string to_hex(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, value >>= 4) out[static_cast<std::size_t>(i)] = digits[value & 0xf];
  return out;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  // A final newline produces one empty tail entry.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string fmt_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

Population parse_population_csv(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "ncs,top10")
    throw ParseError("population header must be exactly 'ncs,top10'", 1);

  std::vector<PublicationRecord> records;
  records.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 2) throw ParseError("expected 2 fields 'ncs,top10'", line_no);

    PublicationRecord rec;
    if (!parse_double(fields[0], rec.ncs))
      throw ParseError("ncs is not a number: '" + std::string(fields[0]) + "'", line_no);
    if (!std::isfinite(rec.ncs))
      throw ValidationError("line " + std::to_string(line_no) + ": ncs must be finite");
    if (rec.ncs < 0.0)
      throw ValidationError("line " + std::to_string(line_no) + ": ncs must be >= 0");

    const auto flag = trim(fields[1]);
    if (flag == "1" || flag == "true") rec.top10 = true;
    else if (flag == "0" || flag == "false") rec.top10 = false;
    else throw ParseError("top10 must be 0, 1, true or false: '" + std::string(flag) + "'", line_no);
    records.push_back(rec);
  }
  if (records.empty()) throw ValidationError("population file has no records");
  return Population(std::move(records));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("error writing '" + path + "'");
}

Population load_population(const std::string& path, std::string* content_hash) {
  const std::string text = read_text_file(path);
  if (content_hash) *content_hash = to_hex(fnv1a64(text));
  return parse_population_csv(text);
}

std::string population_csv(const Population& pop) {
  std::string out = "ncs,top10\n";
  for (const auto& r : pop.records()) {
    out += fmt_g(r.ncs, 17);
    out += r.top10 ? ",1\n" : ",0\n";
  }
  return out;
}

void save_population(const Population& pop, const std::string& path) {
  write_text_file(path, population_csv(pop));
}

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw InvalidArgument("unknown report format '" + std::string(name) + "' (expected csv|json)");
}

// ---- run config -------------------------------------------------------------

namespace {

std::string_view to_string(PpbCompletion c) {
  return c == PpbCompletion::Fixed ? "fixed" : "per-replicate";
}

PpbCompletion parse_completion(std::string_view s) {
  if (s == "per-replicate" || s == "per_replicate") return PpbCompletion::PerReplicate;
  if (s == "fixed") return PpbCompletion::Fixed;
  throw ValidationError("ppb_completion must be 'per-replicate' or 'fixed'");
}

std::string_view to_string(BcaTies t) { return t == BcaTies::Half ? "half" : "strict"; }

BcaTies parse_ties(std::string_view s) {
  if (s == "strict") return BcaTies::Strict;
  if (s == "half") return BcaTies::Half;
  throw ValidationError("bca_ties must be 'strict' or 'half'");
}

template <typename T, typename Parse>
std::vector<T> parse_name_list(const json& j, const char* key, Parse parse) {
  std::vector<T> out;
  auto add = [&](const json& item) {
    if (!item.is_string()) throw ValidationError(std::string(key) + ": entries must be strings");
    T value = parse(item.get<std::string>());
    if (std::find(out.begin(), out.end(), value) == out.end()) out.push_back(value);
  };
  if (j.is_array()) for (const auto& item : j) add(item);
  else add(j);
  return out;
}

template <typename T>
T get_number(const json& j, const char* key) {
  if (!j.is_number()) throw ValidationError(std::string(key) + " must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
      throw ValidationError(std::string(key) + " must be a nonnegative integer");
  }
  return j.get<T>();
}

SynthSpec parse_synth(const json& j, std::optional<std::uint64_t>& seed) {
  if (!j.is_object()) throw ValidationError("synth must be an object");
  static const std::set<std::string> known = {"N", "mncs", "pp", "shape", "seed"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ValidationError("unknown synth key '" + key + "'");
  SynthSpec spec;
  if (j.contains("N")) spec.N = get_number<std::size_t>(j["N"], "synth.N");
  if (j.contains("mncs")) spec.target_mncs = get_number<double>(j["mncs"], "synth.mncs");
  if (j.contains("pp")) spec.target_pp = get_number<double>(j["pp"], "synth.pp");
  if (j.contains("shape")) spec.shape = get_number<double>(j["shape"], "synth.shape");
  if (j.contains("seed")) seed = get_number<std::uint64_t>(j["seed"], "synth.seed");
  return spec;
}

json synth_to_json(const SynthSpec& s) {
  return {{"N", s.N}, {"mncs", s.target_mncs}, {"pp", s.target_pp}, {"shape", s.shape}};
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");

  static const std::set<std::string> known = {
      "population", "synth", "sample_sizes", "B", "reps", "methods", "ci_types", "estimators",
      "level", "seed", "threads", "ppb_completion", "bca_ties", "out", "format"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ValidationError("unknown config key '" + key + "'");

  RunConfig rc;
  StudyConfig& c = rc.study;
  if (j.contains("population") && j.contains("synth"))
    throw ValidationError("config may set 'population' or 'synth', not both");
  if (j.contains("population")) {
    if (!j["population"].is_string()) throw ValidationError("population must be a path string");
    std::filesystem::path p = j["population"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    c.population.path = p.string();
  }
  if (j.contains("synth")) c.population.synth = parse_synth(j["synth"], c.population.synth_seed);

  if (j.contains("sample_sizes")) {
    const json& s = j["sample_sizes"];
    if (s.is_array()) {
      for (const auto& v : s) c.sample_sizes.push_back(get_number<std::size_t>(v, "sample_sizes"));
    } else {
      c.sample_sizes.push_back(get_number<std::size_t>(s, "sample_sizes"));
    }
  }
  if (j.contains("B")) c.B = get_number<std::size_t>(j["B"], "B");
  if (j.contains("reps")) c.R = get_number<std::size_t>(j["reps"], "reps");
  if (j.contains("methods"))
    c.methods = parse_name_list<BootstrapMethod>(j["methods"], "methods", parse_method);
  if (j.contains("ci_types"))
    c.ci_types = parse_name_list<CiMethod>(j["ci_types"], "ci_types", parse_ci);
  if (j.contains("estimators"))
    c.estimators = parse_name_list<EstimatorKind>(j["estimators"], "estimators", parse_estimator);
  if (j.contains("level")) c.level = get_number<double>(j["level"], "level");
  if (j.contains("seed")) c.master_seed = get_number<std::uint64_t>(j["seed"], "seed");
  if (j.contains("threads")) c.threads = get_number<unsigned>(j["threads"], "threads");
  if (j.contains("ppb_completion")) {
    if (!j["ppb_completion"].is_string()) throw ValidationError("ppb_completion must be a string");
    c.ppb_completion = parse_completion(j["ppb_completion"].get<std::string>());
  }
  if (j.contains("bca_ties")) {
    if (!j["bca_ties"].is_string()) throw ValidationError("bca_ties must be a string");
    c.bca_ties = parse_ties(j["bca_ties"].get<std::string>());
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ValidationError("out must be a path string");
    rc.out = j["out"].get<std::string>();
  }
  if (j.contains("format")) {
    if (!j["format"].is_string()) throw ValidationError("format must be a string");
    rc.format = parse_format(j["format"].get<std::string>());
  }
  if (!(c.level > 0.0 && c.level < 1.0)) throw ValidationError("level must lie in (0, 1)");
  if (c.B < 2) throw ValidationError("B must be >= 2");
  if (c.R < 1) throw ValidationError("reps must be >= 1");
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  const std::string text = read_text_file(path);
  return parse_run_config(text, std::filesystem::path(path).parent_path().string());
}

Population resolve_population(StudyConfig& config) {
  PopulationSource& src = config.population;
  if (src.synth) {
    const std::uint64_t seed = src.synth_seed.value_or(config.master_seed);
    src.synth_seed = seed;
    RngStream rng(seed, synth_stream_id());
    Population pop = synth_population(*src.synth, rng);
    src.content_hash = to_hex(fnv1a64(population_csv(pop)));
    src.N = pop.size();
    return pop;
  }
  if (src.path.empty()) throw ValidationError("no population given (set a path or a synth spec)");
  Population pop = load_population(src.path, &src.content_hash);
  src.N = pop.size();
  return pop;
}

// ---- reports ----------------------------------------------------------------

std::string report_csv(const StudyReport& report) {
  std::string out = "n,method,ci_type,estimator,coverage,avg_length,avg_variance,R\n";
  for (const auto& c : report.cells) {
    out += std::to_string(c.n);
    out += ',';
    out += to_string(c.method);
    out += ',';
    out += to_string(c.ci_type);
    out += ',';
    out += to_string(c.estimator);
    out += ',' + fmt_g(c.coverage, 12);
    out += ',' + fmt_g(c.avg_length, 12);
    out += ',' + fmt_g(c.avg_variance, 12);
    out += ',' + std::to_string(c.R_effective);
    out += '\n';
  }
  return out;
}

std::vector<CellReport> parse_report_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "n,method,ci_type,estimator,coverage,avg_length,avg_variance,R")
    throw ParseError("unexpected report header", 1);
  std::vector<CellReport> cells;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    if (f.size() != 8) throw ParseError("expected 8 fields", i + 1);
    CellReport c;
    c.method = parse_method(f[1]);
    c.ci_type = parse_ci(f[2]);
    c.estimator = parse_estimator(f[3]);
    if (!parse_int(f[0], c.n) || !parse_double(f[4], c.coverage) ||
        !parse_double(f[5], c.avg_length) || !parse_double(f[6], c.avg_variance) ||
        !parse_int(f[7], c.R_effective))
      throw ParseError("malformed report row", i + 1);
    c.covered = static_cast<std::size_t>(std::llround(c.coverage * static_cast<double>(c.R_effective)));
    cells.push_back(c);
  }
  return cells;
}

namespace {

json config_to_json(const StudyConfig& c) {
  json pop = json::object();
  pop["N"] = c.population.N;
  pop["hash"] = c.population.content_hash;
  if (!c.population.path.empty()) pop["path"] = c.population.path;
  if (c.population.synth) pop["synth"] = synth_to_json(*c.population.synth);
  if (c.population.synth_seed) pop["synth_seed"] = *c.population.synth_seed;

  json j;
  j["population"] = pop;
  j["sample_sizes"] = c.sample_sizes;
  j["B"] = c.B;
  j["reps"] = c.R;
  j["methods"] = json::array();
  for (auto m : c.methods) j["methods"].push_back(std::string(to_string(m)));
  j["ci_types"] = json::array();
  for (auto t : c.ci_types) j["ci_types"].push_back(std::string(to_string(t)));
  j["estimators"] = json::array();
  for (auto e : c.estimators) j["estimators"].push_back(std::string(to_string(e)));
  j["level"] = c.level;
  j["seed"] = c.master_seed;
  j["ppb_completion"] = std::string(to_string(c.ppb_completion));
  j["bca_ties"] = std::string(to_string(c.bca_ties));
  return j;
}

StudyConfig config_from_json(const json& j) {
  StudyConfig c;
  const json& pop = j.at("population");
  c.population.N = pop.at("N").get<std::size_t>();
  c.population.content_hash = pop.at("hash").get<std::string>();
  if (pop.contains("path")) c.population.path = pop["path"].get<std::string>();
  if (pop.contains("synth")) {
    std::optional<std::uint64_t> unused;
    c.population.synth = parse_synth(pop["synth"], unused);
  }
  if (pop.contains("synth_seed")) c.population.synth_seed = pop["synth_seed"].get<std::uint64_t>();
  c.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
  c.B = j.at("B").get<std::size_t>();
  c.R = j.at("reps").get<std::size_t>();
  for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
  for (const auto& t : j.at("ci_types")) c.ci_types.push_back(parse_ci(t.get<std::string>()));
  for (const auto& e : j.at("estimators")) c.estimators.push_back(parse_estimator(e.get<std::string>()));
  c.level = j.at("level").get<double>();
  c.master_seed = j.at("seed").get<std::uint64_t>();
  c.ppb_completion = parse_completion(j.at("ppb_completion").get<std::string>());
  c.bca_ties = parse_ties(j.at("bca_ties").get<std::string>());
  return c;
}

}  // namespace

std::string report_json(const StudyReport& report) {
  json j;
  j["config"] = config_to_json(report.config);
  j["true_values"] = json::object();
  for (const auto& tv : report.true_values) j["true_values"][std::string(to_string(tv.estimator))] = tv.value;
  j["cells"] = json::array();
  for (const auto& c : report.cells) {
    j["cells"].push_back({{"n", c.n},
                          {"method", std::string(to_string(c.method))},
                          {"ci_type", std::string(to_string(c.ci_type))},
                          {"estimator", std::string(to_string(c.estimator))},
                          {"coverage", c.coverage},
                          {"avg_length", c.avg_length},
                          {"avg_variance", c.avg_variance},
                          {"covered", c.covered},
                          {"R", c.R_effective},
                          {"fallbacks", c.fallbacks}});
  }
  return j.dump(2) + "\n";
}

StudyReport parse_report_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    StudyReport r;
    r.config = config_from_json(j.at("config"));
    // Keep true values in the configured estimator order.
    for (auto e : r.config.estimators) {
      const auto key = std::string(to_string(e));
      if (j.at("true_values").contains(key))
        r.true_values.push_back({e, j["true_values"][key].get<double>()});
    }
    for (const auto& jc : j.at("cells")) {
      CellReport c;
      c.n = jc.at("n").get<std::size_t>();
      c.method = parse_method(jc.at("method").get<std::string>());
      c.ci_type = parse_ci(jc.at("ci_type").get<std::string>());
      c.estimator = parse_estimator(jc.at("estimator").get<std::string>());
      c.coverage = jc.at("coverage").get<double>();
      c.avg_length = jc.at("avg_length").get<double>();
      c.avg_variance = jc.at("avg_variance").get<double>();
      c.covered = jc.at("covered").get<std::size_t>();
      c.R_effective = jc.at("R").get<std::size_t>();
      c.fallbacks = jc.value("fallbacks", std::size_t{0});
      r.cells.push_back(c);
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report JSON: ") + e.what());
  }
}

void emit_report(const StudyReport& report, ReportFormat format, const std::string& path) {
  write_text_file(path, format == ReportFormat::Csv ? report_csv(report) : report_json(report));
}

std::string sweep_csv(const SweepTable& table) {
  std::vector<std::string> columns;
  std::map<std::string, std::map<std::size_t, double>> values;
  for (const auto& row : table.rows) {
    std::string col = std::string(to_string(row.method)) + "/" + std::string(to_string(row.ci_type)) +
                      "/" + std::string(to_string(row.estimator));
    if (!values.count(col)) columns.push_back(col);
    values[col][row.n] = row.avg_length;
  }
  std::string out = "n";
  for (const auto& col : columns) out += "," + col;
  out += '\n';
  for (std::size_t n : table.sample_sizes) {
    out += std::to_string(n);
    for (const auto& col : columns) {
      auto it = values[col].find(n);
      out += ',';
      if (it != values[col].end()) out += fmt_g(it->second, 12);
    }
    out += '\n';
  }
  return out;
}

}  // namespace fpboot
