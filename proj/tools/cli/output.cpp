#include "output.hpp"

#include <cmath>
#include <fstream>
#include <system_error>

#include "phaseflow/errors.hpp"
#include "phaseflow/field_io.hpp"
#include "phaseflow/version.hpp"

namespace phaseflow::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_text(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  return out;
}

void copy_into(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
  if (ec) throw IoError("cannot copy " + from.string() + " to " + to.string() + ": " + ec.message());
}

}  // namespace

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

OutputSet::OutputSet(const RunConfig& config) : config_(config), dir_(config.out_dir()) { ensure_dir(dir_); }

std::string OutputSet::header_line() const {
  return std::string("phaseflow ") + kVersion + " seed=" + std::to_string(config_.seed()) +
         " config=" + config_.hash;
}

json OutputSet::header_json() const {
  return json{{"version", kVersion}, {"seed", config_.seed()}, {"config_hash", config_.hash}};
}

bool OutputSet::binary_fields() const {
  return config_.values.contains("field-format") && config_.text("field-format") == "binary";
}

void OutputSet::csv(const std::string& name, const CsvRow& columns, const std::vector<CsvRow>& rows) {
  const auto p = path(name);
  auto out = open_text(p);
  out << "# " << header_line() << "\r\n";
  auto line = [&](const CsvRow& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_cell(r[i]);
    out << "\r\n";
  };
  line(columns);
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw std::logic_error(name + ": row width does not match the header");
    line(r);
  }
  if (!out) throw IoError("write failed for " + p.string());
  files_.push_back(name);
}

void OutputSet::json_file(const std::string& name, json body) {
  const auto p = path(name);
  body["header"] = header_json();
  auto out = open_text(p);
  out << body.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + p.string());
  files_.push_back(name);
}

std::string OutputSet::field(const std::string& stem, const Field1D& f) {
  const auto name = stem + (binary_fields() ? ".bin" : ".csv");
  if (binary_fields()) write_field_binary(path(name), f);
  else write_field_csv(path(name), f, header_line());
  files_.push_back(name);
  return name;
}

std::string OutputSet::field(const std::string& stem, const Field2D& f) {
  const auto name = stem + (binary_fields() ? ".bin" : ".csv");
  if (binary_fields()) write_field_binary(path(name), f);
  else write_field_csv(path(name), f, header_line());
  files_.push_back(name);
  return name;
}

void write_echo(const RunConfig& config) {
  ensure_dir(config.out_dir());
  json echo = config.values;
  echo["subcommand"] = config.command;
  echo["header"] = json{{"version", kVersion}, {"seed", config.seed()}, {"config_hash", config.hash}};
  const auto p = config.out_dir() / "config.echo.json";
  auto out = open_text(p);
  out << echo.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + p.string());
}

int restore_cached(const RunConfig& config) {
  if (config.text("cache") != "reuse") return -1;
  const auto entry = config.cache_dir() / config.hash;
  std::ifstream manifest(entry / "manifest.json");
  if (!manifest) return -1;
  json m;
  try {
    m = json::parse(manifest);
  } catch (const json::parse_error&) {
    return -1;  // torn entry: recompute and overwrite
  }
  if (!m.contains("files") || !m.contains("exit_code")) return -1;
  for (const auto& f : m["files"])
    if (!fs::exists(entry / f.get<std::string>())) return -1;
  ensure_dir(config.out_dir());
  for (const auto& f : m["files"]) {
    const auto name = f.get<std::string>();
    copy_into(entry / name, config.out_dir() / name);
  }
  return m["exit_code"].get<int>();
}

void store_cached(const RunConfig& config, const std::vector<std::string>& files, int exit_code) {
  const auto entry = config.cache_dir() / config.hash;
  ensure_dir(entry);
  for (const auto& name : files) copy_into(config.out_dir() / name, entry / name);
  // manifest last, so a partial entry is never taken for a hit
  auto out = open_text(entry / "manifest.json");
  out << json{{"files", files}, {"exit_code", exit_code}, {"version", kVersion}}.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + (entry / "manifest.json").string());
}

}  // namespace phaseflow::cli
