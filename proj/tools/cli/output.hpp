#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "phaseflow/grid.hpp"

namespace phaseflow::cli {

/// RFC-4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_cell(const std::string& s);
/// 17 significant digits; "inf"/"nan" spelled out.
std::string num(double v);

using CsvRow = std::vector<std::string>;

/// Writes the declared outputs of one run into the output directory. Every
/// text file starts with the provenance header; the names of all files
/// written are kept for the result cache.
class OutputSet {
 public:
  explicit OutputSet(const RunConfig& config);

  [[nodiscard]] std::string header_line() const;
  [[nodiscard]] json header_json() const;

  void csv(const std::string& name, const CsvRow& columns, const std::vector<CsvRow>& rows);
  /// Adds a "header" object to `body`.
  void json_file(const std::string& name, json body);
  /// `<stem>.csv` or `<stem>.bin` depending on field-format; returns the file name.
  std::string field(const std::string& stem, const Field1D& f);
  std::string field(const std::string& stem, const Field2D& f);

  [[nodiscard]] const std::vector<std::string>& files() const { return files_; }
  [[nodiscard]] std::filesystem::path path(const std::string& name) const { return dir_ / name; }

 private:
  [[nodiscard]] bool binary_fields() const;

  const RunConfig& config_;
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

/// config.echo.json: the effective config (re-usable as --config input).
void write_echo(const RunConfig& config);

/// Copies a cached result into the output directory. Returns the stored
/// exit code, or -1 on a miss.
int restore_cached(const RunConfig& config);
void store_cached(const RunConfig& config, const std::vector<std::string>& files, int exit_code);

}  // namespace phaseflow::cli
