#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace phaseflow::cli {

using json = nlohmann::json;

/// Malformed command line or config file; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KeyKind { Int, Real, Text, Flag, RealList, TextList };

struct KeyInfo {
  std::string name;
  KeyKind kind;
  json fallback;                      ///< default value (already typed)
  std::vector<std::string> commands;  ///< empty = every subcommand
  std::string help;
  bool hashed = true;                 ///< part of the cache key
};

const std::vector<std::string>& subcommands();
const std::vector<KeyInfo>& registry();
/// Keys accepted by `command`, in registry order.
std::vector<const KeyInfo*> keys_for(const std::string& command);

struct RunConfig {
  std::string command;
  json values;  ///< effective config, one typed entry per accepted key
  unsigned threads = 1;
  std::string hash;

  [[nodiscard]] long long integer(const std::string& key) const;
  [[nodiscard]] double real(const std::string& key) const;
  [[nodiscard]] std::string text(const std::string& key) const;
  [[nodiscard]] bool flag(const std::string& key) const;
  [[nodiscard]] std::vector<double> reals(const std::string& key) const;
  [[nodiscard]] std::vector<std::string> texts(const std::string& key) const;
  [[nodiscard]] std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed")); }
  [[nodiscard]] std::filesystem::path out_dir() const { return text("out"); }
  [[nodiscard]] std::filesystem::path cache_dir() const;
};

/// Converts a raw string (flag value or file entry) to the key's type.
json coerce(const KeyInfo& key, const json& raw);

/// Layers defaults < config file < flags, validates, and computes the cache hash.
/// Unknown file keys, type errors and inconsistent values throw UsageError.
RunConfig build_config(const std::string& command, const std::string& config_path,
                       const std::vector<std::pair<std::string, std::string>>& flags);

/// Angle tokens: `90deg`, `0.25pi`, or plain radians.
double parse_angle(const std::string& token);

/// Worker count: PHASEFLOW_THREADS if set, else `requested`, with 0 meaning all cores.
unsigned resolve_threads(long long requested);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace phaseflow::cli
