#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"
#include "phaseflow/errors.hpp"
#include "phaseflow/version.hpp"

namespace cli = phaseflow::cli;

namespace {

const std::map<std::string, std::string> kAbout{
    {"profile", "optimal-profile energy m(T) and its limit"},
    {"interp", "interpolation inequality checks and adversarial thresholds"},
    {"cell", "cell-problem estimates of g(nu)"},
    {"gamma", "Gamma-convergence experiment in 1D or 2D"},
    {"norms", "tensor norms and equivalence constants"},
    {"check-well", "scan a potential for the standing hypotheses"},
};

int fail(int code, const std::string& msg) {
  std::cerr << "phaseflow: " << msg << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phaseflow: higher-order phase-transition energies"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(phaseflow::kVersion));
  app.require_subcommand(1);

  struct Bound {
    std::string value;
    CLI::Option* opt = nullptr;
  };
  std::map<std::string, std::map<std::string, Bound>> bound;
  std::map<std::string, std::string> config_paths;
  for (const auto& cmd : cli::subcommands()) {
    auto* sub = app.add_subcommand(cmd, kAbout.at(cmd));
    sub->add_option("--config", config_paths[cmd], "flat JSON config file (flags take precedence)");
    auto& slots = bound[cmd];
    for (const auto* key : cli::keys_for(cmd)) {
      auto& slot = slots[key->name];
      slot.opt = sub->add_option("--" + key->name, slot.value, key->help);
      if (key->kind == cli::KeyKind::Flag) slot.opt->expected(0, 1);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  std::vector<std::pair<std::string, std::string>> flags;
  for (auto& [name, slot] : bound[cmd]) {
    if (slot.opt->count() == 0) continue;
    const auto& res = slot.opt->results();
    flags.emplace_back(name, res.empty() ? std::string{} : res.back());
  }

  cli::RunConfig config;
  try {
    config = cli::build_config(cmd, config_paths[cmd], flags);
  } catch (const cli::UsageError& e) {
    return fail(2, e.what());
  } catch (const phaseflow::ArgumentError& e) {
    return fail(2, e.what());
  } catch (const phaseflow::IoError& e) {
    return fail(3, e.what());
  }

  try {
    cli::write_echo(config);
    if (const int cached = cli::restore_cached(config); cached >= 0) {
      std::cerr << "phaseflow: cache hit " << config.hash << "\n";
      return cached;
    }
    cli::OutputSet out(config);
    const int code = cli::run_command(config, out);
    cli::store_cached(config, out.files(), code);
    return code;
  } catch (const cli::UsageError& e) {
    return fail(2, e.what());
  } catch (const phaseflow::ArgumentError& e) {
    return fail(2, e.what());
  } catch (const phaseflow::IoError& e) {
    return fail(3, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(3, e.what());
  } catch (const phaseflow::ResolutionError& e) {
    return fail(1, e.what());
  } catch (const phaseflow::ThresholdError& e) {
    return fail(1, e.what());
  } catch (const phaseflow::NumericError& e) {
    return fail(1, e.what());
  } catch (const phaseflow::RangeError& e) {
    return fail(1, e.what());
  }
}
