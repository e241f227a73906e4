#include <spdlog/spdlog.h>

#include <cstdio>
#include <exception>
#include <set>
#include <string>
#include <vector>

#include "alcnn/error.hpp"
#include "commands.hpp"
#include "json_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fine-grained bike demand pattern transfer between cities"};
  app.name("alcnn");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_flag_callback("-q,--quiet", [] { spdlog::set_level(spdlog::level::warn); },
                        "Only report warnings and errors");
  spdlog::set_pattern("%v");
  alcnn::cli::add_commands(app);

  try {
    std::set<std::string> names;
    for (const CLI::App* sub : app.get_subcommands({})) names.insert(sub->get_name());
    std::vector<std::string> args = alcnn::cli::expand_config(std::vector<std::string>(argv, argv + argc), names);
    alcnn::cli::reject_unknown_flags(app, args);
    std::vector<char*> argp;
    for (auto& a : args) argp.push_back(a.data());
    app.parse(static_cast<int>(argp.size()), argp.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const alcnn::InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const alcnn::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  }
  return 0;
}
