#pragma once

#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace alcnn::cli {

// Expands "<subcommand> ... --config FILE ..." into explicit flags. FILE
// holds one flat JSON object keyed by long flag names without the dashes;
// arrays become repeated flags and booleans toggle flags. Keys also given
// on the command line are dropped, so explicit flags win. Inserted flags go
// directly after the subcommand name. Throws CLI::ParseError subclasses.
std::vector<std::string> expand_config(const std::vector<std::string>& args,
                                       const std::set<std::string>& subcommands);

// Throws CLI::ExtrasError naming the first long flag that the selected
// subcommand does not define. CLI11 alone would report a missing required
// flag first.
void reject_unknown_flags(CLI::App& app, const std::vector<std::string>& args);

}  // namespace alcnn::cli
