#pragma once

#include <CLI11.hpp>

namespace alcnn::cli {

// Adds synth, ingest, features, mine, train, infer, eval and plot. Each
// subcommand runs from its parse callback.
void add_commands(CLI::App& app);

}  // namespace alcnn::cli
