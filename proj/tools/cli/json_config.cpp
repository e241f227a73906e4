#include "json_config.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>

namespace alcnn::cli {

namespace {

std::string scalar_text(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw CLI::ConversionError("--config: value of '" + key + "' must be a string, number, boolean or array of those");
}

// Long flag name of an argument, "" when it is not a long flag.
std::string flag_name(const std::string& arg) {
  if (arg.size() < 3 || arg.compare(0, 2, "--") != 0) return {};
  return arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos : arg.find('=') - 2);
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args,
                                       const std::set<std::string>& subcommands) {
  std::size_t sub = 1;
  while (sub < args.size() && !subcommands.count(args[sub])) ++sub;
  if (sub >= args.size()) return args;

  std::string path;
  std::set<std::string> given;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    const std::string name = flag_name(args[i]);
    if (name.empty()) continue;
    given.insert(name);
    if (name != "config") continue;
    if (args[i].find('=') != std::string::npos)
      path = args[i].substr(args[i].find('=') + 1);
    else if (i + 1 < args.size())
      path = args[i + 1];
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw CLI::FileError("--config: file does not exist: " + path);
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CLI::ConversionError("--config: " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw CLI::ConversionError("--config: " + path + " must hold a JSON object");

  std::vector<std::string> inserted;
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") throw CLI::ConversionError("--config: a config file cannot name another config file");
    if (given.count(key)) continue;
    if (value.is_array()) {
      for (const auto& v : value) inserted.push_back("--" + key + "=" + scalar_text(key, v));
    } else {
      inserted.push_back("--" + key + "=" + scalar_text(key, value));
    }
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub) + 1);
  out.insert(out.end(), inserted.begin(), inserted.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, args.end());
  return out;
}

void reject_unknown_flags(CLI::App& app, const std::vector<std::string>& args) {
  CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--") return;
    if (!sub) {
      sub = app.get_subcommand_no_throw(args[i]);
      continue;
    }
    const std::string name = flag_name(args[i]);
    if (!name.empty() && !sub->get_option_no_throw("--" + name))
      throw CLI::ExtrasError(sub->get_name(), std::vector<std::string>{"--" + name});
  }
}

}  // namespace alcnn::cli
