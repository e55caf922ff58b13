#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "snnforge/compiler/ir.hpp"
#include "snnforge/io/config.hpp"
#include "snnforge/io/csv.hpp"

namespace snnforge {

inline constexpr const char* snnforge_version = "0.1.0";

/// Run manifest: seed, config hash, the fully-defaulted config and timings.
inline json make_manifest(const NetworkSpec& spec, const std::string& command, Strategy strategy,
                          const std::map<std::string, double>& timings_s, const json& extra = json::object()) {
  json m;
  m["tool"] = "snnforge";
  m["version"] = snnforge_version;
  m["command"] = command;
  m["seed"] = spec.seed;
  m["config_hash"] = config_hash(spec);
  m["config"] = spec_to_json(spec);
  m["strategy"] = std::string(to_string(strategy));
  m["timings_s"] = timings_s;
  for (const auto& [k, v] : extra.items()) m[k] = v;
  return m;
}

inline void write_manifest(const std::filesystem::path& dir, const json& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, dir.string(), ec.message());
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace snnforge
