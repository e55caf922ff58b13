#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "snnforge/core/error.hpp"
#include "snnforge/engine/monitor.hpp"

namespace snnforge {

/// Shortest round-trip decimal form of x.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, end);
}

/// Milliseconds for a step index: rounded to 1e-9 ms, always with a decimal
/// point ("3.0", "0.1", "12.5").
inline std::string format_time_ms(std::int64_t step, double dt) {
  const double t = std::round(static_cast<double>(step) * dt * 1e9) / 1e9;
  auto s = format_double(t);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

inline std::string spike_csv(const SpikeRecord& r, double dt) {
  auto events = r.events;
  std::sort(events.begin(), events.end(),
            [](const SpikeEvent& a, const SpikeEvent& b) { return std::tie(a.step, a.neuron) < std::tie(b.step, b.neuron); });
  std::string out = "time_ms,neuron_id\n";
  for (const auto& e : events) out += format_time_ms(e.step, dt) + "," + std::to_string(e.neuron) + "\n";
  return out;
}

inline std::string state_csv(const StateRecord& r, double dt) {
  std::string out = "time_ms";
  for (std::size_t i = 0; i < r.width; ++i) out += ",n" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    out += format_time_ms(r.steps[k], dt);
    for (double v : r.rows[k]) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, path.string(), "cannot write");
  out << text;
  if (!out) throw Error(ErrorCode::io_error, path.string(), "write failed");
}

/// One `{monitor_id}.csv` per monitor; returns the files written.
inline std::vector<std::filesystem::path> export_monitors(const Recorder& rec, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, dir.string(), ec.message());
  std::vector<std::filesystem::path> files;
  for (const auto& r : rec.spikes()) {
    files.push_back(dir / (r.monitor + ".csv"));
    write_text_file(files.back(), spike_csv(r, rec.dt()));
  }
  for (const auto& r : rec.states()) {
    files.push_back(dir / (r.monitor + ".csv"));
    write_text_file(files.back(), state_csv(r, rec.dt()));
  }
  return files;
}

}  // namespace snnforge
