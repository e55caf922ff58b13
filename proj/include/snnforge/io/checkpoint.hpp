#pragma once

// Checkpoint container, little-endian:
//   "SNNF" | u32 major | u32 minor | str config_hash | str canonical config |
//   u8 strategy | u64 batch | i64 step | u64 trial |
//   u32 n, n x (str name | u64 count | f64[count] | u32 crc32 of the values) |
//   u32 m, m x (u64 head | u64 count | f64[count]) |
//   u32 crc32 of everything before it
// where str = u32 length + bytes. The graph is rebuilt from the embedded
// config, then every variable is restored by name.

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include <zlib.h>

#include "snnforge/compiler/lower.hpp"
#include "snnforge/engine/state.hpp"
#include "snnforge/io/config.hpp"

namespace snnforge {

inline constexpr std::uint32_t checkpoint_major = 1;
inline constexpr std::uint32_t checkpoint_minor = 0;

inline std::uint32_t crc32_of(const void* data, std::size_t n) {
  return static_cast<std::uint32_t>(::crc32(0L, static_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

namespace detail {

class ByteWriter {
 public:
  template <class T>
  void put(T v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.append(p, sizeof v);
  }
  void str(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    buf_ += s;
  }
  void doubles(const std::vector<double>& v) {
    put(static_cast<std::uint64_t>(v.size()));
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  }
  std::string& bytes() { return buf_; }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(const std::string& b, std::size_t end, std::string source) : b_(b), end_(end), src_(std::move(source)) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
  }
  std::string str() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<double> doubles() {
    const auto n = get<std::uint64_t>();
    need(n * sizeof(double));
    std::vector<double> v(n);
    std::memcpy(v.data(), b_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > end_) throw Error(ErrorCode::checksum_error, src_, "truncated");
  }
  const std::string& b_;
  std::size_t end_;
  std::string src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Serialize the state of a graph built from `spec`.
inline std::string checkpoint_bytes(const NetworkSpec& spec, const CompiledGraph& g, const SimState& s) {
  detail::ByteWriter w;
  w.bytes() += "SNNF";
  w.put(checkpoint_major);
  w.put(checkpoint_minor);
  w.str(config_hash(spec));
  w.str(canonical_config(spec));
  w.put(static_cast<std::uint8_t>(g.strategy == Strategy::serial ? 1 : 0));
  w.put(static_cast<std::uint64_t>(s.batch));
  w.put(static_cast<std::int64_t>(s.step));
  w.put(static_cast<std::uint64_t>(s.trial));
  w.put(static_cast<std::uint32_t>(g.variables.size()));
  for (std::size_t v = 0; v < g.variables.size(); ++v) {
    w.str(g.variables[v].id);
    w.doubles(s.values[v]);
    w.put(crc32_of(s.values[v].data(), s.values[v].size() * sizeof(double)));
  }
  w.put(static_cast<std::uint32_t>(s.delays.size()));
  for (const auto& d : s.delays) {
    w.put(static_cast<std::uint64_t>(d.head()));
    w.doubles(d.slots());
  }
  w.put(crc32_of(w.bytes().data(), w.bytes().size()));
  return std::move(w.bytes());
}

struct LoadedModel {
  NetworkSpec spec;
  CompiledGraph graph;
  SimState state;
};

inline LoadedModel checkpoint_from_bytes(const std::string& bytes, const std::string& source = "<checkpoint>") {
  if (bytes.size() < 16) throw Error(ErrorCode::checksum_error, source, "file too short");
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  if (crc32_of(bytes.data(), bytes.size() - 4) != stored) throw Error(ErrorCode::checksum_error, source);
  detail::ByteReader r(bytes, bytes.size() - 4, source);
  const auto magic = r.get<std::uint32_t>();
  if (std::memcmp(&magic, "SNNF", 4) != 0) throw Error(ErrorCode::checksum_error, source, "not a checkpoint");
  const auto major = r.get<std::uint32_t>();
  r.get<std::uint32_t>();
  if (major != checkpoint_major)
    throw Error(ErrorCode::version_mismatch, source,
                "format " + std::to_string(major) + ", expected " + std::to_string(checkpoint_major));
  const auto hash = r.str();
  LoadedModel m;
  m.spec = parse_config(r.str(), source);
  if (config_hash(m.spec) != hash) throw Error(ErrorCode::checksum_error, source, "config hash mismatch");
  const auto strategy = r.get<std::uint8_t>() ? Strategy::serial : Strategy::parallel;
  m.graph = compile(m.spec, strategy);
  const auto batch = r.get<std::uint64_t>();
  m.state = SimState::create(m.graph, batch);
  m.state.step = r.get<std::int64_t>();
  m.state.trial = r.get<std::uint64_t>();
  const auto nvars = r.get<std::uint32_t>();
  if (nvars != m.graph.variables.size()) throw Error(ErrorCode::checksum_error, source, "variable count differs");
  for (std::uint32_t k = 0; k < nvars; ++k) {
    const auto name = r.str();
    auto values = r.doubles();
    const auto crc = r.get<std::uint32_t>();
    if (crc32_of(values.data(), values.size() * sizeof(double)) != crc) throw Error(ErrorCode::checksum_error, name);
    const int v = m.graph.var(name);
    if (v < 0 || m.state.values[static_cast<std::size_t>(v)].size() != values.size())
      throw Error(ErrorCode::checksum_error, name, "does not match the rebuilt graph");
    m.state.values[static_cast<std::size_t>(v)] = std::move(values);
  }
  const auto ndelays = r.get<std::uint32_t>();
  if (ndelays != m.state.delays.size()) throw Error(ErrorCode::checksum_error, source, "delay count differs");
  for (auto& d : m.state.delays) {
    const auto head = r.get<std::uint64_t>();
    auto slots = r.doubles();
    if (slots.size() != d.slots().size()) throw Error(ErrorCode::checksum_error, source, "delay buffer size differs");
    d.restore(std::move(slots), head);
  }
  return m;
}

inline void save_model(const NetworkSpec& spec, const CompiledGraph& g, const SimState& s, const std::string& path) {
  const auto bytes = checkpoint_bytes(spec, g, s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, path, "cannot write");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io_error, path, "write failed");
}

inline LoadedModel load_model(const std::string& path) { return checkpoint_from_bytes(read_text_file(path), path); }

}  // namespace snnforge
