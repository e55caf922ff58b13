#pragma once

// JSON network configs. Every object's key set is closed: an unknown key is a
// SchemaError naming it. Saving writes every field, defaults included, so the
// dump of a loaded spec is its canonical form.

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "snnforge/core/error.hpp"
#include "snnforge/core/hash.hpp"
#include "snnforge/frontend/spec.hpp"

namespace snnforge {

using json = nlohmann::json;

namespace detail {

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw Error(ErrorCode::schema_error, where_, "expected an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw Error(ErrorCode::schema_error, key, "missing in " + where_);
    return j_.at(key);
  }

  std::string str(const char* key, const std::string& fallback, bool required = false) {
    if (!has(key)) return required ? missing<std::string>(key) : fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw Error(ErrorCode::schema_error, key, "expected a string in " + where_);
    return v.get<std::string>();
  }

  double num(const char* key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw Error(ErrorCode::schema_error, key, "expected a number in " + where_);
    return v.get<double>();
  }

  int integer(const char* key, int fallback, bool required = false) {
    if (!has(key)) return required ? missing<int>(key) : fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw Error(ErrorCode::schema_error, key, "expected an integer in " + where_);
    return v.get<int>();
  }

  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw Error(ErrorCode::schema_error, key, "expected a boolean in " + where_);
    return v.get<bool>();
  }

  std::vector<std::string> strings(const char* key) {
    std::vector<std::string> out;
    if (!has(key)) return out;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw Error(ErrorCode::schema_error, key, "expected an array in " + where_);
    for (const auto& e : v) {
      if (!e.is_string()) throw Error(ErrorCode::schema_error, key, "expected strings in " + where_);
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  ParamTable params(const char* key) {
    ParamTable out;
    if (!has(key)) return out;
    const auto& v = j_.at(key);
    if (!v.is_object()) throw Error(ErrorCode::schema_error, key, "expected an object in " + where_);
    for (const auto& [k, x] : v.items()) {
      if (!x.is_number()) throw Error(ErrorCode::schema_error, k, "expected a number in " + where_ + "." + key);
      out[k] = x.get<double>();
    }
    return out;
  }

  const json* array(const char* key) {
    if (!has(key)) return nullptr;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw Error(ErrorCode::schema_error, key, "expected an array in " + where_);
    return &v;
  }

  const std::string& where() const { return where_; }

  /// Reject keys nobody asked for.
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw Error(ErrorCode::schema_error, k, "unknown key in " + where_);
  }

 private:
  template <class T>
  [[noreturn]] T missing(const char* key) const {
    throw Error(ErrorCode::schema_error, key, "missing in " + where_);
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <class T, class Parse>
T parse_enum(const std::string& key, const std::string& value, Parse parse) {
  auto r = parse(value);
  if (!r) throw Error(ErrorCode::schema_error, key, "unknown value \"" + value + "\"");
  return *r;
}

inline InitRule init_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  const auto kind = r.str("kind", "uniform");
  InitRule out;
  if (kind == "constant") out = InitRule::constant(r.num("a", 0.0));
  else if (kind == "uniform") out = InitRule::uniform(r.num("a", 0.0), r.num("b", 1.0));
  else if (kind == "normal") out = InitRule::normal(r.num("a", 0.0), r.num("b", 1.0));
  else if (kind == "explicit") {
    const auto& m = r.at("matrix");
    if (!m.is_array()) throw Error(ErrorCode::schema_error, "matrix", "expected rows in " + where);
    std::vector<std::vector<double>> rows;
    for (const auto& row : m) {
      if (!row.is_array()) throw Error(ErrorCode::schema_error, "matrix", "expected rows in " + where);
      std::vector<double> vals;
      for (const auto& x : row) {
        if (!x.is_number()) throw Error(ErrorCode::schema_error, "matrix", "expected numbers in " + where);
        vals.push_back(x.get<double>());
      }
      rows.push_back(std::move(vals));
    }
    out = InitRule::explicit_matrix(std::move(rows));
  } else {
    throw Error(ErrorCode::schema_error, "kind", "unknown weight_init kind \"" + kind + "\"");
  }
  r.finish();
  return out;
}

inline void connection_fields(ObjectReader& r, ConnectionSpec& c, const std::string& where) {
  c.link_type = parse_enum<LinkType>("link_type", r.str("link_type", "full"), parse_link_type);
  c.synapse = parse_enum<SynapseKind>("synapse", r.str("synapse", "none"), parse_synapse);
  if (r.has("weight_init")) c.weight_init = init_from_json(r.at("weight_init"), where + ".weight_init");
  c.sparsity = r.num("sparsity", 1.0);
  c.delay_ms = r.num("delay_ms", 0.0);
  if (r.has("conv")) {
    ObjectReader cr(r.at("conv"), where + ".conv");
    ConvSpec cv;
    cv.kernel = cr.integer("kernel", cv.kernel);
    cv.stride = cr.integer("stride", cv.stride);
    cv.padding = cr.integer("padding", cv.padding);
    cr.finish();
    c.conv = cv;
  }
  c.trainable = r.boolean("trainable", false);
  c.synapse_params = r.params("synapse_params");
}

template <class F>
void each(ObjectReader& r, const char* key, F f) {
  if (const auto* arr = r.array(key)) {
    std::size_t i = 0;
    for (const auto& e : *arr) f(e, std::string(key) + "[" + std::to_string(i++) + "]");
  }
}

inline json init_to_json(const InitRule& w) {
  json j{{"kind", std::string(to_string(w.kind))}};
  if (w.kind == InitRule::Kind::explicit_matrix) j["matrix"] = w.matrix;
  else if (w.kind == InitRule::Kind::constant) j["a"] = w.a;
  else {
    j["a"] = w.a;
    j["b"] = w.b;
  }
  return j;
}

inline void connection_fields_to_json(const ConnectionSpec& c, json& j) {
  j["link_type"] = std::string(to_string(c.link_type));
  j["synapse"] = std::string(to_string(c.synapse));
  if (c.weight_init) j["weight_init"] = init_to_json(*c.weight_init);
  j["sparsity"] = c.sparsity;
  j["delay_ms"] = c.delay_ms;
  if (c.conv) j["conv"] = {{"kernel", c.conv->kernel}, {"stride", c.conv->stride}, {"padding", c.conv->padding}};
  j["trainable"] = c.trainable;
  j["synapse_params"] = c.synapse_params;
}

}  // namespace detail

inline NetworkSpec spec_from_json(const json& j) {
  detail::ObjectReader top(j, "config");
  NetworkSpec s;
  s.name = top.str("name", "", true);
  s.dt = top.num("dt", 1.0);
  if (top.has("seed")) {
    const auto& v = top.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw Error(ErrorCode::schema_error, "seed", "expected an unsigned integer");
    s.seed = v.get<std::uint64_t>();
  }
  detail::each(top, "groups", [&](const json& e, const std::string& where) {
    detail::ObjectReader r(e, where);
    GroupSpec g;
    g.id = r.str("id", "", true);
    g.num = r.integer("num", 0, true);
    g.model = r.str("model", "lif");
    g.params = r.params("params");
    g.tags = r.strings("tags");
    if (r.has("shape")) {
      const auto& sh = r.at("shape");
      if (!sh.is_array() || sh.size() != 3) throw Error(ErrorCode::schema_error, "shape", "expected [c, h, w] in " + where);
      g.shape = std::array<int, 3>{sh[0].get<int>(), sh[1].get<int>(), sh[2].get<int>()};
    }
    r.finish();
    s.groups.push_back(std::move(g));
  });
  detail::each(top, "connections", [&](const json& e, const std::string& where) {
    detail::ObjectReader r(e, where);
    ConnectionSpec c;
    c.id = r.str("id", "", true);
    c.pre = r.str("pre", "", true);
    c.post = r.str("post", "", true);
    detail::connection_fields(r, c, where);
    r.finish();
    s.connections.push_back(std::move(c));
  });
  detail::each(top, "projections", [&](const json& e, const std::string& where) {
    detail::ObjectReader r(e, where);
    ProjectionSpec p;
    p.id = r.str("id", "", true);
    p.pre = r.str("pre", "", true);
    p.post = r.str("post", "", true);
    detail::each(r, "policies", [&](const json& pe, const std::string& pw) {
      detail::ObjectReader pr(pe, where + "." + pw);
      ConnectPolicy pol;
      pol.kind = pr.str("kind", "include_type");
      pol.pre_types = pr.strings("pre_types");
      pol.post_types = pr.strings("post_types");
      pr.finish();
      p.policies.push_back(std::move(pol));
    });
    if (r.has("template")) {
      detail::ObjectReader tr(r.at("template"), where + ".template");
      detail::connection_fields(tr, p.templ, where + ".template");
      tr.finish();
    }
    r.finish();
    s.projections.push_back(std::move(p));
  });
  detail::each(top, "nodes", [&](const json& e, const std::string& where) {
    detail::ObjectReader r(e, where);
    NodeSpec n;
    n.id = r.str("id", "", true);
    n.kind = detail::parse_enum<NodeKind>("kind", r.str("kind", "", true), parse_node_kind);
    n.method = r.str("method", "", true);
    n.num = r.integer("num", 0, true);
    n.target = r.str("target", "");
    n.var_name = r.str("var_name", "O");
    n.params = r.params("params");
    r.finish();
    s.nodes.push_back(std::move(n));
  });
  detail::each(top, "monitors", [&](const json& e, const std::string& where) {
    detail::ObjectReader r(e, where);
    MonitorSpec m;
    m.id = r.str("id", "", true);
    m.target = r.str("target", "", true);
    m.kind = detail::parse_enum<MonitorKind>("kind", r.str("kind", "spike"), parse_monitor_kind);
    m.var_name = r.str("var_name", "");
    r.finish();
    s.monitors.push_back(std::move(m));
  });
  if (top.has("learner")) {
    detail::ObjectReader r(top.at("learner"), "learner");
    LearnerConfig l;
    l.algorithm = r.str("algorithm", l.algorithm);
    l.trainable = r.strings("trainable");
    l.pathway = r.strings("pathway");
    l.hyperparams = r.params("hyperparams");
    l.optimizer = r.str("optimizer", l.optimizer);
    l.lr = r.num("lr", l.lr);
    if (r.has("surrogate")) {
      detail::ObjectReader sr(r.at("surrogate"), "learner.surrogate");
      const auto kind = sr.str("kind", "sigmoid");
      if (kind == "rectangular") l.surrogate.kind = SurrogateSpec::Kind::rectangular;
      else if (kind == "sigmoid") l.surrogate.kind = SurrogateSpec::Kind::sigmoid;
      else throw Error(ErrorCode::schema_error, "kind", "unknown surrogate \"" + kind + "\"");
      l.surrogate.width = sr.num("width", l.surrogate.width);
      l.surrogate.beta = sr.num("beta", l.surrogate.beta);
      sr.finish();
    }
    l.loss = r.str("loss", "");
    l.output = r.str("output", "");
    r.finish();
    s.learner = std::move(l);
  }
  top.finish();
  return s;
}

inline json spec_to_json(const NetworkSpec& s) {
  if (!s.assemblies.empty() || !s.variables.empty() || !s.operations.empty())
    throw Error(ErrorCode::schema_error, s.name, "nested assemblies and custom ops have no config form; flatten first");
  json j;
  j["name"] = s.name;
  j["dt"] = s.dt;
  j["seed"] = s.seed;
  j["groups"] = json::array();
  for (const auto& g : s.groups) {
    json e{{"id", g.id}, {"num", g.num}, {"model", g.model}, {"params", g.params}, {"tags", g.tags}};
    if (g.shape) e["shape"] = *g.shape;
    j["groups"].push_back(std::move(e));
  }
  j["connections"] = json::array();
  for (const auto& c : s.connections) {
    json e{{"id", c.id}, {"pre", c.pre}, {"post", c.post}};
    detail::connection_fields_to_json(c, e);
    j["connections"].push_back(std::move(e));
  }
  j["projections"] = json::array();
  for (const auto& p : s.projections) {
    json e{{"id", p.id}, {"pre", p.pre}, {"post", p.post}, {"policies", json::array()}};
    for (const auto& pol : p.policies)
      e["policies"].push_back({{"kind", pol.kind}, {"pre_types", pol.pre_types}, {"post_types", pol.post_types}});
    json t = json::object();
    detail::connection_fields_to_json(p.templ, t);
    e["template"] = std::move(t);
    j["projections"].push_back(std::move(e));
  }
  j["nodes"] = json::array();
  for (const auto& n : s.nodes)
    j["nodes"].push_back({{"id", n.id}, {"kind", std::string(to_string(n.kind))}, {"method", n.method},
                          {"num", n.num}, {"target", n.target}, {"var_name", n.var_name}, {"params", n.params}});
  j["monitors"] = json::array();
  for (const auto& m : s.monitors)
    j["monitors"].push_back(
        {{"id", m.id}, {"target", m.target}, {"kind", std::string(to_string(m.kind))}, {"var_name", m.var_name}});
  if (s.learner) {
    const auto& l = *s.learner;
    j["learner"] = {{"algorithm", l.algorithm},
                    {"trainable", l.trainable},
                    {"pathway", l.pathway},
                    {"hyperparams", l.hyperparams},
                    {"optimizer", l.optimizer},
                    {"lr", l.lr},
                    {"surrogate",
                     {{"kind", l.surrogate.kind == SurrogateSpec::Kind::rectangular ? "rectangular" : "sigmoid"},
                      {"width", l.surrogate.width},
                      {"beta", l.surrogate.beta}}},
                    {"loss", l.loss},
                    {"output", l.output}};
  }
  return j;
}

/// Parse config text; `source` names it in errors.
inline NetworkSpec parse_config(const std::string& text, const std::string& source = "<config>") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::parse_error, source,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  return spec_from_json(j);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, path, "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline NetworkSpec load_config(const std::string& path) { return parse_config(read_text_file(path), path); }

/// Canonical text: every field present, keys sorted, compact.
inline std::string canonical_config(const NetworkSpec& s) { return spec_to_json(s).dump(); }

inline std::string config_hash(const NetworkSpec& s) { return hex64(fnv1a64(canonical_config(s))); }

inline void save_config(const NetworkSpec& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, path, "cannot write");
  out << spec_to_json(s).dump(2) << "\n";
  if (!out) throw Error(ErrorCode::io_error, path, "write failed");
}

/// SNNFORGE_SEED, when set to an unsigned integer, replaces the config seed.
inline void apply_seed_env(NetworkSpec& s) {
  const char* v = std::getenv("SNNFORGE_SEED");
  if (!v || !*v) return;
  char* end = nullptr;
  const auto seed = std::strtoull(v, &end, 10);
  if (*end != '\0') throw Error(ErrorCode::invalid_argument, "SNNFORGE_SEED", std::string("not an integer: ") + v);
  s.seed = seed;
}

}  // namespace snnforge
