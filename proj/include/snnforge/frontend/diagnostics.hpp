#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace snnforge {

enum class DiagKind {
  unknown_id,
  invalid_count,
  duplicate_id,
  invalid_value,
  shape_mismatch,
  unknown_model,
  unknown_param,
  unknown_variable,
  invalid_endpoint,
  empty_expansion,
  non_differentiable_op,
  pathway_incomplete,
  not_trainable,
};

inline std::string_view to_string(DiagKind k) {
  switch (k) {
    case DiagKind::unknown_id: return "UnknownId";
    case DiagKind::invalid_count: return "InvalidCount";
    case DiagKind::duplicate_id: return "DuplicateId";
    case DiagKind::invalid_value: return "InvalidValue";
    case DiagKind::shape_mismatch: return "ShapeMismatch";
    case DiagKind::unknown_model: return "UnknownModel";
    case DiagKind::unknown_param: return "UnknownParam";
    case DiagKind::unknown_variable: return "UnknownVariable";
    case DiagKind::invalid_endpoint: return "InvalidEndpoint";
    case DiagKind::empty_expansion: return "EmptyExpansion";
    case DiagKind::non_differentiable_op: return "NonDifferentiableOp";
    case DiagKind::pathway_incomplete: return "PathwayIncomplete";
    case DiagKind::not_trainable: return "NotTrainable";
  }
  return "Unknown";
}

struct Diagnostic {
  DiagKind kind;
  std::string path;  // offending id / path name
  std::string message;

  bool operator==(const Diagnostic&) const = default;

  std::string to_string() const {
    std::string s(snnforge::to_string(kind));
    s += "(\"" + path + "\")";
    if (!message.empty()) s += ": " + message;
    return s;
  }
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace snnforge
