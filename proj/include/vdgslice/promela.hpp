#pragma once

#include <string>
#include <vector>

#include "vdgslice/slicer.hpp"

namespace vdgslice {

struct EmitOptions {
  // Drive interfaces from their own processes instead of the software process.
  bool env_separate = false;
};

struct EnvChoice {
  std::string variable;
  std::size_t alternatives = 0;
  std::string text;
};

struct EnvironmentSkeleton {
  std::vector<EnvChoice> choices;

  /// Choice blocks joined by ";\n".
  std::string text() const;
};

struct PromelaModel {
  std::string header;
  std::string globals;
  std::vector<std::string> processes;
  EnvironmentSkeleton env_skeleton;
  std::string text;
};

/// Model type for a C type: the narrowest of byte, short and int covering it.
std::string promela_type(const CType& t);

/// Names whose ranges satisfy `value op constant` (or `constant op value`
/// when `variable_left` is false). Throws UnmappedPredicate when a range
/// straddles the comparison.
std::vector<std::string> mapped_predicate_names(const DataMapping& map, BinaryOp op, std::int64_t constant,
                                                bool variable_left, const std::string& where);

/// Renders a comparison over a mapped variable as a test on abstract values.
std::string apply_data_mapping(const DataMapping& map, const std::string& variable, BinaryOp op,
                               std::int64_t constant, bool variable_left, const std::string& where);

/// Nondeterministic choice over each interface's domain. Throws
/// UnboundedInterface for unmapped variables wider than a byte.
EnvironmentSkeleton generate_env_skeleton(const std::vector<InterfaceVariable>& interfaces, const SourceModel& model,
                                          const SlicingCriteria& criteria);

/// Throws UnsupportedConstruct, UnmappedPredicate, UnboundedInterface or
/// SchemaError (data map not covering its variable's type).
PromelaModel convert(const Slice& slice, const SourceModel& model, const SlicingCriteria& criteria,
                     const EmitOptions& options = {});

}  // namespace vdgslice
