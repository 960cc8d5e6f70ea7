#pragma once

// Attribute environment shared by the pipeline parser (name validation) and
// evaluator (lookups and writes).

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spatial/core.hpp"
#include "spatial/pipeline.hpp"

namespace spatial::detail {

/// Runtime value of an expression. monostate is the "absent" value that makes
/// every comparison false; the vector holds one number per listed object.
using Value = std::variant<std::monostate, double, std::string, bool, std::vector<double>>;

/// Names resolvable on every object (core fields and derived metrics).
bool is_builtin_attribute(std::string_view name);

/// Derived names that map() may not write.
bool is_read_only_attribute(std::string_view name);

/// Looks up `path[start..]` on the object; absent when unknown.
Value attribute_value(const SpatialObject& obj, const DerivedAttributes& derived,
                      const std::vector<RefSegment>& path, std::size_t start = 0);

/// Writes an attribute. Throws InvalidArgument for `id`, derived names and
/// type mismatches on core fields.
void assign_attribute(SpatialObject& obj, const std::vector<std::string>& target, const Value& value);

std::string describe(const Value& value);

}  // namespace spatial::detail
