#pragma once

// Class hierarchy with synonyms, used by the pipeline's isa() operation.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "spatial/errors.hpp"

namespace spatial {

enum class TaxonomyFormat { rdf_xml, simple_lines };

class Taxonomy {
 public:
  /// Adds a class (idempotent).
  void add_class(const std::string& name);
  /// Records `child subClassOf parent`. Throws InvalidArgument when the child
  /// already has a different parent or the edge would close a cycle; the
  /// message names the cycle, e.g. "A -> B -> A".
  void add_parent(const std::string& child, const std::string& parent);
  void add_synonym(const std::string& name, const std::string& synonym);

  bool has_class(std::string_view name) const;
  std::optional<std::string> parent_of(std::string_view name) const;
  const std::set<std::string>& classes() const { return classes_; }
  std::set<std::string> synonyms_of(std::string_view name) const;
  /// True when `ancestor` is `name` or lies above it in the hierarchy.
  bool is_subclass_of(std::string_view name, std::string_view ancestor) const;

  /// Case-insensitive match of `value` against the class's name and synonyms
  /// and those of all its descendants. `class_expr` may join several classes
  /// with OR. Unknown classes never match.
  bool isa(std::string_view value, std::string_view class_expr) const;

 private:
  std::set<std::string> classes_;
  std::map<std::string, std::string, std::less<>> parent_;
  std::map<std::string, std::set<std::string>, std::less<>> synonyms_;
};

/// Parses a taxonomy document. Malformed input raises ParseError with the
/// line and column; cycles raise InvalidArgument.
Taxonomy load_taxonomy(std::string_view document, TaxonomyFormat format);

/// rdf_xml when the first non-blank character is '<', simple_lines otherwise.
TaxonomyFormat detect_taxonomy_format(std::string_view document);

}  // namespace spatial
