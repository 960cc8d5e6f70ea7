#pragma once

// Fact documents (JSON), knowledge-graph markdown (Mermaid), Wavefront OBJ
// scenes and plain-text summaries.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spatial/core.hpp"

namespace spatial {

struct FactDocument {
  FactBase facts;
  std::optional<AdjustmentSettings> settings;
};

/// Parses a fact document. Errors name the record index (and id when known):
/// malformed JSON, missing required field, duplicate id, invalid values.
FactDocument load_facts(std::string_view text);

/// Serializes objects (and relations, when `with_relations`) plus the optional
/// settings block. Output is deterministic and round-trips through load_facts.
std::string dump_facts(const FactBase& fb, const std::optional<AdjustmentSettings>& settings = std::nullopt,
                       bool with_relations = false);

/// Mermaid graph in a markdown code fence. One edge per relation whose
/// predicate is in `predicates` (every relation when empty).
std::string export_mermaid(const FactBase& fb, const std::set<std::string>& predicates = {});

/// Wavefront OBJ text: per object an `o` line, 8 `v` lines (yaw applied) and
/// 6 quad `f` lines using global 1-based indices.
std::string export_scene(const FactBase& fb);

/// One line per listed object (id, label, type, pose, extents) followed by the
/// calc variables.
std::string export_summary(const FactBase& fb, std::span<const std::string> ids);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace spatial
