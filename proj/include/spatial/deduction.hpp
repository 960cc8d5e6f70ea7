#pragma once

// Spatial relation deduction: turns pairs of boxes into subject-predicate-object
// facts for the eleven relation categories.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spatial/core.hpp"
#include "spatial/geometry.hpp"

namespace spatial {

/// Predicate names of a category, in registry order. Sectoriality lists the 27
/// sector codes.
const std::vector<std::string>& predicates_of(Category category);

/// Maps a predicate name (or the aliases `over`/`under`) to its category.
std::optional<Category> category_of_predicate(std::string_view predicate);

/// Resolves aliases: `over` -> `above`, `under` -> `below`.
std::string_view canonical_predicate(std::string_view predicate);

bool is_predicate(std::string_view name);

/// Expands category tokens, including the `topology` bundle
/// (proximity, directionality, adjacency, sectoriality, assembly, orientation).
/// Throws InvalidArgument naming the first unknown token.
std::set<Category> expand_categories(std::span<const std::string> tokens);

/// The object whose frame orients left/right/ahead/behind for this pair. The
/// choice is symmetric in (s, o) so that inverse predicates agree: the
/// observer if exactly one of them is one, else the larger volume, else the
/// smaller id.
const SpatialObject& frame_reference(const SpatialObject& s, const SpatialObject& o);

/// Relations of one category with `s` as subject and `o` as object.
/// Throws InvalidArgument for visibility without an observer.
std::vector<SpatialRelation> relations_between(const SpatialObject& s, const SpatialObject& o,
                                               Category category, const AdjustmentSettings& settings,
                                               const SpatialObject* observer = nullptr);

/// Explicit id when given (must exist), else the unique observer-flagged
/// object. nullopt when neither resolves.
std::optional<std::string> resolve_observer(const FactBase& fb,
                                            std::optional<std::string_view> explicit_id = std::nullopt);

/// Recomputes every requested category over all ordered pairs. Pairs are
/// evaluated in parallel; the merged result is sorted by (subject, object,
/// predicate) in fact-base order, so output does not depend on thread count.
void deduce(FactBase& fb, const std::set<Category>& categories, const AdjustmentSettings& settings,
            std::optional<std::string_view> observer = std::nullopt);

/// Single-threaded reference for `deduce`; same contract, same output.
void deduce_serial(FactBase& fb, const std::set<Category>& categories, const AdjustmentSettings& settings,
                   std::optional<std::string_view> observer = std::nullopt);

}  // namespace spatial
