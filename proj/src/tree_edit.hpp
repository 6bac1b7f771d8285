// tree_edit.hpp - ordered tree edit distance and the TEDS similarity scores
#pragma once

#include <string_view>

#include "structure_tree.hpp"

namespace tabscore {

enum class CostMode {
    StructureOnly,        // substitutions compare tag/colspan/rowspan only
    StructurePlusContent, // adds normalized text distance on structural matches
};

// Insertions and deletions always cost 1; substitution of identical nodes is
// free, structural mismatches cost 1, and in content mode a text mismatch on
// structurally equal nodes costs the normalized character edit distance.
struct CostModel {
    CostMode mode = CostMode::StructureOnly;
};

struct TedResult {
    double distance = 0.0;
    int pred_size = 0;
    int gt_size = 0;
    double similarity = 1.0; // 1 - distance / max(pred_size, gt_size)
};

// Character-level Levenshtein distance divided by the longer length; 0 when
// both strings are empty. Always in [0, 1].
double normalized_edit_distance(std::string_view a, std::string_view b);

double substitution_cost(const StructNode& a, const StructNode& b, CostMode mode);

// Exact minimum-cost edit distance between ordered trees (Zhang-Shasha).
double tree_edit_distance(const StructTree& a, const StructTree& b, const CostModel& cost);

TedResult teds_structure(const StructTree& pred, const StructTree& gt);
TedResult teds(const StructTree& pred, const StructTree& gt);

} // namespace tabscore
