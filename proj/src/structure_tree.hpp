// structure_tree.hpp - HTML-equivalent ordered labeled tree for TEDS metrics
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "latex_parser.hpp"

namespace tabscore {

enum class NodeTag { Table, Tr, Td };

struct StructNode {
    NodeTag tag = NodeTag::Td;
    int colspan = 1; // td only; 1 otherwise
    int rowspan = 1;
    std::string text; // td only, whitespace-normalized
    std::vector<StructNode> children;

    bool operator==(const StructNode&) const = default;
};

// Root is always a table node; table -> tr -> td, td nodes are leaves.
struct StructTree {
    StructNode root;

    bool operator==(const StructTree&) const = default;
};

// One tr per row, one td per cell anchored in that row; span continuation
// slots produce no node (HTML semantics).
StructTree to_structure_tree(const TableModel& model);

int node_count(const StructNode& node);
int node_count(const StructTree& tree);

// Collapses whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view text);

// Deterministic HTML: lowercase tags, colspan before rowspan, attributes
// omitted when 1, text escaped, no whitespace between tags.
std::string serialize_html(const StructTree& tree);

std::string escape_html(std::string_view text);

// Minimal tabular source that parses back to the same TableModel
// (styling-free canonical form).
std::string to_canonical_latex(const TableModel& model);

} // namespace tabscore
