// tree_gen.hpp - random labeled ordered trees for metric tests
#pragma once

#include <random>
#include <vector>

#include "structure_tree.hpp"

namespace tabscore::testsupport {

// Uniform random tree shape with exactly n_nodes nodes and random labels.
// Not constrained to the table/tr/td grammar; the edit distance must not
// depend on it.
inline StructNode random_tree(std::mt19937& rng, int n_nodes) {
    std::vector<std::vector<int>> children(n_nodes);
    std::uniform_int_distribution<int> tag_dist(0, 2);
    std::uniform_int_distribution<int> span_dist(1, 2);
    std::uniform_int_distribution<int> text_dist(0, 3);
    for (int i = 1; i < n_nodes; ++i) {
        std::uniform_int_distribution<int> parent_dist(0, i - 1);
        children[parent_dist(rng)].push_back(i);
    }
    static const char* texts[] = {"", "a", "ab", "b"};

    struct Builder {
        std::mt19937& rng;
        const std::vector<std::vector<int>>& children;
        std::uniform_int_distribution<int>& tag_dist;
        std::uniform_int_distribution<int>& span_dist;
        std::uniform_int_distribution<int>& text_dist;

        StructNode build(int idx) {
            StructNode n;
            n.tag = static_cast<NodeTag>(tag_dist(rng));
            n.colspan = span_dist(rng);
            n.rowspan = span_dist(rng);
            n.text = texts[text_dist(rng)];
            for (int c : children[idx])
                n.children.push_back(build(c));
            return n;
        }
    };
    return Builder{rng, children, tag_dist, span_dist, text_dist}.build(0);
}

inline StructTree random_struct_tree(std::mt19937& rng, int max_nodes) {
    std::uniform_int_distribution<int> size_dist(1, max_nodes);
    StructTree t;
    t.root = random_tree(rng, size_dist(rng));
    return t;
}

} // namespace tabscore::testsupport
