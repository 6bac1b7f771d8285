#include "tree_edit.hpp"

#include <algorithm>
#include <vector>

namespace tabscore {

double normalized_edit_distance(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty())
        return 0.0;
    const size_t n = a.size(), m = b.size();
    std::vector<size_t> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j)
        prev[j] = j;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= m; ++j) {
            size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return static_cast<double>(prev[m]) / static_cast<double>(std::max(n, m));
}

double substitution_cost(const StructNode& a, const StructNode& b, CostMode mode) {
    if (a.tag != b.tag || a.colspan != b.colspan || a.rowspan != b.rowspan)
        return 1.0;
    if (mode == CostMode::StructurePlusContent && a.text != b.text)
        return normalized_edit_distance(a.text, b.text);
    return 0.0;
}

namespace {

// Postorder flattening with leftmost-leaf indices and keyroots, the inputs of
// the Zhang-Shasha dynamic program. Indices are 1-based.
struct Flat {
    std::vector<const StructNode*> node; // node[1..n]
    std::vector<int> lml;                // leftmost leaf of the subtree at i
    std::vector<int> keyroots;

    explicit Flat(const StructNode& root) {
        node.push_back(nullptr);
        lml.push_back(0);
        visit(root);
        const int n = static_cast<int>(node.size()) - 1;
        std::vector<bool> seen(n + 1, false);
        for (int i = n; i >= 1; --i) {
            if (!seen[lml[i]]) {
                seen[lml[i]] = true;
                keyroots.push_back(i);
            }
        }
        std::sort(keyroots.begin(), keyroots.end());
    }

    int size() const { return static_cast<int>(node.size()) - 1; }

private:
    int visit(const StructNode& n) {
        int first_leaf = 0;
        for (const StructNode& child : n.children) {
            int leaf = visit(child);
            if (first_leaf == 0)
                first_leaf = leaf;
        }
        node.push_back(&n);
        int index = static_cast<int>(node.size()) - 1;
        lml.push_back(first_leaf == 0 ? index : first_leaf);
        return lml.back();
    }
};

} // namespace

double tree_edit_distance(const StructTree& a, const StructTree& b, const CostModel& cost) {
    Flat fa(a.root);
    Flat fb(b.root);
    const int n = fa.size();
    const int m = fb.size();
    constexpr double kDelete = 1.0;
    constexpr double kInsert = 1.0;

    std::vector<std::vector<double>> td(n + 1, std::vector<double>(m + 1, 0.0));
    std::vector<std::vector<double>> fd(n + 2, std::vector<double>(m + 2, 0.0));

    for (int i : fa.keyroots) {
        for (int j : fb.keyroots) {
            const int li = fa.lml[i];
            const int lj = fb.lml[j];
            fd[li - 1][lj - 1] = 0.0;
            for (int di = li; di <= i; ++di)
                fd[di][lj - 1] = fd[di - 1][lj - 1] + kDelete;
            for (int dj = lj; dj <= j; ++dj)
                fd[li - 1][dj] = fd[li - 1][dj - 1] + kInsert;
            for (int di = li; di <= i; ++di) {
                for (int dj = lj; dj <= j; ++dj) {
                    if (fa.lml[di] == li && fb.lml[dj] == lj) {
                        double sub = substitution_cost(*fa.node[di], *fb.node[dj], cost.mode);
                        fd[di][dj] = std::min({fd[di - 1][dj] + kDelete,
                                               fd[di][dj - 1] + kInsert,
                                               fd[di - 1][dj - 1] + sub});
                        td[di][dj] = fd[di][dj];
                    } else {
                        fd[di][dj] = std::min({fd[di - 1][dj] + kDelete,
                                               fd[di][dj - 1] + kInsert,
                                               fd[fa.lml[di] - 1][fb.lml[dj] - 1] + td[di][dj]});
                    }
                }
            }
        }
    }
    return td[n][m];
}

namespace {

TedResult make_result(const StructTree& pred, const StructTree& gt, CostMode mode) {
    TedResult r;
    r.pred_size = node_count(pred);
    r.gt_size = node_count(gt);
    r.distance = tree_edit_distance(pred, gt, CostModel{mode});
    r.similarity = 1.0 - r.distance / static_cast<double>(std::max(r.pred_size, r.gt_size));
    return r;
}

} // namespace

TedResult teds_structure(const StructTree& pred, const StructTree& gt) {
    return make_result(pred, gt, CostMode::StructureOnly);
}

TedResult teds(const StructTree& pred, const StructTree& gt) {
    return make_result(pred, gt, CostMode::StructurePlusContent);
}

} // namespace tabscore
