#include "structure_tree.hpp"

#include <algorithm>
#include <sstream>

namespace tabscore {

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            pending_space = !out.empty();
        } else {
            if (pending_space)
                out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

StructTree to_structure_tree(const TableModel& model) {
    std::vector<const Cell*> ordered;
    ordered.reserve(model.cells.size());
    for (const Cell& cell : model.cells)
        ordered.push_back(&cell);
    std::sort(ordered.begin(), ordered.end(), [](const Cell* a, const Cell* b) {
        return a->row != b->row ? a->row < b->row : a->col < b->col;
    });

    StructTree tree;
    tree.root.tag = NodeTag::Table;
    tree.root.children.resize(model.n_rows);
    for (int r = 0; r < model.n_rows; ++r)
        tree.root.children[r].tag = NodeTag::Tr;
    for (const Cell* cell : ordered) {
        StructNode td;
        td.tag = NodeTag::Td;
        td.colspan = cell->colspan;
        td.rowspan = cell->rowspan;
        td.text = normalize_whitespace(cell->content);
        tree.root.children[cell->row].children.push_back(std::move(td));
    }
    return tree;
}

int node_count(const StructNode& node) {
    int n = 1;
    for (const StructNode& child : node.children)
        n += node_count(child);
    return n;
}

int node_count(const StructTree& tree) {
    return node_count(tree.root);
}

std::string escape_html(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        default:
            out.push_back(c);
        }
    }
    return out;
}

namespace {

const char* tag_name(NodeTag tag) {
    switch (tag) {
    case NodeTag::Table:
        return "table";
    case NodeTag::Tr:
        return "tr";
    case NodeTag::Td:
        return "td";
    }
    return "td";
}

void serialize_node(const StructNode& node, std::string& out) {
    out.push_back('<');
    out += tag_name(node.tag);
    if (node.tag == NodeTag::Td) {
        if (node.colspan != 1) {
            out += " colspan=\"";
            out += std::to_string(node.colspan);
            out += "\"";
        }
        if (node.rowspan != 1) {
            out += " rowspan=\"";
            out += std::to_string(node.rowspan);
            out += "\"";
        }
    }
    out.push_back('>');
    if (node.tag == NodeTag::Td)
        out += escape_html(node.text);
    for (const StructNode& child : node.children)
        serialize_node(child, out);
    out += "</";
    out += tag_name(node.tag);
    out.push_back('>');
}

} // namespace

std::string serialize_html(const StructTree& tree) {
    std::string out;
    serialize_node(tree.root, out);
    return out;
}

std::string to_canonical_latex(const TableModel& model) {
    // Anchor lookup per grid slot; -1 marks continuation slots.
    std::vector<int> anchor(static_cast<size_t>(model.n_rows) * model.n_cols, -1);
    for (size_t idx = 0; idx < model.cells.size(); ++idx) {
        const Cell& cell = model.cells[idx];
        for (int r = cell.row; r < cell.row + cell.rowspan; ++r)
            for (int c = cell.col; c < cell.col + cell.colspan; ++c)
                anchor[static_cast<size_t>(r) * model.n_cols + c] =
                    (r == cell.row && c == cell.col) ? static_cast<int>(idx) : -1 - static_cast<int>(idx);
    }

    std::ostringstream os;
    os << "\\begin{tabular}{" << model.column_spec << "}\n";
    auto emit_rules = [&](int position) {
        for (int rule : model.rules)
            if (rule == position)
                os << "\\hline\n";
    };
    emit_rules(0);
    for (int r = 0; r < model.n_rows; ++r) {
        bool first = true;
        for (int c = 0; c < model.n_cols;) {
            if (!first)
                os << " & ";
            first = false;
            int a = anchor[static_cast<size_t>(r) * model.n_cols + c];
            if (a >= 0) {
                const Cell& cell = model.cells[static_cast<size_t>(a)];
                if (cell.colspan > 1 && cell.rowspan > 1)
                    os << "\\multicolumn{" << cell.colspan << "}{c}{\\multirow{" << cell.rowspan
                       << "}{*}{" << cell.content << "}}";
                else if (cell.colspan > 1)
                    os << "\\multicolumn{" << cell.colspan << "}{c}{" << cell.content << "}";
                else if (cell.rowspan > 1)
                    os << "\\multirow{" << cell.rowspan << "}{*}{" << cell.content << "}";
                else
                    os << cell.content;
                c += cell.colspan;
            } else {
                // Continuation slot: one empty source cell keeps the grid aligned.
                c += 1;
            }
        }
        os << " \\\\\n";
        emit_rules(r + 1);
    }
    os << "\\end{tabular}";
    return os.str();
}

} // namespace tabscore
