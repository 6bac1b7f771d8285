#include "table_gen.hpp"

#include <sstream>

namespace tabscore::testsupport {

namespace {

std::string random_content(std::mt19937& rng) {
    static const char* samples[] = {"",        "x",          "12.5",        "alpha",
                                    "a b",     "\\textbf{v}", "$x_1$",       "n/a",
                                    "A \\& B", "99\\%",       "\\emph{och}", "cell"};
    std::uniform_int_distribution<int> pick(0, 11);
    return samples[pick(rng)];
}

} // namespace

GeneratedTable random_table(std::mt19937& rng, int max_rows, int max_cols, double span_prob) {
    std::uniform_int_distribution<int> rows_dist(1, max_rows);
    std::uniform_int_distribution<int> cols_dist(1, max_cols);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int n_rows = rows_dist(rng);
    const int n_cols = cols_dist(rng);

    GeneratedTable out;
    out.expected.n_rows = n_rows;
    out.expected.n_cols = n_cols;

    static const char aligns[] = {'l', 'c', 'r'};
    std::uniform_int_distribution<int> align_dist(0, 2);
    for (int c = 0; c < n_cols; ++c)
        out.expected.column_spec.push_back(aligns[align_dist(rng)]);

    // owner[r][c]: index into expected.cells, -1 when free.
    std::vector<int> owner(static_cast<size_t>(n_rows) * n_cols, -1);
    auto at = [&](int r, int c) -> int& { return owner[static_cast<size_t>(r) * n_cols + c]; };

    for (int r = 0; r < n_rows; ++r) {
        for (int c = 0; c < n_cols; ++c) {
            if (at(r, c) != -1)
                continue;
            int max_cs = 1;
            while (c + max_cs < n_cols && at(r, c + max_cs) == -1)
                ++max_cs;
            int cs = 1, rs = 1;
            if (unit(rng) < span_prob) {
                cs = std::uniform_int_distribution<int>(1, std::min(max_cs, 3))(rng);
                int max_rs = 1;
                auto block_free = [&](int rows_deep) {
                    for (int rr = r; rr < r + rows_deep; ++rr)
                        for (int cc = c; cc < c + cs; ++cc)
                            if (rr >= n_rows || at(rr, cc) != -1)
                                return false;
                    return true;
                };
                while (max_rs < 3 && r + max_rs < n_rows && block_free(max_rs + 1))
                    ++max_rs;
                rs = std::uniform_int_distribution<int>(1, max_rs)(rng);
            }
            Cell cell;
            cell.row = r;
            cell.col = c;
            cell.rowspan = rs;
            cell.colspan = cs;
            cell.content = random_content(rng);
            int idx = static_cast<int>(out.expected.cells.size());
            out.expected.cells.push_back(cell);
            for (int rr = r; rr < r + rs; ++rr)
                for (int cc = c; cc < c + cs; ++cc)
                    at(rr, cc) = idx;
        }
    }

    // Random rules, positions non-decreasing.
    std::ostringstream body;
    auto maybe_rule = [&](int position) {
        if (unit(rng) < 0.3) {
            body << "\\hline\n";
            out.expected.rules.push_back(position);
        }
    };

    body << "\\begin{tabular}{" << out.expected.column_spec << "}\n";
    maybe_rule(0);
    for (int r = 0; r < n_rows; ++r) {
        bool first = true;
        for (int c = 0; c < n_cols;) {
            if (!first)
                body << " & ";
            first = false;
            const Cell& cell = out.expected.cells[at(r, c)];
            if (cell.row == r && cell.col == c) {
                if (cell.colspan > 1 && cell.rowspan > 1)
                    body << "\\multicolumn{" << cell.colspan << "}{c}{\\multirow{" << cell.rowspan
                         << "}{*}{" << cell.content << "}}";
                else if (cell.colspan > 1)
                    body << "\\multicolumn{" << cell.colspan << "}{c}{" << cell.content << "}";
                else if (cell.rowspan > 1)
                    body << "\\multirow{" << cell.rowspan << "}{*}{" << cell.content << "}";
                else
                    body << cell.content;
                c += cell.colspan;
            } else if (cell.col == c && unit(rng) < 0.5) {
                // Continuation row of a wide rowspan written as an empty multicolumn.
                body << "\\multicolumn{" << cell.colspan << "}{c}{}";
                c += cell.colspan;
            } else {
                c += 1; // plain empty continuation slot
            }
        }
        body << " \\\\\n";
        maybe_rule(r + 1);
    }
    body << "\\end{tabular}";
    out.latex = body.str();
    return out;
}

bool full_coverage(const TableModel& model, std::string* why) {
    std::vector<int> cover(static_cast<size_t>(model.n_rows) * model.n_cols, 0);
    for (const Cell& cell : model.cells) {
        if (cell.row < 0 || cell.col < 0 || cell.rowspan < 1 || cell.colspan < 1 ||
            cell.row + cell.rowspan > model.n_rows || cell.col + cell.colspan > model.n_cols) {
            if (why)
                *why = "cell exceeds grid boundary";
            return false;
        }
        for (int r = cell.row; r < cell.row + cell.rowspan; ++r)
            for (int c = cell.col; c < cell.col + cell.colspan; ++c)
                ++cover[static_cast<size_t>(r) * model.n_cols + c];
    }
    for (int r = 0; r < model.n_rows; ++r) {
        for (int c = 0; c < model.n_cols; ++c) {
            int n = cover[static_cast<size_t>(r) * model.n_cols + c];
            if (n != 1) {
                if (why)
                    *why = "slot (" + std::to_string(r) + "," + std::to_string(c) + ") covered " +
                           std::to_string(n) + " times";
                return false;
            }
        }
    }
    return true;
}

} // namespace tabscore::testsupport
