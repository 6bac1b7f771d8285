#include "latex_parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tabscore {

namespace {

bool is_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

std::string trim(std::string_view s) {
    size_t a = 0, b = s.size();
    while (a < b && is_space(s[a])) ++a;
    while (b > a && is_space(s[b - 1])) --b;
    return std::string(s.substr(a, b - a));
}

// Skips whitespace and %-comments. A comment runs to end of line.
size_t skip_blank(std::string_view s, size_t i) {
    while (i < s.size()) {
        if (is_space(s[i])) {
            ++i;
        } else if (s[i] == '%') {
            while (i < s.size() && s[i] != '\n')
                ++i;
        } else {
            break;
        }
    }
    return i;
}

// Reads the control word starting at the backslash; returns its name and the
// position after it. Empty name means a control symbol (\&, \\, ...).
std::pair<std::string_view, size_t> read_control_word(std::string_view s, size_t i) {
    size_t j = i + 1;
    if (j >= s.size() || !is_letter(s[j]))
        return {std::string_view{}, j < s.size() ? j + 1 : j};
    size_t k = j;
    while (k < s.size() && is_letter(s[k]))
        ++k;
    return {s.substr(j, k - j), k};
}

struct Group {
    size_t content_begin = 0;
    size_t content_end = 0; // position of the closing delimiter
    size_t end = 0;         // position after the closing delimiter
};

// Reads a balanced {...} group starting at `i` (which must point at '{').
// Escaped braces and comments are honored.
std::optional<Group> read_brace_group(std::string_view s, size_t i) {
    if (i >= s.size() || s[i] != '{')
        return std::nullopt;
    int depth = 0;
    size_t j = i;
    while (j < s.size()) {
        char c = s[j];
        if (c == '\\' && j + 1 < s.size()) {
            j += 2;
        } else if (c == '%') {
            while (j < s.size() && s[j] != '\n')
                ++j;
        } else if (c == '{') {
            ++depth;
            ++j;
        } else if (c == '}') {
            --depth;
            if (depth == 0)
                return Group{i + 1, j, j + 1};
            ++j;
        } else {
            ++j;
        }
    }
    return std::nullopt;
}

// Reads a [...] group; brackets do not nest in LaTeX but braces inside them do.
std::optional<Group> read_bracket_group(std::string_view s, size_t i) {
    if (i >= s.size() || s[i] != '[')
        return std::nullopt;
    size_t j = i + 1;
    while (j < s.size()) {
        char c = s[j];
        if (c == '\\' && j + 1 < s.size()) {
            j += 2;
        } else if (c == '{') {
            auto g = read_brace_group(s, j);
            if (!g)
                return std::nullopt;
            j = g->end;
        } else if (c == ']') {
            return Group{i + 1, j, j + 1};
        } else {
            ++j;
        }
    }
    return std::nullopt;
}

// Parses a brace group holding a positive integer, as required by
// \multicolumn/\multirow span arguments.
int parse_span_count(std::string_view s, const Group& g, const char* command) {
    std::string tok = trim(s.substr(g.content_begin, g.content_end - g.content_begin));
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || value < 1)
        throw ParseError(std::string(command) + " span must be a positive integer, got '" + tok + "'");
    return value;
}

} // namespace

std::string format_warning(const WarningRecord& w) {
    std::ostringstream os;
    os << "WARN " << (w.origin.document.empty() ? "-" : w.origin.document) << " "
       << w.origin.byte_offset << " " << w.message;
    return os.str();
}

ExtractResult extract_tabulars(std::string_view document, const std::string& document_id) {
    ExtractResult result;
    size_t i = 0;
    int depth = 0;
    size_t block_start = 0;
    while (i < document.size()) {
        char c = document[i];
        if (c == '%') {
            while (i < document.size() && document[i] != '\n')
                ++i;
            continue;
        }
        if (c != '\\') {
            ++i;
            continue;
        }
        auto [word, after] = read_control_word(document, i);
        if (word != "begin" && word != "end") {
            i = after;
            continue;
        }
        size_t k = skip_blank(document, after);
        auto g = read_brace_group(document, k);
        if (!g) {
            i = after;
            continue;
        }
        std::string_view env = document.substr(g->content_begin, g->content_end - g->content_begin);
        if (env != "tabular") {
            i = g->end;
            continue;
        }
        if (word == "begin") {
            if (depth == 0)
                block_start = i;
            ++depth;
        } else if (depth > 0) {
            --depth;
            if (depth == 0) {
                TabularSource src;
                src.raw = std::string(document.substr(block_start, g->end - block_start));
                src.origin = SourceOrigin{document_id, block_start};
                result.tables.push_back(std::move(src));
            }
        }
        // A stray \end{tabular} with no open block is ignored.
        i = g->end;
    }
    if (depth > 0) {
        result.warnings.push_back(
            {SourceOrigin{document_id, block_start},
             "unbalanced \\begin{tabular} without matching \\end{tabular}; fragment skipped"});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Cleaning

StripList StripList::builtin() {
    StripList list;
    // Sizing/spacing commands that never affect table structure.
    for (const char* name : {"centering", "raggedright", "raggedleft", "small", "footnotesize",
                             "scriptsize", "tiny", "normalsize", "large", "Large", "LARGE",
                             "huge", "Huge", "smallskip", "medskip", "bigskip", "addlinespace",
                             "arraybackslash", "boldmath", "unboldmath"})
        list.add(name, 0);
    for (const char* name : {"vspace", "hspace"})
        list.add(name, 1);
    return list;
}

StripList StripList::from_string(std::string_view text) {
    StripList list;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        size_t hash = line.find('#');
        if (hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::istringstream fields{std::string(line)};
        std::string name;
        int args = 0;
        if (fields >> name) {
            fields >> args;
            if (!name.empty() && name.front() == '\\')
                name.erase(0, 1);
            list.add(name, std::max(args, 0));
        }
    }
    return list;
}

StripList StripList::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open strip list: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

void StripList::add(std::string name, int brace_args) {
    for (auto& [n, a] : rules_) {
        if (n == name) {
            a = brace_args;
            return;
        }
    }
    rules_.emplace_back(std::move(name), brace_args);
}

int StripList::lookup(std::string_view name) const {
    for (const auto& [n, a] : rules_)
        if (n == name)
            return a;
    return -1;
}

namespace {

bool is_reference_command(std::string_view name) {
    static const std::array<std::string_view, 13> names = {
        "cite", "citep", "citet", "citealp", "citealt", "citeauthor", "citeyear",
        "ref",  "eqref", "pageref", "cref",  "Cref",    "autoref"};
    return std::find(names.begin(), names.end(), name) != names.end();
}

bool is_drop_color_command(std::string_view name) {
    return name == "color" || name == "rowcolor" || name == "cellcolor" ||
           name == "columncolor" || name == "arrayrulecolor";
}

struct Cleaner {
    std::string_view in;
    const StripList& strip;
    std::string out;

    void run() {
        size_t i = 0;
        while (i < in.size())
            i = step(i);
    }

    size_t step(size_t i) {
        char c = in[i];
        if (c == '%') {
            // Comments pass through untouched; the parser skips them later.
            size_t j = i;
            while (j < in.size() && in[j] != '\n')
                ++j;
            out.append(in.substr(i, j - i));
            return j;
        }
        if (c != '\\') {
            out.push_back(c);
            return i + 1;
        }
        auto [name, after] = read_control_word(in, i);
        if (name.empty()) {
            out.append(in.substr(i, after - i));
            return after;
        }
        if (is_reference_command(name))
            return drop_command(after, 1);
        if (is_drop_color_command(name))
            return drop_command(after, 1, /*trailing_brackets=*/true);
        if (name == "textcolor")
            return unwrap_textcolor(after);
        int args = strip.lookup(name);
        if (args >= 0)
            return drop_command(after, args);
        out.append(in.substr(i, after - i));
        return after;
    }

    // Drops the command plus a trailing star, adjacent [..] options, and
    // `brace_args` {..} groups.
    size_t drop_command(size_t i, int brace_args, bool trailing_brackets = false) {
        if (i < in.size() && in[i] == '*')
            ++i;
        while (i < in.size() && in[i] == '[') {
            auto g = read_bracket_group(in, i);
            if (!g)
                break;
            i = g->end;
        }
        for (int k = 0; k < brace_args; ++k) {
            size_t j = skip_blank(in, i);
            auto g = read_brace_group(in, j);
            if (!g)
                break; // malformed; keep remaining text untouched
            i = g->end;
        }
        if (trailing_brackets) {
            while (i < in.size() && in[i] == '[') {
                auto g = read_bracket_group(in, i);
                if (!g)
                    break;
                i = g->end;
            }
        }
        return i;
    }

    // \textcolor[model]{spec}{body} -> cleaned body without the braces.
    size_t unwrap_textcolor(size_t i) {
        size_t j = i;
        if (j < in.size() && in[j] == '[') {
            auto g = read_bracket_group(in, j);
            if (g)
                j = g->end;
        }
        size_t k = skip_blank(in, j);
        auto spec = read_brace_group(in, k);
        if (!spec) {
            out.append("\\textcolor");
            return i;
        }
        size_t m = skip_blank(in, spec->end);
        auto body = read_brace_group(in, m);
        if (!body) {
            // No body group: treat like a declaration and drop the spec only.
            return spec->end;
        }
        Cleaner inner{in.substr(body->content_begin, body->content_end - body->content_begin),
                      strip, {}};
        inner.run();
        out.append(inner.out);
        return body->end;
    }
};

} // namespace

TabularSource clean(const TabularSource& source, const StripList& strip) {
    Cleaner cleaner{source.raw, strip, {}};
    cleaner.run();
    TabularSource out;
    out.raw = std::move(cleaner.out);
    out.origin = source.origin;
    return out;
}

// ---------------------------------------------------------------------------
// Column specification

int count_columns(std::string_view spec) {
    struct Walker {
        int count(std::string_view s, int depth) {
            if (depth > 16)
                throw ParseError("column specification nests too deeply");
            int cols = 0;
            size_t i = 0;
            while (i < s.size()) {
                char c = s[i];
                if (is_space(c) || c == '|') {
                    ++i;
                } else if (c == 'p' || c == 'm' || c == 'b') {
                    ++cols;
                    i = skip_group_if_present(s, i + 1);
                } else if (c == 'w' || c == 'W') {
                    ++cols;
                    i = skip_group_if_present(s, i + 1);
                    i = skip_group_if_present(s, i);
                } else if (c == '@' || c == '!' || c == '>' || c == '<') {
                    i = skip_group_if_present(s, i + 1);
                } else if (c == '*') {
                    size_t j = skip_blank(s, i + 1);
                    auto n_group = read_brace_group(s, j);
                    if (!n_group)
                        throw ParseError("malformed column repetition '*' without {count}");
                    // Zero copies is legal here, unlike span arguments.
                    std::string tok =
                        trim(s.substr(n_group->content_begin,
                                      n_group->content_end - n_group->content_begin));
                    int n = 0;
                    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
                    if (ec != std::errc{} || ptr != tok.data() + tok.size() || n < 0)
                        throw ParseError("column repetition count must be a nonnegative integer, got '" +
                                         tok + "'");
                    size_t k = skip_blank(s, n_group->end);
                    auto spec_group = read_brace_group(s, k);
                    if (!spec_group)
                        throw ParseError("malformed column repetition '*' without {spec}");
                    cols += n * count(s.substr(spec_group->content_begin,
                                               spec_group->content_end - spec_group->content_begin),
                                      depth + 1);
                    i = spec_group->end;
                } else if (c == '\\') {
                    auto [word, after] = read_control_word(s, i);
                    (void)word;
                    i = after;
                } else if (is_letter(c)) {
                    // l, c, r and single-letter custom column types.
                    ++cols;
                    ++i;
                } else {
                    ++i;
                }
            }
            return cols;
        }

        static size_t skip_group_if_present(std::string_view s, size_t i) {
            size_t j = skip_blank(s, i);
            auto g = read_brace_group(s, j);
            return g ? g->end : i;
        }
    };
    return Walker{}.count(spec, 0);
}

// ---------------------------------------------------------------------------
// Tabular body parsing

namespace {

struct SourceCell {
    std::string content;
    int rowspan = 1;
    int colspan = 1;
};

// Commands that draw horizontal rules; value = number of brace arguments.
struct RuleCommand {
    std::string_view name;
    int brace_args;
    bool records_rule;
};

const std::array<RuleCommand, 10> kRuleCommands = {{
    {"hline", 0, true},
    {"cline", 1, true},
    {"toprule", 0, true},
    {"midrule", 0, true},
    {"bottomrule", 0, true},
    {"cmidrule", 1, true},
    {"hhline", 1, true},
    {"specialrule", 3, true},
    {"morecmidrules", 0, false},
    {"tabularnewline", 0, false}, // handled as a row break, listed for lookup
}};

const RuleCommand* find_rule_command(std::string_view name) {
    for (const auto& rc : kRuleCommands)
        if (rc.name == name)
            return &rc;
    return nullptr;
}

// Unwraps leading \multicolumn/\multirow wrappers covering the whole cell.
SourceCell parse_source_cell(const std::string& raw) {
    SourceCell cell;
    std::string text = trim(raw);
    for (;;) {
        if (text.size() < 2 || text[0] != '\\')
            break;
        auto [name, after] = read_control_word(text, 0);
        if (name == "multicolumn") {
            size_t i = skip_blank(text, after);
            auto n_group = read_brace_group(text, i);
            if (!n_group)
                throw ParseError("\\multicolumn is missing its {cols} argument");
            int n = parse_span_count(text, *n_group, "\\multicolumn");
            size_t j = skip_blank(text, n_group->end);
            auto spec_group = read_brace_group(text, j);
            if (!spec_group)
                throw ParseError("\\multicolumn is missing its {spec} argument");
            size_t k = skip_blank(text, spec_group->end);
            auto body_group = read_brace_group(text, k);
            if (!body_group)
                throw ParseError("\\multicolumn is missing its {body} argument");
            if (trim(text.substr(body_group->end)).empty()) {
                cell.colspan = n;
                text = trim(text.substr(body_group->content_begin,
                                        body_group->content_end - body_group->content_begin));
                continue;
            }
            break; // trailing content: the command does not wrap the whole cell
        }
        if (name == "multirow") {
            size_t i = skip_blank(text, after);
            if (auto opt = read_bracket_group(text, i))
                i = opt->end;
            i = skip_blank(text, i);
            auto n_group = read_brace_group(text, i);
            if (!n_group)
                throw ParseError("\\multirow is missing its {rows} argument");
            int n = parse_span_count(text, *n_group, "\\multirow");
            size_t j = skip_blank(text, n_group->end);
            if (auto opt = read_bracket_group(text, j))
                j = opt->end;
            j = skip_blank(text, j);
            auto width_group = read_brace_group(text, j); // width is parsed and discarded
            if (!width_group)
                throw ParseError("\\multirow is missing its {width} argument");
            size_t k = skip_blank(text, width_group->end);
            if (auto opt = read_bracket_group(text, k))
                k = opt->end;
            k = skip_blank(text, k);
            auto body_group = read_brace_group(text, k);
            if (!body_group)
                throw ParseError("\\multirow is missing its {body} argument");
            if (trim(text.substr(body_group->end)).empty()) {
                cell.rowspan = n;
                text = trim(text.substr(body_group->content_begin,
                                        body_group->content_end - body_group->content_begin));
                continue;
            }
            break;
        }
        break;
    }
    cell.content = text;
    return cell;
}

// Splits the tabular body into rows/cells at depth 0, stripping comments and
// recording rule positions. `begin` points just past the column spec;
// returns via out parameters.
void split_body(std::string_view s, size_t begin,
                std::vector<std::vector<std::string>>& rows, std::vector<int>& rules) {
    std::vector<std::string> cur_row;
    std::string cur;
    int brace_depth = 0;
    int env_depth = 0;
    bool closed = false;
    bool row_dirty = false; // current row segment has seen a cell separator or content

    auto record_rule = [&](size_t) {
        int pos = static_cast<int>(rows.size());
        if (row_dirty || !cur_row.empty() || !trim(cur).empty())
            pos += 1; // rule glued after content without \\; attach to the next boundary
        rules.push_back(pos);
    };

    size_t i = begin;
    while (i < s.size()) {
        char c = s[i];
        if (c == '%') {
            while (i < s.size() && s[i] != '\n')
                ++i;
            continue;
        }
        if (c == '{') {
            ++brace_depth;
            cur.push_back(c);
            ++i;
            continue;
        }
        if (c == '}') {
            if (--brace_depth < 0)
                throw ParseError("unbalanced '}' in tabular body");
            cur.push_back(c);
            ++i;
            continue;
        }
        if (c != '\\') {
            cur.push_back(c);
            ++i;
            if (c == '&' && brace_depth == 0 && env_depth == 0) {
                cur.pop_back();
                cur_row.push_back(cur);
                cur.clear();
                row_dirty = true;
            }
            continue;
        }

        // Control sequence.
        auto [name, after] = read_control_word(s, i);
        if (name.empty()) {
            char sym = (after == i + 2) ? s[i + 1] : '\0';
            if (sym == '\\' && brace_depth == 0 && env_depth == 0) {
                // Row terminator: optional star, optional same-line [len].
                size_t j = after;
                if (j < s.size() && s[j] == '*')
                    ++j;
                size_t k = j;
                while (k < s.size() && (s[k] == ' ' || s[k] == '\t'))
                    ++k;
                if (k < s.size() && s[k] == '[') {
                    if (auto g = read_bracket_group(s, k))
                        j = g->end;
                }
                cur_row.push_back(cur);
                cur.clear();
                rows.push_back(std::move(cur_row));
                cur_row.clear();
                row_dirty = false;
                i = j;
                continue;
            }
            cur.append(s.substr(i, after - i));
            i = after;
            continue;
        }

        if (name == "begin" || name == "end") {
            size_t j = skip_blank(s, after);
            auto g = read_brace_group(s, j);
            if (!g)
                throw ParseError("malformed \\" + std::string(name) + " in tabular body");
            std::string_view env = s.substr(g->content_begin, g->content_end - g->content_begin);
            if (name == "begin") {
                ++env_depth;
            } else {
                if (env_depth == 0) {
                    if (env != "tabular")
                        throw ParseError("unexpected \\end{" + std::string(env) + "}");
                    closed = true;
                    i = g->end;
                    break;
                }
                --env_depth;
            }
            cur.append(s.substr(i, g->end - i));
            i = g->end;
            continue;
        }

        if (brace_depth == 0 && env_depth == 0) {
            if (name == "tabularnewline") {
                cur_row.push_back(cur);
                cur.clear();
                rows.push_back(std::move(cur_row));
                cur_row.clear();
                row_dirty = false;
                i = after;
                continue;
            }
            if (const RuleCommand* rc = find_rule_command(name)) {
                size_t j = after;
                if (j < s.size() && s[j] == '(') { // \cmidrule(lr){...}
                    size_t k = j + 1;
                    while (k < s.size() && s[k] != ')')
                        ++k;
                    j = k < s.size() ? k + 1 : k;
                }
                if (j < s.size() && s[j] == '[') {
                    if (auto g = read_bracket_group(s, j))
                        j = g->end;
                }
                for (int a = 0; a < rc->brace_args; ++a) {
                    size_t k = skip_blank(s, j);
                    auto g = read_brace_group(s, k);
                    if (!g)
                        break;
                    j = g->end;
                }
                if (rc->records_rule)
                    record_rule(i);
                i = j;
                continue;
            }
        }
        cur.append(s.substr(i, after - i));
        i = after;
    }

    if (!closed)
        throw ParseError("missing \\end{tabular}");
    if (brace_depth != 0)
        throw ParseError("unbalanced '{' in tabular body");
    if (env_depth != 0)
        throw ParseError("unbalanced environment in tabular body");

    if (!cur_row.empty() || !trim(cur).empty()) {
        cur_row.push_back(cur);
        rows.push_back(std::move(cur_row));
    }
}

} // namespace

TableModel parse_tabular(const TabularSource& source) {
    std::string_view s = source.raw;
    size_t i = skip_blank(s, 0);

    auto expect_begin = [&]() {
        if (i < s.size() && s[i] == '\\') {
            auto [word, after] = read_control_word(s, i);
            if (word == "begin") {
                size_t j = skip_blank(s, after);
                auto g = read_brace_group(s, j);
                if (g && s.substr(g->content_begin, g->content_end - g->content_begin) == "tabular") {
                    i = g->end;
                    return;
                }
            }
        }
        throw ParseError("source does not start with \\begin{tabular}");
    };
    expect_begin();

    i = skip_blank(s, i);
    if (i < s.size() && s[i] == '[') {
        if (auto g = read_bracket_group(s, i))
            i = g->end;
    }
    i = skip_blank(s, i);
    auto spec_group = read_brace_group(s, i);
    if (!spec_group)
        throw ParseError("tabular preamble is missing its column specification");

    TableModel model;
    model.column_spec =
        std::string(s.substr(spec_group->content_begin, spec_group->content_end - spec_group->content_begin));
    model.n_cols = count_columns(model.column_spec);
    if (model.n_cols <= 0)
        throw ParseError("column specification declares no columns: '" + model.column_spec + "'");

    std::vector<std::vector<std::string>> raw_rows;
    split_body(s, spec_group->end, raw_rows, model.rules);
    if (raw_rows.empty())
        throw ParseError("tabular body contains no rows");

    // Grid fill. covered_until[c] > r means slot (r, c) is covered by a
    // rowspan anchored above.
    std::vector<int> covered_until(model.n_cols, 0);
    for (size_t r = 0; r < raw_rows.size(); ++r) {
        const int row = static_cast<int>(r);
        int col = 0;
        for (const std::string& raw_cell : raw_rows[r]) {
            SourceCell sc = parse_source_cell(raw_cell);
            if (col >= model.n_cols) {
                if (sc.content.empty() && sc.colspan == 1 && sc.rowspan == 1)
                    continue; // stray trailing '&'
                throw ParseError("row " + std::to_string(row + 1) + " has more cells than the " +
                                 std::to_string(model.n_cols) + " declared columns");
            }
            if (covered_until[col] > row) {
                // Continuation slot of a rowspan: the source cell must be empty.
                if (!sc.content.empty() || sc.rowspan != 1)
                    throw ParseError("cell at row " + std::to_string(row + 1) + ", column " +
                                     std::to_string(col + 1) +
                                     " overlaps a \\multirow continuation");
                for (int k = col; k < col + sc.colspan; ++k) {
                    if (k >= model.n_cols || covered_until[k] <= row)
                        throw ParseError("empty continuation cell at row " + std::to_string(row + 1) +
                                         " does not line up with the \\multirow above");
                }
                col += sc.colspan;
                continue;
            }
            if (col + sc.colspan > model.n_cols)
                throw ParseError("span of " + std::to_string(sc.colspan) + " at row " +
                                 std::to_string(row + 1) + " exceeds the " +
                                 std::to_string(model.n_cols) + " declared columns");
            for (int k = col; k < col + sc.colspan; ++k) {
                if (covered_until[k] > row)
                    throw ParseError("cell span at row " + std::to_string(row + 1) + ", column " +
                                     std::to_string(col + 1) + " collides with a \\multirow above");
            }
            Cell cell;
            cell.content = std::move(sc.content);
            cell.rowspan = sc.rowspan;
            cell.colspan = sc.colspan;
            cell.row = row;
            cell.col = col;
            model.cells.push_back(std::move(cell));
            for (int k = col; k < col + sc.colspan; ++k)
                covered_until[k] = row + sc.rowspan;
            col += sc.colspan;
        }
        // Ragged row: pad uncovered trailing slots with empty unit cells.
        for (; col < model.n_cols; ++col) {
            if (covered_until[col] > row)
                continue;
            Cell pad;
            pad.row = row;
            pad.col = col;
            model.cells.push_back(std::move(pad));
            covered_until[col] = row + 1;
        }
    }

    model.n_rows = static_cast<int>(raw_rows.size());
    for (const Cell& cell : model.cells) {
        if (cell.row + cell.rowspan > model.n_rows)
            throw ParseError("\\multirow at row " + std::to_string(cell.row + 1) + ", column " +
                             std::to_string(cell.col + 1) + " extends beyond the last row");
    }
    for (int& rule : model.rules)
        rule = std::min(rule, model.n_rows);
    return model;
}

long cell_count(const TableModel& model) {
    return static_cast<long>(model.n_rows) * model.n_cols;
}

const char* to_string(ComplexityClass c) {
    switch (c) {
    case ComplexityClass::Simple:
        return "simple";
    case ComplexityClass::Medium:
        return "medium";
    case ComplexityClass::Complex:
        return "complex";
    }
    return "simple";
}

std::optional<ComplexityClass> complexity_from_string(std::string_view s) {
    if (s == "simple")
        return ComplexityClass::Simple;
    if (s == "medium")
        return ComplexityClass::Medium;
    if (s == "complex")
        return ComplexityClass::Complex;
    return std::nullopt;
}

ComplexityClass classify_complexity(const TableModel& model, int span_command_count) {
    long cells = cell_count(model);
    if (cells > 160)
        return ComplexityClass::Complex;
    if (span_command_count >= 2 && cells >= 100 && cells <= 160)
        return ComplexityClass::Medium;
    return ComplexityClass::Simple;
}

int count_span_commands(std::string_view latex) {
    int count = 0;
    size_t i = 0;
    while (i < latex.size()) {
        char c = latex[i];
        if (c == '%') {
            while (i < latex.size() && latex[i] != '\n')
                ++i;
            continue;
        }
        if (c != '\\') {
            ++i;
            continue;
        }
        auto [name, after] = read_control_word(latex, i);
        if (name == "multirow" || name == "multicolumn")
            ++count;
        i = after;
    }
    return count;
}

} // namespace tabscore
