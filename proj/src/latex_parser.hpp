// latex_parser.hpp - extraction, cleaning, parsing and complexity
// classification of LaTeX tabular environments
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tabscore {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SourceOrigin {
    std::string document; // file path or other identifier; may be empty
    std::size_t byte_offset = 0;
};

// One balanced \begin{tabular}...\end{tabular} block, verbatim.
struct TabularSource {
    std::string raw;
    std::optional<SourceOrigin> origin;
};

struct WarningRecord {
    SourceOrigin origin;
    std::string message;
};

// Formats as `WARN <origin> <byte-offset> <message>`.
std::string format_warning(const WarningRecord& w);

struct ExtractResult {
    std::vector<TabularSource> tables;
    std::vector<WarningRecord> warnings;
};

// Returns every top-level balanced tabular block in document order. Nested
// tabulars stay embedded in the enclosing block. An unmatched
// \begin{tabular} is skipped and reported as a warning.
ExtractResult extract_tabulars(std::string_view document, const std::string& document_id = "");

// Commands removed by clean() beyond the fixed reference/color set.
// File format: one command name per line, optionally followed by the number
// of brace arguments to consume (default 0); '#' starts a comment.
class StripList {
public:
    static StripList builtin();
    static StripList from_file(const std::string& path);
    static StripList from_string(std::string_view text);

    void add(std::string name, int brace_args = 0);
    // Returns the brace-argument count for a listed command, or -1 if the
    // command is not on the list.
    int lookup(std::string_view name) const;

private:
    std::vector<std::pair<std::string, int>> rules_;
};

// Removes \cite/\ref/\label, color commands, and strip-listed commands.
// Structural commands (\multirow, \multicolumn, \hline, \cline, &, \\) pass
// through verbatim. Idempotent on balanced input.
TabularSource clean(const TabularSource& source, const StripList& strip = StripList::builtin());

struct Cell {
    std::string content;
    int rowspan = 1;
    int colspan = 1;
    int row = 0; // anchor grid slot
    int col = 0;

    bool operator==(const Cell&) const = default;
};

// Logical grid. Invariant: every slot (r, c) with r < n_rows, c < n_cols is
// covered by exactly one cell and no cell crosses the grid boundary.
struct TableModel {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<Cell> cells; // ordered by (row, col)
    std::string column_spec; // tabular preamble, verbatim
    std::vector<int> rules;  // horizontal rule positions in [0, n_rows]

    bool operator==(const TableModel&) const = default;
};

// Parses a cleaned tabular block. Throws ParseError naming the offending
// token on malformed span arguments or spans exceeding the grid.
TableModel parse_tabular(const TabularSource& source);

// Grid-slot count: n_rows * n_cols.
long cell_count(const TableModel& model);

enum class ComplexityClass { Simple, Medium, Complex };

const char* to_string(ComplexityClass c);
std::optional<ComplexityClass> complexity_from_string(std::string_view s);

// Complex iff cell_count > 160; Medium iff span_command_count >= 2 and
// cell_count in [100, 160]; Simple otherwise.
ComplexityClass classify_complexity(const TableModel& model, int span_command_count);

// Number of \multirow plus \multicolumn occurrences (token-boundary aware).
int count_span_commands(std::string_view latex);

// Number of columns declared by a tabular preamble (expands *{n}{spec}).
int count_columns(std::string_view column_spec);

} // namespace tabscore
