#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace emtest::cli {

enum class ScoreFormat { plain, csv };

// One parsed column of scores plus the label it was selected by.
struct ScoreColumn {
    std::vector<double> values;
    std::string label;
};

// Parse score values out of an in-memory document.
//
// plain: one number per line; blank lines and lines starting with '#' are
// skipped; `column` is ignored.
//
// csv: comma-separated fields. `column` selects by header name, or by
// 0-based index when it is all digits (or empty, which means index 0).
// With a named column the first row must be a header containing that name;
// with an index the first row is consumed as a header only when its
// selected field does not parse as a number.
//
// Numbers parse independent of locale; the Unicode minus sign U+2212 is
// accepted as a sign. Non-finite values and unparsable tokens raise
// parse_error carrying the 1-based line number. An input with no values
// raises degenerate_data_error.
ScoreColumn parse_scores(std::string_view content, ScoreFormat format,
                         std::string_view column = {});

// Read a whole file, or standard input when the path is "-".
// Raises parse_error (line 0) when the file cannot be opened.
std::string read_input(const std::string& path_or_dash);

// 64-bit FNV-1a over the raw bytes, rendered as "fnv1a:" + 16 hex digits.
std::string fnv1a_digest(std::string_view bytes);

// Locale-independent shortest rendering with the given number of
// significant digits (as printf %g but always using '.').
std::string format_significant(double value, int digits);

} // namespace emtest::cli
