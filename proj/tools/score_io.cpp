#include "score_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "../src/errors.hpp"

namespace emtest::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() &&
           std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

// Replace a leading U+2212 minus sign with '-'; returns the token in `buf`
// when rewriting was needed.
std::string_view normalize_sign(std::string_view token, std::string& buf) {
    constexpr std::string_view kMinus = "\xe2\x88\x92";
    if (token.substr(0, kMinus.size()) == kMinus) {
        buf.assign("-");
        buf.append(token.substr(kMinus.size()));
        return buf;
    }
    return token;
}

bool try_parse_double(std::string_view token, double& out) {
    std::string buf;
    token = normalize_sign(token, buf);
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

double parse_value(std::string_view token, std::size_t line_no) {
    double value;
    if (!try_parse_double(token, value)) {
        std::ostringstream msg;
        msg << "unparsable value '" << std::string(token) << "'";
        throw parse_error(msg.str(), line_no);
    }
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "non-finite value '" << std::string(token) << "'";
        throw parse_error(msg.str(), line_no);
    }
    return value;
}

// Split into lines; a trailing '\r' (CRLF input) is dropped.
std::vector<std::string_view> split_lines(std::string_view content) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < content.size()) {
                lines.push_back(content.substr(start));
            }
            break;
        }
        std::string_view line = content.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find(',', start);
        if (end == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, end - start)));
        start = end + 1;
    }
    return fields;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

ScoreColumn parse_plain(std::string_view content) {
    ScoreColumn col;
    col.label = "scores";
    auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        col.values.push_back(parse_value(line, i + 1));
    }
    return col;
}

ScoreColumn parse_csv(std::string_view content, std::string_view column) {
    auto lines = split_lines(content);
    std::size_t first_data = 0; // index into `lines` of the first data row
    std::size_t index = 0;
    ScoreColumn col;

    // Locate the first non-blank row; it is either the header or data.
    while (first_data < lines.size() && trim(lines[first_data]).empty()) {
        ++first_data;
    }
    if (first_data == lines.size()) {
        throw degenerate_data_error("no scores found in input");
    }

    if (!column.empty() && !all_digits(column)) {
        // Named column: the first row must be a header containing it.
        auto header = split_fields(trim(lines[first_data]));
        bool found = false;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == column) {
                index = j;
                found = true;
                break;
            }
        }
        if (!found) {
            std::ostringstream msg;
            msg << "column '" << std::string(column)
                << "' not found in header";
            throw parse_error(msg.str(), first_data + 1);
        }
        col.label = std::string(column);
        ++first_data;
    } else {
        if (!column.empty()) {
            index = 0;
            for (char c : column) index = index * 10 + (c - '0');
        }
        // Index selection: consume the first row as a header only when its
        // selected field is some non-numeric label.
        auto fields = split_fields(trim(lines[first_data]));
        double probe;
        bool numeric = index < fields.size() &&
                       try_parse_double(fields[index], probe);
        if (!numeric) {
            if (index < fields.size()) {
                col.label = std::string(fields[index]);
            }
            ++first_data;
        }
        if (col.label.empty()) {
            col.label = "column " + std::to_string(index);
        }
    }

    for (std::size_t i = first_data; i < lines.size(); ++i) {
        std::string_view line = trim(lines[i]);
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (index >= fields.size()) {
            std::ostringstream msg;
            msg << "row has " << fields.size() << " field(s), need column "
                << (index + 1);
            throw parse_error(msg.str(), i + 1);
        }
        col.values.push_back(parse_value(fields[index], i + 1));
    }
    return col;
}

} // namespace

ScoreColumn parse_scores(std::string_view content, ScoreFormat format,
                         std::string_view column) {
    // Strip a UTF-8 byte-order mark if present.
    constexpr std::string_view kBom = "\xef\xbb\xbf";
    if (content.substr(0, kBom.size()) == kBom) {
        content.remove_prefix(kBom.size());
    }
    ScoreColumn col = format == ScoreFormat::plain
                          ? parse_plain(content)
                          : parse_csv(content, column);
    if (col.values.empty()) {
        throw degenerate_data_error("no scores found in input");
    }
    return col;
}

std::string read_input(const std::string& path_or_dash) {
    if (path_or_dash == "-") {
        return std::string(std::istreambuf_iterator<char>(std::cin),
                           std::istreambuf_iterator<char>());
    }
    std::ifstream in(path_or_dash, std::ios::binary);
    if (!in) {
        throw parse_error("cannot open '" + path_or_dash + "'", 0);
    }
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

std::string fnv1a_digest(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string("fnv1a:") + buf;
}

std::string format_significant(double value, int digits) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value,
                                   std::chars_format::general, digits);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

} // namespace emtest::cli
