#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace loodiag {

/// A named regression problem: response, predictor columns, and whether a
/// ones column is prepended when the design matrix is formed.
struct Dataset {
    std::string name;
    Vector y;
    Matrix predictors;  // n x m, file order
    bool intercept = true;
    std::string provenance;
    std::uint64_t checksum = 0;  // FNV-1a 64 of the canonical CSV bytes

    Dataset() : predictors(1, 1) {}
};

/// FNV-1a, 64-bit. Used to pin the vendored dataset files; not cryptographic.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Design matrix of a dataset: the predictors, with a leading ones column
/// when the dataset carries an intercept.
inline Matrix design_matrix(const Dataset& ds) {
    if (!ds.intercept) return ds.predictors;
    const std::size_t n = ds.predictors.rows();
    const std::size_t m = ds.predictors.cols();
    Matrix x(n, m + 1);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (std::size_t j = 0; j < m; ++j) x(i, j + 1) = ds.predictors(i, j);
    }
    return x;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
}

inline bool parse_cell(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* begin = cell.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + cell.size();
}

struct CsvLine {
    std::size_t file_line;  // 1-based line number in the source text
    std::vector<std::string> cells;
};

inline std::vector<CsvLine> split_csv(std::string_view text) {
    std::vector<CsvLine> lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string raw(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (trim(raw).empty()) continue;  // blank lines (incl. trailing) are ignored

        CsvLine line{line_no, {}};
        std::size_t cell_start = 0;
        for (std::size_t i = 0; i <= raw.size(); ++i) {
            if (i == raw.size() || raw[i] == ',') {
                line.cells.push_back(trim(raw.substr(cell_start, i - cell_start)));
                cell_start = i + 1;
            }
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

/// Parse CSV text into a Dataset. Dialect: comma delimiter, optional single
/// header row auto-detected by a non-numeric first row, decimal point only.
/// A cell that fails to parse in the first data row marks its whole column as
/// non-numeric; a failure after the column has parsed before is a ParseError.
inline Dataset parse_csv_text(std::string_view text, const std::string& response_column,
                              bool intercept, const std::string& source) {
    const std::vector<CsvLine> lines = split_csv(text);
    if (lines.empty()) throw EmptyDataError(source + ": no data");

    std::vector<std::string> names;
    std::size_t first_data = 0;
    {
        bool all_numeric = true;
        double tmp;
        for (const std::string& c : lines[0].cells) {
            if (!parse_cell(c, tmp)) {
                all_numeric = false;
                break;
            }
        }
        if (!all_numeric) {
            names = lines[0].cells;
            first_data = 1;
        } else {
            names.resize(lines[0].cells.size());
            for (std::size_t j = 0; j < names.size(); ++j) names[j] = "col" + std::to_string(j + 1);
        }
    }
    const std::size_t ncols = names.size();
    if (first_data >= lines.size()) throw EmptyDataError(source + ": header but no data rows");

    std::vector<Vector> columns(ncols);
    for (std::size_t li = first_data; li < lines.size(); ++li) {
        const CsvLine& line = lines[li];
        if (line.cells.size() != ncols) {
            throw ParseError(source + ": line " + std::to_string(line.file_line) + " has " +
                                 std::to_string(line.cells.size()) + " cells, expected " +
                                 std::to_string(ncols),
                             line.file_line, 1);
        }
        for (std::size_t j = 0; j < ncols; ++j) {
            double v;
            if (!parse_cell(line.cells[j], v)) {
                if (li == first_data) {
                    throw NonNumericColumnError(source + ": column '" + names[j] +
                                                "' is not numeric (line " +
                                                std::to_string(line.file_line) + ")");
                }
                throw ParseError(source + ": cell at line " + std::to_string(line.file_line) +
                                     ", column " + std::to_string(j + 1) + " is not numeric",
                                 line.file_line, j + 1);
            }
            if (!std::isfinite(v)) {
                throw ParseError(source + ": non-finite value at line " +
                                     std::to_string(line.file_line) + ", column " +
                                     std::to_string(j + 1),
                                 line.file_line, j + 1);
            }
            columns[j].push_back(v);
        }
    }

    // Resolve the response column by name, or by 1-based index.
    std::size_t resp = ncols;
    for (std::size_t j = 0; j < ncols; ++j) {
        if (names[j] == response_column) {
            resp = j;
            break;
        }
    }
    if (resp == ncols) {
        bool digits = !response_column.empty();
        for (char c : response_column) {
            if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
        }
        if (digits) {
            const std::size_t idx = static_cast<std::size_t>(std::stoul(response_column));
            if (idx >= 1 && idx <= ncols) resp = idx - 1;
        }
    }
    if (resp == ncols) {
        throw UnknownColumnError(source + ": response column '" + response_column + "' not found");
    }
    if (ncols < 2) throw EmptyDataError(source + ": no predictor columns remain");

    Dataset ds;
    ds.y = columns[resp];
    const std::size_t n = ds.y.size();
    const std::size_t m = ncols - 1;
    ds.predictors = Matrix(n, m);
    std::size_t out_col = 0;
    for (std::size_t j = 0; j < ncols; ++j) {
        if (j == resp) continue;
        for (std::size_t i = 0; i < n; ++i) ds.predictors(i, out_col) = columns[j][i];
        ++out_col;
    }
    ds.intercept = intercept;
    ds.checksum = fnv1a64(text);
    if (n <= m + (intercept ? 1u : 0u)) {
        throw Error(source + ": needs more than " + std::to_string(m + (intercept ? 1 : 0)) +
                    " rows to fit, got " + std::to_string(n));
    }
    return ds;
}

}  // namespace detail

/// Load a CSV file into a Dataset. response_column is a header name or a
/// 1-based column index.
inline Dataset load_csv(const std::string& path, const std::string& response_column,
                        bool intercept = true) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    Dataset ds = detail::parse_csv_text(text, response_column, intercept, path);
    std::size_t sep = path.find_last_of("/\\");
    std::string base = (sep == std::string::npos) ? path : path.substr(sep + 1);
    if (base.size() > 4 && base.substr(base.size() - 4) == ".csv") base.resize(base.size() - 4);
    ds.name = base;
    ds.provenance = "loaded from " + path;
    return ds;
}

namespace builtin_data {

// Canonical CSV content of the bundled datasets. The same bytes are vendored
// under data/ with a checksum manifest; the pipeline reproducing the
// published diagnostic values is the provenance gate for these numbers.

inline constexpr std::uint64_t kHaldChecksum = 0xfff1f04da7466f82ULL;
inline constexpr char kHaldCsv[] =
    R"(y,x1,x2,x3,x4
78.5,7,26,6,60
74.3,1,29,15,52
104.3,11,56,8,20
87.6,11,31,8,47
95.9,7,52,6,33
109.2,11,55,9,22
102.7,3,71,17,6
72.5,1,31,22,44
93.1,2,54,18,22
115.9,21,47,4,26
83.8,1,40,23,34
113.3,11,66,9,12
109.4,10,68,8,12
)";

inline constexpr std::uint64_t kBodyfatChecksum = 0xa5a8e56e3c8bcc5cULL;
inline constexpr char kBodyfatCsv[] =
    R"(y,triceps,thigh,midarm
11.9,19.5,43.1,29.1
22.8,24.7,49.8,28.2
18.7,30.7,51.9,37.0
20.1,29.8,54.3,31.1
12.9,19.1,42.2,30.9
21.7,25.6,53.9,23.7
27.1,31.4,58.5,27.6
25.4,27.9,52.1,30.6
21.3,22.1,49.9,23.2
19.3,25.5,53.5,24.8
25.4,31.1,56.6,30.0
27.2,30.4,56.7,28.3
11.7,18.7,46.5,23.0
17.8,19.7,44.2,28.6
12.8,14.6,42.7,21.3
23.9,29.5,54.4,30.1
22.6,27.7,55.3,25.7
25.4,30.2,58.6,24.6
14.8,22.7,48.2,27.1
21.1,25.2,51.0,27.5
)";

inline constexpr std::uint64_t kRatChecksum = 0xf42a01e29f9619b4ULL;
inline constexpr char kRatCsv[] =
    R"(y,body_wt,liver_wt,dose
0.42,176,6.5,0.88
0.25,176,9.5,0.88
0.56,190,9.0,1.00
0.23,176,8.9,0.88
0.23,200,7.2,1.00
0.32,167,8.9,0.83
0.37,188,8.0,0.94
0.41,195,10.0,0.98
0.33,176,8.0,0.88
0.38,165,7.9,0.84
0.27,158,6.9,0.80
0.36,148,7.3,0.74
0.21,149,5.2,0.75
0.28,163,8.4,0.81
0.34,170,7.2,0.85
0.28,186,6.8,0.94
0.30,146,7.3,0.73
0.37,181,9.0,0.90
0.46,149,6.4,0.75
)";

}  // namespace builtin_data

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"hald", "bodyfat", "rat"};
    return names;
}

/// Canonical CSV bytes of a bundled dataset (exactly the vendored file).
inline std::string_view builtin_csv(const std::string& lower_name) {
    if (lower_name == "hald") return builtin_data::kHaldCsv;
    if (lower_name == "bodyfat") return builtin_data::kBodyfatCsv;
    if (lower_name == "rat") return builtin_data::kRatCsv;
    throw UnknownDatasetError("unknown dataset '" + lower_name + "'");
}

/// Bundled dataset by name (case-insensitive): hald, bodyfat, or rat.
/// The embedded bytes are verified against the pinned checksum on every call.
inline Dataset builtin(const std::string& name) {
    std::string lower = name;
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    std::string_view text;
    std::uint64_t expected = 0;
    std::string provenance;
    if (lower == "hald") {
        text = builtin_data::kHaldCsv;
        expected = builtin_data::kHaldChecksum;
        provenance = "Hald cement data (Draper & Smith, Applied Regression Analysis, 2nd ed., 1981)";
    } else if (lower == "bodyfat") {
        text = builtin_data::kBodyfatCsv;
        expected = builtin_data::kBodyfatChecksum;
        provenance =
            "Body fat data (Neter, Kutner, Nachtsheim & Wasserman, Applied Linear Statistical "
            "Models, 4th ed., 1996, p. 261)";
    } else if (lower == "rat") {
        text = builtin_data::kRatCsv;
        expected = builtin_data::kRatChecksum;
        provenance = "Rat liver data (Cook, Technometrics 19(1), 1977)";
    } else {
        throw UnknownDatasetError("unknown dataset '" + name + "'");
    }

    if (fnv1a64(text) != expected) {
        throw Error("bundled dataset '" + lower + "' fails its checksum; build is corrupted");
    }
    Dataset ds = detail::parse_csv_text(text, "y", /*intercept=*/true, "builtin:" + lower);
    ds.name = lower;
    ds.provenance = std::move(provenance);
    return ds;
}

}  // namespace loodiag
