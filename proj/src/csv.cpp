#include "kbmom/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kbmom {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

[[noreturn]] void fail(const std::string& path, std::size_t line1, std::size_t col1,
                       const std::string& what) {
    std::ostringstream msg;
    msg << path << ": row " << line1 << ", column " << col1 << ": " << what;
    throw ParseError(msg.str());
}

double parse_cell(const std::string& path, std::size_t line1, std::size_t col1,
                  const std::string& raw) {
    std::string cell = trim(raw);
    if (cell.empty()) fail(path, line1, col1, "empty cell");
    const char* begin = cell.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + cell.size())
        fail(path, line1, col1, "not a number: '" + cell + "'");
    if (!std::isfinite(v)) fail(path, line1, col1, "non-finite value");
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");

    std::string line;
    std::size_t line_no = 0;

    // Column roles. Without a header every column is a feature.
    std::vector<int> role;  // 0 feature, 1 __label, 2 __outlier
    std::size_t arity = 0;
    if (has_header) {
        if (!std::getline(in, line)) throw ParseError(path + ": empty file");
        ++line_no;
        auto cells = split_line(line);
        arity = cells.size();
        role.resize(arity, 0);
        bool saw_label = false, saw_outlier = false;
        for (std::size_t c = 0; c < arity; ++c) {
            std::string name = trim(cells[c]);
            if (name == "__label") {
                if (saw_label) fail(path, line_no, c + 1, "duplicate __label column");
                saw_label = true;
                role[c] = 1;
            } else if (name == "__outlier") {
                if (saw_outlier) fail(path, line_no, c + 1, "duplicate __outlier column");
                saw_outlier = true;
                role[c] = 2;
            }
        }
    }

    std::vector<std::vector<double>> feature_rows;
    std::vector<int> labels;
    std::vector<std::uint8_t> mask;
    bool any_label = false, any_outlier = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;  // ignore blank lines (incl. trailing newline)
        auto cells = split_line(line);
        if (role.empty()) {  // first data row fixes the arity (headerless file)
            arity = cells.size();
            role.resize(arity, 0);
        }
        if (cells.size() != arity)
            fail(path, line_no, cells.size() < arity ? cells.size() + 1 : arity + 1,
                 "expected " + std::to_string(arity) + " cells, found " +
                     std::to_string(cells.size()));
        std::vector<double> feats;
        feats.reserve(arity);
        for (std::size_t c = 0; c < arity; ++c) {
            double v = parse_cell(path, line_no, c + 1, cells[c]);
            if (role[c] == 1) {
                if (v != std::floor(v))
                    fail(path, line_no, c + 1, "__label must be an integer");
                labels.push_back(static_cast<int>(v));
                any_label = true;
            } else if (role[c] == 2) {
                if (v != 0.0 && v != 1.0)
                    fail(path, line_no, c + 1, "__outlier must be 0 or 1");
                mask.push_back(v == 1.0 ? 1 : 0);
                any_outlier = true;
            } else {
                feats.push_back(v);
            }
        }
        if (feats.empty()) fail(path, line_no, 1, "row has no feature columns");
        feature_rows.push_back(std::move(feats));
    }

    if (feature_rows.empty()) throw ParseError(path + ": no data rows");

    Dataset data;
    data.points = Matrix(feature_rows.size(), feature_rows.front().size());
    for (std::size_t i = 0; i < feature_rows.size(); ++i)
        std::copy(feature_rows[i].begin(), feature_rows[i].end(),
                  data.points.row(i).begin());
    if (any_label) data.true_labels = std::move(labels);
    if (any_outlier) data.outlier_mask = std::move(mask);
    return data;
}

void save_csv(const std::string& path, const Dataset& data) {
    std::vector<std::string> header;
    for (std::size_t d = 0; d < data.dim(); ++d) header.push_back("x" + std::to_string(d));
    if (data.has_labels()) header.push_back("__label");
    if (data.has_mask()) header.push_back("__outlier");

    std::vector<std::vector<std::string>> rows;
    rows.reserve(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        std::vector<std::string> row;
        row.reserve(header.size());
        for (std::size_t d = 0; d < data.dim(); ++d)
            row.push_back(format_full(data.points(i, d)));
        if (data.has_labels()) row.push_back(std::to_string(data.true_labels[i]));
        if (data.has_mask()) row.push_back(data.outlier_mask[i] ? "1" : "0");
        rows.push_back(std::move(row));
    }
    write_table(path, header, rows);
}

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);  // binary: keep Unix newlines everywhere
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out << ',';
        out << header[c];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << row[c];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace kbmom
