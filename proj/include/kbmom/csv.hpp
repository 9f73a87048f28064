#pragma once

// CSV I/O. Comma separated, '.' decimal point, Unix newlines, header row always
// written. The reserved column names __label and __outlier round-trip the
// dataset metadata; all other columns are features. Values are written with
// %.17g so a load/save cycle is lossless.

#include <stdexcept>
#include <string>
#include <vector>

#include "kbmom/dataset.hpp"

namespace kbmom {

// Malformed input (as opposed to bad configuration): unreadable file, non-numeric
// cell, ragged rows. The message names the 1-based file line and column.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Dataset load_csv(const std::string& path, bool has_header = true);
void save_csv(const std::string& path, const Dataset& data);

// %.17g — shortest representation that round-trips a double through text.
std::string format_full(double v);
// %.6g — human-facing output.
std::string format_sig6(double v);

// Writes rows of preformatted cells under a header; used for every experiment
// artifact so the byte layout is uniform.
void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

}  // namespace kbmom
