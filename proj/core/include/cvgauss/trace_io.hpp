#pragma once

// Trace files.
//
// Text:   key=value header lines (format-version, mode, n_samples, eta, v_el,
//         seed, ...), then one "theta x" pair per line in fixed decimal using
//         the shortest digits that round-trip exactly.
// Binary: little-endian IEEE-754 doubles, theta then x interleaved, with the
//         same header stored in a sidecar file "<path>.hdr".

#include "cvgauss/homodyne.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace cvgauss {

enum class TraceFormat { text, binary };

void write_trace(const std::filesystem::path& path, const HomodyneTrace& trace, TraceFormat format);

/// Format chosen from the extension: ".bin" is binary, anything else text.
HomodyneTrace read_trace(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& binary_path);

/// Shared header encoding.
std::map<std::string, std::string> trace_header(const TraceMeta& meta);
TraceMeta parse_trace_header(const std::map<std::string, std::string>& header);

/// Shortest round-trip fixed-notation decimal.
std::string format_fixed(double value);
double parse_double(std::string_view text);

}  // namespace cvgauss
