#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>

#include "nids/dataset.hpp"

namespace nids {

// CSV contract: UTF-8, comma-separated, first row is the header. Missing
// tokens: empty string, "NaN" (case-insensitive). Non-finite tokens:
// "Infinity", "inf" and signed variants (case-insensitive). Any other
// unparseable token is treated as missing. Column names are trimmed of
// surrounding whitespace.

// Streams the file row by row; when sample_fraction < 1 each data row is kept
// by an independent Bernoulli draw keyed on (seed, row index).
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 double sample_fraction = 1.0, std::uint64_t seed = 0);

// Same contract, reading from a stream (provenance uses `name`).
Dataset load_csv_stream(std::istream& in, const std::string& name, const std::string& label_column,
                        double sample_fraction = 1.0, std::uint64_t seed = 0);

// Writes with round-trip-exact numeric formatting; NaN -> "NaN",
// +inf -> "Infinity", -inf -> "-Infinity".
void write_csv(const Dataset& d, const std::filesystem::path& path);
std::string csv_to_string(const Dataset& d);

// Exposed for reuse: formats one double exactly as write_csv does.
std::string format_csv_value(double v);

} // namespace nids
