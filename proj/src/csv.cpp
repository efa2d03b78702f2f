#include "nids/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nids/rng.hpp"

namespace nids {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

void split_line(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_feature_token(std::string_view raw) {
    std::string_view tok = trim(raw);
    if (tok.empty() || iequals(tok, "nan")) return std::numeric_limits<double>::quiet_NaN();
    if (iequals(tok, "inf") || iequals(tok, "infinity") || iequals(tok, "+inf") ||
        iequals(tok, "+infinity")) {
        return std::numeric_limits<double>::infinity();
    }
    if (iequals(tok, "-inf") || iequals(tok, "-infinity")) {
        return -std::numeric_limits<double>::infinity();
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        // Non-numeric token in a numeric column: tagged missing.
        if (ec == std::errc::result_out_of_range) {
            // Overflowed literal; sign decides the non-finite tag.
            return tok.front() == '-' ? -std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::infinity();
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
    return value;
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

} // namespace

Dataset load_csv_stream(std::istream& in, const std::string& name, const std::string& label_column,
                        double sample_fraction, std::uint64_t seed) {
    if (!(sample_fraction > 0.0) || sample_fraction > 1.0) {
        throw Error("sample_fraction must be in (0,1], got " + std::to_string(sample_fraction));
    }

    std::string line;
    if (!read_line(in, line)) throw Error(name + ": empty file (no header row)");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
        line.erase(0, 3);
    }

    std::vector<std::string_view> tokens;
    split_line(line, tokens);
    std::vector<std::string> header;
    header.reserve(tokens.size());
    for (auto t : tokens) header.emplace_back(trim(t));

    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == label_column) {
            label_idx = i;
            break;
        }
    }
    if (label_idx == header.size()) {
        throw Error(name + ": label column not found: '" + label_column + "'");
    }

    Schema schema;
    schema.label_column = label_column;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != label_idx) schema.feature_names.push_back(header[i]);
    }
    schema.validate();

    const std::uint64_t row_seed = derive_seed(seed, "load_csv");
    std::vector<FlowRecord> records;
    std::uint64_t row_index = 0;
    std::size_t line_no = 1;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue; // tolerate blank/trailing lines
        const std::uint64_t this_row = row_index++;
        if (!bernoulli_keep(row_seed, this_row, sample_fraction)) continue;

        split_line(line, tokens);
        if (tokens.size() != header.size()) {
            throw Error(name + ": line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(tokens.size()));
        }
        FlowRecord r;
        r.values.reserve(schema.dimension());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i == label_idx) {
                r.label = std::string(trim(tokens[i]));
            } else {
                r.values.push_back(parse_feature_token(tokens[i]));
            }
        }
        records.push_back(std::move(r));
    }

    std::ostringstream prov;
    prov << name << " (fraction=" << sample_fraction << ", seed=" << seed << ")";
    return Dataset(std::move(schema), std::move(records), prov.str());
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 double sample_fraction, std::uint64_t seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    return load_csv_stream(in, path.string(), label_column, sample_fraction, seed);
}

std::string format_csv_value(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string csv_to_string(const Dataset& d) {
    std::string out;
    for (const auto& f : d.schema().feature_names) {
        out += f;
        out += ',';
    }
    out += d.schema().label_column;
    out += '\n';
    for (const auto& r : d.records()) {
        for (double v : r.values) {
            out += format_csv_value(v);
            out += ',';
        }
        out += r.label;
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out << csv_to_string(d);
    if (!out) throw Error("write failed: " + path.string());
}

} // namespace nids
