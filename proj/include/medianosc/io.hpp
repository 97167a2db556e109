#pragma once

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "medianosc/grid.hpp"

// Field files: one line of compact JSON
//   {"dim":..,"origin":[..],"side":..,"cells_per_side":..,"dtype":"f64","order":"row-major"}
// then an empty line, then cell_count little-endian float64 values.
// 1D fields may also be plain CSV: one value per line, an optional "value" header and an
// optional "# origin=<o> side=<s>" comment (default [0,1]).
namespace medianosc::io {

static_assert(std::endian::native == std::endian::little, "field files are written in host order");

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline nlohmann::json frame_header(const GridFrame& frame) {
    nlohmann::json origin = nlohmann::json::array();
    for (int i = 0; i < frame.dim; ++i) origin.push_back(frame.origin[i]);
    return {{"dim", frame.dim},
            {"origin", origin},
            {"side", frame.side},
            {"cells_per_side", frame.cells_per_side},
            {"dtype", "f64"},
            {"order", "row-major"}};
}

inline void write_field(const std::string& path, const SampledFunction& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) detail::fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << frame_header(f.frame()).dump() << "\n\n";
    const auto v = f.values();
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
    if (!out) detail::fail(ErrorCode::Io, "write to '" + path + "' failed");
}

inline void write_csv(const std::string& path, const SampledFunction& f) {
    detail::require(f.dim() == 1, ErrorCode::InvalidParameter, "CSV fields are 1D only");
    std::ofstream out(path);
    if (!out) detail::fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << "# origin=" << format_double(f.frame().origin[0]) << " side=" << format_double(f.frame().side) << "\n";
    out << "value\n";
    for (double v : f.values()) out << format_double(v) << "\n";
}

namespace detail {

inline SampledFunction parse_binary(const std::string& data, const std::string& path) {
    const auto split = data.find("\n\n");
    if (split == std::string::npos) medianosc::detail::fail(ErrorCode::Io, "'" + path + "': missing header separator");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(data.substr(0, split));
    } catch (const nlohmann::json::exception& e) {
        medianosc::detail::fail(ErrorCode::Io, "'" + path + "': bad header: " + e.what());
    }
    GridFrame frame;
    try {
        if (h.value("dtype", "f64") != "f64" || h.value("order", "row-major") != "row-major")
            medianosc::detail::fail(ErrorCode::Io, "'" + path + "': only f64 row-major data is supported");
        frame.dim = h.at("dim").get<int>();
        frame.side = h.at("side").get<double>();
        frame.cells_per_side = h.at("cells_per_side").get<std::size_t>();
        const auto& origin = h.at("origin");
        if (!origin.is_array() || static_cast<int>(origin.size()) != frame.dim)
            medianosc::detail::fail(ErrorCode::Io, "'" + path + "': origin must have dim entries");
        for (int i = 0; i < frame.dim; ++i) frame.origin[i] = origin[static_cast<std::size_t>(i)].get<double>();
    } catch (const nlohmann::json::exception& e) {
        medianosc::detail::fail(ErrorCode::Io, "'" + path + "': bad header: " + e.what());
    }
    if (frame.dim < 1 || frame.dim > kMaxDim) medianosc::detail::fail(ErrorCode::Io, "'" + path + "': bad dim");
    frame.validate();
    const std::size_t count = frame.cell_count();
    const std::size_t offset = split + 2;
    if (data.size() - offset != count * sizeof(double))
        medianosc::detail::fail(ErrorCode::Io, "'" + path + "': expected " + std::to_string(count) +
                                                    " float64 values, found " +
                                                    std::to_string((data.size() - offset) / sizeof(double)));
    std::vector<double> values(count);
    std::memcpy(values.data(), data.data() + offset, count * sizeof(double));
    return SampledFunction(frame, std::move(values));
}

inline SampledFunction parse_csv(const std::string& data, const std::string& path) {
    std::istringstream in(data);
    std::string line;
    double origin = 0.0, side = 1.0;
    std::vector<double> values;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream kv(line.substr(1));
            std::string tok;
            while (kv >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq);
                try {
                    if (key == "origin") origin = std::stod(tok.substr(eq + 1));
                    if (key == "side") side = std::stod(tok.substr(eq + 1));
                } catch (const std::exception&) {
                    medianosc::detail::fail(ErrorCode::Io, "'" + path + "': bad comment '" + line + "'");
                }
            }
            continue;
        }
        if (values.empty() && line == "value") continue;
        try {
            std::size_t used = 0;
            values.push_back(std::stod(line, &used));
            if (line.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            medianosc::detail::fail(ErrorCode::Io, "'" + path + "' line " + std::to_string(lineno) + ": not a number");
        }
    }
    if (values.empty()) medianosc::detail::fail(ErrorCode::Io, "'" + path + "': no values");
    GridFrame frame;
    frame.dim = 1;
    frame.origin[0] = origin;
    frame.side = side;
    frame.cells_per_side = values.size();
    return SampledFunction(frame, std::move(values));
}

}  // namespace detail

/// Reads a field file or a 1D CSV (detected by the first byte).
inline SampledFunction read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) medianosc::detail::fail(ErrorCode::Io, "cannot open '" + path + "'");
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!data.empty() && data[0] == '{') return detail::parse_binary(data, path);
    return detail::parse_csv(data, path);
}

}  // namespace medianosc::io
