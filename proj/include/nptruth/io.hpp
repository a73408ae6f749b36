#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nptruth/errors.hpp"
#include "nptruth/version.hpp"

// Plot-ready emission: CSV bodies plus a JSON sidecar per file carrying
// the resolved scenario and the library version. Everything written here
// must be byte-stable across reruns, so no timestamps, no locale
// dependence, and a fixed significant-digit count.

namespace nptruth::io {

using Json = nlohmann::ordered_json;

// 9 significant digits keeps golden-file diffs stable across platforms
// for the math routines in use. Infinities are written literally; grid
// consumers are expected to treat them as sentinels, not values.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
}

using Row = std::vector<std::string>;

inline void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw domain_error("cannot open for writing: " + file.string());
    out << text;
    if (!out) throw domain_error("write failed: " + file.string());
}

inline void write_csv(const std::filesystem::path& file,
                      const std::vector<std::string>& header,
                      const std::vector<Row>& rows) {
    std::string text;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text += ',';
        text += header[i];
    }
    text += '\n';
    for (const Row& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) text += ',';
            text += row[i];
        }
        text += '\n';
    }
    write_text(file, text);
}

// Sidecar for data.csv lands at data.meta.json beside it.
inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    std::filesystem::path p = csv;
    p.replace_extension();
    p += ".meta.json";
    return p;
}

inline void write_sidecar(const std::filesystem::path& csv, const Json& scenario,
                          Json results = Json::object()) {
    Json meta;
    meta["artifact_version"] = version;
    meta["scenario"] = scenario;
    if (!results.empty()) meta["results"] = results;
    write_text(sidecar_path(csv), meta.dump(2) + "\n");
}

} // namespace nptruth::io
