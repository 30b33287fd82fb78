// Copyright 2026 The eprsteer Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include <unistd.h>

#include "errors.hpp"

namespace eprsteer::io {

/// Fixed text formatting for CSV output: 12 significant digits.
inline std::string format_number(double x) {
    if (x == 0.0) {
        x = 0.0; // no "-0"
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// Shortest text that parses back to exactly `x`.
inline std::string format_roundtrip(double x) {
    if (x == 0.0) {
        x = 0.0;
    }
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, end};
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view text, std::string_view what) {
    text = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InvalidInput("cannot parse '" + std::string(text) + "' as a number for " +
                           std::string(what));
    }
    return value;
}

using KeyValues = std::map<std::string, std::string, std::less<>>;

/**
 * Parses flat `key = value` text. Blank lines and lines starting with '#'
 * are skipped. Keys outside `allowed` and repeated keys are rejected.
 */
inline KeyValues parse_key_values(std::string_view text,
                                  std::initializer_list<std::string_view> allowed) {
    KeyValues out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw InvalidInput("line " + std::to_string(line_no) + ": expected key=value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        bool known = false;
        for (auto a : allowed) {
            known = known || a == key;
        }
        if (!known) {
            throw InvalidInput("line " + std::to_string(line_no) + ": unknown key '" +
                               std::string(key) + "'");
        }
        if (!out.emplace(std::string(key), std::string(value)).second) {
            throw InvalidInput("line " + std::to_string(line_no) + ": duplicate key '" +
                               std::string(key) + "'");
        }
    }
    return out;
}

inline std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes `content` to a sibling temp file, then renames it over `path`.
inline void atomic_write(const std::filesystem::path &path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw OutputError("cannot write " + path.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw OutputError("write failed for " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw OutputError("cannot rename into " + path.string());
    }
}

} // namespace eprsteer::io
