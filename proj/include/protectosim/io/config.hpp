#pragma once

// Flat key=value configuration files: one pair per line, '#' starts a
// full-line comment, blank lines are ignored.  Parsing keeps line numbers so
// every diagnostic can name the offending key and line.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "protectosim/errors.hpp"

namespace protectosim::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace detail

class KeyValueConfig {
public:
    struct Entry {
        std::string key;
        std::string value;
        int line;
    };

    static KeyValueConfig parse_string(std::string_view text,
                                       std::string source = "<config>") {
        KeyValueConfig cfg;
        cfg.source_ = std::move(source);
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto eol = text.find('\n', pos);
            const std::string_view raw =
                text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                               : eol - pos);
            ++line_no;
            pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
            const std::string_view line = detail::trim(raw);
            if (line.empty() || line.front() == '#')
                continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) +
                                  ": expected key=value, got '" + std::string(line) + "'");
            const std::string key{detail::trim(line.substr(0, eq))};
            const std::string value{detail::trim(line.substr(eq + 1))};
            if (key.empty())
                throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) +
                                  ": empty key");
            if (const Entry* prev = cfg.find(key))
                throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) +
                                  ": duplicate key '" + key + "' (first at line " +
                                  std::to_string(prev->line) + ")");
            cfg.entries_.push_back({key, value, line_no});
        }
        return cfg;
    }

    static KeyValueConfig parse_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str(), path);
    }

    const std::string& source() const { return source_; }
    const std::vector<Entry>& entries() const { return entries_; }

    bool has(std::string_view key) const { return find(key) != nullptr; }

    std::string get_string(std::string_view key) const {
        const Entry* e = find(key);
        if (!e)
            throw ConfigError(source_ + ": missing required key '" + std::string(key) + "'");
        return e->value;
    }

    std::string get_string_or(std::string_view key, std::string fallback) const {
        const Entry* e = find(key);
        return e ? e->value : std::move(fallback);
    }

    double get_double(std::string_view key) const {
        const Entry* e = find(key);
        if (!e)
            throw ConfigError(source_ + ": missing required key '" + std::string(key) + "'");
        return parse_double(*e);
    }

    double get_double_or(std::string_view key, double fallback) const {
        const Entry* e = find(key);
        return e ? parse_double(*e) : fallback;
    }

    std::uint64_t get_u64_or(std::string_view key, std::uint64_t fallback) const {
        const Entry* e = find(key);
        if (!e)
            return fallback;
        errno = 0;
        char* end = nullptr;
        const unsigned long long v = std::strtoull(e->value.c_str(), &end, 10);
        if (errno != 0 || end == e->value.c_str() || *end != '\0')
            throw ConfigError(source_ + ":" + std::to_string(e->line) + ": key '" + e->key +
                              "' is not a non-negative integer: '" + e->value + "'");
        return v;
    }

    int get_int_or(std::string_view key, int fallback) const {
        const double v = get_double_or(key, double(fallback));
        const int i = static_cast<int>(v);
        if (double(i) != v) {
            const Entry* e = find(key);
            throw ConfigError(source_ + ":" + std::to_string(e ? e->line : 0) + ": key '" +
                              std::string(key) + "' is not an integer");
        }
        return i;
    }

    /// Reject any key outside the allowed set, naming it.
    void require_known(std::initializer_list<std::string_view> allowed) const {
        for (const Entry& e : entries_) {
            bool ok = false;
            for (std::string_view a : allowed)
                if (e.key == a) {
                    ok = true;
                    break;
                }
            if (!ok)
                throw ConfigError(source_ + ":" + std::to_string(e.line) +
                                  ": unknown key '" + e.key + "'");
        }
    }

private:
    const Entry* find(std::string_view key) const {
        for (const Entry& e : entries_)
            if (e.key == key)
                return &e;
        return nullptr;
    }

    double parse_double(const Entry& e) const {
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(e.value.c_str(), &end);
        if (errno != 0 || end == e.value.c_str() || *end != '\0')
            throw ConfigError(source_ + ":" + std::to_string(e.line) + ": key '" + e.key +
                              "' is not a number: '" + e.value + "'");
        return v;
    }

    std::vector<Entry> entries_;
    std::string source_;
};

} // namespace protectosim::io
