#pragma once

// Minimal TOML subset: top-level `key = value` pairs with integer, quoted
// string, or flat array values. Enough for surface-model files; anything
// fancier is an input_error.

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qwall/errors.hpp"

namespace qwall::toml {

struct Value {
    // Scalars are kept as raw token strings; the consumer parses them
    // exactly (parse_rat rejects float syntax).
    std::vector<std::string> items;
    bool is_array = false;

    const std::string& scalar() const {
        if (is_array || items.size() != 1) throw input_error("toml: scalar expected");
        return items[0];
    }
};

using Table = std::map<std::string, Value>;

namespace detail {

inline std::string_view strip(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string parse_token(std::string_view tok) {
    tok = strip(tok);
    if (tok.empty()) throw input_error("toml: empty value");
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"') throw input_error("toml: unterminated string");
        return std::string(tok.substr(1, tok.size() - 2));
    }
    return std::string(tok);
}

} // namespace detail

inline Table parse(std::string_view text) {
    Table out;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++lineno;
        if (std::size_t h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        line = detail::strip(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw input_error("toml: line " + std::to_string(lineno) + ": expected key = value");
        std::string key(detail::strip(line.substr(0, eq)));
        std::string_view rhs = detail::strip(line.substr(eq + 1));
        if (key.empty() || rhs.empty())
            throw input_error("toml: line " + std::to_string(lineno) + ": empty key or value");
        Value v;
        if (rhs.front() == '[') {
            if (rhs.back() != ']')
                throw input_error("toml: line " + std::to_string(lineno) + ": unterminated array");
            v.is_array = true;
            std::string_view body = rhs.substr(1, rhs.size() - 2);
            std::size_t p = 0;
            while (p < body.size()) {
                std::size_t c = body.find(',', p);
                std::string_view tok = body.substr(p, c == std::string_view::npos ? std::string_view::npos : c - p);
                if (!detail::strip(tok).empty()) v.items.push_back(detail::parse_token(tok));
                p = (c == std::string_view::npos) ? body.size() : c + 1;
            }
        } else {
            v.items.push_back(detail::parse_token(rhs));
        }
        out[key] = std::move(v);
    }
    return out;
}

} // namespace qwall::toml
