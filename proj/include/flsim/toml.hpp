#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace flsim::toml {

// Minimal TOML-subset reader covering what the config files use: `#`
// comments, one level of [section] headers, and key = value lines where the
// value is an integer, float, boolean, double-quoted string, or a one-line
// array of those. Keys are returned flattened as "section.key".
struct Value {
    enum class Kind { Integer, Float, Boolean, String, Array };
    Kind kind = Kind::Integer;
    std::int64_t integer = 0;
    double number = 0.0;
    bool boolean = false;
    std::string text;
    std::vector<Value> array;

    std::int64_t as_int() const;
    double as_float() const;  // accepts Integer or Float
    bool as_bool() const;
    const std::string& as_string() const;
    const std::vector<Value>& as_array() const;
};

using Table = std::map<std::string, Value>;

Table parse_string(const std::string& text);
Table parse_file(const std::string& path);

}  // namespace flsim::toml
