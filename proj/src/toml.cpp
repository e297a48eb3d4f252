#include "flsim/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "flsim/errors.hpp"

namespace flsim::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
    throw ConfigError("toml line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strips a trailing comment, honoring quoted strings.
std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
        } else if (c == '"') {
            in_string = true;
        } else if (c == '#') {
            return s.substr(0, i);
        }
    }
    return s;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    }
    return true;
}

std::string parse_quoted(const std::string& raw, int line) {
    if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (size_t i = 1; i + 1 < raw.size(); ++i) {
        char c = raw[i];
        if (c == '\\') {
            if (i + 2 >= raw.size()) fail(line, "dangling escape");
            char e = raw[++i];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(line, std::string("unsupported escape \\") + e);
            }
        } else if (c == '"') {
            fail(line, "unexpected quote inside string");
        } else {
            out += c;
        }
    }
    return out;
}

Value parse_value(const std::string& raw, int line);

std::vector<std::string> split_array_items(const std::string& inner, int line) {
    std::vector<std::string> items;
    std::string cur;
    bool in_string = false;
    int depth = 0;
    for (size_t i = 0; i < inner.size(); ++i) {
        char c = inner[i];
        if (in_string) {
            cur += c;
            if (c == '\\' && i + 1 < inner.size()) {
                cur += inner[++i];
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
            cur += c;
        } else if (c == '[') {
            ++depth;
            cur += c;
        } else if (c == ']') {
            --depth;
            if (depth < 0) fail(line, "unbalanced brackets in array");
            cur += c;
        } else if (c == ',' && depth == 0) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_string || depth != 0) fail(line, "unterminated array");
    std::string last = trim(cur);
    if (!last.empty()) items.push_back(last);
    return items;
}

Value parse_value(const std::string& raw, int line) {
    Value v;
    if (raw.empty()) fail(line, "missing value");
    if (raw.front() == '"') {
        v.kind = Value::Kind::String;
        v.text = parse_quoted(raw, line);
        return v;
    }
    if (raw.front() == '[') {
        if (raw.back() != ']') fail(line, "unterminated array");
        v.kind = Value::Kind::Array;
        for (const auto& item : split_array_items(raw.substr(1, raw.size() - 2), line))
            v.array.push_back(parse_value(item, line));
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.kind = Value::Kind::Boolean;
        v.boolean = (raw == "true");
        return v;
    }
    // Numbers. TOML allows underscores as digit separators; accept and drop them.
    std::string num;
    num.reserve(raw.size());
    for (char c : raw) {
        if (c == '_') continue;
        num += c;
    }
    bool looks_float = num.find_first_of(".eE") != std::string::npos;
    if (!looks_float) {
        std::int64_t iv = 0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), iv);
        if (ec == std::errc() && ptr == num.data() + num.size()) {
            v.kind = Value::Kind::Integer;
            v.integer = iv;
            return v;
        }
    }
    try {
        size_t pos = 0;
        double dv = std::stod(num, &pos);
        if (pos == num.size()) {
            v.kind = Value::Kind::Float;
            v.number = dv;
            return v;
        }
    } catch (const std::exception&) {
    }
    fail(line, "cannot parse value '" + raw + "'");
}

}  // namespace

std::int64_t Value::as_int() const {
    if (kind != Kind::Integer) throw ConfigError("expected integer value");
    return integer;
}

double Value::as_float() const {
    if (kind == Kind::Float) return number;
    if (kind == Kind::Integer) return static_cast<double>(integer);
    throw ConfigError("expected numeric value");
}

bool Value::as_bool() const {
    if (kind != Kind::Boolean) throw ConfigError("expected boolean value");
    return boolean;
}

const std::string& Value::as_string() const {
    if (kind != Kind::String) throw ConfigError("expected string value");
    return text;
}

const std::vector<Value>& Value::as_array() const {
    if (kind != Kind::Array) throw ConfigError("expected array value");
    return array;
}

Table parse_string(const std::string& text) {
    Table table;
    std::istringstream in(text);
    std::string rawline;
    std::string section;
    int lineno = 0;
    while (std::getline(in, rawline)) {
        ++lineno;
        std::string line = trim(strip_comment(rawline));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_key(section)) fail(lineno, "bad section name '" + section + "'");
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!valid_key(key)) fail(lineno, "bad key '" + key + "'");
        std::string full = section.empty() ? key : section + "." + key;
        if (table.count(full)) fail(lineno, "duplicate key '" + full + "'");
        table[full] = parse_value(trim(line.substr(eq + 1)), lineno);
    }
    return table;
}

Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

}  // namespace flsim::toml
