#include "parcelca/error.hpp"
#include "parcelca/io.hpp"

#include <cctype>
#include <cstdlib>

namespace parcelca::io {

using nlohmann::json;

namespace {

// Covers the subset run configs use: tables, arrays of tables, bare/quoted
// keys, strings, integers, floats, booleans, (multi-line) arrays, inline
// tables, and comments. No dotted keys, datetimes, or multi-line strings.
class TomlParser {
public:
    explicit TomlParser(const std::string& text) : s_(text) {}

    json parse() {
        root_ = json::object();
        current_path_.clear();
        skip_void();
        while (!eof()) {
            if (peek() == '[') {
                parse_header();
            } else {
                parse_assignment(table_at(current_path_));
            }
            skip_void();
        }
        return std::move(root_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw IoError("config line " + std::to_string(line_) + ": " + msg);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    char get() {
        const char c = s_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void skip_spaces() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
    }

    void skip_comment() {
        while (!eof() && peek() != '\n') ++pos_;
    }

    // Whitespace, newlines and comments between statements.
    void skip_void() {
        for (;;) {
            skip_spaces();
            if (eof()) return;
            if (peek() == '#') {
                skip_comment();
                continue;
            }
            if (peek() == '\n') {
                get();
                continue;
            }
            return;
        }
    }

    void expect_line_end() {
        skip_spaces();
        if (eof()) return;
        if (peek() == '#') {
            skip_comment();
            return;
        }
        if (peek() == '\n') return;
        fail(std::string("unexpected character '") + peek() + "' after value");
    }

    std::string parse_key() {
        skip_spaces();
        if (eof()) fail("expected a key");
        if (peek() == '"') return parse_basic_string();
        std::string key;
        while (!eof()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                key.push_back(get());
            } else {
                break;
            }
        }
        if (key.empty()) fail("expected a key");
        return key;
    }

    std::string parse_basic_string() {
        if (get() != '"') fail("expected '\"'");
        std::string out;
        for (;;) {
            if (eof()) fail("unterminated string");
            char c = get();
            if (c == '"') break;
            if (c == '\n') fail("newline inside string");
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                const char e = get();
                switch (e) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case 'r': out.push_back('\r'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out.push_back(c);
            }
        }
        return out;
    }

    std::string parse_literal_string() {
        if (get() != '\'') fail("expected '\\''");
        std::string out;
        for (;;) {
            if (eof()) fail("unterminated string");
            const char c = get();
            if (c == '\'') break;
            if (c == '\n') fail("newline inside string");
            out.push_back(c);
        }
        return out;
    }

    std::vector<std::string> parse_header_path() {
        std::vector<std::string> path;
        path.push_back(parse_key());
        skip_spaces();
        while (!eof() && peek() == '.') {
            get();
            path.push_back(parse_key());
            skip_spaces();
        }
        return path;
    }

    void parse_header() {
        get(); // '['
        const bool array_of_tables = !eof() && peek() == '[';
        if (array_of_tables) get();
        const auto path = parse_header_path();
        skip_spaces();
        if (eof() || get() != ']') fail("unterminated table header");
        if (array_of_tables && (eof() || get() != ']')) fail("expected ']]'");
        expect_line_end();

        if (array_of_tables) {
            json* parent = &root_;
            for (std::size_t i = 0; i + 1 < path.size(); ++i)
                parent = &descend(*parent, path[i]);
            json& slot = (*parent)[path.back()];
            if (slot.is_null()) slot = json::array();
            if (!slot.is_array()) fail("'" + path.back() + "' is not an array of tables");
            slot.push_back(json::object());
            current_path_ = path;
            current_is_array_ = true;
        } else {
            current_path_ = path;
            current_is_array_ = false;
            table_at(current_path_); // create eagerly so empty tables exist
        }
    }

    json& descend(json& node, const std::string& key) {
        json& next = node[key];
        if (next.is_null()) next = json::object();
        if (next.is_array()) {
            if (next.empty() || !next.back().is_object())
                fail("'" + key + "' is not a table");
            return next.back();
        }
        if (!next.is_object()) fail("'" + key + "' is not a table");
        return next;
    }

    json& table_at(const std::vector<std::string>& path) {
        // descend() lands on an array-of-tables' last element automatically.
        json* node = &root_;
        for (const auto& key : path) node = &descend(*node, key);
        return *node;
    }

    void parse_assignment(json& table) {
        const std::string key = parse_key();
        skip_spaces();
        if (eof() || peek() == '.') fail("dotted keys are not supported");
        if (get() != '=') fail("expected '=' after key '" + key + "'");
        skip_spaces();
        if (table.contains(key)) fail("duplicate key '" + key + "'");
        table[key] = parse_value();
        expect_line_end();
    }

    json parse_value() {
        skip_spaces();
        if (eof()) fail("expected a value");
        const char c = peek();
        if (c == '"') return parse_basic_string();
        if (c == '\'') return parse_literal_string();
        if (c == '[') return parse_array();
        if (c == '{') return parse_inline_table();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+')
            return parse_number();
        // Booleans.
        if (s_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            return true;
        }
        if (s_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            return false;
        }
        fail(std::string("unexpected value starting with '") + c + "'");
    }

    json parse_array() {
        get(); // '['
        json arr = json::array();
        for (;;) {
            skip_void();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                get();
                break;
            }
            arr.push_back(parse_value());
            skip_void();
            if (eof()) fail("unterminated array");
            if (peek() == ',') {
                get();
                continue;
            }
            if (peek() == ']') {
                get();
                break;
            }
            fail("expected ',' or ']' in array");
        }
        return arr;
    }

    json parse_inline_table() {
        get(); // '{'
        json obj = json::object();
        skip_spaces();
        if (!eof() && peek() == '}') {
            get();
            return obj;
        }
        for (;;) {
            const std::string key = parse_key();
            skip_spaces();
            if (eof() || get() != '=') fail("expected '=' in inline table");
            if (obj.contains(key)) fail("duplicate key '" + key + "'");
            obj[key] = parse_value();
            skip_spaces();
            if (eof()) fail("unterminated inline table");
            const char c = get();
            if (c == '}') break;
            if (c != ',') fail("expected ',' or '}' in inline table");
            skip_spaces();
        }
        return obj;
    }

    json parse_number() {
        std::string tok;
        while (!eof()) {
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
                c == '.' || c == 'e' || c == 'E' || c == '_') {
                if (c != '_') tok.push_back(c);
                get();
            } else {
                break;
            }
        }
        if (tok.empty()) fail("expected a number");
        const bool is_float =
            tok.find('.') != std::string::npos || tok.find('e') != std::string::npos ||
            tok.find('E') != std::string::npos;
        try {
            if (is_float) return std::stod(tok);
            return static_cast<std::int64_t>(std::stoll(tok));
        } catch (const std::exception&) {
            fail("malformed number '" + tok + "'");
        }
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    json root_;
    std::vector<std::string> current_path_;
    bool current_is_array_ = false;
};

} // namespace

json parse_toml(const std::string& text) { return TomlParser(text).parse(); }

} // namespace parcelca::io
