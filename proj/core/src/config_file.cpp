#include "effortnn/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "effortnn/error.hpp"
#include "effortnn/table_io.hpp"

namespace effortnn {

namespace {

using nlohmann::json;

class TomlParser {
public:
    explicit TomlParser(std::string_view text) : text_(text) {}

    json parse() {
        json root = json::object();
        json* table = &root;
        while (!at_end()) {
            skip_space_and_comments(true);
            if (at_end()) break;
            if (peek() == '[') {
                ++pos_;
                if (!at_end() && peek() == '[') fail("arrays of tables are not supported");
                table = &root;
                for (const auto& part : key_path(']')) {
                    auto& next = (*table)[part];
                    if (next.is_null()) next = json::object();
                    if (!next.is_object()) fail("'" + part + "' is not a table");
                    table = &next;
                }
                expect(']');
            } else {
                const auto path = key_path('=');
                expect('=');
                skip_inline_space();
                json* target = table;
                for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                    auto& next = (*target)[path[i]];
                    if (next.is_null()) next = json::object();
                    target = &next;
                }
                if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
                (*target)[path.back()] = value();
            }
            end_of_line();
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError("TOML line " + std::to_string(line_) + ": " + message);
    }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void skip_inline_space() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    void skip_space_and_comments(bool newlines) {
        while (!at_end()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') ++pos_;
            else if (c == '#') {
                while (!at_end() && peek() != '\n') ++pos_;
            } else if (c == '\n' && newlines) {
                ++line_;
                ++pos_;
            } else break;
        }
    }

    void expect(char c) {
        skip_inline_space();
        if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void end_of_line() {
        skip_space_and_comments(false);
        if (at_end()) return;
        if (peek() != '\n') fail("unexpected text after value");
    }

    std::vector<std::string> key_path(char terminator) {
        std::vector<std::string> parts;
        for (;;) {
            skip_inline_space();
            if (at_end()) fail("unterminated key");
            if (peek() == '"' || peek() == '\'') {
                parts.push_back(string_literal());
            } else {
                const auto start = pos_;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
                if (pos_ == start) fail("expected a key");
                parts.emplace_back(text_.substr(start, pos_ - start));
            }
            skip_inline_space();
            if (!at_end() && peek() == '.') {
                ++pos_;
                continue;
            }
            if (at_end() || peek() != terminator) fail(std::string("expected '") + terminator + "' after key");
            return parts;
        }
    }

    std::string string_literal() {
        const char quote = peek();
        ++pos_;
        std::string out;
        while (!at_end() && peek() != quote) {
            char c = peek();
            if (c == '\n') fail("newline in string");
            ++pos_;
            if (c == '\\' && quote == '"') {
                if (at_end()) fail("bad escape");
                const char e = peek();
                ++pos_;
                switch (e) {
                    case 'n': c = '\n'; break;
                    case 't': c = '\t'; break;
                    case 'r': c = '\r'; break;
                    case '"': c = '"'; break;
                    case '\\': c = '\\'; break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            }
            out += c;
        }
        if (at_end()) fail("unterminated string");
        ++pos_;
        return out;
    }

    json value() {
        if (at_end()) fail("missing value");
        const char c = peek();
        if (c == '"' || c == '\'') return string_literal();
        if (c == '[') {
            ++pos_;
            json arr = json::array();
            for (;;) {
                skip_space_and_comments(true);
                if (at_end()) fail("unterminated array");
                if (peek() == ']') {
                    ++pos_;
                    return arr;
                }
                arr.push_back(value());
                skip_space_and_comments(true);
                if (!at_end() && peek() == ',') ++pos_;
                else if (at_end() || peek() != ']') fail("expected ',' or ']' in array");
            }
        }
        const auto start = pos_;
        while (!at_end() && peek() != ',' && peek() != ']' && peek() != '\n' && peek() != '#' && peek() != ' ' &&
               peek() != '\t' && peek() != '\r') {
            ++pos_;
        }
        std::string token(text_.substr(start, pos_ - start));
        if (token == "true") return true;
        if (token == "false") return false;
        std::erase(token, '_');
        if (token.empty()) fail("missing value");
        const bool is_float = token.find_first_of(".eE") != std::string::npos || token == "inf" || token == "nan";
        if (!is_float) {
            std::int64_t v = 0;
            const auto* first = token.data() + (token[0] == '+' ? 1 : 0);
            const auto [p, ec] = std::from_chars(first, token.data() + token.size(), v);
            if (ec == std::errc{} && p == token.data() + token.size()) return v;
        } else {
            double v = 0;
            const auto* first = token.data() + (token[0] == '+' ? 1 : 0);
            const auto [p, ec] = std::from_chars(first, token.data() + token.size(), v);
            if (ec == std::errc{} && p == token.data() + token.size()) return v;
        }
        fail("cannot read value '" + token + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read configuration file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

json parse_toml(std::string_view text) { return TomlParser(text).parse(); }

json load_config_file(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("configuration file not found: " + path.string());
    const auto text = slurp(path);
    const auto ext = path.extension().string();
    try {
        if (iequals(ext, ".toml")) return parse_toml(text);
        if (iequals(ext, ".json")) return json::parse(text);
        try {
            return json::parse(text);
        } catch (const json::parse_error&) {
            return parse_toml(text);
        }
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ColumnMap column_map_from_json(const json& j) {
    const json& columns = j.contains("columns") ? j.at("columns") : j;
    if (!columns.is_object()) throw ConfigError("column mapping must be a table of field = column entries");
    ColumnMap map;
    for (const auto& [field, column] : columns.items()) {
        if (!column.is_string()) throw ConfigError("column for '" + field + "' must be a string");
        if (!is_record_field(field)) throw ConfigError("unknown record field '" + field + "' in column mapping");
        map.entries.emplace_back(field, column.get<std::string>());
    }
    return map;
}

ColumnMap load_column_map(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("column mapping file not found: " + path.string());
    try {
        return column_map_from_json(load_config_file(path));
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (what.find(path.string()) != std::string::npos) throw;
        throw ConfigError(path.string() + ": " + what);
    }
}

}  // namespace effortnn
