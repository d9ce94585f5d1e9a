#include "txsc/toml.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "txsc/errors.hpp"

namespace txsc::toml {

namespace {

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    Json parse() {
        root_ = Json::object();
        current_ = &root_;
        while (pos_ < text_.size()) {
            skip_blank();
            if (pos_ >= text_.size()) break;
            if (peek() == '[') {
                parse_header();
            } else {
                parse_assignment();
            }
        }
        return root_;
    }

private:
    [[noreturn]] void fail(const std::string& msg) {
        throw ConfigError("toml parse error at line " + std::to_string(line_) + ": " + msg);
    }

    char peek() const { return text_[pos_]; }
    bool eof() const { return pos_ >= text_.size(); }

    void advance() {
        if (!eof()) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    // whitespace and comments, including newlines
    void skip_blank() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    // whitespace within a line only
    void skip_inline_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
    }

    std::string parse_key() {
        skip_inline_ws();
        if (eof()) fail("expected key");
        if (peek() == '"') return parse_basic_string();
        std::string key;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                          peek() == '-')) {
            key.push_back(peek());
            advance();
        }
        if (key.empty()) fail(std::string("expected key, found '") + peek() + "'");
        return key;
    }

    std::vector<std::string> parse_dotted_path() {
        std::vector<std::string> path{parse_key()};
        skip_inline_ws();
        while (!eof() && peek() == '.') {
            advance();
            path.push_back(parse_key());
            skip_inline_ws();
        }
        return path;
    }

    void parse_header() {
        advance();  // '['
        bool array_of_tables = !eof() && peek() == '[';
        if (array_of_tables) advance();
        std::vector<std::string> path = parse_dotted_path();
        if (eof() || peek() != ']') fail("expected ']' in table header");
        advance();
        if (array_of_tables) {
            if (eof() || peek() != ']') fail("expected ']]' in array-of-tables header");
            advance();
        }
        Json* node = &root_;
        for (std::size_t i = 0; i < path.size(); ++i) {
            const std::string& key = path[i];
            bool last = i + 1 == path.size();
            if (last && array_of_tables) {
                if (!node->contains(key)) (*node)[key] = Json::array();
                if (!(*node)[key].is_array()) fail("'" + key + "' is not an array of tables");
                (*node)[key].push_back(Json::object());
                node = &(*node)[key].back();
            } else {
                if (!node->contains(key)) (*node)[key] = Json::object();
                Json* next = &(*node)[key];
                if (next->is_array()) {
                    if (next->empty()) fail("'" + key + "' has no elements");
                    next = &next->back();
                }
                if (!next->is_object()) fail("'" + key + "' is not a table");
                node = next;
            }
        }
        current_ = node;
    }

    void parse_assignment() {
        std::vector<std::string> path = parse_dotted_path();
        skip_inline_ws();
        if (eof() || peek() != '=') fail("expected '=' after key");
        advance();
        skip_inline_ws();
        Json value = parse_value();
        Json* node = current_;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            if (!node->contains(path[i])) (*node)[path[i]] = Json::object();
            node = &(*node)[path[i]];
            if (!node->is_object()) fail("'" + path[i] + "' is not a table");
        }
        if (node->contains(path.back())) fail("duplicate key '" + path.back() + "'");
        (*node)[path.back()] = std::move(value);
        skip_inline_ws();
        if (!eof() && peek() == '#')
            while (!eof() && peek() != '\n') advance();
        if (!eof() && peek() != '\n') fail("unexpected trailing content after value");
    }

    Json parse_value() {
        if (eof()) fail("expected value");
        char c = peek();
        if (c == '"') return parse_basic_string();
        if (c == '[') return parse_array();
        if (c == '{') return parse_inline_table();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+')
            return parse_number();
        std::string word;
        while (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) {
            word.push_back(peek());
            advance();
        }
        if (word == "true") return Json(true);
        if (word == "false") return Json(false);
        fail("unrecognized value '" + word + "'");
    }

    std::string parse_basic_string() {
        advance();  // opening quote
        std::string out;
        while (!eof() && peek() != '"') {
            char c = peek();
            if (c == '\n') fail("unterminated string");
            if (c == '\\') {
                advance();
                if (eof()) fail("dangling escape");
                char e = peek();
                switch (e) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default: fail(std::string("unsupported escape '\\") + e + "'");
                }
            } else {
                out.push_back(c);
            }
            advance();
        }
        if (eof()) fail("unterminated string");
        advance();  // closing quote
        return out;
    }

    Json parse_number() {
        std::string num;
        while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '-' ||
                          peek() == '+' || peek() == '.' || peek() == 'e' || peek() == 'E' ||
                          peek() == '_')) {
            if (peek() != '_') num.push_back(peek());
            advance();
        }
        try {
            if (num.find('.') != std::string::npos || num.find('e') != std::string::npos ||
                num.find('E') != std::string::npos) {
                std::size_t used = 0;
                double d = std::stod(num, &used);
                if (used != num.size()) fail("bad float '" + num + "'");
                return Json(d);
            }
            if (!num.empty() && num[0] == '-') return Json(std::stoll(num));
            return Json(static_cast<std::uint64_t>(std::stoull(num)));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail("bad number '" + num + "'");
        }
    }

    Json parse_array() {
        advance();  // '['
        Json arr = Json::array();
        while (true) {
            skip_blank();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                advance();
                break;
            }
            arr.push_back(parse_value());
            skip_blank();
            if (!eof() && peek() == ',') {
                advance();
                continue;
            }
            if (!eof() && peek() == ']') {
                advance();
                break;
            }
            fail("expected ',' or ']' in array");
        }
        return arr;
    }

    Json parse_inline_table() {
        advance();  // '{'
        Json obj = Json::object();
        skip_inline_ws();
        if (!eof() && peek() == '}') {
            advance();
            return obj;
        }
        while (true) {
            std::string key = parse_key();
            skip_inline_ws();
            if (eof() || peek() != '=') fail("expected '=' in inline table");
            advance();
            skip_inline_ws();
            obj[key] = parse_value();
            skip_inline_ws();
            if (!eof() && peek() == ',') {
                advance();
                skip_inline_ws();
                continue;
            }
            if (!eof() && peek() == '}') {
                advance();
                break;
            }
            fail("expected ',' or '}' in inline table");
        }
        return obj;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    Json root_;
    Json* current_ = nullptr;
};

}  // namespace

Json parse(const std::string& text) { return Reader(text).parse(); }

}  // namespace txsc::toml
