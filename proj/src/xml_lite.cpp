#include "xml_lite.hpp"

#include <cctype>

#include "authprof/errors.hpp"
#include "authprof/unicode.hpp"

namespace authprof::xml {

namespace {

class Scanner {
public:
    Scanner(std::string_view content, const std::string& path)
        : s_(content), path_(path) {}

    Element parse() {
        std::size_t bad = 0;
        if (!unicode::validate(s_, bad)) fail(bad, "invalid UTF-8");
        // UTF-8 BOM
        if (s_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
        skip_misc(true);
        Element root = parse_element();
        skip_misc(false);
        if (pos_ != s_.size()) fail(pos_, "trailing content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
        throw ParseError(path_, at, msg);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

    void expect(char c) {
        if (eof() || peek() != c) fail(pos_, std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) ++pos_;
    }

    // Whitespace, comments and (optionally) one XML declaration.
    void skip_misc(bool allow_decl) {
        for (;;) {
            skip_ws();
            if (allow_decl && s_.substr(pos_, 2) == "<?") {
                auto end = s_.find("?>", pos_);
                if (end == std::string_view::npos) fail(pos_, "unterminated declaration");
                pos_ = end + 2;
                allow_decl = false;
                continue;
            }
            if (s_.substr(pos_, 4) == "<!--") {
                auto end = s_.find("-->", pos_);
                if (end == std::string_view::npos) fail(pos_, "unterminated comment");
                pos_ = end + 3;
                continue;
            }
            return;
        }
    }

    static bool name_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
    }
    static bool name_char(char c) {
        return name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
    }

    std::string parse_name() {
        if (eof() || !name_start(peek())) fail(pos_, "expected name");
        std::size_t start = pos_;
        while (!eof() && name_char(peek())) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    char32_t parse_entity() {
        // pos_ is at '&'
        std::size_t amp = pos_;
        auto semi = s_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 12) fail(amp, "unterminated entity");
        std::string_view body = s_.substr(pos_ + 1, semi - pos_ - 1);
        pos_ = semi + 1;
        if (body == "amp") return U'&';
        if (body == "lt") return U'<';
        if (body == "gt") return U'>';
        if (body == "quot") return U'"';
        if (body == "apos") return U'\'';
        if (!body.empty() && body[0] == '#') {
            int base = 10;
            std::string_view digits = body.substr(1);
            if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
                base = 16;
                digits = digits.substr(1);
            }
            if (digits.empty()) fail(amp, "empty character reference");
            char32_t cp = 0;
            for (char c : digits) {
                int v;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (base == 16 && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (base == 16 && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                else fail(amp, "bad character reference");
                cp = cp * base + v;
                if (cp > 0x10FFFF) fail(amp, "character reference out of range");
            }
            if (cp >= 0xD800 && cp <= 0xDFFF) fail(amp, "character reference out of range");
            return cp;
        }
        fail(amp, "unknown entity '&" + std::string(body) + ";'");
    }

    std::string parse_attr_value() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail(pos_, "expected quoted attribute value");
        const char quote = peek();
        ++pos_;
        std::string value;
        while (!eof() && peek() != quote) {
            if (peek() == '<') fail(pos_, "'<' in attribute value");
            if (peek() == '&') {
                unicode::append_utf8(value, parse_entity());
            } else {
                value.push_back(peek());
                ++pos_;
            }
        }
        expect(quote);
        return value;
    }

    Element parse_element() {
        expect('<');
        Element el;
        el.name = parse_name();
        for (;;) {
            skip_ws();
            if (eof()) fail(pos_, "unterminated start tag");
            if (peek() == '/') {
                ++pos_;
                expect('>');
                return el; // empty element
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            std::string attr_name = parse_name();
            skip_ws();
            expect('=');
            skip_ws();
            for (const auto& [existing, _] : el.attrs) {
                if (existing == attr_name) fail(pos_, "duplicate attribute '" + attr_name + "'");
            }
            el.attrs.emplace_back(std::move(attr_name), parse_attr_value());
        }
        // content
        for (;;) {
            if (eof()) fail(pos_, "unterminated element '" + el.name + "'");
            if (peek() == '<') {
                if (s_.substr(pos_, 4) == "<!--") {
                    auto end = s_.find("-->", pos_);
                    if (end == std::string_view::npos) fail(pos_, "unterminated comment");
                    pos_ = end + 3;
                    continue;
                }
                if (s_.substr(pos_, 2) == "</") {
                    pos_ += 2;
                    std::size_t name_at = pos_;
                    std::string close = parse_name();
                    if (close != el.name) fail(name_at, "mismatched end tag '" + close + "'");
                    skip_ws();
                    expect('>');
                    return el;
                }
                el.children.push_back(parse_element());
            } else if (peek() == '&') {
                unicode::append_utf8(el.text, parse_entity());
            } else {
                el.text.push_back(peek());
                ++pos_;
            }
        }
    }

    std::string_view s_;
    std::string path_;
    std::size_t pos_ = 0;
};

} // namespace

const std::string* Element::attr(std::string_view name) const {
    for (const auto& [k, v] : attrs) {
        if (k == name) return &v;
    }
    return nullptr;
}

const Element* Element::child(std::string_view name) const {
    for (const auto& c : children) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

Element parse_document(std::string_view content, const std::string& path) {
    return Scanner(content, path).parse();
}

std::string escape_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attr(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

} // namespace authprof::xml
