#include "authprof/unicode.hpp"

#include <stdexcept>

namespace authprof::unicode {

bool decode_next(std::string_view text, std::size_t& pos, char32_t& out) {
    if (pos >= text.size()) return false;
    const auto b0 = static_cast<unsigned char>(text[pos]);
    std::size_t len;
    char32_t cp;
    if (b0 < 0x80) {
        out = b0;
        ++pos;
        return true;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return false;
    }
    if (pos + len > text.size()) return false;
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(text[pos + i]);
        if ((b & 0xC0) != 0x80) return false;
        cp = (cp << 6) | (b & 0x3F);
    }
    // Overlong encodings, surrogates, out-of-range values.
    static constexpr char32_t kMinForLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLen[len]) return false;
    if (cp >= 0xD800 && cp <= 0xDFFF) return false;
    if (cp > 0x10FFFF) return false;
    pos += len;
    out = cp;
    return true;
}

std::vector<char32_t> decode(std::string_view text) {
    std::vector<char32_t> cps;
    cps.reserve(text.size());
    std::size_t pos = 0;
    char32_t cp;
    while (pos < text.size()) {
        if (!decode_next(text, pos, cp)) {
            throw std::invalid_argument("malformed UTF-8 at byte offset " + std::to_string(pos));
        }
        cps.push_back(cp);
    }
    return cps;
}

bool validate(std::string_view text, std::size_t& bad_offset) {
    std::size_t pos = 0;
    char32_t cp;
    while (pos < text.size()) {
        if (!decode_next(text, pos, cp)) {
            bad_offset = pos;
            return false;
        }
    }
    return true;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

char32_t to_lower(char32_t cp) {
    // ASCII
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    // Latin-1 supplement: U+00C0..U+00DE map +0x20, except the multiplication sign.
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
    // Latin Extended-A: mostly upper/lower pairs on even/odd code points.
    if (cp >= 0x0100 && cp <= 0x0177) {
        if (cp == 0x0130) return 0x0069; // I with dot above -> i
        if (cp == 0x0131) return cp;     // dotless i is already lowercase
        return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if ((cp >= 0x0179 && cp <= 0x017D)) return (cp % 2 == 1) ? cp + 1 : cp;
    // Greek
    if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 0x20;
    if (cp >= 0x0386 && cp <= 0x038F) {
        switch (cp) {
            case 0x0386: return 0x03AC;
            case 0x0388: return 0x03AD;
            case 0x0389: return 0x03AE;
            case 0x038A: return 0x03AF;
            case 0x038C: return 0x03CC;
            case 0x038E: return 0x03CD;
            case 0x038F: return 0x03CE;
            default: return cp;
        }
    }
    // Cyrillic
    if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;
    if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;
    return cp;
}

bool is_space(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
        case 0x20: case 0x85: case 0xA0:
        case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

std::string lower_utf8(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    char32_t cp;
    while (pos < text.size()) {
        if (!decode_next(text, pos, cp)) {
            throw std::invalid_argument("malformed UTF-8 at byte offset " + std::to_string(pos));
        }
        append_utf8(out, to_lower(cp));
    }
    return out;
}

} // namespace authprof::unicode
