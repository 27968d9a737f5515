#pragma once

// Minimal XML reader/writer for the fixed author-file schema. Handles
// elements, attributes, character data, the five named entities plus
// numeric references, comments and one leading declaration. Anything
// fancier (CDATA, DTD, processing instructions mid-document) is rejected
// with a byte offset.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace authprof::xml {

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs; // document order
    std::vector<Element> children;
    std::string text; // concatenated direct character data

    const std::string* attr(std::string_view name) const;
    const Element* child(std::string_view name) const;
};

// Parses a whole document; `path` is used only in error messages. Throws
// ParseError with the byte offset on malformed input (including bad UTF-8).
Element parse_document(std::string_view content, const std::string& path);

std::string escape_text(std::string_view raw);
std::string escape_attr(std::string_view raw);

} // namespace authprof::xml
