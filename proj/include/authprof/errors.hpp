#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace authprof {

// Bad input data or configuration: the caller gave us something we refuse
// to work with. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file content. Carries the file path and the byte offset at
// which scanning failed.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string path, std::size_t byte_offset, const std::string& msg)
        : std::runtime_error(path + ": byte " + std::to_string(byte_offset) + ": " + msg),
          path_(std::move(path)),
          byte_offset_(byte_offset) {}

    const std::string& path() const { return path_; }
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::string path_;
    std::size_t byte_offset_;
};

} // namespace authprof
