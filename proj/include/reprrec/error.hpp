#pragma once

#include <stdexcept>
#include <string>

namespace reprrec {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// input-file errors; message carries the offending line number
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
  std::size_t line_number;
};

}  // namespace reprrec
