// SDPA sparse (.dat-s) reader and writer.
#pragma once

#include "spectainer/sdp.hpp"

#include <stdexcept>
#include <string>

namespace spectainer {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

std::string to_sdpa_string(const SdpProblem& p);
SdpProblem from_sdpa_string(const std::string& text);

void export_sdpa(const SdpProblem& p, const std::string& path);
SdpProblem import_sdpa(const std::string& path);

}  // namespace spectainer
