#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frugal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (ARFF, description.txt, config files, CSV logs).
class ParseError : public Error {
  public:
    ParseError(const std::string &source, std::size_t line, const std::string &what) :
        Error{ source + ":" + std::to_string(line) + ": " + what },
        line_{ line } {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed input that violates a data invariant (missing file, non-total runs, ...).
class DataError : public Error {
  public:
    using Error::Error;
};

/// Invalid arguments or configuration supplied by the caller.
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace frugal
