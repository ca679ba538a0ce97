#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sdc {

// Invalid configuration value (bad enum tag, zero planes, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldError {
  std::string path;  // JSON-pointer-like, e.g. "/design/total_power_W"
  std::string message;
};

// Semantic validation failure carrying every violation found.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<FieldError> errors)
      : std::runtime_error(summarize(errors)), errors_(std::move(errors)) {}
  ValidationError(std::string path, std::string message)
      : ValidationError(std::vector<FieldError>{{std::move(path), std::move(message)}}) {}

  const std::vector<FieldError>& errors() const noexcept { return errors_; }

 private:
  static std::string summarize(const std::vector<FieldError>& errors) {
    std::string out = "validation failed:";
    for (const auto& e : errors) out += "\n  " + e.path + ": " + e.message;
    return out;
  }

  std::vector<FieldError> errors_;
};

// Malformed input text (JSON syntax); message carries line/column.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Calibration produced non-physical (negative) parameters.
class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, std::vector<std::string> cells)
      : std::runtime_error(what), cells_(std::move(cells)) {}

  const std::vector<std::string>& offending_cells() const noexcept { return cells_; }

 private:
  std::vector<std::string> cells_;
};

}  // namespace sdc
