#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace muw {

enum class ErrorKind {
  invalid_input,
  insufficient_data,
  invalid_model,
  not_found,
  no_overlap,
  /// Malformed document: wrong type, unknown key, missing field. Carries a field path.
  schema,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {});

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  /// JSON-path-like location of the offending field, empty when not applicable.
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

}  // namespace muw
