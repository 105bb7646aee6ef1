#pragma once

#include <stdexcept>
#include <string>

namespace chronologic {

/// Error categories, mapped 1:1 onto CLI exit codes.
enum class ErrorCategory {
    parse = 2,      ///< malformed input file / schema violation
    validation = 3, ///< physics validation failure (non-unitary, bad decomposition, ...)
    refusal = 4,    ///< engine refuses the query (e.g. probability of an inconsistent family)
    resource = 5,   ///< resource cap exceeded (history count, dense dimension, workspace)
};

inline const char* category_name(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::refusal: return "refusal";
    case ErrorCategory::resource: return "resource";
    }
    return "unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const { return category_; }
    int exit_code() const { return static_cast<int>(category_); }

    static Error parse(const std::string& msg) { return {ErrorCategory::parse, msg}; }
    static Error validation(const std::string& msg) { return {ErrorCategory::validation, msg}; }
    static Error refusal(const std::string& msg) { return {ErrorCategory::refusal, msg}; }
    static Error resource(const std::string& msg) { return {ErrorCategory::resource, msg}; }

  private:
    ErrorCategory category_;
};

} // namespace chronologic
