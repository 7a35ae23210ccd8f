#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iroplan {

enum class ErrorCode {
  // sim-world
  DuplicateName,
  OverlappingObjects,
  InvalidScene,
  PhysicallyBlocked,
  NotGraspable,
  UnknownLandmark,
  InvalidScript,
  // knowledge
  UnboundConstant,
  UnknownVariable,
  UnknownType,
  UnknownCondition,
  EffectContradiction,
  NameClash,
  UnknownAction,
  InvalidModel,
  // pddl-io
  UndeclaredConstant,
  SyntaxError,
  UnsupportedFeature,
  // executor / service
  ExecutionFailed,
  UnknownResource,
  VersionConflict,
  BadRequest,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a 1-based source location.
class SyntaxError : public Error {
 public:
  SyntaxError(ErrorCode code, std::size_t line, std::size_t column,
              const std::string& message)
      : Error(code, std::to_string(line) + ":" + std::to_string(column) + ": " +
                        message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace iroplan
