#ifndef WAVENAV_ERROR_HPP_
#define WAVENAV_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavenav
{

enum class ErrorCode
{
  MalformedMap,
  OutOfBounds,
  SourceBlocked,
  SourceOutOfBounds,
  StartBlocked,
  GoalBlocked,
  NoPath,
  NonAdjacentCells,
  EmptyScan,
  PoseOutOfBounds,
  StartOutOfBounds,
  GoalOutOfBounds,
  TickAfterStop,
  SchemaError,
  MapMismatch,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & message)
  : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace wavenav

#endif  // WAVENAV_ERROR_HPP_
