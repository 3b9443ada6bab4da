#include "wavenav/error.hpp"

namespace wavenav
{

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::MalformedMap: return "MalformedMap";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::SourceBlocked: return "SourceBlocked";
    case ErrorCode::SourceOutOfBounds: return "SourceOutOfBounds";
    case ErrorCode::StartBlocked: return "StartBlocked";
    case ErrorCode::GoalBlocked: return "GoalBlocked";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::NonAdjacentCells: return "NonAdjacentCells";
    case ErrorCode::EmptyScan: return "EmptyScan";
    case ErrorCode::PoseOutOfBounds: return "PoseOutOfBounds";
    case ErrorCode::StartOutOfBounds: return "StartOutOfBounds";
    case ErrorCode::GoalOutOfBounds: return "GoalOutOfBounds";
    case ErrorCode::TickAfterStop: return "TickAfterStop";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::MapMismatch: return "MapMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace wavenav
