#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scdt {

enum class ErrorCode {
  // graph
  DuplicateLevel,
  UnknownEndpoint,
  SelfLoop,
  DisconnectedGraph,
  InvalidDimensions,
  OutOfRangeId,
  DisconnectedInduced,
  TooManyLevels,
  // terrain / enumerate
  NotASubset,
  WrongUniverse,
  NotProperSubset,
  SingletonUniverse,
  UniverseTooLarge,
  // dataset
  MissingColumn,
  UnknownLevel,
  MissingValue,
  NonBinaryTarget,
  ConstantColumn,
  EmptySplit,
  InvalidSchema,
  // tree / boosting
  EmptyDataset,
  MisalignedTargets,
  UnknownLevelAtPredict,
  LengthMismatch,
  InvalidParams,
  // cli / io
  InvalidConfig,
  InvalidModel,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal diagnostics (dropped constant columns, degenerate targets, unseen levels).
// Defaults to stderr; tests swap in a collector.
using WarningSink = std::function<void(std::string_view)>;
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace scdt
