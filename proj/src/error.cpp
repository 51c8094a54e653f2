#include "scdt/error.hpp"

#include <iostream>
#include <mutex>

namespace scdt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateLevel: return "DuplicateLevel";
    case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::OutOfRangeId: return "OutOfRangeId";
    case ErrorCode::DisconnectedInduced: return "DisconnectedInduced";
    case ErrorCode::TooManyLevels: return "TooManyLevels";
    case ErrorCode::NotASubset: return "NotASubset";
    case ErrorCode::WrongUniverse: return "WrongUniverse";
    case ErrorCode::NotProperSubset: return "NotProperSubset";
    case ErrorCode::SingletonUniverse: return "SingletonUniverse";
    case ErrorCode::UniverseTooLarge: return "UniverseTooLarge";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnknownLevel: return "UnknownLevel";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::NonBinaryTarget: return "NonBinaryTarget";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::MisalignedTargets: return "MisalignedTargets";
    case ErrorCode::UnknownLevelAtPredict: return "UnknownLevelAtPredict";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink() {
  static WarningSink s;
  return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) {
    sink()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace scdt
