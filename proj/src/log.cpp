#include "gsh/log.hpp"
#include "gsh/error.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace gsh {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::AsymmetricGraph: return "AsymmetricGraph";
    case ErrorCode::BadId: return "BadId";
    case ErrorCode::DirectedGraph: return "DirectedGraph";
    case ErrorCode::BadProbability: return "BadProbability";
    case ErrorCode::BadSeverity: return "BadSeverity";
    case ErrorCode::EmptyTrainMask: return "EmptyTrainMask";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::EmptyLabeledSet: return "EmptyLabeledSet";
    case ErrorCode::MissingYear: return "MissingYear";
    case ErrorCode::MissingScaffoldId: return "MissingScaffoldId";
    case ErrorCode::ScaleMismatch: return "ScaleMismatch";
    case ErrorCode::TooFewClasses: return "TooFewClasses";
    case ErrorCode::EmptyEvalSet: return "EmptyEvalSet";
    case ErrorCode::MissingPrediction: return "MissingPrediction";
    case ErrorCode::OneClassOnly: return "OneClassOnly";
    case ErrorCode::EmptyQuerySet: return "EmptyQuerySet";
    case ErrorCode::BadQuantile: return "BadQuantile";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::MissingNodeScore: return "MissingNodeScore";
    case ErrorCode::EmptySubgraph: return "EmptySubgraph";
    case ErrorCode::SeedCountMismatch: return "SeedCountMismatch";
    case ErrorCode::EmptyMolecule: return "EmptyMolecule";
    case ErrorCode::NoTrainLabels: return "NoTrainLabels";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::AllUndefined: return "AllUndefined";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::BadArgument: return "BadArgument";
  }
  return "Unknown";
}

namespace log {

Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("GSH_LOG");
    if (env == nullptr) return Level::warn;
    const std::string v(env);
    if (v == "error") return Level::error;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
  }();
  return level;
}

void write(Level level, std::string_view msg) {
  if (level > threshold()) return;
  static std::mutex mu;
  static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
  std::lock_guard lock(mu);
  std::cerr << "[gsh:" << kNames[static_cast<int>(level)] << "] " << msg << '\n';
}

}  // namespace log
}  // namespace gsh
