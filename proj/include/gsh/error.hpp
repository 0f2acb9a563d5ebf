#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsh {

enum class ErrorCode {
  MissingFile,
  ParseError,
  LengthMismatch,
  AsymmetricGraph,
  BadId,
  DirectedGraph,
  BadProbability,
  BadSeverity,
  EmptyTrainMask,
  NonFiniteFeature,
  EmptyLabeledSet,
  MissingYear,
  MissingScaffoldId,
  ScaleMismatch,
  TooFewClasses,
  EmptyEvalSet,
  MissingPrediction,
  OneClassOnly,
  EmptyQuerySet,
  BadQuantile,
  EmptyGroup,
  DegenerateGroup,
  MissingNodeScore,
  EmptySubgraph,
  SeedCountMismatch,
  EmptyMolecule,
  NoTrainLabels,
  EmptyInput,
  AllUndefined,
  IoError,
  ConfigError,
  MissingInput,
  BadArgument,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the toolkit is reported as an Error carrying a
// machine-checkable code; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gsh
