#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scsim {

enum class Errc {
  MissingFile,
  ParseError,
  UnknownCompanyInEdge,
  FeatureOutOfRange,
  DuplicateEdge,
  SelfEdge,
  TimestampOutOfRange,
  EdgeAbsent,
  UnknownCompany,
  EmptyNodeSet,
  UnknownMetric,
  UnknownFeature,
  SeriesTooShort,
  NonFiniteValue,
  TooFewSamples,
  DimensionMismatch,
  DegenerateChance,
  InsufficientHistory,
  InvalidConfig,
  InvalidReference,
  NodeNotSimulated,
  UnknownView,
  UnknownSession,
  UnknownNode,
  UnknownModel,
  TransportError,
  SchemaViolation,
  PolicyFailure,
  DegenerateInput,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace scsim
