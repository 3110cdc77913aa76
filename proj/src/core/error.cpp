#include "scsim/error.hpp"

namespace scsim {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingFile: return "MissingFile";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownCompanyInEdge: return "UnknownCompanyInEdge";
    case Errc::FeatureOutOfRange: return "FeatureOutOfRange";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::SelfEdge: return "SelfEdge";
    case Errc::TimestampOutOfRange: return "TimestampOutOfRange";
    case Errc::EdgeAbsent: return "EdgeAbsent";
    case Errc::UnknownCompany: return "UnknownCompany";
    case Errc::EmptyNodeSet: return "EmptyNodeSet";
    case Errc::UnknownMetric: return "UnknownMetric";
    case Errc::UnknownFeature: return "UnknownFeature";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DegenerateChance: return "DegenerateChance";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidReference: return "InvalidReference";
    case Errc::NodeNotSimulated: return "NodeNotSimulated";
    case Errc::UnknownView: return "UnknownView";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::UnknownModel: return "UnknownModel";
    case Errc::TransportError: return "TransportError";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::PolicyFailure: return "PolicyFailure";
    case Errc::DegenerateInput: return "DegenerateInput";
  }
  return "Unknown";
}

}  // namespace scsim
