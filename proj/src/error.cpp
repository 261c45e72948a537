#include "stacksent/error.hpp"

namespace stacksent {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::TooFewPerClass: return "TooFewPerClass";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::MissingEmbedding: return "MissingEmbedding";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::DegenerateStage: return "DegenerateStage";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::FeatureSetMismatch: return "FeatureSetMismatch";
    case ErrorCode::BadBundle: return "BadBundle";
    case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::Config:
    case ErrorCode::UnknownParameter:
    case ErrorCode::InvalidArgument:
        return 2;
    case ErrorCode::SingleClass:
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::DegenerateStage:
        return 4;
    default:
        return 3;
    }
}

} // namespace stacksent
