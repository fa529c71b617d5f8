#include "gdd/error.hpp"

namespace gdd {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingFile: return "MissingFile";
        case ErrorCode::DuplicatePlayerId: return "DuplicatePlayerId";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::VideoTooShort: return "VideoTooShort";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::NoValidClips: return "NoValidClips";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EdgesMissing: return "EdgesMissing";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::MissingFeature: return "MissingFeature";
        case ErrorCode::UnknownGame: return "UnknownGame";
        case ErrorCode::SingleClassTraining: return "SingleClassTraining";
        case ErrorCode::SingleClassEval: return "SingleClassEval";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::TooManyChannels: return "TooManyChannels";
        case ErrorCode::MisalignedPlayers: return "MisalignedPlayers";
        case ErrorCode::BadWeights: return "BadWeights";
        case ErrorCode::TooFewGames: return "TooFewGames";
        case ErrorCode::LeakageDetected: return "LeakageDetected";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

bool Error::is_input_error() const noexcept {
    switch (code_) {
        case ErrorCode::MissingFile:
        case ErrorCode::DuplicatePlayerId:
        case ErrorCode::SchemaViolation:
        case ErrorCode::ParseError:
        case ErrorCode::EmptySeries:
        case ErrorCode::InvalidArgument:
        case ErrorCode::TooFewGames:
        case ErrorCode::TooManyChannels:
            return true;
        default:
            return false;
    }
}

}  // namespace gdd
