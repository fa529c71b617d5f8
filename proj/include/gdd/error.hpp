#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gdd {

enum class ErrorCode {
    MissingFile,
    DuplicatePlayerId,
    SchemaViolation,
    ParseError,
    EmptySeries,
    VideoTooShort,
    EmptyWindow,
    NoValidClips,
    EmptyInput,
    EdgesMissing,
    TooFewPoints,
    DimMismatch,
    MissingFeature,
    UnknownGame,
    SingleClassTraining,
    SingleClassEval,
    NonFiniteInput,
    TooManyChannels,
    MisalignedPlayers,
    BadWeights,
    TooFewGames,
    LeakageDetected,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-checkable code; the
// message names the offending entity.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // True for problems with user-supplied inputs (manifest, files, config)
    // as opposed to failures inside the numerical pipeline.
    bool is_input_error() const noexcept;

private:
    ErrorCode code_;
};

}  // namespace gdd
