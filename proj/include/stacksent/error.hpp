#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stacksent {

enum class ErrorCode {
    Io,
    MissingColumn,
    UnknownLabel,
    TooFewPerClass,
    KTooLarge,
    EmptyVocabulary,
    BadMagic,
    DimMismatch,
    NonFinite,
    Truncated,
    Malformed,
    MissingEmbedding,
    LengthMismatch,
    SingleClass,
    NonFiniteLoss,
    DegenerateStage,
    InvalidArgument,
    UnknownParameter,
    FeatureSetMismatch,
    BadBundle,
    Config,
};

std::string_view to_string(ErrorCode code);

// Process exit status for an error: 2 config, 3 data, 4 training.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code),
          message_(message)
    {
    }

    ErrorCode code() const noexcept { return code_; }
    // what() without the code prefix
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

} // namespace stacksent
