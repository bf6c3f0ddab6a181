#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flame {

enum class ErrorCode {
    // radiometric codec
    NotAJpeg,
    MissingRadiometricPayload,
    CorruptPayload,
    ValueOutOfEncodableRange,
    IoFailure,
    UnsupportedTiffLayout,
    NoMetadataInSource,
    UnsupportedContainer,
    // alignment
    CropOutOfBounds,
    InsufficientCorrespondences,
    EmptyInput,
    DimensionMismatch,
    UnknownCameraProfile,
    // labeling
    DegenerateRaster,
    InvalidThresholdOrder,
    UnlabeledPair,
    // nadir
    MixedDimensions,
    EmptyStack,
    CollinearGcps,
    InsufficientGcps,
    // review service
    WorkspaceNotFound,
    UnknownPair,
    InvalidLabel,
    // configuration / input validation
    BadConfig,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI exit codes, HTTP status mapping) can dispatch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace flame
