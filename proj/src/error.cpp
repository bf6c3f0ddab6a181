#include "flame/error.hpp"

namespace flame {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotAJpeg: return "NotAJpeg";
        case ErrorCode::MissingRadiometricPayload: return "MissingRadiometricPayload";
        case ErrorCode::CorruptPayload: return "CorruptPayload";
        case ErrorCode::ValueOutOfEncodableRange: return "ValueOutOfEncodableRange";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::UnsupportedTiffLayout: return "UnsupportedTiffLayout";
        case ErrorCode::NoMetadataInSource: return "NoMetadataInSource";
        case ErrorCode::UnsupportedContainer: return "UnsupportedContainer";
        case ErrorCode::CropOutOfBounds: return "CropOutOfBounds";
        case ErrorCode::InsufficientCorrespondences: return "InsufficientCorrespondences";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnknownCameraProfile: return "UnknownCameraProfile";
        case ErrorCode::DegenerateRaster: return "DegenerateRaster";
        case ErrorCode::InvalidThresholdOrder: return "InvalidThresholdOrder";
        case ErrorCode::UnlabeledPair: return "UnlabeledPair";
        case ErrorCode::MixedDimensions: return "MixedDimensions";
        case ErrorCode::EmptyStack: return "EmptyStack";
        case ErrorCode::CollinearGcps: return "CollinearGcps";
        case ErrorCode::InsufficientGcps: return "InsufficientGcps";
        case ErrorCode::WorkspaceNotFound: return "WorkspaceNotFound";
        case ErrorCode::UnknownPair: return "UnknownPair";
        case ErrorCode::InvalidLabel: return "InvalidLabel";
        case ErrorCode::BadConfig: return "BadConfig";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace flame
