#include "vodsim/errors.hpp"

namespace vodsim {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonDivisible: return "NonDivisible";
    case ErrorCode::BeforeStart: return "BeforeStart";
    case ErrorCode::UnknownVideo: return "UnknownVideo";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::UnknownLps: return "UnknownLps";
    case ErrorCode::DuplicateClient: return "DuplicateClient";
    case ErrorCode::UnknownClient: return "UnknownClient";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::SimulationFault: return "SimulationFault";
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace vodsim
