#pragma once

// Emulator models in the LUT container format (kind "emulator").

#include "lutbench/gpr.hpp"

#include <string>

namespace lutbench {

void save_model(const EmulatorModel& model, const std::string& path);

/// Rebuilds the Cholesky factors on load. Throws IoError, FormatError, VersionError.
EmulatorModel load_model(const std::string& path);

}  // namespace lutbench
