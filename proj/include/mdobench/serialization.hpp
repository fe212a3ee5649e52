#pragma once

#include <string>

#include "mdobench/coupling.hpp"

namespace mdobench {

/// JSON text for a coupling system: family, explicit block shapes,
/// row-major matrix entries. Binary64 values survive a round trip bit-exactly
/// (17-significant-digit decimal encoding).
std::string coupling_to_json(const Coupling& coupling);
Coupling coupling_from_json(const std::string& text);

std::string coupling_space_to_json(const CouplingSpace& space);
CouplingSpace coupling_space_from_json(const std::string& text);

}  // namespace mdobench
