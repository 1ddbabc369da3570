#pragma once

#include <cstdint>
#include <string>

#include "regress/model.hpp"

namespace faasprof {

inline constexpr char kModelMagic[8] = {'F', 'P', 'M', 'O', 'D', 'E', 'L', '\0'};
inline constexpr std::uint32_t kModelVersion = 1;

// Byte layout is described in docs/model_format.md.
std::string serialize_model(const RegressionModel& m);
RegressionModel deserialize_model(const std::string& bytes, const std::string& origin = "<memory>");

void save_model(const RegressionModel& m, const std::string& path);
// Throws IoError, FormatError, VersionError or ChecksumError.
RegressionModel load_model(const std::string& path);

}  // namespace faasprof
