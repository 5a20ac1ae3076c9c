#pragma once

namespace qenc {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kCsvSchemaVersion = 1;
inline constexpr int kCheckpointVersion = 1;

}  // namespace qenc
