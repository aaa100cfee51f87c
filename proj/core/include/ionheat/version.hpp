#pragma once

namespace ionheat {

inline constexpr const char* version_string = "0.1.0";

/// Version of the CSV schemas (header names and units). Bump only on
/// incompatible schema changes; golden tests pin it.
inline constexpr int csv_schema_version = 1;

}  // namespace ionheat
