#pragma once

#include <cstdint>

namespace replica {

using Bytes = std::int64_t;
using NodeId = std::int64_t;
using BlockId = std::int64_t;
using FileId = std::int64_t;

inline constexpr Bytes kMiB = Bytes{1} << 20;
inline constexpr Bytes kGiB = Bytes{1} << 30;

inline constexpr Bytes kDefaultBlockSize = 64 * kMiB;

}  // namespace replica
