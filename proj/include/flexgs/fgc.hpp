#pragma once

// Compressed container ("FGC1"). Little-endian layout:
//
//   offset  size  field
//   0       4     magic "FGC1"
//   4       4     u32 version (currently 1)
//   8       4     u32 n_full        rows with every channel
//   12      4     u32 n_shpruned    rows without the SH_adv block
//   16      4     f32 alpha
//   20      4     f32 beta
//   24      4     u32 group_count
//   28      4     f32 int4_threshold_db
//   32      59    u8  bitwidth per channel
//   91      ...   group tables: per channel (channel-major), per group,
//                 (f32 min, f32 max). Full segment first (59 channels),
//                 then the SH-pruned segment (14 channels, SH_adv skipped).
//                 Each segment restarts group numbering.
//   ...     ...   payload: one bitstream, bits packed LSB-first within
//                 bytes. Full segment channel-major (channel's codes in row
//                 order), then the SH-pruned segment. Zero-padded to a byte.
//
// The total size is an exact function of (n_full, n_shpruned, plan);
// estimate_compressed_size returns precisely the bytes write_fgc emits.

#include <cstdint>
#include <filesystem>

#include "flexgs/mpq.hpp"
#include "flexgs/plans.hpp"

namespace flexgs {

inline constexpr char kFgcMagic[4] = {'F', 'G', 'C', '1'};
inline constexpr uint32_t kFgcVersion = 1;

uint64_t estimate_compressed_size(std::size_t n_full, std::size_t n_shpruned,
                                  const CompressionPlan& plan);

// Returns the number of bytes written (always equal to the estimate).
uint64_t write_fgc(const QuantizedModel& qm, const std::filesystem::path& path);

QuantizedModel read_fgc(const std::filesystem::path& path);

}  // namespace flexgs
