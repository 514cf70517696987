// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "geomflow/types.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace geomflow {
namespace io {

enum class ErrorCode : int {
    BadMagic = 1,
    BadHeader = 2,
    PayloadMismatch = 3,
    MissingFile = 4,
    ManifestParse = 5,
    CountMismatch = 6,
    DimMismatch = 7,
};

class IoError : public std::runtime_error {
public:
    IoError(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Raw little-endian tensor file: magic "4DK1", then u32 dtype (f32=1, u8=2),
// u32 rank, u32 dims[rank], then the row-major payload.
inline constexpr uint32_t kDtypeF32 = 1;
inline constexpr uint32_t kDtypeU8 = 2;

void write_tensor_f32(const std::filesystem::path& path, const std::vector<uint32_t>& dims,
                      const std::vector<float>& values);
void write_tensor_u8(const std::filesystem::path& path, const std::vector<uint32_t>& dims,
                     const std::vector<uint8_t>& values);
std::vector<float> read_tensor_f32(const std::filesystem::path& path, std::vector<uint32_t>& dims);
std::vector<uint8_t> read_tensor_u8(const std::filesystem::path& path, std::vector<uint32_t>& dims);

/// Writes a sequence as a directory: manifest.txt plus per-frame tensor files
/// (pointmap_%04d, mask_%04d, flow_%04d, flowmask_%04d, pose_%04d, intrinsics,
/// and dynmask_%04d when deformability masks are present). Values are stored
/// as f32.
void write_sequence(const SequenceSample& seq, const std::filesystem::path& dir);

/// Inverse of write_sequence. f32 round-trip is lossless.
SequenceSample read_sequence(const std::filesystem::path& dir);

}  // namespace io
}  // namespace geomflow
