#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "bpatch/reconstruct.hpp"

namespace bpatch {

// Throws Errc::io naming the path.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Writes through a sibling temporary file renamed into place only after
// `produce` returns; on any exception the temporary is removed and the
// destination is left untouched.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(ByteSink&)>& produce);
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace bpatch
