#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "dexp/value.h"

namespace dexp::png {

/// Decoded image or an error message.
using ReadResult = std::variant<ImageData, std::string>;

ReadResult read_file(const std::filesystem::path& path);
ReadResult decode(const std::vector<std::uint8_t>& bytes);

/// PNG bytes of an RGB8 image; empty on failure.
std::vector<std::uint8_t> encode(const ImageData& image);
bool write_file(const std::filesystem::path& path, const ImageData& image);

}  // namespace dexp::png
