#pragma once

#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

#include "dexp/preview.h"
#include "dexp/value.h"

namespace dexp {

struct RenderOptions {
  std::size_t list_limit = 20;
  std::size_t table_rows = 10;
  /// Embed images as PNG data URLs; otherwise only the reference is sent.
  bool inline_images = true;
};

/// Display form of a value for the wire protocol. Every form has a `type`
/// field: number, string, list, table, image, error, function or object.
nlohmann::json render_value(const Value& v, const RenderOptions& opts = {});
/// As render_value, plus `delayed` with `expr` and `needs`.
nlohmann::json render_preview(const Preview& p, const RenderOptions& opts = {});

/// One-line text form used by the command line.
std::string render_text(const Value& v, const RenderOptions& opts = {});
std::string render_text(const Preview& p, const RenderOptions& opts = {});

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::string png_data_url(const ImageData& image);
/// Stable reference for an image: size plus pixel digest.
std::string image_ref(const ImageData& image);

}  // namespace dexp
