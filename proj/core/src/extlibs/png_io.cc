#include "dexp/extlibs/png_io.h"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

namespace dexp::png {

ReadResult decode(const std::vector<std::uint8_t>& bytes) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    return std::string("not a PNG image: ") + img.message;
  }
  img.format = PNG_FORMAT_RGB;
  ImageData out;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.rgb.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr)) {
    std::string msg = std::string("corrupt PNG image: ") + img.message;
    png_image_free(&img);
    return msg;
  }
  return out;
}

ReadResult read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    return "cannot open " + path.filename().string();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) return "cannot open " + path.filename().string();
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode(bytes);
}

std::vector<std::uint8_t> encode(const ImageData& image) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.rgb.data(), 0,
                                 nullptr)) {
    return {};
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.rgb.data(),
                                 0, nullptr)) {
    return {};
  }
  out.resize(size);
  return out;
}

bool write_file(const std::filesystem::path& path, const ImageData& image) {
  std::vector<std::uint8_t> bytes = encode(image);
  if (bytes.empty()) return false;
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  return static_cast<bool>(out);
}

}  // namespace dexp::png
