#include "dexp/extlibs/image.h"

#include <algorithm>
#include <cmath>

#include "dexp/extlibs/common.h"
#include "dexp/extlibs/png_io.h"

namespace dexp {

namespace imageops {

ImageData grey_scale(const ImageData& in) {
  ImageData out = in;
  for (std::size_t i = 0; i + 2 < out.rgb.size(); i += 3) {
    int sum = in.rgb[i] + in.rgb[i + 1] + in.rgb[i + 2];
    auto g = static_cast<std::uint8_t>(sum / 3);
    out.rgb[i] = out.rgb[i + 1] = out.rgb[i + 2] = g;
  }
  return out;
}

namespace {

// One blur pass along rows (horizontal) or columns.
ImageData blur_pass(const ImageData& in, int r, bool horizontal) {
  ImageData out = in;
  const int w = in.width;
  const int h = in.height;
  const int window = 2 * r + 1;
  const int len = horizontal ? w : h;
  const int lines = horizontal ? h : w;
  auto at = [&](int line, int pos, int c) -> int {
    int x = horizontal ? pos : line;
    int y = horizontal ? line : pos;
    return in.rgb[(static_cast<std::size_t>(y) * w + x) * 3 + c];
  };
  for (int line = 0; line < lines; ++line) {
    for (int c = 0; c < 3; ++c) {
      int sum = 0;
      for (int k = -r; k <= r; ++k) sum += at(line, std::clamp(k, 0, len - 1), c);
      for (int pos = 0; pos < len; ++pos) {
        int x = horizontal ? pos : line;
        int y = horizontal ? line : pos;
        out.rgb[(static_cast<std::size_t>(y) * w + x) * 3 + c] =
            static_cast<std::uint8_t>((sum + window / 2) / window);
        sum -= at(line, std::clamp(pos - r, 0, len - 1), c);
        sum += at(line, std::clamp(pos + r + 1, 0, len - 1), c);
      }
    }
  }
  return out;
}

}  // namespace

ImageData box_blur(const ImageData& in, int radius) {
  if (radius <= 0 || in.width == 0 || in.height == 0) return in;
  return blur_pass(blur_pass(in, radius, true), radius, false);
}

ImageData combine(const ImageData& a, const ImageData& b, double ratio) {
  ImageData out = a;
  for (std::size_t i = 0; i < a.rgb.size(); ++i) {
    double v = (a.rgb[i] * ratio + b.rgb[i] * (100.0 - ratio)) / 100.0;
    out.rgb[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

}  // namespace imageops

using extlib::argument_error;
using extlib::arity_error;

ImageLibrary::ImageLibrary(std::filesystem::path asset_dir)
    : asset_dir_(std::move(asset_dir)) {
  TypePtr img = Type::object("image");
  ObjectSignature root{"image-module", {}};
  root.members["load"] = {{types::str()}, img};
  sigs_.emplace(root.name, std::move(root));
  ObjectSignature i{"image", {}};
  i.members["greyScale"] = {{}, img};
  i.members["blur"] = {{types::num()}, img};
  i.members["combine"] = {{img, types::num()}, img};
  sigs_.emplace(i.name, std::move(i));
}

RootList ImageLibrary::roots() const {
  return {{"image", Value::module("image")}};
}

bool ImageLibrary::handles(const Value& receiver) const {
  if (receiver.kind() == Value::Kind::kImage) return true;
  return receiver.kind() == Value::Kind::kModule &&
         receiver.as_string() == "image";
}

bool ImageLibrary::is_image_member(bool on_module, std::string_view member) {
  if (on_module) return member == "load";
  return member == "greyScale" || member == "blur" || member == "combine";
}

std::optional<Value> ImageLibrary::check_call(
    bool on_module, std::string_view member, std::span<const Value> args,
    const std::function<bool(const Value&)>& image_like) {
  for (const Value& a : args) {
    if (a.is_bottom()) return a;
  }
  if (on_module) {
    if (args.size() != 1) return arity_error(member, 1, args.size());
    if (!args[0].is_string()) return argument_error(member, "a file name");
    return std::nullopt;
  }
  if (member == "greyScale") {
    if (!args.empty()) return arity_error(member, 0, args.size());
  } else if (member == "blur") {
    if (args.size() != 1) return arity_error(member, 1, args.size());
    if (!extlib::as_int(args[0], 0, kMaxBlurRadius)) {
      return argument_error(member, "an integer radius between 0 and 64");
    }
  } else if (member == "combine") {
    if (args.size() != 2) return arity_error(member, 2, args.size());
    if (!image_like(args[0])) return argument_error(member, "an image");
    if (!args[1].is_number() || args[1].as_number() < 0 ||
        args[1].as_number() > 100) {
      return argument_error(member, "a ratio between 0 and 100");
    }
  }
  return std::nullopt;
}

Value ImageLibrary::load(const std::string& path) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::path root = fs::weakly_canonical(asset_dir_, ec);
  if (ec) return Value::bottom("asset directory unavailable");
  fs::path full = fs::weakly_canonical(root / path, ec);
  if (ec) return Value::bottom("cannot open " + path);
  auto rel = full.lexically_relative(root);
  if (rel.empty() || *rel.begin() == "..") {
    return Value::bottom("path outside the asset directory: " + path);
  }
  png::ReadResult r = png::read_file(full);
  if (auto* err = std::get_if<std::string>(&r)) {
    return Value::bottom(*err);
  }
  return Value::image(std::move(std::get<ImageData>(r)));
}

Value ImageLibrary::eval_member(const Value& receiver, std::string_view member,
                                std::span<const Value> args,
                                const ApplyFn&) const {
  if (auto b = extlib::first_bottom(receiver, args)) return *b;
  if (!handles(receiver)) return extlib::no_member(receiver, member);
  bool on_module = receiver.kind() == Value::Kind::kModule;
  if (!is_image_member(on_module, member)) {
    return extlib::no_member(receiver, member);
  }
  auto is_image = [](const Value& v) {
    return v.kind() == Value::Kind::kImage;
  };
  if (auto err = check_call(on_module, member, args, is_image)) return *err;

  if (on_module) return load(args[0].as_string());
  const ImageData& img = receiver.as_image();
  if (member == "greyScale") return Value::image(imageops::grey_scale(img));
  if (member == "blur") {
    return Value::image(
        imageops::box_blur(img, static_cast<int>(args[0].as_number())));
  }
  const ImageData& other = args[0].as_image();
  if (other.width != img.width || other.height != img.height) {
    return Value::bottom("combine expects images of equal size");
  }
  return Value::image(imageops::combine(img, other, args[1].as_number()));
}

TypePtr ImageLibrary::type_of(const Value& v) const {
  if (v.kind() == Value::Kind::kImage) return Type::object("image");
  if (handles(v)) return Type::object("image-module");
  return Type::error("not an image value");
}

const ObjectSignature* ImageLibrary::object_type(std::string_view name) const {
  auto it = sigs_.find(name);
  return it == sigs_.end() ? nullptr : &it->second;
}

}  // namespace dexp
