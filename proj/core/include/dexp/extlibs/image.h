#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "dexp/library.h"

namespace dexp {

namespace imageops {

/// Channel average per pixel.
ImageData grey_scale(const ImageData& in);
/// Separable box blur with clamped edges.
ImageData box_blur(const ImageData& in, int radius);
/// Per-pixel mix; ratio 100 keeps `a`, ratio 0 gives `b`. Sizes must match.
ImageData combine(const ImageData& a, const ImageData& b, double ratio);

}  // namespace imageops

/// Root `image` with load(path); images support greyScale, blur(radius) and
/// combine(other, ratio). Paths resolve inside the asset directory.
class ImageLibrary final : public TypedLibrary {
 public:
  static constexpr int kMaxBlurRadius = 64;

  explicit ImageLibrary(std::filesystem::path asset_dir);

  std::string_view name() const override { return "image"; }
  RootList roots() const override;
  bool handles(const Value& receiver) const override;
  Value eval_member(const Value& receiver, std::string_view member,
                    std::span<const Value> args,
                    const ApplyFn& apply) const override;
  TypePtr type_of(const Value& v) const override;
  const ObjectSignature* object_type(std::string_view name) const override;

  /// Argument checks shared with the lazy variant: a bottom describing the
  /// problem, or nothing when the call is well-formed. `on_module` selects
  /// the root's members; `image_like` decides what counts as an image
  /// argument.
  static std::optional<Value> check_call(
      bool on_module, std::string_view member, std::span<const Value> args,
      const std::function<bool(const Value&)>& image_like);
  static bool is_image_member(bool on_module, std::string_view member);

  Value load(const std::string& path) const;

 private:
  std::filesystem::path asset_dir_;
  std::map<std::string, ObjectSignature, std::less<>> sigs_;
};

}  // namespace dexp
