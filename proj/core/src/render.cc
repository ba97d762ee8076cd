#include "dexp/render.h"

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <cstdio>

#include "dexp/extlibs/png_io.h"

namespace dexp {

using nlohmann::json;

std::string base64_encode(const std::uint8_t* data, std::size_t size) {
  using namespace boost::archive::iterators;
  using It = base64_from_binary<transform_width<const std::uint8_t*, 6, 8>>;
  std::string out(It(data), It(data + size));
  out.append((3 - size % 3) % 3, '=');
  return out;
}

std::string png_data_url(const ImageData& image) {
  std::vector<std::uint8_t> bytes = png::encode(image);
  return "data:image/png;base64," + base64_encode(bytes.data(), bytes.size());
}

std::string image_ref(const ImageData& image) {
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a(image.rgb.data(), image.rgb.size())));
  return "image:" + std::to_string(image.width) + "x" +
         std::to_string(image.height) + ":" + digest;
}

namespace {

std::string cell_text(const Value& v) {
  if (v.is_number()) return format_number(v.as_number());
  if (v.is_string()) return v.as_string();
  return v.serialize();
}

}  // namespace

json render_value(const Value& v, const RenderOptions& opts) {
  switch (v.kind()) {
    case Value::Kind::kNumber:
      return {{"type", "number"}, {"text", format_number(v.as_number())}};
    case Value::Kind::kString:
      return {{"type", "string"}, {"text", v.as_string()}};
    case Value::Kind::kBottom:
      return {{"type", "error"}, {"message", v.bottom_message()}};
    case Value::Kind::kModule:
      return {{"type", "object"}, {"name", v.as_string()}};
    case Value::Kind::kClosure:
      return {{"type", "function"}, {"text", v.serialize()}};
    case Value::Kind::kList: {
      const auto& items = v.as_list();
      json shown = json::array();
      for (std::size_t i = 0; i < items.size() && i < opts.list_limit; ++i) {
        shown.push_back(render_value(items[i], opts));
      }
      return {{"type", "list"},
              {"length", items.size()},
              {"items", std::move(shown)},
              {"truncated", items.size() > opts.list_limit}};
    }
    case Value::Kind::kTable: {
      const auto& t = v.as_table();
      json rows = json::array();
      for (std::size_t r = 0; r < t.rows.size() && r < opts.table_rows; ++r) {
        json row = json::array();
        for (const auto& cell : t.rows[r]) row.push_back(cell_text(cell));
        rows.push_back(std::move(row));
      }
      return {{"type", "table"},
              {"columns", t.columns},
              {"rows", std::move(rows)},
              {"rowCount", t.rows.size()}};
    }
    case Value::Kind::kImage: {
      const auto& img = v.as_image();
      json out = {{"type", "image"},
                  {"width", img.width},
                  {"height", img.height},
                  {"ref", image_ref(img)}};
      if (opts.inline_images) out["dataUrl"] = png_data_url(img);
      return out;
    }
    case Value::Kind::kForeign: {
      if (auto shown = v.as_foreign().presentable()) {
        json out = render_value(*shown, opts);
        out["tag"] = std::string(v.tag());
        return out;
      }
      return {{"type", "object"},
              {"name", std::string(v.tag())},
              {"text", v.serialize()}};
    }
  }
  return {{"type", "object"}, {"name", "?"}};
}

json render_preview(const Preview& p, const RenderOptions& opts) {
  if (p.is_evaluated()) return render_value(p.value(), opts);
  return {{"type", "delayed"},
          {"expr", pretty(*p.expr())},
          {"needs", p.required()}};
}

std::string render_text(const Value& v, const RenderOptions& opts) {
  switch (v.kind()) {
    case Value::Kind::kNumber:
      return format_number(v.as_number());
    case Value::Kind::kString:
      return v.serialize();
    case Value::Kind::kBottom:
      return "error: " + v.bottom_message();
    case Value::Kind::kList: {
      const auto& items = v.as_list();
      std::string out = "[";
      for (std::size_t i = 0; i < items.size() && i < opts.list_limit; ++i) {
        if (i) out += ", ";
        out += render_text(items[i], opts);
      }
      if (items.size() > opts.list_limit) out += ", ...";
      out += "]";
      if (items.size() > opts.list_limit) {
        out += " (" + std::to_string(items.size()) + " items)";
      }
      return out;
    }
    case Value::Kind::kTable: {
      const auto& t = v.as_table();
      std::string out = "table " + std::to_string(t.rows.size()) + " rows";
      out += "\n  ";
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += " | ";
        out += t.columns[c];
      }
      for (std::size_t r = 0; r < t.rows.size() && r < opts.table_rows; ++r) {
        out += "\n  ";
        for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
          if (c) out += " | ";
          out += cell_text(t.rows[r][c]);
        }
      }
      return out;
    }
    case Value::Kind::kImage:
      return image_ref(v.as_image());
    case Value::Kind::kForeign:
      if (auto shown = v.as_foreign().presentable()) {
        return render_text(*shown, opts);
      }
      return v.serialize();
    default:
      return v.serialize();
  }
}

std::string render_text(const Preview& p, const RenderOptions& opts) {
  if (p.is_evaluated()) return render_text(p.value(), opts);
  std::string out = pretty(*p.expr()) + "  (needs";
  for (const auto& r : p.required()) out += " " + quote_identifier(r);
  return out + ")";
}

}  // namespace dexp
