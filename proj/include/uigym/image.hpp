#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace uigym {

struct Color {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Color&) const = default;
};

/// 8-bit RGB raster, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 bytes per pixel

  Image() = default;
  Image(int w, int h, Color fill = {255, 255, 255});

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  Color at(int x, int y) const;
  void set(int x, int y, Color c);
};

// Drawing primitives. All rectangle operations clip to the image bounds.
void fill_rect(Image& img, int x, int y, int w, int h, Color c);
void draw_border(Image& img, int x, int y, int w, int h, int thickness, Color c);

// 5x7 bitmap font, scaled by integer factor; glyph advance is 6*scale.
inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
inline constexpr int kGlyphAdvance = 6;

void draw_text(Image& img, int x, int y, const std::string& text, Color c, int scale = 1);
int text_width(const std::string& text, int scale = 1);

/// Truncates to the widest prefix fitting max_width, appending ".." if cut.
std::string fit_text(const std::string& text, int max_width, int scale = 1);

void blit(Image& dst, const Image& src, int dx, int dy);
Image crop(const Image& src, int x, int y, int w, int h);

/// Box-filter resample to the target size (area-weighted average).
Image scale_box(const Image& src, int new_width, int new_height);

// Lossless PNG (8-bit RGB). Decoding also accepts RGBA (alpha dropped) and
// grayscale sources; encoding always writes color type 2.
std::string encode_png(const Image& img);
Image decode_png(const std::string& bytes);
void save_png(const std::filesystem::path& path, const Image& img);
Image load_png(const std::filesystem::path& path);

}  // namespace uigym
