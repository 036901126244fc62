#include "uigym/image.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "uigym/errors.hpp"

namespace uigym {
namespace {

// 5x7 glyphs for ASCII 32..126, 7 rows of 5 columns each, 'X' = set.
const char* const kFont5x7[95] = {
    /* ' ' */ "....." "....." "....." "....." "....." "....." ".....",
    /* '!' */ "..X.." "..X.." "..X.." "..X.." "..X.." "....." "..X..",
    /* '"' */ ".X.X." ".X.X." ".X.X." "....." "....." "....." ".....",
    /* '#' */ ".X.X." ".X.X." "XXXXX" ".X.X." "XXXXX" ".X.X." ".X.X.",
    /* '$' */ "..X.." ".XXXX" "X.X.." ".XXX." "..X.X" "XXXX." "..X..",
    /* '%' */ "XX..X" "XX..X" "...X." "..X.." ".X..." "X..XX" "X..XX",
    /* '&' */ ".XX.." "X..X." "X.X.." ".X..." "X.X.X" "X..X." ".XX.X",
    /* ''' */ "..X.." "..X.." ".X..." "....." "....." "....." ".....",
    /* '(' */ "...X." "..X.." ".X..." ".X..." ".X..." "..X.." "...X.",
    /* ')' */ ".X..." "..X.." "...X." "...X." "...X." "..X.." ".X...",
    /* '*' */ "....." "..X.." "X.X.X" ".XXX." "X.X.X" "..X.." ".....",
    /* '+' */ "....." "..X.." "..X.." "XXXXX" "..X.." "..X.." ".....",
    /* ',' */ "....." "....." "....." "....." "..XX." "..X.." ".X...",
    /* '-' */ "....." "....." "....." "XXXXX" "....." "....." ".....",
    /* '.' */ "....." "....." "....." "....." "....." ".XX.." ".XX..",
    /* '/' */ "....X" "...X." "...X." "..X.." ".X..." ".X..." "X....",
    /* '0' */ ".XXX." "X...X" "X..XX" "X.X.X" "XX..X" "X...X" ".XXX.",
    /* '1' */ "..X.." ".XX.." "..X.." "..X.." "..X.." "..X.." ".XXX.",
    /* '2' */ ".XXX." "X...X" "....X" "...X." "..X.." ".X..." "XXXXX",
    /* '3' */ "XXXXX" "...X." "..X.." "...X." "....X" "X...X" ".XXX.",
    /* '4' */ "...X." "..XX." ".X.X." "X..X." "XXXXX" "...X." "...X.",
    /* '5' */ "XXXXX" "X...." "XXXX." "....X" "....X" "X...X" ".XXX.",
    /* '6' */ "..XX." ".X..." "X...." "XXXX." "X...X" "X...X" ".XXX.",
    /* '7' */ "XXXXX" "....X" "...X." "..X.." ".X..." ".X..." ".X...",
    /* '8' */ ".XXX." "X...X" "X...X" ".XXX." "X...X" "X...X" ".XXX.",
    /* '9' */ ".XXX." "X...X" "X...X" ".XXXX" "....X" "...X." ".XX..",
    /* ':' */ "....." ".XX.." ".XX.." "....." ".XX.." ".XX.." ".....",
    /* ';' */ "....." ".XX.." ".XX.." "....." ".XX.." "..X.." ".X...",
    /* '<' */ "...X." "..X.." ".X..." "X...." ".X..." "..X.." "...X.",
    /* '=' */ "....." "....." "XXXXX" "....." "XXXXX" "....." ".....",
    /* '>' */ ".X..." "..X.." "...X." "....X" "...X." "..X.." ".X...",
    /* '?' */ ".XXX." "X...X" "....X" "...X." "..X.." "....." "..X..",
    /* '@' */ ".XXX." "X...X" "....X" ".XX.X" "X.X.X" "X.X.X" ".XXX.",
    /* 'A' */ ".XXX." "X...X" "X...X" "XXXXX" "X...X" "X...X" "X...X",
    /* 'B' */ "XXXX." "X...X" "X...X" "XXXX." "X...X" "X...X" "XXXX.",
    /* 'C' */ ".XXX." "X...X" "X...." "X...." "X...." "X...X" ".XXX.",
    /* 'D' */ "XXX.." "X..X." "X...X" "X...X" "X...X" "X..X." "XXX..",
    /* 'E' */ "XXXXX" "X...." "X...." "XXXX." "X...." "X...." "XXXXX",
    /* 'F' */ "XXXXX" "X...." "X...." "XXXX." "X...." "X...." "X....",
    /* 'G' */ ".XXX." "X...X" "X...." "X.XXX" "X...X" "X...X" ".XXXX",
    /* 'H' */ "X...X" "X...X" "X...X" "XXXXX" "X...X" "X...X" "X...X",
    /* 'I' */ ".XXX." "..X.." "..X.." "..X.." "..X.." "..X.." ".XXX.",
    /* 'J' */ "..XXX" "...X." "...X." "...X." "...X." "X..X." ".XX..",
    /* 'K' */ "X...X" "X..X." "X.X.." "XX..." "X.X.." "X..X." "X...X",
    /* 'L' */ "X...." "X...." "X...." "X...." "X...." "X...." "XXXXX",
    /* 'M' */ "X...X" "XX.XX" "X.X.X" "X.X.X" "X...X" "X...X" "X...X",
    /* 'N' */ "X...X" "X...X" "XX..X" "X.X.X" "X..XX" "X...X" "X...X",
    /* 'O' */ ".XXX." "X...X" "X...X" "X...X" "X...X" "X...X" ".XXX.",
    /* 'P' */ "XXXX." "X...X" "X...X" "XXXX." "X...." "X...." "X....",
    /* 'Q' */ ".XXX." "X...X" "X...X" "X...X" "X.X.X" "X..X." ".XX.X",
    /* 'R' */ "XXXX." "X...X" "X...X" "XXXX." "X.X.." "X..X." "X...X",
    /* 'S' */ ".XXXX" "X...." "X...." ".XXX." "....X" "....X" "XXXX.",
    /* 'T' */ "XXXXX" "..X.." "..X.." "..X.." "..X.." "..X.." "..X..",
    /* 'U' */ "X...X" "X...X" "X...X" "X...X" "X...X" "X...X" ".XXX.",
    /* 'V' */ "X...X" "X...X" "X...X" "X...X" "X...X" ".X.X." "..X..",
    /* 'W' */ "X...X" "X...X" "X...X" "X.X.X" "X.X.X" "XX.XX" "X...X",
    /* 'X' */ "X...X" "X...X" ".X.X." "..X.." ".X.X." "X...X" "X...X",
    /* 'Y' */ "X...X" "X...X" ".X.X." "..X.." "..X.." "..X.." "..X..",
    /* 'Z' */ "XXXXX" "....X" "...X." "..X.." ".X..." "X...." "XXXXX",
    /* '[' */ ".XXX." ".X..." ".X..." ".X..." ".X..." ".X..." ".XXX.",
    /* '\' */ "X...." ".X..." ".X..." "..X.." "...X." "...X." "....X",
    /* ']' */ ".XXX." "...X." "...X." "...X." "...X." "...X." ".XXX.",
    /* '^' */ "..X.." ".X.X." "X...X" "....." "....." "....." ".....",
    /* '_' */ "....." "....." "....." "....." "....." "....." "XXXXX",
    /* '`' */ ".X..." "..X.." "...X." "....." "....." "....." ".....",
    /* 'a' */ "....." "....." ".XXX." "....X" ".XXXX" "X...X" ".XXXX",
    /* 'b' */ "X...." "X...." "X.XX." "XX..X" "X...X" "X...X" "XXXX.",
    /* 'c' */ "....." "....." ".XXX." "X...." "X...." "X...X" ".XXX.",
    /* 'd' */ "....X" "....X" ".XX.X" "X..XX" "X...X" "X...X" ".XXXX",
    /* 'e' */ "....." "....." ".XXX." "X...X" "XXXXX" "X...." ".XXX.",
    /* 'f' */ "..XX." ".X..X" ".X..." "XXX.." ".X..." ".X..." ".X...",
    /* 'g' */ "....." "....." ".XXXX" "X...X" ".XXXX" "....X" ".XXX.",
    /* 'h' */ "X...." "X...." "X.XX." "XX..X" "X...X" "X...X" "X...X",
    /* 'i' */ "..X.." "....." ".XX.." "..X.." "..X.." "..X.." ".XXX.",
    /* 'j' */ "...X." "....." "..XX." "...X." "...X." "X..X." ".XX..",
    /* 'k' */ "X...." "X...." "X..X." "X.X.." "XX..." "X.X.." "X..X.",
    /* 'l' */ ".XX.." "..X.." "..X.." "..X.." "..X.." "..X.." ".XXX.",
    /* 'm' */ "....." "....." "XX.X." "X.X.X" "X.X.X" "X.X.X" "X.X.X",
    /* 'n' */ "....." "....." "X.XX." "XX..X" "X...X" "X...X" "X...X",
    /* 'o' */ "....." "....." ".XXX." "X...X" "X...X" "X...X" ".XXX.",
    /* 'p' */ "....." "....." "XXXX." "X...X" "XXXX." "X...." "X....",
    /* 'q' */ "....." "....." ".XXXX" "X...X" ".XXXX" "....X" "....X",
    /* 'r' */ "....." "....." "X.XX." "XX..X" "X...." "X...." "X....",
    /* 's' */ "....." "....." ".XXXX" "X...." ".XXX." "....X" "XXXX.",
    /* 't' */ ".X..." ".X..." "XXX.." ".X..." ".X..." ".X..X" "..XX.",
    /* 'u' */ "....." "....." "X...X" "X...X" "X...X" "X..XX" ".XX.X",
    /* 'v' */ "....." "....." "X...X" "X...X" "X...X" ".X.X." "..X..",
    /* 'w' */ "....." "....." "X...X" "X...X" "X.X.X" "X.X.X" ".X.X.",
    /* 'x' */ "....." "....." "X...X" ".X.X." "..X.." ".X.X." "X...X",
    /* 'y' */ "....." "....." "X...X" "X...X" ".XXXX" "....X" ".XXX.",
    /* 'z' */ "....." "....." "XXXXX" "...X." "..X.." ".X..." "XXXXX",
    /* '{' */ "...X." "..X.." "..X.." ".X..." "..X.." "..X.." "...X.",
    /* '|' */ "..X.." "..X.." "..X.." "..X.." "..X.." "..X.." "..X..",
    /* '}' */ ".X..." "..X.." "..X.." "...X." "..X.." "..X.." ".X...",
    /* '~' */ "....." ".X..X" "X.X.X" "X..X." "....." "....." ".....",
};

const char* glyph_rows(char c) {
  const unsigned char u = static_cast<unsigned char>(c);
  if (u < 32 || u > 126) return nullptr;
  return kFont5x7[u - 32];
}

void append_u32_be(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

std::uint32_t read_u32_be(const std::string& data, std::size_t pos) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + 1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + 2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + 3]));
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
  append_u32_be(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t crc_start = out.size();
  out.append(type, 4);
  out += payload;
  const uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data() + crc_start),
                          static_cast<uInt>(out.size() - crc_start));
  append_u32_be(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

Image::Image(int w, int h, Color fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw ValidationError("image dimensions must be positive");
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

Color Image::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void Image::set(int x, int y, Color c) {
  if (!contains(x, y)) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = c.r;
  pixels[i + 1] = c.g;
  pixels[i + 2] = c.b;
}

void fill_rect(Image& img, int x, int y, int w, int h, Color c) {
  const int x0 = std::max(0, x), y0 = std::max(0, y);
  const int x1 = std::min(img.width, x + w), y1 = std::min(img.height, y + h);
  for (int py = y0; py < y1; ++py)
    for (int px = x0; px < x1; ++px) img.set(px, py, c);
}

void draw_border(Image& img, int x, int y, int w, int h, int thickness, Color c) {
  fill_rect(img, x, y, w, thickness, c);
  fill_rect(img, x, y + h - thickness, w, thickness, c);
  fill_rect(img, x, y, thickness, h, c);
  fill_rect(img, x + w - thickness, y, thickness, h, c);
}

void draw_text(Image& img, int x, int y, const std::string& text, Color c, int scale) {
  int cx = x;
  for (char ch : text) {
    if (ch == '\n') continue;
    const char* rows = glyph_rows(ch);
    for (int gy = 0; gy < kGlyphHeight; ++gy) {
      for (int gx = 0; gx < kGlyphWidth; ++gx) {
        const bool on = rows ? rows[gy * kGlyphWidth + gx] == 'X'
                             // unknown glyph: hollow box
                             : (gx == 0 || gx == kGlyphWidth - 1 || gy == 0 ||
                                gy == kGlyphHeight - 1);
        if (on) fill_rect(img, cx + gx * scale, y + gy * scale, scale, scale, c);
      }
    }
    cx += kGlyphAdvance * scale;
  }
}

int text_width(const std::string& text, int scale) {
  if (text.empty()) return 0;
  return static_cast<int>(text.size()) * kGlyphAdvance * scale - scale;
}

std::string fit_text(const std::string& text, int max_width, int scale) {
  if (text_width(text, scale) <= max_width) return text;
  std::string fitted = text;
  while (!fitted.empty() && text_width(fitted + "..", scale) > max_width)
    fitted.pop_back();
  if (fitted.empty() && text_width("..", scale) > max_width) return "";
  return fitted + "..";
}

void blit(Image& dst, const Image& src, int dx, int dy) {
  const int x0 = std::max(0, -dx), y0 = std::max(0, -dy);
  const int x1 = std::min(src.width, dst.width - dx);
  const int y1 = std::min(src.height, dst.height - dy);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) dst.set(dx + x, dy + y, src.at(x, y));
}

Image crop(const Image& src, int x, int y, int w, int h) {
  if (w <= 0 || h <= 0) throw ValidationError("crop dimensions must be positive");
  Image out(w, h, {0, 0, 0});
  const int x0 = std::max(0, x), y0 = std::max(0, y);
  const int x1 = std::min(src.width, x + w), y1 = std::min(src.height, y + h);
  for (int py = y0; py < y1; ++py)
    for (int px = x0; px < x1; ++px) out.set(px - x, py - y, src.at(px, py));
  return out;
}

Image scale_box(const Image& src, int new_width, int new_height) {
  if (new_width <= 0 || new_height <= 0)
    throw ValidationError("scale target must be positive");
  Image out(new_width, new_height, {0, 0, 0});
  const double sx = static_cast<double>(src.width) / new_width;
  const double sy = static_cast<double>(src.height) / new_height;
  for (int y = 0; y < new_height; ++y) {
    const double src_y0 = y * sy, src_y1 = (y + 1) * sy;
    for (int x = 0; x < new_width; ++x) {
      const double src_x0 = x * sx, src_x1 = (x + 1) * sx;
      double r = 0, g = 0, b = 0, area = 0;
      const int iy0 = static_cast<int>(std::floor(src_y0));
      const int iy1 = std::min(src.height, static_cast<int>(std::ceil(src_y1)));
      const int ix0 = static_cast<int>(std::floor(src_x0));
      const int ix1 = std::min(src.width, static_cast<int>(std::ceil(src_x1)));
      for (int py = iy0; py < iy1; ++py) {
        const double hy = std::min<double>(py + 1, src_y1) - std::max<double>(py, src_y0);
        for (int px = ix0; px < ix1; ++px) {
          const double wx =
              std::min<double>(px + 1, src_x1) - std::max<double>(px, src_x0);
          const double cover = wx * hy;
          const Color c = src.at(px, py);
          r += c.r * cover;
          g += c.g * cover;
          b += c.b * cover;
          area += cover;
        }
      }
      if (area > 0.0) {
        out.set(x, y,
                {static_cast<std::uint8_t>(std::lround(r / area)),
                 static_cast<std::uint8_t>(std::lround(g / area)),
                 static_cast<std::uint8_t>(std::lround(b / area))});
      }
    }
  }
  return out;
}

std::string encode_png(const Image& img) {
  if (img.width <= 0 || img.height <= 0)
    throw ValidationError("cannot encode an empty image");
  std::string out("\x89PNG\r\n\x1a\n", 8);

  std::string ihdr;
  append_u32_be(ihdr, static_cast<std::uint32_t>(img.width));
  append_u32_be(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // interlace
  append_chunk(out, "IHDR", ihdr);

  const std::size_t stride = static_cast<std::size_t>(img.width) * 3;
  std::string raw;
  raw.reserve((stride + 1) * img.height);
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);  // filter type: none
    raw.append(reinterpret_cast<const char*>(img.pixels.data() + y * stride), stride);
  }

  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(compressed_size, '\0');
  const int rc = compress2(reinterpret_cast<Bytef*>(compressed.data()), &compressed_size,
                           reinterpret_cast<const Bytef*>(raw.data()),
                           static_cast<uLong>(raw.size()), 6);
  if (rc != Z_OK) throw Error("zlib compression failed: " + std::to_string(rc));
  compressed.resize(compressed_size);
  append_chunk(out, "IDAT", compressed);
  append_chunk(out, "IEND", "");
  return out;
}

Image decode_png(const std::string& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) != 0)
    throw ValidationError("not a PNG file");
  std::size_t pos = 8;
  int width = 0, height = 0, bit_depth = 0, color_type = 0;
  std::string idat;
  bool seen_ihdr = false, seen_iend = false;
  while (pos + 8 <= bytes.size() && !seen_iend) {
    const std::uint32_t length = read_u32_be(bytes, pos);
    const std::string type = bytes.substr(pos + 4, 4);
    if (pos + 12 + length > bytes.size())
      throw ValidationError("truncated PNG chunk: " + type);
    const std::string payload = bytes.substr(pos + 8, length);
    pos += 12 + length;
    if (type == "IHDR") {
      if (payload.size() != 13) throw ValidationError("bad IHDR length");
      width = static_cast<int>(read_u32_be(payload, 0));
      height = static_cast<int>(read_u32_be(payload, 4));
      bit_depth = static_cast<unsigned char>(payload[8]);
      color_type = static_cast<unsigned char>(payload[9]);
      if (payload[12] != 0) throw ValidationError("interlaced PNG unsupported");
      if (bit_depth != 8) throw ValidationError("only 8-bit PNGs supported");
      if (color_type != 0 && color_type != 2 && color_type != 6)
        throw ValidationError("unsupported PNG color type " + std::to_string(color_type));
      seen_ihdr = true;
    } else if (type == "IDAT") {
      idat += payload;
    } else if (type == "IEND") {
      seen_iend = true;
    }
    // ancillary chunks ignored
  }
  if (!seen_ihdr || width <= 0 || height <= 0)
    throw ValidationError("PNG missing a valid IHDR");
  if (idat.empty()) throw ValidationError("PNG has no image data");

  const int channels = color_type == 2 ? 3 : color_type == 6 ? 4 : 1;
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  std::vector<unsigned char> raw((stride + 1) * height);
  uLongf raw_size = static_cast<uLongf>(raw.size());
  const int rc = uncompress(raw.data(), &raw_size,
                            reinterpret_cast<const Bytef*>(idat.data()),
                            static_cast<uLong>(idat.size()));
  if (rc != Z_OK || raw_size != raw.size())
    throw ValidationError("PNG inflate failed: " + std::to_string(rc));

  // undo per-scanline filters in place
  std::vector<unsigned char> prior(stride, 0);
  Image out(width, height, {0, 0, 0});
  std::vector<unsigned char> line(stride);
  for (int y = 0; y < height; ++y) {
    const unsigned char filter = raw[y * (stride + 1)];
    const unsigned char* src = raw.data() + y * (stride + 1) + 1;
    for (std::size_t i = 0; i < stride; ++i) {
      const int a = i >= static_cast<std::size_t>(channels) ? line[i - channels] : 0;
      const int b = prior[i];
      const int c = i >= static_cast<std::size_t>(channels) ? prior[i - channels] : 0;
      int value = src[i];
      switch (filter) {
        case 0: break;
        case 1: value += a; break;
        case 2: value += b; break;
        case 3: value += (a + b) / 2; break;
        case 4: value += paeth(a, b, c); break;
        default: throw ValidationError("unknown PNG filter " + std::to_string(filter));
      }
      line[i] = static_cast<unsigned char>(value & 0xff);
    }
    for (int x = 0; x < width; ++x) {
      if (channels == 1) {
        const unsigned char v = line[x];
        out.set(x, y, {v, v, v});
      } else {
        out.set(x, y, {line[x * channels], line[x * channels + 1], line[x * channels + 2]});
      }
    }
    prior = line;
  }
  return out;
}

void save_png(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  const std::string bytes = encode_png(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write: " + path.string());
}

Image load_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return decode_png(buffer.str());
}

}  // namespace uigym
