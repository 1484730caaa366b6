#pragma once

// UTF-8 decoding and code-point indexed slicing. All char offsets in seqlab
// count Unicode scalar values.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seqlab/error.hpp"

namespace seqlab::utf8 {

inline std::u32string decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const auto n = bytes.size();
  auto fail = [&](const char* what) {
    throw Error(ErrorCode::InvalidUtf8,
                std::string(what) + " at byte " + std::to_string(i));
  };
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      fail("invalid lead byte");
    }
    if (i + len > n) fail("truncated sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(bytes[i + k]);
      if ((b & 0xC0) != 0x80) fail("invalid continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    // overlong forms, surrogates, out of range
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      fail("invalid code point");
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append(out, cp);
  return out;
}

/// Code points with the Unicode White_Space property.
constexpr bool is_space(char32_t cp) noexcept {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 ||
         cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

/// UTF-8 text with a code point index, so slices by char offset are O(1).
class IndexedText {
 public:
  explicit IndexedText(std::string_view bytes) : bytes_(bytes) {
    const auto cps = decode(bytes);
    byte_offsets_.reserve(cps.size() + 1);
    std::size_t pos = 0;
    std::string scratch;
    for (char32_t cp : cps) {
      byte_offsets_.push_back(pos);
      scratch.clear();
      append(scratch, cp);
      pos += scratch.size();
    }
    byte_offsets_.push_back(pos);
    code_points_ = cps;
  }

  std::size_t size() const noexcept { return code_points_.size(); }
  const std::u32string& code_points() const noexcept { return code_points_; }
  const std::string& bytes() const noexcept { return bytes_; }

  /// Bytes of code points [start, end).
  std::string slice(std::size_t start, std::size_t end) const {
    const auto b = byte_offsets_.at(start);
    const auto e = byte_offsets_.at(end);
    return bytes_.substr(b, e - b);
  }

 private:
  std::string bytes_;
  std::u32string code_points_;
  std::vector<std::size_t> byte_offsets_;
};

inline std::size_t length(std::string_view bytes) { return decode(bytes).size(); }

}  // namespace seqlab::utf8
