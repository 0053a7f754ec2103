#include "usergraph/text.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "stopwords_data.hpp"

namespace usergraph {
namespace {

bool is_token_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  if (u >= 0x80) return true;  // UTF-8 continuation or lead byte, handled upstream
  return std::isalnum(u) != 0;
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_boundary(std::string_view s, std::size_t pos) {
  if (pos == 0 || pos >= s.size()) return true;
  return !is_token_char(s[pos]);
}

// Codepoint ranges stripped as emoji/pictographs. Kept deliberately coarse:
//   U+1F000-1FFFF  emoji, symbols, flags, skin tones
//   U+2600-27BF    misc symbols and dingbats
//   U+2B00-2BFF    arrows and stars (white star, etc.)
//   U+FE00-FE0F    variation selectors
//   U+200D         zero-width joiner
//   U+20E3         combining enclosing keycap
bool is_emoji_codepoint(std::uint32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FFFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2B00 && cp <= 0x2BFF) || (cp >= 0xFE00 && cp <= 0xFE0F) ||
         cp == 0x200D || cp == 0x20E3;
}

// Emoticon literals removed before punctuation splitting (their letter parts
// would otherwise leak through as tokens). Matched case-insensitively on the
// already-lowercased text, longest first, at non-alphanumeric boundaries.
constexpr std::array<std::string_view, 26> kEmoticons = {
    ":-)", ":-(", ":-d", ":-p", ":-/", ":-|", ";-)", ":'(", "=)", "=(",
    ":)",  ":(",  ":d",  ":p",  ":/",  ":|",  ";)",  ":o", ":*", "xd",
    "x)",  "<3",  ":3",  "^^",  ":c",  "d:"};

// Strips http(s) URLs and bare t.co shortlinks: from the scheme (or "t.co/")
// to the next whitespace.
std::string strip_urls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool url = false;
    if (text.compare(i, 7, "http://") == 0 || text.compare(i, 8, "https://") == 0) {
      url = true;
    } else if (text.compare(i, 5, "t.co/") == 0 && is_boundary(text, i == 0 ? 0 : i - 1)) {
      url = true;
    }
    if (url) {
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back(' ');
      continue;
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

std::string strip_emoticons(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool matched = false;
    for (std::string_view emo : kEmoticons) {
      if (text.compare(i, emo.size(), emo) != 0) continue;
      // Letter-bearing emoticons (":d", "xd") must not eat word prefixes.
      std::size_t end = i + emo.size();
      bool left_ok = i == 0 || !is_token_char(text[i - 1]);
      bool right_ok = end >= text.size() || !is_token_char(text[end]);
      if (left_ok && right_ok) {
        i = end;
        out.push_back(' ');
        matched = true;
        break;
      }
    }
    if (!matched) {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

// Decodes one UTF-8 codepoint at i; advances i past it. Malformed bytes are
// consumed one at a time and reported as U+FFFD.
std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
  unsigned char b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) {
    return i + k < s.size() &&
           (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    std::uint32_t cp = (b0 & 0x1Fu) << 6 | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    std::uint32_t cp = (b0 & 0x0Fu) << 12 |
                       (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6 |
                       (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    std::uint32_t cp = (b0 & 0x07u) << 18 |
                       (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12 |
                       (static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6 |
                       (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
    i += 4;
    return cp;
  }
  ++i;
  return 0xFFFD;
}

std::string strip_emoji(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = i;
    std::uint32_t cp = decode_utf8(text, i);
    if (is_emoji_codepoint(cp) || cp == 0xFFFD) {
      out.push_back(' ');
    } else {
      out.append(text.substr(start, i - start));
    }
  }
  return out;
}

}  // namespace

const StopwordSet& default_stopwords() {
  static const StopwordSet set = [] {
    StopwordSet s;
    std::istringstream in(detail::kDefaultStopwordsText);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      s.insert(line);
    }
    return s;
  }();
  return set;
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword file: " + path);
  StopwordSet s;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    s.insert(line);
  }
  return s;
}

TokenSeq preprocess_text(std::string_view raw, const StopwordSet& stopwords) {
  if (raw.empty()) return {};

  std::string lowered(raw);
  for (char& c : lowered) c = ascii_lower(c);

  std::string cleaned = strip_emoji(strip_emoticons(strip_urls(lowered)));

  TokenSeq tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !stopwords.contains(current)) tokens.push_back(current);
    current.clear();
  };
  for (char c : cleaned) {
    if (is_token_char(c)) {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string join_tokens(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace usergraph
