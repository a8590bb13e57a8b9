#pragma once

#include <charconv>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isosdp/graph.hpp"

namespace isosdp {

/// Parse failure carrying the byte offset (graph6) or line number (edge list)
/// at which the input went wrong.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr std::string_view kGraph6Header = ">>graph6<<";
inline constexpr std::size_t kGraph6MaxOrder = 258047;

namespace detail {

inline std::string_view trim_line_end(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

// graph6: N(n) followed by the upper triangle, column by column
// (x(0,1), x(0,2), x(1,2), x(0,3), ...), packed big-endian into 6-bit groups
// offset by 63. Padding bits in the final group must be zero so that every
// accepted line is the canonical encoding of its graph.
inline Graph parse_graph6(std::string_view line) {
  line = detail::trim_line_end(line);
  std::size_t pos = 0;
  if (line.starts_with(kGraph6Header)) pos = kGraph6Header.size();
  auto byte_at = [&](std::size_t at, const char* what) -> unsigned {
    if (at >= line.size()) throw ParseError(std::string("truncated ") + what, at);
    auto c = static_cast<unsigned char>(line[at]);
    if (c < 63 || c > 126) throw ParseError("character out of graph6 range", at);
    return c - 63u;
  };

  std::size_t n = 0;
  const std::size_t header_at = pos;
  unsigned first = byte_at(pos, "header");
  if (first < 63) {
    n = first;
    pos += 1;
  } else {
    if (pos + 1 < line.size() && static_cast<unsigned char>(line[pos + 1]) == 126)
      throw ParseError("order exceeds supported graph6 range", header_at);
    for (int k = 1; k <= 3; ++k) n = (n << 6) | byte_at(pos + k, "header");
    if (n < 63) throw ParseError("malformed header: long form used for small order", header_at);
    pos += 4;
  }
  if (n == 0) throw ParseError("malformed header: graph order must be at least 1", header_at);

  const std::size_t bits = n * (n - 1) / 2;
  const std::size_t nbytes = (bits + 5) / 6;
  if (line.size() < pos + nbytes) throw ParseError("truncated bit field", line.size());
  if (line.size() > pos + nbytes) throw ParseError("trailing data after bit field", pos + nbytes);

  std::vector<Edge> es;
  std::size_t k = 0;
  for (std::size_t b = 0; b < nbytes; ++b) {
    unsigned v = byte_at(pos + b, "bit field");
    for (int bit = 5; bit >= 0; --bit, ++k) {
      bool set = (v >> bit) & 1u;
      if (k >= bits) {
        if (set) throw ParseError("nonzero padding bits", pos + b);
        continue;
      }
      if (set) {
        // Column-major upper triangle: k = j(j-1)/2 + i.
        std::size_t j = 1;
        while ((j + 1) * j / 2 <= k) ++j;
        std::size_t i = k - j * (j - 1) / 2;
        es.emplace_back(i, j);
      }
    }
  }
  return Graph(n, es);
}

inline std::string emit_graph6(const Graph& g) {
  const std::size_t n = g.order();
  if (n > kGraph6MaxOrder) throw std::invalid_argument("graph too large for graph6");
  std::string out;
  if (n <= 62) {
    out.push_back(static_cast<char>(63 + n));
  } else {
    out.push_back(static_cast<char>(126));
    for (int shift = 12; shift >= 0; shift -= 6) out.push_back(static_cast<char>(63 + ((n >> shift) & 63)));
  }
  unsigned acc = 0;
  int filled = 0;
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      acc = (acc << 1) | (g.has_edge(i, j) ? 1u : 0u);
      if (++filled == 6) {
        out.push_back(static_cast<char>(63 + acc));
        acc = 0;
        filled = 0;
      }
    }
  }
  if (filled > 0) out.push_back(static_cast<char>(63 + (acc << (6 - filled))));
  return out;
}

/// Edge-list text: a line "n <count>" followed by one "u v" pair per line,
/// 0-based. Blank lines and lines starting with '#' are ignored. Offsets in
/// errors are 1-based line numbers.
inline Graph parse_edge_list(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
  }

  auto tokens = [](std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
      if (j > i) out.push_back(s.substr(i, j - i));
      i = j;
    }
    return out;
  };
  auto to_index = [](std::string_view tok, std::size_t line_no) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
      throw ParseError("non-integer token '" + std::string(tok) + "'", line_no);
    return v;
  };

  std::size_t n = 0;
  bool have_header = false;
  std::vector<Edge> es;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    auto toks = tokens(lines[li]);
    if (toks.empty() || toks.front().starts_with('#')) continue;
    if (!have_header) {
      if (toks.size() != 2 || toks[0] != "n") throw ParseError("expected header 'n <count>'", line_no);
      n = to_index(toks[1], line_no);
      if (n == 0) throw ParseError("graph order must be at least 1", line_no);
      have_header = true;
      continue;
    }
    if (toks.size() != 2) throw ParseError("expected 'u v'", line_no);
    std::size_t u = to_index(toks[0], line_no), v = to_index(toks[1], line_no);
    if (u >= n || v >= n) throw ParseError("vertex index out of range", line_no);
    if (u == v) throw ParseError("self-loop", line_no);
    es.emplace_back(u, v);
  }
  if (!have_header) throw ParseError("missing header 'n <count>'", lines.size());
  return Graph(n, es);
}

inline std::string emit_edge_list(const Graph& g) {
  std::string out = "n " + std::to_string(g.order()) + "\n";
  for (const auto& [u, v] : g.edges()) out += std::to_string(u) + " " + std::to_string(v) + "\n";
  return out;
}

/// Accepts either format: edge-list when the first meaningful line starts with
/// "n ", graph6 otherwise (first non-blank line only).
inline Graph parse_graph_text(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    auto nl = text.find('\n', i);
    auto line = text.substr(i, nl == std::string_view::npos ? std::string_view::npos : nl - i);
    auto trimmed = detail::trim_line_end(line);
    if (!trimmed.empty() && !trimmed.starts_with('#')) {
      if (trimmed.starts_with("n ") || trimmed.starts_with("n\t")) return parse_edge_list(text);
      return parse_graph6(trimmed);
    }
    if (nl == std::string_view::npos) break;
    i = nl + 1;
  }
  throw ParseError("no graph found", 0);
}

}  // namespace isosdp
