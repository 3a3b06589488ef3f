#include "traitlens/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>

#include "traitlens/error.hpp"
#include "traitlens/text.hpp"

namespace traitlens {

namespace {

struct Line {
  std::size_t start;  // offset of first character
  std::size_t end;    // offset one past the last character, excluding '\n'
  std::size_t next;   // offset of the following line
};

std::u32string normalize_newlines(std::u32string_view in) {
  std::u32string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == U'\r') {
      out.push_back(U'\n');
      if (i + 1 < in.size() && in[i + 1] == U'\n') ++i;
    } else {
      out.push_back(in[i]);
    }
  }
  return out;
}

std::vector<Line> split_lines(std::u32string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find(U'\n', pos);
    if (nl == std::u32string_view::npos) {
      lines.push_back({pos, text.size(), text.size()});
      break;
    }
    lines.push_back({pos, nl, nl + 1});
    pos = nl + 1;
  }
  return lines;
}

const std::regex& gutenberg_start() {
  static const std::regex re(R"(^\s*\*\*\*\s*START OF (THE|THIS) PROJECT GUTENBERG)",
                             std::regex::icase);
  return re;
}

const std::regex& gutenberg_end() {
  static const std::regex re(R"(^\s*\*\*\*\s*END OF (THE|THIS) PROJECT GUTENBERG)",
                             std::regex::icase);
  return re;
}

std::string header_field(std::u32string_view header, std::string_view key) {
  const std::string text = u32_to_utf8(header);
  const std::regex re("^" + std::string(key) + R"(:\s*(.+)$)", std::regex::multiline);
  std::smatch m;
  if (std::regex_search(text, m, re)) return std::string(trim(std::string_view(m[1].str())));
  return {};
}

std::string hex_id(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Heading {
  std::size_t gap_start;  // first offset of the heading block
  std::size_t body_start; // first offset after the heading block
  std::optional<std::string> title;
};

}  // namespace

Document::Document(std::string id, std::u32string text, std::vector<Chapter> chapters,
                   SourceMeta meta)
    : id_(std::move(id)), text_(std::move(text)), chapters_(std::move(chapters)),
      meta_(std::move(meta)) {}

std::optional<std::size_t> Document::chapter_of(std::size_t offset) const {
  auto it = std::upper_bound(chapters_.begin(), chapters_.end(), offset,
                             [](std::size_t off, const Chapter& c) { return off < c.span.start; });
  if (it == chapters_.begin()) return std::nullopt;
  --it;
  if (it->span.contains(offset)) return it->index;
  return std::nullopt;
}

Document ingest_text(std::string_view raw_utf8, const IngestConfig& config) {
  if (trim(raw_utf8).empty()) throw Error(ErrorCode::EmptyDocument, "document is empty");

  std::regex heading;
  try {
    heading = std::regex(config.heading_pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::PatternInvalid,
                "heading pattern does not compile: " + std::string(e.what()),
                config.heading_pattern);
  }

  std::u32string decoded = utf8_to_u32(raw_utf8);
  if (!decoded.empty() && decoded.front() == 0xFEFF) decoded.erase(0, 1);
  std::u32string text = normalize_newlines(decoded);

  SourceMeta meta;
  meta.provenance = "plain";
  if (config.strip_boilerplate) {
    auto lines = split_lines(text);
    std::optional<std::size_t> start_line;
    std::optional<std::size_t> end_line;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string line =
          u32_to_utf8(std::u32string_view(text).substr(lines[i].start, lines[i].end - lines[i].start));
      if (!start_line && std::regex_search(line, gutenberg_start())) {
        start_line = i;
      } else if (start_line && std::regex_search(line, gutenberg_end())) {
        end_line = i;
        break;
      }
    }
    if (start_line) {
      const std::u32string_view all(text);
      meta.title = header_field(all.substr(0, lines[*start_line].start), "Title");
      meta.author = header_field(all.substr(0, lines[*start_line].start), "Author");
      meta.provenance = "gutenberg";
      const std::size_t body_start = lines[*start_line].next;
      const std::size_t body_end = end_line ? lines[*end_line].start : text.size();
      text = text.substr(body_start, body_end - body_start);
    }
  }
  if (trim(std::u32string_view(text)).empty())
    throw Error(ErrorCode::EmptyDocument, "document body is empty after boilerplate stripping");

  const auto lines = split_lines(text);
  std::vector<Heading> headings;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line =
        u32_to_utf8(std::u32string_view(text).substr(lines[i].start, lines[i].end - lines[i].start));
    std::smatch m;
    if (!std::regex_search(line, m, heading)) continue;
    Heading h{lines[i].start, lines[i].next, std::nullopt};
    std::string inline_title = m.size() > 2 ? std::string(trim(std::string_view(m[2].str()))) : "";
    std::string number = m.size() > 1 ? std::string(trim(std::string_view(m[1].str()))) : "";
    if (!inline_title.empty()) {
      h.title = inline_title;
    } else if (!number.empty()) {
      h.title = number;
    } else {
      h.title = std::string(trim(std::string_view(line)));
    }
    if (config.title_line) {
      std::size_t j = i + 1;
      while (j < lines.size() && trim(std::u32string_view(text).substr(
                                     lines[j].start, lines[j].end - lines[j].start)).empty())
        ++j;
      if (j < lines.size()) {
        h.title = std::string(trim(std::string_view(u32_to_utf8(
            std::u32string_view(text).substr(lines[j].start, lines[j].end - lines[j].start)))));
        h.body_start = lines[j].next;
        i = j;
      }
    }
    headings.push_back(std::move(h));
  }

  std::vector<Chapter> chapters;
  if (!headings.empty()) {
    const std::size_t first = headings.front().gap_start;
    if (!trim(std::u32string_view(text).substr(0, first)).empty())
      chapters.push_back({0, std::nullopt, {0, first}});
    for (std::size_t k = 0; k < headings.size(); ++k) {
      const std::size_t end = k + 1 < headings.size() ? headings[k + 1].gap_start : text.size();
      const std::size_t start = headings[k].body_start;
      if (start >= end || trim(std::u32string_view(text).substr(start, end - start)).empty())
        continue;
      chapters.push_back({chapters.size(), headings[k].title, {start, end}});
    }
  }
  if (chapters.empty()) chapters.push_back({0, std::nullopt, {0, text.size()}});

  const std::string id = hex_id(fnv1a64(u32_to_utf8(text)));
  return Document(id, std::move(text), std::move(chapters), std::move(meta));
}

std::u32string_view slice_u32(const Document& doc, const Span& span) {
  if (span.start > span.end || span.end > doc.length()) {
    throw Error(ErrorCode::SpanOutOfRange,
                "span [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
                    ") outside document of length " + std::to_string(doc.length()));
  }
  return std::u32string_view(doc.text()).substr(span.start, span.length());
}

std::string slice(const Document& doc, const Span& span) { return u32_to_utf8(slice_u32(doc, span)); }

}  // namespace traitlens
