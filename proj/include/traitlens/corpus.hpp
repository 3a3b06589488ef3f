#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace traitlens {

// Half-open range of unicode scalar offsets into Document::text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool contains(const Span& other) const { return start <= other.start && other.end <= end; }
  bool contains(std::size_t offset) const { return start <= offset && offset < end; }
  bool overlaps(const Span& other) const { return start < other.end && other.start < end; }

  auto operator<=>(const Span&) const = default;
};

struct Chapter {
  std::size_t index = 0;
  std::optional<std::string> title;
  Span span;

  bool operator==(const Chapter&) const = default;
};

struct SourceMeta {
  std::string title;
  std::string author;
  std::string provenance;

  bool operator==(const SourceMeta&) const = default;
};

inline constexpr std::string_view kDefaultHeadingPattern =
    R"(^\s*(?:CHAPTER|Chapter)\s+([IVXLCDM]+|\d+)\b[.:]?\s*(.*)$)";

struct IngestConfig {
  // ECMAScript regex applied to each line. Capture group 1 is the chapter
  // number, optional group 2 an inline title.
  std::string heading_pattern{kDefaultHeadingPattern};
  bool strip_boilerplate = false;
  // Treat the first non-blank line after a heading as the chapter title.
  bool title_line = false;

  bool operator==(const IngestConfig&) const = default;
};

class Document {
 public:
  Document() = default;
  Document(std::string id, std::u32string text, std::vector<Chapter> chapters, SourceMeta meta);

  const std::string& id() const { return id_; }
  const std::u32string& text() const { return text_; }
  std::size_t length() const { return text_.size(); }
  const std::vector<Chapter>& chapters() const { return chapters_; }
  const SourceMeta& meta() const { return meta_; }

  // Chapter whose span holds `offset`; nullopt for heading gaps.
  std::optional<std::size_t> chapter_of(std::size_t offset) const;

  bool operator==(const Document&) const = default;

 private:
  std::string id_;
  std::u32string text_;
  std::vector<Chapter> chapters_;
  SourceMeta meta_;
};

Document ingest_text(std::string_view raw_utf8, const IngestConfig& config = {});

// UTF-8 text of `span`; throws SpanOutOfRange when it leaves the document.
std::string slice(const Document& doc, const Span& span);
std::u32string_view slice_u32(const Document& doc, const Span& span);

}  // namespace traitlens
