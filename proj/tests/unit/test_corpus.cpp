#include <doctest.h>

#include "fixture.hpp"
#include "traitlens/corpus.hpp"
#include "traitlens/error.hpp"
#include "traitlens/text.hpp"

using namespace traitlens;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("headings split chapters and leave heading lines as gaps") {
  const std::string raw = "CHAPTER I. Morning\n\nFirst body.\n\nCHAPTER II\n\nSecond body.\n";
  const Document doc = ingest_text(raw);
  REQUIRE(doc.chapters().size() == 2);
  CHECK(doc.chapters()[0].title == "Morning");
  CHECK(doc.chapters()[1].title == "II");
  CHECK(slice(doc, doc.chapters()[0].span) == "\nFirst body.\n\n");
  CHECK(slice(doc, doc.chapters()[1].span) == "\nSecond body.\n");
  CHECK_FALSE(doc.chapter_of(3).has_value());
  CHECK(doc.chapter_of(doc.chapters()[1].span.start) == 1);
}

TEST_CASE("chapters are ordered, disjoint and inside the text") {
  const Document doc = ingest_text(read_file(fixture::path("story.txt")));
  REQUIRE(doc.chapters().size() == 3);
  for (std::size_t i = 0; i < doc.chapters().size(); ++i) {
    const auto& c = doc.chapters()[i];
    CHECK(c.index == i);
    CHECK(c.span.start < c.span.end);
    CHECK(c.span.end <= doc.length());
    if (i > 0) CHECK(doc.chapters()[i - 1].span.end <= c.span.start);
  }
  CHECK(doc.chapters()[2].title == "The Storm");
}

TEST_CASE("text without headings is one chapter") {
  const Document doc = ingest_text("Just a short story.\nNo headings at all.");
  REQUIRE(doc.chapters().size() == 1);
  CHECK(doc.chapters()[0].span == Span{0, doc.length()});
  CHECK_FALSE(doc.chapters()[0].title.has_value());
}

TEST_CASE("preamble before the first heading becomes a leading chapter") {
  const Document doc = ingest_text("Prologue text.\nCHAPTER 1\nBody.\n");
  REQUIRE(doc.chapters().size() == 2);
  CHECK_FALSE(doc.chapters()[0].title.has_value());
  CHECK(doc.chapters()[1].title == "1");
}

TEST_CASE("title_line takes the next non-blank line as title") {
  IngestConfig cfg;
  cfg.title_line = true;
  const Document doc = ingest_text("CHAPTER I\n\nThe Return\n\nBody text.\n", cfg);
  REQUIRE(doc.chapters().size() == 1);
  CHECK(doc.chapters()[0].title == "The Return");
  CHECK(slice(doc, doc.chapters()[0].span) == "\nBody text.\n");
}

TEST_CASE("custom heading pattern") {
  IngestConfig cfg;
  cfg.heading_pattern = R"(^## (\d+)\s*(.*)$)";
  const Document doc = ingest_text("## 1 Start\nA.\n## 2\nB.\n", cfg);
  REQUIRE(doc.chapters().size() == 2);
  CHECK(doc.chapters()[0].title == "Start");
  CHECK(doc.chapters()[1].title == "2");
}

TEST_CASE("errors") {
  CHECK(code_of([] { ingest_text(""); }) == ErrorCode::EmptyDocument);
  CHECK(code_of([] { ingest_text(" \n\t\n"); }) == ErrorCode::EmptyDocument);
  IngestConfig cfg;
  cfg.heading_pattern = "([unclosed";
  CHECK(code_of([&] { ingest_text("text", cfg); }) == ErrorCode::PatternInvalid);
}

TEST_CASE("newline normalization, BOM and unicode offsets") {
  const Document doc = ingest_text("\xEF\xBB\xBF" "caf\xC3\xA9\r\nna\xC3\xAFve\rend");
  CHECK(u32_to_utf8(doc.text()) == "caf\xC3\xA9\nna\xC3\xAFve\nend");
  CHECK(doc.length() == 14);
  CHECK(slice(doc, {0, 4}) == "caf\xC3\xA9");
  CHECK(slice(doc, {5, 10}) == "na\xC3\xAFve");
}

TEST_CASE("slice bounds") {
  const Document doc = ingest_text("abcdef");
  CHECK(slice(doc, {2, 2}).empty());
  CHECK(slice(doc, {0, 6}) == "abcdef");
  CHECK(code_of([&] { slice(doc, {0, 7}); }) == ErrorCode::SpanOutOfRange);
  CHECK(code_of([&] { slice(doc, {4, 3}); }) == ErrorCode::SpanOutOfRange);
}

TEST_CASE("gutenberg boilerplate is stripped and metadata read") {
  const std::string raw =
      "The Project Gutenberg eBook of Tides\n\nTitle: Tides\nAuthor: A. Writer\n\n"
      "*** START OF THE PROJECT GUTENBERG EBOOK TIDES ***\n"
      "CHAPTER I\nThe body.\n"
      "*** END OF THE PROJECT GUTENBERG EBOOK TIDES ***\nLicense text.\n";
  IngestConfig cfg;
  cfg.strip_boilerplate = true;
  const Document doc = ingest_text(raw, cfg);
  CHECK(doc.meta().title == "Tides");
  CHECK(doc.meta().author == "A. Writer");
  CHECK(doc.meta().provenance == "gutenberg");
  CHECK(u32_to_utf8(doc.text()) == "CHAPTER I\nThe body.\n");
  REQUIRE(doc.chapters().size() == 1);

  const Document kept = ingest_text(raw);
  CHECK(kept.meta().provenance == "plain");
  CHECK(u32_to_utf8(kept.text()) == raw);
}

TEST_CASE("invalid utf-8 decodes to replacement characters") {
  const Document doc = ingest_text("a\xFF" "b");
  CHECK(doc.length() == 3);
  CHECK(doc.text()[1] == 0xFFFD);
}

TEST_CASE("document id depends only on the text") {
  CHECK(ingest_text("same text").id() == ingest_text("same text").id());
  CHECK(ingest_text("same text").id() != ingest_text("other text").id());
}
