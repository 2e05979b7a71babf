// Copyright 2026 The MaskEval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maskeval/segmentation.h"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "maskeval/error.h"
#include "testing/synthetic.h"

namespace maskeval {
namespace {

std::vector<std::string> WordTexts(const SegmentedText& seg) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    out.emplace_back(seg.word_text(i));
  }
  return out;
}

Segmentation Spans(const std::string& text, std::vector<Span> spans) {
  return Segmentation{text, std::move(spans)};
}

// Spans for `tokens` laid out left to right in `text`.
Segmentation Locate(const std::string& text,
                    const std::vector<std::string>& tokens) {
  Segmentation seg{text, {}};
  std::size_t pos = 0;
  for (const std::string& token : tokens) {
    pos = text.find(token, pos);
    EXPECT_NE(pos, std::string::npos) << token;
    seg.spans.push_back({pos, pos + token.size()});
    pos += token.size();
  }
  return seg;
}

TEST(BoundarySetTest, SingleInternalBoundary) {
  EXPECT_EQ(BoundarySet(Spans("Mr. Smith", {{0, 3}, {4, 9}})),
            (std::set<std::size_t>{3}));
}

TEST(BoundarySetTest, OneTokenHasNoBoundary) {
  EXPECT_TRUE(BoundarySet(Spans("Mr. Smith", {{0, 9}})).empty());
}

TEST(BoundarySetTest, AdjacentAndWhitespaceSeparatedBoundaries) {
  EXPECT_EQ(BoundarySet(Spans("Mr. Smith", {{0, 2}, {2, 3}, {4, 9}})),
            (std::set<std::size_t>{2, 3}));
}

TEST(BoundarySetTest, TrailingWhitespaceInTokenIsIgnored) {
  EXPECT_EQ(BoundarySet(Spans("Mr. Smith", {{0, 4}, {4, 9}})),
            (std::set<std::size_t>{3}));
}

TEST(ReconcileTest, NevermanExample) {
  const std::string text = "Mr. Neverman's";
  const Segmentation ling = Locate(text, {"Mr.", "Neverman", "'s"});
  const Segmentation sub = Locate(text, {"Mr", ".", "Never", "man", "'", "s"});
  const SegmentedText out = Reconcile(text, ling, sub);
  EXPECT_EQ(WordTexts(out),
            (std::vector<std::string>{"Mr.", "Neverman", "'s"}));
  EXPECT_EQ(out.words[1].subtoken_ids, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(out.words[1].ling_ids, (std::vector<std::size_t>{1}));
  EXPECT_EQ(out.words[2].subtoken_ids, (std::vector<std::size_t>{4, 5}));
}

TEST(ReconcileTest, IdenticalSegmentationsGiveSameWords) {
  const std::string text = "the cat sat";
  const Segmentation seg = Locate(text, {"the", "cat", "sat"});
  const SegmentedText out = Reconcile(text, seg, seg);
  EXPECT_EQ(out.as_segmentation().spans, seg.spans);
}

TEST(ReconcileTest, DisjointBoundariesMergeEverything) {
  const std::string text = "a b c";
  const SegmentedText out = Reconcile(text, Spans(text, {{0, 1}, {2, 5}}),
                                      Spans(text, {{0, 3}, {4, 5}}));
  EXPECT_EQ(WordTexts(out), (std::vector<std::string>{"a b c"}));
  EXPECT_EQ(out.words[0].subtoken_ids, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(out.words[0].ling_ids, (std::vector<std::size_t>{0, 1}));
}

TEST(ReconcileTest, LeadingWhitespaceSubwordsAlign) {
  // GPT-2 style pieces carry the preceding space.
  const std::string text = "Mr. Smith";
  const SegmentedText out = Reconcile(text, Spans(text, {{0, 3}, {4, 9}}),
                                      Spans(text, {{0, 2}, {2, 3}, {3, 9}}));
  EXPECT_EQ(WordTexts(out), (std::vector<std::string>{"Mr.", "Smith"}));
  EXPECT_EQ(out.words[1].span, (Span{4, 9}));
}

TEST(ReconcileTest, SingleTokenInEitherInputGivesOneWord) {
  const std::string text = "one two three";
  const SegmentedText out = Reconcile(text, Spans(text, {{0, 13}}),
                                      Locate(text, {"one", "two", "three"}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.words[0].span, (Span{0, 13}));
}

TEST(ReconcileTest, EmptyTextHasNoWords) {
  const SegmentedText out = Reconcile("", Spans("", {}), Spans("", {}));
  EXPECT_EQ(out.size(), 0u);
  const SegmentedText blank = Reconcile("  ", Spans("  ", {}), Spans("  ", {}));
  EXPECT_EQ(blank.size(), 0u);
}

TEST(ReconcileTest, OverlappingSpansAreInvalid) {
  const std::string text = "abcd";
  try {
    Reconcile(text, Spans(text, {{0, 3}, {2, 4}}), Spans(text, {{0, 4}}));
    FAIL() << "expected InvalidSegmentation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidSegmentation);
  }
}

TEST(ReconcileTest, UnsortedSpansAreInvalid) {
  const std::string text = "ab cd";
  try {
    Reconcile(text, Spans(text, {{3, 5}, {0, 2}}), Spans(text, {{0, 5}}));
    FAIL() << "expected InvalidSegmentation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidSegmentation);
  }
}

TEST(ReconcileTest, UncoveredCharacterIsInvalid) {
  const std::string text = "ab cd";
  EXPECT_THROW(ValidateSegmentation(Spans(text, {{0, 2}, {3, 4}})), Error);
  EXPECT_THROW(ValidateSegmentation(Spans(text, {{0, 2}, {2, 3}, {3, 5}})),
               Error);  // whitespace-only span
  EXPECT_THROW(ValidateSegmentation(Spans(text, {{0, 6}})), Error);
}

TEST(ReconcileTest, DifferentTextIsCoverageMismatch) {
  try {
    Reconcile("ab", Spans("ab", {{0, 2}}), Spans("ax", {{0, 2}}));
    FAIL() << "expected CoverageMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoverageMismatch);
  }
}

// Invariants over randomized tokenizations.
TEST(ReconcileProperty, RandomizedInvariants) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = testing::RandomSegmentationCase(rng);
    const SegmentedText out = Reconcile(c.text, c.ling, c.sub);
    const Segmentation words = out.as_segmentation();
    SCOPED_TRACE(c.text);

    ASSERT_NO_THROW(ValidateSegmentation(words));
    const auto wb = BoundarySet(words);
    const auto lb = BoundarySet(c.ling);
    const auto sb = BoundarySet(c.sub);
    EXPECT_TRUE(std::includes(lb.begin(), lb.end(), wb.begin(), wb.end()));
    EXPECT_TRUE(std::includes(sb.begin(), sb.end(), wb.begin(), wb.end()));
    EXPECT_LE(out.size(), std::min(c.ling.size(), c.sub.size()));

    // Every token lands in exactly one word.
    std::vector<int> sub_seen(c.sub.size(), 0);
    std::vector<int> ling_seen(c.ling.size(), 0);
    for (const Word& w : out.words) {
      for (auto k : w.subtoken_ids) ++sub_seen[k];
      for (auto k : w.ling_ids) ++ling_seen[k];
    }
    EXPECT_TRUE(std::all_of(sub_seen.begin(), sub_seen.end(),
                            [](int n) { return n == 1; }));
    EXPECT_TRUE(std::all_of(ling_seen.begin(), ling_seen.end(),
                            [](int n) { return n == 1; }));

    // Round trip with the original inter-word whitespace.
    std::string rebuilt;
    std::size_t cursor = 0;
    for (const Word& w : out.words) {
      rebuilt += c.text.substr(cursor, w.span.start - cursor);
      rebuilt += c.text.substr(w.span.start, w.span.size());
      cursor = w.span.end;
    }
    rebuilt += c.text.substr(cursor);
    EXPECT_EQ(rebuilt, c.text);

    // Idempotence against either input.
    EXPECT_EQ(Reconcile(c.text, words, c.ling).as_segmentation().spans,
              words.spans);
    EXPECT_EQ(Reconcile(c.text, c.sub, words).as_segmentation().spans,
              words.spans);
  }
}

}  // namespace
}  // namespace maskeval
