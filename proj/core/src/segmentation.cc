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
#include <iterator>
#include <string>

#include "maskeval/error.h"

namespace maskeval {
namespace {

bool IsSpace(char ch) {
  return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' ||
         ch == '\v';
}

std::vector<bool> CoverageMask(const Segmentation& seg) {
  std::vector<bool> covered(seg.text.size(), false);
  for (const Span& span : seg.spans) {
    std::fill(covered.begin() + static_cast<std::ptrdiff_t>(span.start),
              covered.begin() + static_cast<std::ptrdiff_t>(span.end), true);
  }
  return covered;
}

// Coverage restricted to non-whitespace characters.
std::vector<bool> ContentMask(const Segmentation& seg) {
  std::vector<bool> covered = CoverageMask(seg);
  for (std::size_t pos = 0; pos < covered.size(); ++pos) {
    if (IsSpace(seg.text[pos])) covered[pos] = false;
  }
  return covered;
}

// `span` with leading and trailing whitespace removed.
Span TrimSpan(std::string_view text, Span span) {
  while (span.start < span.end && IsSpace(text[span.start])) ++span.start;
  while (span.end > span.start && IsSpace(text[span.end - 1])) --span.end;
  return span;
}

// Groups consecutive tokens, closing a group after every token whose end
// offset is in `cuts`.
std::vector<std::vector<std::size_t>> GroupTokens(
    const Segmentation& seg, const std::set<std::size_t>& cuts) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < seg.spans.size(); ++i) {
    current.push_back(i);
    if (i + 1 == seg.spans.size() ||
        cuts.contains(TrimSpan(seg.text, seg.spans[i]).end)) {
      groups.push_back(std::move(current));
      current.clear();
    }
  }
  return groups;
}

}  // namespace

std::string_view Segmentation::token(std::size_t i) const {
  const Span& span = spans.at(i);
  return std::string_view(text).substr(span.start, span.size());
}

std::string_view SegmentedText::word_text(std::size_t i) const {
  const Span& span = words.at(i).span;
  return std::string_view(text).substr(span.start, span.size());
}

std::string_view SegmentedText::subtoken_text(std::size_t k) const {
  const Span& span = subtokens.at(k);
  return std::string_view(text).substr(span.start, span.size());
}

std::vector<std::string> SegmentedText::subtoken_strings() const {
  std::vector<std::string> out;
  out.reserve(subtokens.size());
  for (std::size_t k = 0; k < subtokens.size(); ++k) {
    out.emplace_back(subtoken_text(k));
  }
  return out;
}

Segmentation SegmentedText::as_segmentation() const {
  Segmentation seg{text, {}};
  seg.spans.reserve(words.size());
  for (const Word& word : words) seg.spans.push_back(word.span);
  return seg;
}

void ValidateSegmentation(const Segmentation& seg) {
  std::size_t previous_end = 0;
  for (std::size_t i = 0; i < seg.spans.size(); ++i) {
    const Span& span = seg.spans[i];
    if (span.start >= span.end) {
      throw Error(ErrorCode::kInvalidSegmentation,
                  "span " + std::to_string(i) + " is empty or reversed");
    }
    if (span.end > seg.text.size()) {
      throw Error(ErrorCode::kInvalidSegmentation,
                  "span " + std::to_string(i) + " exceeds text length");
    }
    if (i > 0 && span.start < previous_end) {
      throw Error(ErrorCode::kInvalidSegmentation,
                  "span " + std::to_string(i) +
                      " overlaps or precedes the previous span");
    }
    if (TrimSpan(seg.text, span).size() == 0) {
      throw Error(ErrorCode::kInvalidSegmentation,
                  "span " + std::to_string(i) + " holds only whitespace");
    }
    previous_end = span.end;
  }
  const std::vector<bool> covered = CoverageMask(seg);
  for (std::size_t pos = 0; pos < seg.text.size(); ++pos) {
    if (!covered[pos] && !IsSpace(seg.text[pos])) {
      throw Error(ErrorCode::kInvalidSegmentation,
                  "character at offset " + std::to_string(pos) +
                      " is not covered by any span");
    }
  }
}

std::set<std::size_t> BoundarySet(const Segmentation& seg) {
  std::set<std::size_t> boundaries;
  for (std::size_t i = 0; i + 1 < seg.spans.size(); ++i) {
    boundaries.insert(TrimSpan(seg.text, seg.spans[i]).end);
  }
  return boundaries;
}

SegmentedText Reconcile(std::string_view text, const Segmentation& ling,
                        const Segmentation& sub) {
  ValidateSegmentation(ling);
  ValidateSegmentation(sub);
  if (ling.text != text || sub.text != text) {
    throw Error(ErrorCode::kCoverageMismatch,
                "segmentations are not over the same text");
  }
  if (ContentMask(ling) != ContentMask(sub)) {
    throw Error(ErrorCode::kCoverageMismatch,
                "segmentations cover different character sets");
  }

  const std::set<std::size_t> ling_bounds = BoundarySet(ling);
  const std::set<std::size_t> sub_bounds = BoundarySet(sub);
  std::set<std::size_t> common;
  std::set_intersection(ling_bounds.begin(), ling_bounds.end(),
                        sub_bounds.begin(), sub_bounds.end(),
                        std::inserter(common, common.end()));

  auto ling_groups = GroupTokens(ling, common);
  auto sub_groups = GroupTokens(sub, common);
  if (ling_groups.size() != sub_groups.size()) {
    throw Error(ErrorCode::kCoverageMismatch,
                "token groups disagree after boundary intersection");
  }

  SegmentedText out;
  out.text = std::string(text);
  out.subtokens = sub.spans;
  out.words.reserve(ling_groups.size());
  for (std::size_t w = 0; w < ling_groups.size(); ++w) {
    const Span ling_span = TrimSpan(
        text, {ling.spans[ling_groups[w].front()].start,
               ling.spans[ling_groups[w].back()].end});
    const Span sub_span = TrimSpan(
        text, {sub.spans[sub_groups[w].front()].start,
               sub.spans[sub_groups[w].back()].end});
    if (ling_span != sub_span) {
      throw Error(ErrorCode::kCoverageMismatch,
                  "word " + std::to_string(w) +
                      " has different extents in the two segmentations");
    }
    out.words.push_back(Word{ling_span, std::move(sub_groups[w]),
                             std::move(ling_groups[w])});
  }
  return out;
}

}  // namespace maskeval
