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

// Word-level segmentation obtained by reconciling a linguistic tokenization
// with a model's subword tokenization. A "word" ends only where both
// tokenizations place a boundary, so masking a word never splits a subword
// token and never splits a linguistic token.

#ifndef MASKEVAL_SEGMENTATION_H_
#define MASKEVAL_SEGMENTATION_H_

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace maskeval {

// Half-open character range [start, end) into a normalized string.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
};

// A tokenization of `text` as sorted, non-overlapping spans. Every
// non-whitespace character must be covered by exactly one span.
struct Segmentation {
  std::string text;
  std::vector<Span> spans;

  std::size_t size() const { return spans.size(); }
  std::string_view token(std::size_t i) const;
};

struct Word {
  Span span;
  std::vector<std::size_t> subtoken_ids;  // indices into the subword spans
  std::vector<std::size_t> ling_ids;      // indices into the linguistic spans

  friend bool operator==(const Word&, const Word&) = default;
};

struct SegmentedText {
  std::string text;
  std::vector<Word> words;
  // Subword spans the word subtoken_ids refer to. Masking works on these.
  std::vector<Span> subtokens;

  std::size_t size() const { return words.size(); }
  std::string_view word_text(std::size_t i) const;
  std::string_view subtoken_text(std::size_t k) const;
  std::vector<std::string> subtoken_strings() const;

  // Words as a Segmentation over `text`.
  Segmentation as_segmentation() const;
};

// Throws Error(kInvalidSegmentation) when spans are empty, whitespace-only,
// unsorted, overlapping, out of bounds, or leave a non-whitespace character
// uncovered.
void ValidateSegmentation(const Segmentation& seg);

// Offsets where one token ends and the next begins. A boundary across
// whitespace is located at the left token's end offset, ignoring any trailing
// whitespace the token carries; the text start and end are never boundaries.
std::set<std::size_t> BoundarySet(const Segmentation& seg);

// Intersects the boundary sets of `ling` and `sub` to form words.
//
// Both segmentations must be over `text`. Throws kInvalidSegmentation for
// malformed input and kCoverageMismatch when the two cover different
// non-whitespace characters (or were built over a different string). Word
// spans never start or end with whitespace.
SegmentedText Reconcile(std::string_view text, const Segmentation& ling,
                        const Segmentation& sub);

}  // namespace maskeval

#endif  // MASKEVAL_SEGMENTATION_H_
