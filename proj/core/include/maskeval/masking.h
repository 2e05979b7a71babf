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

// Construction of masked sequences: one per word of the candidate/source
// pair, laid out as `candidate <sep> source` with the masked word's subword
// tokens collapsed into a single mask sentinel.

#ifndef MASKEVAL_MASKING_H_
#define MASKEVAL_MASKING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maskeval/segmentation.h"

namespace maskeval {

enum class Side { kCandidate, kSource };

std::string_view SideName(Side side);
// Accepts "candidate" or "source"; throws kInvalidArgument otherwise.
Side ParseSide(std::string_view name);

struct PairSegmentation {
  SegmentedText candidate;
  SegmentedText source;

  const SegmentedText& text(Side side) const {
    return side == Side::kCandidate ? candidate : source;
  }
};

enum class Truncation {
  kKeepHead,  // drop the tail of the other text
  kKeepTail,  // drop the head of the other text
};

struct WindowConfig {
  std::size_t window_radius = 24;
  std::size_t max_sequence_length = 512;
  std::string mask_sentinel = "<extra_id_0>";
  std::string separator_sentinel = "<sep>";
  Truncation other_truncation = Truncation::kKeepHead;
  bool keep_separator_when_dropped = true;

  // Throws kInvalidArgument unless radius >= 1 and the budget fits a full
  // window, the separator, and one token of the other text.
  void Validate() const;
};

struct MaskedSequence {
  std::vector<std::string> tokens;
  std::size_t mask_position = 0;  // index of the mask sentinel in `tokens`
  Side side = Side::kCandidate;
  std::size_t word_index = 0;
  std::string truth;

  friend bool operator==(const MaskedSequence&,
                         const MaskedSequence&) = default;
};

struct WindowedSequence {
  std::vector<std::string> tokens;
  std::size_t mask_position = 0;
};

// Lays out `candidate <sep> source` where `masked_text` (already holding the
// mask sentinel at `mask_pos`) belongs to `side`. The masked text keeps at
// most window_radius tokens on each side of the mask; the other text is then
// truncated so the whole sequence fits max_sequence_length. Sentinels count
// against the budget.
WindowedSequence ApplyWindow(std::span<const std::string> masked_text,
                             std::size_t mask_pos,
                             std::span<const std::string> other_text,
                             Side side, const WindowConfig& cfg);

// Exactly N + M sequences: candidate words first, then source words.
// Throws kEmptyPair if both texts have zero words.
std::vector<MaskedSequence> BuildMaskedSequences(const PairSegmentation& pair,
                                                 const WindowConfig& cfg);

// The sequence for a single word.
MaskedSequence BuildMaskedSequence(const PairSegmentation& pair, Side side,
                                   std::size_t word_index,
                                   const WindowConfig& cfg);

// One fine-tuning example: a uniformly chosen side, then a uniformly chosen
// word on that side. Deterministic in `seed`. Throws kEmptyPair if either
// side is empty.
MaskedSequence GenerateMlmTrainingExample(const PairSegmentation& pair,
                                          std::uint64_t seed,
                                          const WindowConfig& cfg);

}  // namespace maskeval

#endif  // MASKEVAL_MASKING_H_
