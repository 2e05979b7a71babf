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

#include "maskeval/masking.h"

#include <algorithm>
#include <random>

#include "maskeval/error.h"

namespace maskeval {

std::string_view SideName(Side side) {
  return side == Side::kCandidate ? "candidate" : "source";
}

Side ParseSide(std::string_view name) {
  if (name == "candidate") return Side::kCandidate;
  if (name == "source") return Side::kSource;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown side '" + std::string(name) + "'");
}

void WindowConfig::Validate() const {
  if (window_radius < 1) {
    throw Error(ErrorCode::kInvalidArgument, "window_radius must be >= 1");
  }
  if (max_sequence_length <= 2 * window_radius + 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_sequence_length must exceed 2 * window_radius + 2");
  }
  if (mask_sentinel.empty() || separator_sentinel.empty() ||
      mask_sentinel == separator_sentinel) {
    throw Error(ErrorCode::kInvalidArgument,
                "mask and separator sentinels must be distinct and non-empty");
  }
}

WindowedSequence ApplyWindow(std::span<const std::string> masked_text,
                             std::size_t mask_pos,
                             std::span<const std::string> other_text,
                             Side side, const WindowConfig& cfg) {
  if (mask_pos >= masked_text.size()) {
    throw Error(ErrorCode::kInvalidArgument, "mask position out of range");
  }
  const std::size_t lo = mask_pos - std::min(cfg.window_radius, mask_pos);
  const std::size_t hi =
      std::min(masked_text.size(), mask_pos + cfg.window_radius + 1);
  const auto window = masked_text.subspan(lo, hi - lo);

  // Budget left for the other text once the window and separator are placed.
  const std::size_t used = window.size() + 1;
  const std::size_t budget =
      cfg.max_sequence_length > used ? cfg.max_sequence_length - used : 0;
  std::span<const std::string> kept_other;
  if (budget >= 1) {
    const std::size_t keep = std::min(budget, other_text.size());
    kept_other = cfg.other_truncation == Truncation::kKeepHead
                     ? other_text.first(keep)
                     : other_text.last(keep);
  }
  const bool with_separator =
      !kept_other.empty() || cfg.keep_separator_when_dropped;

  WindowedSequence out;
  out.tokens.reserve(window.size() + kept_other.size() + 1);
  const auto append = [&out](std::span<const std::string> part) {
    out.tokens.insert(out.tokens.end(), part.begin(), part.end());
  };
  if (side == Side::kCandidate) {
    append(window);
    if (with_separator) out.tokens.push_back(cfg.separator_sentinel);
    append(kept_other);
    out.mask_position = mask_pos - lo;
  } else {
    append(kept_other);
    if (with_separator) out.tokens.push_back(cfg.separator_sentinel);
    out.mask_position = out.tokens.size() + (mask_pos - lo);
    append(window);
  }
  return out;
}

MaskedSequence BuildMaskedSequence(const PairSegmentation& pair, Side side,
                                   std::size_t word_index,
                                   const WindowConfig& cfg) {
  const SegmentedText& masked = pair.text(side);
  const SegmentedText& other =
      pair.text(side == Side::kCandidate ? Side::kSource : Side::kCandidate);
  const Word& word = masked.words.at(word_index);

  // Subtokens of the masked word are contiguous; collapse them into one
  // sentinel.
  const std::size_t first = word.subtoken_ids.front();
  const std::size_t last = word.subtoken_ids.back();
  std::vector<std::string> masked_tokens;
  masked_tokens.reserve(masked.subtokens.size() - (last - first));
  for (std::size_t k = 0; k < first; ++k) {
    masked_tokens.emplace_back(masked.subtoken_text(k));
  }
  masked_tokens.push_back(cfg.mask_sentinel);
  for (std::size_t k = last + 1; k < masked.subtokens.size(); ++k) {
    masked_tokens.emplace_back(masked.subtoken_text(k));
  }
  const std::vector<std::string> other_tokens = other.subtoken_strings();

  WindowedSequence windowed =
      ApplyWindow(masked_tokens, first, other_tokens, side, cfg);
  return MaskedSequence{std::move(windowed.tokens), windowed.mask_position,
                        side, word_index,
                        std::string(masked.word_text(word_index))};
}

std::vector<MaskedSequence> BuildMaskedSequences(const PairSegmentation& pair,
                                                 const WindowConfig& cfg) {
  cfg.Validate();
  if (pair.candidate.words.empty() && pair.source.words.empty()) {
    throw Error(ErrorCode::kEmptyPair, "both texts have zero words");
  }
  std::vector<MaskedSequence> out;
  out.reserve(pair.candidate.size() + pair.source.size());
  for (Side side : {Side::kCandidate, Side::kSource}) {
    for (std::size_t i = 0; i < pair.text(side).size(); ++i) {
      out.push_back(BuildMaskedSequence(pair, side, i, cfg));
    }
  }
  return out;
}

MaskedSequence GenerateMlmTrainingExample(const PairSegmentation& pair,
                                          std::uint64_t seed,
                                          const WindowConfig& cfg) {
  cfg.Validate();
  if (pair.candidate.words.empty() || pair.source.words.empty()) {
    throw Error(ErrorCode::kEmptyPair,
                "training examples need words on both sides");
  }
  std::mt19937_64 rng(seed);
  const Side side = std::uniform_int_distribution<int>(0, 1)(rng) == 0
                        ? Side::kCandidate
                        : Side::kSource;
  const std::size_t word_index = std::uniform_int_distribution<std::size_t>(
      0, pair.text(side).size() - 1)(rng);
  return BuildMaskedSequence(pair, side, word_index, cfg);
}

}  // namespace maskeval
