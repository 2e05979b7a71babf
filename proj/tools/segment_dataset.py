#!/usr/bin/env python3
# Copyright 2026 The MaskEval Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Adds token spans to raw text pairs, producing a maskeval dataset.

Input is JSONL with one object per line:

    {"pair_id": "...", "candidate_text": "...", "source_text": "...",
     "human_scores": {...}, "pos_tags": {...}}      # last two optional

Output is the maskeval dataset format: a header line
{"schema": 1, "human_scale": {"min": .., "max": ..}} and the same records
with four span lists added. Spans are [start, end) character offsets into
the text. The engine accepts any pair of tokenizations as long as:

  * spans are sorted, non-overlapping and non-empty,
  * every non-whitespace character is covered by exactly one span,
  * both tokenizations cover the same characters.

Spans may include whitespace (as sentencepiece-style subwords often do).

Linguistic tokens come from a word/punctuation regex. Subword tokens come
from a Hugging Face fast tokenizer when --tokenizer is given (offsets via
return_offsets_mapping), otherwise from a deterministic splitter that cuts
linguistic tokens into pieces of at most --piece-length characters.
"""

import argparse
import json
import re
import sys

_WORD = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def linguistic_spans(text):
    return [[m.start(), m.end()] for m in _WORD.finditer(text)]


def chunk_spans(text, piece_length):
    spans = []
    for m in _WORD.finditer(text):
        for start in range(m.start(), m.end(), piece_length):
            spans.append([start, min(start + piece_length, m.end())])
    return spans


def hf_spans(tokenizer, text):
    enc = tokenizer(text, add_special_tokens=False, return_offsets_mapping=True)
    spans = []
    for start, end in enc["offset_mapping"]:
        # Drop zero-width and whitespace-only pieces; they carry no content.
        if end > start and text[start:end].strip():
            if spans and start < spans[-1][1]:
                start = spans[-1][1]
            if end > start:
                spans.append([start, end])
    return spans


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("input", help="raw JSONL, or - for stdin")
    parser.add_argument("--tokenizer", help="Hugging Face tokenizer name")
    parser.add_argument("--piece-length", type=int, default=4)
    parser.add_argument("--scale-min", type=float, default=0.0)
    parser.add_argument("--scale-max", type=float, default=1.0)
    args = parser.parse_args(argv)

    if args.tokenizer:
        from transformers import AutoTokenizer  # pylint: disable=import-outside-toplevel

        tok = AutoTokenizer.from_pretrained(args.tokenizer, use_fast=True)
        subword = lambda text: hf_spans(tok, text)
    else:
        subword = lambda text: chunk_spans(text, args.piece_length)

    src = sys.stdin if args.input == "-" else open(args.input, encoding="utf-8")
    out = sys.stdout
    out.write(json.dumps({"schema": 1, "human_scale": {
        "min": args.scale_min, "max": args.scale_max}}) + "\n")
    for line in src:
        if not line.strip():
            continue
        record = json.loads(line)
        for side in ("candidate", "source"):
            text = record[side + "_text"]
            record[side + "_ling_spans"] = linguistic_spans(text)
            record[side + "_sub_spans"] = subword(text)
        out.write(json.dumps(record, ensure_ascii=False) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
