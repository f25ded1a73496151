#!/usr/bin/env python3
# Copyright 2026 The evsent Authors.
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

"""Builds a random BERT, converts it and records reference hidden states.

  bert_parity.py OUT_DIR

Writes OUT_DIR/encoder (converted checkpoint) and OUT_DIR/expected.json with
the words and the Hugging Face last hidden state at each word's first piece,
[CLS] and [SEP] included. encoder_test compares against it.
"""

import json
import os
import sys

import torch
from transformers import BertConfig, BertModel, BertTokenizer

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", "tools"))
import convert_bert_checkpoint  # noqa: E402

VOCAB = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "acme", "profit", "rose",
         "sharply", "in", "march", "shares", "fell", "##s", "##ed", "steel",
         "output", "grew", "the", "company", "[MASK]"]
WORDS = ["Acme", "profits", "rose", "sharply", "in", "March", "zzz", "the",
         "company", "output", "grew"]


def main(out_dir):
    torch.manual_seed(0)
    hf_dir = os.path.join(out_dir, "hf")
    os.makedirs(hf_dir, exist_ok=True)
    with open(os.path.join(hf_dir, "vocab.txt"), "w") as f:
        f.write("\n".join(VOCAB) + "\n")
    tokenizer = BertTokenizer(os.path.join(hf_dir, "vocab.txt"),
                              do_lower_case=True)
    config = BertConfig(vocab_size=len(VOCAB), hidden_size=16,
                        num_hidden_layers=2, num_attention_heads=4,
                        intermediate_size=24, max_position_embeddings=40,
                        type_vocab_size=2)
    model = BertModel(config).eval()
    with torch.no_grad():
        for p in model.parameters():
            p.add_(0.05 * torch.randn_like(p))
    model.save_pretrained(hf_dir)
    tokenizer.save_pretrained(hf_dir)

    enc_dir = os.path.join(out_dir, "encoder")
    convert_bert_checkpoint.convert(hf_dir, enc_dir, dtype="float64")

    ids = [tokenizer.cls_token_id]
    rows = [0]
    for word in WORDS:
        pieces = tokenizer.tokenize(word)
        rows.append(len(ids))
        ids.extend(tokenizer.convert_tokens_to_ids(pieces))
    rows.append(len(ids))
    ids.append(tokenizer.sep_token_id)
    with torch.no_grad():
        hidden = model(torch.tensor([ids])).last_hidden_state[0]
    expected = {"words": WORDS, "ids": ids,
                "hidden": hidden[rows].double().tolist()}
    with open(os.path.join(out_dir, "expected.json"), "w") as f:
        json.dump(expected, f)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
