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

"""Converts a Hugging Face BERT checkpoint into an evsent encoder directory.

Output layout: encoder.json, vocab.txt (one token per line, line number = id)
and weights.bin (EVSW tensor container, see include/evsent/nn/tensor_file.h).
Linear weights are transposed to the in x out layout evsent uses.

  convert_bert_checkpoint.py bert-base-chinese out/bert-zh
  convert_bert_checkpoint.py /path/to/local/model out/enc --dtype float64

Uncased models lowercase ASCII only; accent stripping is not reproduced.
"""

import argparse
import json
import os
import struct
import sys

import numpy as np

MAGIC = b"EVSW"
VERSION = 1
ENCODER_CHECKPOINT_VERSION = 1
SPECIALS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]")


def write_tensor_file(path, tensors, dtype="float32"):
    code, np_dtype = (0, "<f4") if dtype == "float32" else (1, "<f8")
    with open(path, "wb") as out:
        out.write(MAGIC)
        out.write(struct.pack("<II", VERSION, len(tensors)))
        for name, value in tensors:
            value = np.asarray(value, dtype=np.float64)
            encoded = name.encode("utf-8")
            out.write(struct.pack("<I", len(encoded)))
            out.write(encoded)
            out.write(struct.pack("<B", code))
            out.write(struct.pack("<I", value.ndim))
            for dim in value.shape:
                out.write(struct.pack("<Q", dim))
            out.write(np.ascontiguousarray(value, dtype=np_dtype).tobytes())


def read_tensor_file(path):
    tensors = {}
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise ValueError(path + ": bad magic")
        version, count = struct.unpack("<II", f.read(8))
        if version != VERSION:
            raise ValueError("%s: unsupported version %d" % (path, version))
        for _ in range(count):
            (length,) = struct.unpack("<I", f.read(4))
            name = f.read(length).decode("utf-8")
            (code,) = struct.unpack("<B", f.read(1))
            (rank,) = struct.unpack("<I", f.read(4))
            shape = struct.unpack("<" + "Q" * rank, f.read(8 * rank))
            np_dtype = "<f4" if code == 0 else "<f8"
            size = int(np.prod(shape))
            data = np.frombuffer(f.read(size * np.dtype(np_dtype).itemsize),
                                 dtype=np_dtype)
            tensors[name] = data.reshape(shape).astype(np.float64)
    return tensors


def map_tensors(state, num_layers):
    """Yields (evsent name, array) pairs from a BertModel state dict."""
    def get(key):
        for prefix in ("", "bert."):
            if prefix + key in state:
                return state[prefix + key].detach().cpu().numpy()
        raise KeyError("checkpoint lacks tensor " + key)

    def row(key):
        return get(key).reshape(1, -1)

    out = [
        ("encoder.embeddings.word", get("embeddings.word_embeddings.weight")),
        ("encoder.embeddings.position",
         get("embeddings.position_embeddings.weight")),
        ("encoder.embeddings.token_type",
         get("embeddings.token_type_embeddings.weight")),
        ("encoder.embeddings.norm.gain", row("embeddings.LayerNorm.weight")),
        ("encoder.embeddings.norm.bias", row("embeddings.LayerNorm.bias")),
    ]
    for l in range(num_layers):
        src = "encoder.layer.%d." % l
        dst = "encoder.layer%d." % l
        linears = [
            ("attention.query", "attention.self.query"),
            ("attention.key", "attention.self.key"),
            ("attention.value", "attention.self.value"),
            ("attention.output", "attention.output.dense"),
        ]
        for ours, theirs in linears:
            out.append((dst + ours + ".weight", get(src + theirs + ".weight").T))
            out.append((dst + ours + ".bias", row(src + theirs + ".bias")))
        out.append((dst + "attention.norm.gain",
                    row(src + "attention.output.LayerNorm.weight")))
        out.append((dst + "attention.norm.bias",
                    row(src + "attention.output.LayerNorm.bias")))
        out.append((dst + "ffn.intermediate.weight",
                    get(src + "intermediate.dense.weight").T))
        out.append((dst + "ffn.intermediate.bias",
                    row(src + "intermediate.dense.bias")))
        out.append((dst + "ffn.output.weight", get(src + "output.dense.weight").T))
        out.append((dst + "ffn.output.bias", row(src + "output.dense.bias")))
        out.append((dst + "ffn.norm.gain", row(src + "output.LayerNorm.weight")))
        out.append((dst + "ffn.norm.bias", row(src + "output.LayerNorm.bias")))
    return out


def convert(source, out_dir, dtype="float32"):
    from transformers import AutoTokenizer, BertModel

    model = BertModel.from_pretrained(source)
    tokenizer = AutoTokenizer.from_pretrained(source)
    cfg = model.config
    if cfg.hidden_act != "gelu":
        raise ValueError("unsupported activation %r, need exact gelu"
                         % cfg.hidden_act)
    if getattr(cfg, "position_embedding_type", "absolute") != "absolute":
        raise ValueError("only absolute position embeddings are supported")

    vocab = sorted(tokenizer.get_vocab().items(), key=lambda kv: kv[1])
    tokens = [token for token, _ in vocab]
    if [i for _, i in vocab] != list(range(len(vocab))):
        raise ValueError("tokenizer vocabulary ids are not contiguous")
    missing = [s for s in SPECIALS if s not in tokens]
    if missing:
        raise ValueError("vocabulary lacks " + ", ".join(missing))
    if any("\n" in t for t in tokens):
        raise ValueError("vocabulary token contains a newline")

    if len(tokens) != cfg.vocab_size:
        raise ValueError("tokenizer has %d tokens, model embeds %d"
                         % (len(tokens), cfg.vocab_size))

    os.makedirs(out_dir, exist_ok=True)
    config = {
        "hidden_size": cfg.hidden_size,
        "num_layers": cfg.num_hidden_layers,
        "num_heads": cfg.num_attention_heads,
        "intermediate_size": cfg.intermediate_size,
        "max_positions": cfg.max_position_embeddings,
        "type_vocab_size": cfg.type_vocab_size,
        "position_embeddings": True,
        "attention_window": -1,
        "layer_norm_eps": cfg.layer_norm_eps,
        "dropout": cfg.hidden_dropout_prob,
        "tokenizer": "wordpiece",
        "lowercase": bool(getattr(tokenizer, "do_lower_case", False)),
    }
    meta = {
        "version": ENCODER_CHECKPOINT_VERSION,
        "architecture": "transformer-encoder",
        "vocab_size": len(tokens),
        "config": config,
        "source": str(source),
    }
    with open(os.path.join(out_dir, "encoder.json"), "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    with open(os.path.join(out_dir, "vocab.txt"), "w", encoding="utf-8") as f:
        for token in tokens:
            f.write(token + "\n")
    tensors = map_tensors(model.state_dict(), cfg.num_hidden_layers)
    write_tensor_file(os.path.join(out_dir, "weights.bin"), tensors, dtype)
    return meta


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", help="model name or local directory")
    parser.add_argument("out", help="output encoder directory")
    parser.add_argument("--dtype", choices=("float32", "float64"),
                        default="float32")
    args = parser.parse_args(argv)
    meta = convert(args.source, args.out, args.dtype)
    print(json.dumps({"out": args.out, "vocab_size": meta["vocab_size"],
                      "layers": meta["config"]["num_layers"]}, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
