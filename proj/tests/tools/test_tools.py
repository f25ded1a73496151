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


import io
import json
import os
import sys
import types

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", "tools"))
import convert_bert_checkpoint  # noqa: E402
import stanza_tagger  # noqa: E402


class FakeWord:
    def __init__(self, text):
        self.upos = "PROPN" if text[:1].isupper() else "NOUN"
        self.xpos = "NNP" if text[:1].isupper() else "NN"


class FakeToken:
    def __init__(self, text):
        self.words = [FakeWord(text)]
        self.ner = "S-ORG" if text == "Acme" else "O"


class FakePipeline:
    def __call__(self, sentences):
        doc = types.SimpleNamespace()
        doc.sentences = [types.SimpleNamespace(tokens=[FakeToken(t) for t in s])
                         for s in sentences]
        return doc


def test_tagger_one_line_per_input():
    lines = [json.dumps({"tokens": ["Acme", "profit", "rose"]}),
             json.dumps({"tokens": []})]
    out = io.StringIO()
    stanza_tagger.run(FakePipeline(), lines, out)
    records = [json.loads(l) for l in out.getvalue().splitlines()]
    assert len(records) == 2
    assert records[0] == {"upos": ["PROPN", "NOUN", "NOUN"],
                          "xpos": ["NNP", "NN", "NN"],
                          "ner": ["ORG", "O", "O"]}
    assert records[1] == {"upos": [], "xpos": [], "ner": []}


def test_tagger_rejects_bad_line():
    with pytest.raises(SystemExit):
        stanza_tagger.run(FakePipeline(), ["not json"], io.StringIO())


def test_entity_type():
    assert stanza_tagger.entity_type("B-GPE") == "GPE"
    assert stanza_tagger.entity_type("O") == "O"
    assert stanza_tagger.entity_type(None) == "O"


@pytest.mark.parametrize("dtype", ["float32", "float64"])
def test_tensor_file_round_trip(tmp_path, dtype):
    a = np.arange(6, dtype=np.float64).reshape(2, 3) / 7.0
    b = np.array([1.5, -2.0])
    path = tmp_path / "w.bin"
    convert_bert_checkpoint.write_tensor_file(str(path), [("a", a), ("b", b)],
                                              dtype)
    back = convert_bert_checkpoint.read_tensor_file(str(path))
    tol = 1e-7 if dtype == "float32" else 0.0
    assert np.allclose(back["a"], a, atol=tol, rtol=0)
    assert back["b"].shape == (2,)


def test_converts_random_bert(tmp_path):
    pytest.importorskip("transformers")
    sys.path.insert(0, os.path.dirname(__file__))
    import bert_parity

    bert_parity.main(str(tmp_path))
    enc = tmp_path / "encoder"
    meta = json.loads((enc / "encoder.json").read_text())
    assert meta["version"] == 1
    assert meta["config"]["tokenizer"] == "wordpiece"
    assert meta["config"]["lowercase"] is True
    vocab = (enc / "vocab.txt").read_text().splitlines()
    assert vocab[:4] == ["[PAD]", "[UNK]", "[CLS]", "[SEP]"]
    tensors = convert_bert_checkpoint.read_tensor_file(str(enc / "weights.bin"))
    assert tensors["encoder.embeddings.word"].shape == (len(vocab), 16)
    assert tensors["encoder.layer1.ffn.intermediate.weight"].shape == (16, 24)
    assert tensors["encoder.layer0.attention.norm.gain"].shape == (1, 16)
