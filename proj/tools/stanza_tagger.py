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

"""External tagger for evsent backed by Stanza.

Reads JSONL lines {"tokens": [...]} on stdin and writes, per line,
{"upos": [...], "xpos": [...], "ner": [...]} on stdout. NER tags are entity
types ("ORG", "O"); BIOES prefixes are dropped.

  evsent train --set tagger.backend=external \
      --set tagger.command="python3 tools/stanza_tagger.py --lang zh" ...
"""

import argparse
import json
import sys


def entity_type(tag):
    if not tag or tag == "O":
        return "O"
    return tag.split("-", 1)[1] if "-" in tag else tag


def tag_tokens(nlp, tokens):
    if not tokens:
        return {"upos": [], "xpos": [], "ner": []}
    doc = nlp([list(tokens)])
    upos, xpos, ner = [], [], []
    for sentence in doc.sentences:
        for token in sentence.tokens:
            word = token.words[0]
            upos.append(word.upos or "X")
            xpos.append(word.xpos or word.upos or "X")
            ner.append(entity_type(getattr(token, "ner", None)))
    if len(upos) != len(tokens):
        raise ValueError("tagger returned %d tags for %d tokens"
                         % (len(upos), len(tokens)))
    return {"upos": upos, "xpos": xpos, "ner": ner}


def build_pipeline(lang, use_gpu):
    import stanza

    return stanza.Pipeline(lang=lang, processors="tokenize,pos,ner",
                           tokenize_pretokenized=True, use_gpu=use_gpu,
                           verbose=False)


def run(nlp, lines, out):
    for number, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            tokens = json.loads(line)["tokens"]
        except (ValueError, KeyError) as err:
            raise SystemExit("line %d: bad input: %s" % (number, err))
        out.write(json.dumps(tag_tokens(nlp, tokens), ensure_ascii=False))
        out.write("\n")
    out.flush()


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lang", default="en")
    parser.add_argument("--gpu", action="store_true")
    args = parser.parse_args(argv)
    run(build_pipeline(args.lang, args.gpu), sys.stdin, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
