#!/usr/bin/env python3
"""Hashed bag-of-words embeddings written as JVEC files.

A stand-in for a sentence-embedding backend so the pipeline can run without
one. Input is JSONL with `id` and `text` (and optionally `label_code`, which
produces a `{label_code: [ids]}` sidecar next to the output).

    hashed_bow.py INPUT.jsonl OUTPUT.jvec [--dim 64] [--sidecar OUT.json]
"""

import argparse
import hashlib
import json
import math
import re
import struct
import sys
from pathlib import Path

TOKEN = re.compile(r"[a-z0-9]+")
STOP = {"a", "an", "the", "and", "or", "to", "of", "in", "at", "with", "for", "is", "are", "you", "will", "be", "our", "we"}


def embed(text, dim):
    v = [0.0] * dim
    for tok in TOKEN.findall(text.lower()):
        if tok in STOP:
            continue
        h = hashlib.sha256(tok.encode()).digest()
        idx = int.from_bytes(h[:4], "little") % dim
        v[idx] += 1.0 if h[4] & 1 else -1.0
    norm = math.sqrt(sum(x * x for x in v))
    if norm == 0.0:
        # Empty after stopwords: a fixed direction keeps the row valid.
        v[0], norm = 1.0, 1.0
    return [x / norm for x in v]


def write_jvec(path, ids, rows, dim):
    out = bytearray(b"JVEC")
    out += struct.pack("<III", 1, len(ids), dim)
    for r in rows:
        out += struct.pack(f"<{dim}f", *r)
    for i in ids:
        b = i.encode("utf-8")
        out += struct.pack("<H", len(b)) + b
    Path(path).write_bytes(bytes(out))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("input")
    ap.add_argument("output")
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--sidecar")
    args = ap.parse_args(argv)

    ids, rows, sets = [], [], {}
    seen = set()
    for n, line in enumerate(Path(args.input).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        rec = json.loads(line)
        if rec["id"] in seen:
            sys.exit(f"{args.input}:{n}: duplicate id {rec['id']!r}")
        seen.add(rec["id"])
        ids.append(rec["id"])
        rows.append(embed(rec["text"], args.dim))
        if "label_code" in rec:
            sets.setdefault(rec["label_code"], []).append(rec["id"])
    write_jvec(args.output, ids, rows, args.dim)
    if args.sidecar:
        Path(args.sidecar).write_text(json.dumps(sets, indent=1, sort_keys=True) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
