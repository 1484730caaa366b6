#!/usr/bin/env python3
"""Regenerates tests/data/seqeval_default_fixture.tsv.

Each row: scheme <TAB> space-separated labels <TAB> chunks as CLASS:start:end
(end exclusive). Chunks come from seqeval's default (non-strict) get_entities.
BILOU rows are fed to seqeval with L->E and U->S, the IOBES spelling it knows.
"""
import itertools
import random
import sys

from seqeval.metrics.sequence_labeling import get_entities

CLASSES = ["PER", "ORG"]
PREFIXES = {"IO": "I", "BIO": "BI", "BILOU": "BILU"}


def inventory(scheme):
    return ["O"] + [f"{p}-{c}" for p in PREFIXES[scheme] for c in CLASSES]


def to_iobes(label):
    if label.startswith("L-"):
        return "E-" + label[2:]
    if label.startswith("U-"):
        return "S-" + label[2:]
    return label


def row(scheme, labels):
    ents = get_entities([to_iobes(x) for x in labels])
    chunks = " ".join(f"{t}:{s}:{e + 1}" for t, s, e in ents)
    return f"{scheme}\t{' '.join(labels)}\t{chunks}"


def main():
    out = []
    max_len = {"IO": 4, "BIO": 4, "BILOU": 3}
    for scheme in ("IO", "BIO", "BILOU"):
        inv = inventory(scheme)
        for n in range(1, max_len[scheme] + 1):
            for seq in itertools.product(inv, repeat=n):
                out.append(row(scheme, list(seq)))
    rng = random.Random(20240214)
    for scheme in ("BIO", "BILOU"):
        inv = inventory(scheme)
        for _ in range(300):
            n = rng.randint(5, 12)
            out.append(row(scheme, [rng.choice(inv) for _ in range(n)]))
    sys.stdout.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
