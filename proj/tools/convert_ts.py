#!/usr/bin/env python3
"""Convert a multivariate .ts archive file into the line-oriented JSON format
read by `bihd`.

Each output line is {"label": <int>, "values": [[...L reals...] x N]}.
Class labels are mapped to 0..K-1 in the order declared by @classLabel.

usage: convert_ts.py INPUT.ts OUTPUT.jsonl
"""
import json
import sys


def convert(src, dst):
    classes = None
    in_data = False
    rows = 0
    with open(src) as fin, open(dst, "w") as fout:
        for raw in fin:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not in_data:
                low = line.lower()
                if low.startswith("@classlabel"):
                    parts = line.split()
                    if parts[1].lower() != "true":
                        raise SystemExit("dataset has no class labels")
                    classes = parts[2:]
                elif low.startswith("@data"):
                    in_data = True
                continue
            *dims, label = line.split(":")
            if any("?" in d for d in dims):
                raise SystemExit(f"missing values are not supported (row {rows})")
            values = [[float(v) for v in d.split(",")] for d in dims]
            fout.write(json.dumps({"label": classes.index(label.strip()),
                                   "values": values},
                                  separators=(",", ":")) + "\n")
            rows += 1
    return rows


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    n = convert(sys.argv[1], sys.argv[2])
    print(f"wrote {n} samples to {sys.argv[2]}")
