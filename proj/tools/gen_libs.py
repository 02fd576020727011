#!/usr/bin/env python3
# Copyright 2026 The scmap Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the synthetic fixture cell libraries under data/libs/."""

import json
import pathlib

# stem: (inputs, function, base area, per-pin cap)
FUNCTIONS = {
    "INV": (["a"], "!a", 1.00, 1.00),
    "BUF": (["a"], "a", 1.33, 0.90),
    "NAND2": (["a", "b"], "!(a&b)", 1.33, 1.10),
    "NOR2": (["a", "b"], "!(a|b)", 1.33, 1.20),
    "AND2": (["a", "b"], "a&b", 1.67, 0.95),
    "OR2": (["a", "b"], "a|b", 1.67, 1.00),
    "XOR2": (["a", "b"], "a^b", 2.33, 1.60),
    "XNOR2": (["a", "b"], "!(a^b)", 2.33, 1.60),
    "NAND3": (["a", "b", "c"], "!(a&b&c)", 1.67, 1.15),
    "NOR3": (["a", "b", "c"], "!(a|b|c)", 2.00, 1.30),
    "AND3": (["a", "b", "c"], "a&b&c", 2.00, 0.95),
    "OR3": (["a", "b", "c"], "a|b|c", 2.00, 1.00),
    "AOI21": (["a", "b", "c"], "!((a&b)|c)", 1.67, 1.15),
    "OAI21": (["a", "b", "c"], "!((a|b)&c)", 1.67, 1.15),
    "AO21": (["a", "b", "c"], "(a&b)|c", 2.00, 1.00),
    "OA21": (["a", "b", "c"], "(a|b)&c", 2.00, 1.00),
    "MUX2": (["a", "b", "s"], "(a&!s)|(b&s)", 2.67, 1.30),
    "XOR3": (["a", "b", "c"], "a^b^c", 3.67, 1.90),
    "DFF": (["d"], "d", 4.67, 1.00),
    "NAND4": (["a", "b", "c", "d"], "!(a&b&c&d)", 2.00, 1.20),
    "NOR4": (["a", "b", "c", "d"], "!(a|b|c|d)", 2.33, 1.40),
    "AND4": (["a", "b", "c", "d"], "a&b&c&d", 2.33, 0.95),
    "OR4": (["a", "b", "c", "d"], "a|b|c|d", 2.33, 1.00),
    "AOI22": (["a", "b", "c", "d"], "!((a&b)|(c&d))", 2.00, 1.15),
    "OAI22": (["a", "b", "c", "d"], "!((a|b)&(c|d))", 2.00, 1.15),
    "AO22": (["a", "b", "c", "d"], "(a&b)|(c&d)", 2.33, 1.00),
    "OA22": (["a", "b", "c", "d"], "(a|b)&(c|d)", 2.33, 1.00),
}

DRIVES = [1, 2, 4, 8]
CAP_SCALE = {1: 1.0, 2: 1.8, 4: 3.4, 8: 6.5}
AREA_SCALE = {1: 1.0, 2: 1.33, 4: 2.0, 8: 3.33}

# label, file, standard stems, low-power stems, low-power drives
LIBRARIES = [
    ("fixture-65", "fixture65.json", list(FUNCTIONS), list(FUNCTIONS), DRIVES),
    ("fixture-45", "fixture45.json", list(FUNCTIONS), list(FUNCTIONS)[:13], [1, 2]),
    ("fixture-15", "fixture15.json", list(FUNCTIONS)[:19], [], []),
]


def cell(stem, drive, low_power):
    inputs, function, area, pin_cap = FUNCTIONS[stem]
    name = f"{stem}LP_X{drive}" if low_power else f"{stem}_X{drive}"
    cap = len(inputs) * pin_cap * CAP_SCALE[drive]
    area = area * AREA_SCALE[drive]
    ds = float(drive)
    if low_power:
        cap *= 0.6
        area *= 1.35
        ds *= 0.75
    return {
        "name": name,
        "inputs": inputs,
        "output": "q" if stem == "DFF" else "y",
        "function": function,
        "ds": round(ds, 4),
        "cap": round(cap, 4),
        "area": round(area, 4),
        "sequential": stem == "DFF",
    }


def main():
    out_dir = pathlib.Path(__file__).resolve().parent.parent / "data" / "libs"
    out_dir.mkdir(parents=True, exist_ok=True)
    for label, file, stems, lp_stems, lp_drives in LIBRARIES:
        cells = [cell(s, d, False) for s in stems for d in DRIVES]
        cells += [cell(s, d, True) for s in lp_stems for d in lp_drives]
        doc = {"name": label.replace("-", "_"), "node_label": label, "cells": cells}
        (out_dir / file).write_text(json.dumps(doc, indent=1) + "\n")
        print(f"{file}: {len(cells)} cells")


if __name__ == "__main__":
    main()
