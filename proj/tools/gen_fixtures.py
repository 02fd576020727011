#!/usr/bin/env python3
# Copyright 2026 The scmap Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the fixture netlists and annotation files under data/fixtures/."""

import json
import pathlib

PRESENT_SBOX = [0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD, 0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2]


def aes_sbox():
    # Multiplicative inverse in GF(2^8) followed by the affine map.
    def mul(a, b):
        r = 0
        while b:
            if b & 1:
                r ^= a
            a = ((a << 1) ^ (0x1B if a & 0x80 else 0)) & 0xFF
            b >>= 1
        return r

    inv = [0] * 256
    for x in range(1, 256):
        for y in range(1, 256):
            if mul(x, y) == 1:
                inv[x] = y
                break
    out = []
    for x in range(256):
        b = inv[x]
        s = b
        for k in range(1, 5):
            s ^= ((b << k) | (b >> (8 - k))) & 0xFF
        out.append(s ^ 0x63)
    return out


def hex_table(entries, digits):
    return "".join(f"{e:0{digits}X}" for e in entries)


def present_player(i):
    return 63 if i == 63 else (16 * i) % 63


HALF_ADDER = """\
# Half adder: sum = a ^ b, carry = a & b.
module half_adder
  wire 1 input a
  wire 1 input b
  wire 1 output sum
  wire 1 output carry
  block xor sum_xor in=a,b out=sum
  block and carry_and in=a,b out=carry
end
"""

FULL_ADDER = """\
# Full adder from two half adders.
module full_adder
  wire 1 input a
  wire 1 input b
  wire 1 input cin
  wire 1 output sum
  wire 1 output cout
  wire 1 internal p
  wire 1 internal g
  wire 1 internal t
  block xor p_xor in=a,b out=p
  block xor sum_xor in=p,cin out=sum
  block and g_and in=a,b out=g
  block and t_and in=p,cin out=t
  block or cout_or in=g,t out=cout
end
"""


def sbox_fixture(name, width, table, digits):
    return f"""\
# Key addition and a {width}-bit substitution box into an output register.
module {name}
  wire {width} input pt
  wire {width} input key
  wire {width} internal x
  wire {width} internal y
  wire {width} output state
  block xor x in=pt,key out=x
  block table sbox in=x out=y
  table sbox {hex_table(table, digits)}
  block dff state_reg in=y out=state
end
"""


def present_round():
    lines = [
        "# One PRESENT round: key addition, 16 S-boxes, bit permutation, state register.",
        "module present_round",
        "  wire 64 input pt",
        "  wire 64 input key",
        "  wire 64 internal x",
        "  wire 64 internal p",
        "  wire 64 output state",
        "  block xor x in=pt,key out=x",
    ]
    for s in range(16):
        ins = ",".join(f"x[{4 * s + j}]" for j in range(4))
        outs = ",".join(f"p[{present_player(4 * s + j)}]" for j in range(4))
        lines.append(f"  block table sbox{s} in={ins} out={outs}")
        lines.append(f"  table sbox{s} {hex_table(PRESENT_SBOX, 1)}")
    lines.append("  block dff state in=p out=state")
    lines.append("end")
    return "\n".join(lines) + "\n"


SBOX_ANN = {
    "sensitive_nets": ["key*", "x"],
    "intensive_blocks": [{"pattern": "sbox*"}],
}


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "half_adder.net": HALF_ADDER,
        "full_adder.net": FULL_ADDER,
        "present_sbox4.net": sbox_fixture("present_sbox4", 4, PRESENT_SBOX, 1),
        "aes_sbox8.net": sbox_fixture("aes_sbox8", 8, aes_sbox(), 2),
        "present_round.net": present_round(),
    }
    anns = {
        "half_adder.ann.json": {"sensitive_nets": ["sum"]},
        "full_adder.ann.json": {"sensitive_nets": ["cin", "p"]},
        "present_sbox4.ann.json": SBOX_ANN,
        "aes_sbox8.ann.json": SBOX_ANN,
        "present_round.ann.json": SBOX_ANN,
    }
    for name, text in files.items():
        (out / name).write_text(text)
    for name, doc in anns.items():
        (out / name).write_text(json.dumps(doc, indent=2) + "\n")
    print("\n".join(sorted(list(files) + list(anns))))


if __name__ == "__main__":
    main()
