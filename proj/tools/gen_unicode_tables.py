#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc from Python's unicodedata.

Alphanumeric = general categories L* and N*. Lowercase mapping is the
single-code-point lowercase of each character (multi-code-point results are
left unmapped so that tokens never change length in code points).
"""
import sys
import unicodedata

MAX_CP = 0x110000


def is_alnum(cp):
    return unicodedata.category(chr(cp))[0] in "LN"


def alnum_ranges():
    ranges = []
    start = None
    for cp in range(MAX_CP):
        if is_alnum(cp):
            if start is None:
                start = cp
        elif start is not None:
            ranges.append((start, cp - 1))
            start = None
    if start is not None:
        ranges.append((start, MAX_CP - 1))
    return ranges


def lower_pairs():
    pairs = []
    for cp in range(0x80, MAX_CP):
        if not is_alnum(cp):
            continue
        low = chr(cp).lower()
        if len(low) == 1 and ord(low) != cp:
            # The lowered form must itself be a fixed point and alphanumeric.
            assert low.lower() == low and is_alnum(ord(low)), hex(cp)
            pairs.append((cp, ord(low)))
    return pairs


def main(out):
    ranges = alnum_ranges()
    pairs = lower_pairs()
    with open(out, "w", encoding="ascii") as f:
        f.write("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n"
                % unicodedata.unidata_version)
        f.write("// clang-format off\n")
        f.write("constexpr CodePointRange kAlnumRanges[] = {\n")
        for lo, hi in ranges:
            f.write("    {0x%X, 0x%X},\n" % (lo, hi))
        f.write("};\n\n")
        f.write("constexpr LowerMapping kLowerMappings[] = {\n")
        for src, dst in pairs:
            f.write("    {0x%X, 0x%X},\n" % (src, dst))
        f.write("};\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/unicode_tables.inc")
