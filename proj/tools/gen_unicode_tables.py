#!/usr/bin/env python3
"""Regenerates src/eval/unicode_tables.inc from Python's unicodedata."""
import sys
import unicodedata

def ranges(pred):
    out, start = [], None
    for cp in range(0x110000):
        ok = pred(cp)
        if ok and start is None:
            start = cp
        elif not ok and start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, 0x10FFFF))
    return out

def is_punct(cp):
    c = chr(cp)
    return unicodedata.category(c).startswith("P") or (cp < 0x80 and c in "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")

def lower_pairs():
    pairs = []
    for cp in range(0x110000):
        c = chr(cp)
        lo = c.lower()
        if len(lo) == 1 and lo != c:
            pairs.append((cp, ord(lo)))
    return pairs

out = sys.stdout
out.write("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n" % unicodedata.unidata_version)
out.write("// NOLINTBEGIN\n")
out.write("constexpr CodeRange kPunctuation[] = {\n")
for a, b in ranges(is_punct):
    out.write("    {0x%X, 0x%X},\n" % (a, b))
out.write("};\n\n")
out.write("constexpr CodeRange kWhitespace[] = {\n")
for a, b in ranges(lambda cp: chr(cp).isspace()):
    out.write("    {0x%X, 0x%X},\n" % (a, b))
out.write("};\n\n")
out.write("constexpr CaseMapping kLower[] = {\n")
for a, b in lower_pairs():
    out.write("    {0x%X, 0x%X},\n" % (a, b))
out.write("};\n")
out.write("// NOLINTEND\n")
