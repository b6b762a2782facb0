#!/usr/bin/env python3
"""Regenerates include/zeroline/brief_pattern.hpp.

256 point pairs drawn uniformly from the 31x31 patch around a keypoint,
keeping only points within radius 14 so every rotation of the pattern stays
inside the descriptor margin. The output is committed; rerunning with the same
seed reproduces it exactly.
"""
import sys

SEED = 0x5A45524F4C494E45  # "ZEROLINE"
MASK = (1 << 64) - 1


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def main(out):
    state = SEED
    pairs = []

    def point():
        nonlocal state
        while True:
            state, a = splitmix64(state)
            state, b = splitmix64(state)
            x, y = a % 31 - 15, b % 31 - 15
            if x * x + y * y <= 14 * 14:
                return x, y

    while len(pairs) < 256:
        p, q = point(), point()
        if p != q:
            pairs.append((p, q))

    with open(out, "w") as f:
        f.write("// Generated by tools/gen_brief_pattern.py. Do not edit.\n")
        f.write("#pragma once\n\n#include <array>\n\nnamespace zeroline::detail {\n\n")
        f.write("struct PatternPair {\n  int px, py, qx, qy;\n};\n\n")
        f.write("inline constexpr std::array<PatternPair, 256> kBriefPattern{{\n")
        for (px, py), (qx, qy) in pairs:
            f.write(f"    {{{px}, {py}, {qx}, {qy}}},\n")
        f.write("}};\n\n}  // namespace zeroline::detail\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "include/zeroline/brief_pattern.hpp")
