# Copyright 2026 The MPU Sketch Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent reference for the constants frozen in tests/frozen_test.cc.

Pure Python big-integer arithmetic, no shared code with the C++ library.
Run: python3 tests/oracle/reference.py
"""

import math
import struct

MASK = (1 << 64) - 1
P = (1 << 61) - 1
GAMMA = 0x9E3779B97F4A7C15
BASIS = 0x6A09E667F3BCC908
FINAL = 0xBB67AE8584CAA73B


def mix64(z):
    z = (z + GAMMA) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def derive(seed, idx):
    return mix64(seed ^ mix64(idx))


def digest(raw: bytes):
    state = mix64(BASIS ^ len(raw))
    for i in range(0, len(raw), 8):
        chunk = raw[i:i + 8].ljust(8, b"\0")
        state = mix64(state ^ int.from_bytes(chunk, "little"))
    return mix64(state ^ FINAL)


def pairwise(seed, idx):
    u = derive(seed, idx)
    a = u % P or 1
    b = mix64(u) % P
    return a, b


def bucket(ab, m, x):
    a, b = ab
    y = (a * (x % P) + b) % P
    return (y * m) >> 61


def namespaced(ns, x, y):
    return digest(bytes([ns]) + x.to_bytes(8, "little") + y.to_bytes(8, "little"))


def sketch_bytes(p, m, s, w, seed, updates):
    width = next(b for b in (8, 16, 32, 64) if w + 1 < (1 << b))
    rows = [pairwise(seed, k) for k in range(p)]
    g = pairwise(seed, p)
    phi = pairwise(seed, p + 1)
    cells = [w + 1] * (p * m * s)
    for key, item in updates:
        x = mix64(item)
        col = bucket(g, s, x)
        val = bucket(phi, w, x) + 1
        for k in range(p):
            idx = (k * m + bucket(rows[k], m, key)) * s + col
            cells[idx] = min(cells[idx], val)
    out = b"MPUS" + struct.pack("<HBB", 1, width, 0)
    out += struct.pack("<5Q", p, m, s, w, seed)
    for ab in rows + [g, phi]:
        out += struct.pack("<2Q", *ab)
    fmt = {8: "B", 16: "H", 32: "I", 64: "Q"}[width]
    out += struct.pack("<%d%s" % (len(cells), fmt), *cells)
    out += struct.pack("<Q", digest(out))
    return out


def least_root(target, p):
    m = max(1, int(round(target ** (1.0 / p))) - 2)
    while m ** p < target:
        m += 1
    while m > 1 and (m - 1) ** p >= target:
        m -= 1
    return m


def plan(eps, delta, T, F, p):
    from fractions import Fraction
    e = Fraction(eps)
    s = math.ceil(1 / (e * e) - Fraction(1, 10 ** 9))
    m = least_root(4 * F * F, p)
    w = -(-5 * T * T // s)
    c = math.ceil(8 * math.log(1 / delta))
    if c % 2 == 0:
        c += 1
    return s, m, w, c


if __name__ == "__main__":
    print("mix64(0) = 0x%016x" % mix64(0))
    print("mix64(1) = 0x%016x" % mix64(1))
    print("mix64(0xdeadbeef) = 0x%016x" % mix64(0xDEADBEEF))
    print("derive(42, 7) = 0x%016x" % derive(42, 7))
    for s in [b"", b"a", b"f0", b"hello world!!", b"12345678"]:
        print("digest(%r) = 0x%016x" % (s, digest(s)))
    ab = pairwise(42, 0)
    print("pairwise(42, 0) a=0x%016x b=0x%016x" % ab)
    for x in [0, 1, 2, 12345, MASK]:
        print("  eval range 100 key %d -> %d" % (x, bucket(ab, 100, x) + 1))
    print("virtual(digest('j'), 3) = 0x%016x" % namespaced(1, digest(b"j"), 3))
    print("tuple(digest('10.0.0.7'), 9) = 0x%016x"
          % namespaced(2, digest(b"10.0.0.7"), 9))
    key = digest(b"f")
    blob = sketch_bytes(2, 8, 16, 1000, 7, [(key, 5)])
    print("sketch(2,8,16,1000) seed 7 one update: len=%d checksum=0x%016x"
          % (len(blob), int.from_bytes(blob[-8:], "little")))
    rows = [bucket(pairwise(7, k), 8, key) for k in range(2)]
    col = bucket(pairwise(7, 2), 16, mix64(5))
    val = bucket(pairwise(7, 3), 1000, mix64(5)) + 1
    print("  rows=%s col=%d value=%d" % (rows, col, val))
    blob = sketch_bytes(1, 1, 1, 1, 42, [])
    print("fresh sketch(1,1,1,1) seed 42: %s" % blob.hex())
    for args in [(0.1, 0.1, 1000, 1000, 2), (0.2, 0.1, 2000, 100, 3),
                 (0.99, 0.5, 10, 1, 1), (0.1, 0.1, 1000, 1024, 10)]:
        print("plan%s = s,m,w,copies %s" % (args, plan(*args)))
