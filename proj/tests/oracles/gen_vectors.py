#!/usr/bin/env python3
"""Independent reference for the frozen test vectors under tests/fixtures.

Written against pycryptodome's Keccak-256 and plain Python integers; shares no
code with the C++ implementation. Re-run only to regenerate fixtures:

    python3 tests/oracles/gen_vectors.py tests/fixtures
"""
import random
import sys
from pathlib import Path

from Crypto.Hash import keccak

P = 21888242871839275222246405745257275088548364400416034343698204186575808495617
ROUNDS = 220


def k256(data: bytes) -> bytes:
    return keccak.new(digest_bits=256, data=data).digest()


def be32(x: int) -> bytes:
    return x.to_bytes(32, "big")


def hx(x: int) -> str:
    return be32(x).hex()


def mimc_constants():
    c = [0] * ROUNDS
    digest = k256(b"mimcsponge")
    for i in range(1, ROUNDS):
        digest = k256(digest)
        c[i] = int.from_bytes(digest, "big") % P
    c[0] = 0
    c[ROUNDS - 1] = 0
    return c


C = mimc_constants()


def feistel(xl, xr, k):
    for i in range(ROUNDS):
        t = (xl + k + C[i]) % P
        t5 = pow(t, 5, P)
        if i < ROUNDS - 1:
            xl, xr = (xr + t5) % P, xl
        else:
            xr = (xr + t5) % P
    return xl, xr


def sponge(inputs, k):
    r, c = 0, 0
    for x in inputs:
        r = (r + x) % P
        r, c = feistel(r, c, k)
    return r


def hash2(a, b):
    return sponge([a, b], 0)


K_COMMIT = int.from_bytes(k256(b"dact.commitment"), "big") % P
K_NULLIFIER = int.from_bytes(k256(b"dact.nullifier"), "big") % P
ZERO = int.from_bytes(k256(b"surfermonkey"), "big") % P


def naive_root(leaves, depth):
    level = list(leaves) + [ZERO] * ((1 << depth) - len(leaves))
    for _ in range(depth):
        level = [hash2(level[i], level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def main(out: Path):
    rng = random.Random(20221016)
    out.mkdir(parents=True, exist_ok=True)

    pairs = [(0, 0), (1, 0), (0, 1), (1, 2), (P - 1, P - 1)]
    while len(pairs) < 20:
        pairs.append((rng.randrange(P), rng.randrange(P)))
    with open(out / "mimc_hash2.txt", "w") as f:
        for a, b in pairs:
            f.write(f"{hx(a)} {hx(b)} {hx(hash2(a, b))}\n")

    with open(out / "commitment.txt", "w") as f:
        for _ in range(10):
            s, n = rng.getrandbits(248), rng.getrandbits(248)
            f.write(f"{hx(s)} {hx(n)} {hx(sponge([s, n], K_COMMIT))} {hx(sponge([n], K_NULLIFIER))}\n")

    with open(out / "keccak256.txt", "w") as f:
        msgs = [b"", b"abc", b"surfermonkey", bytes(135), bytes(136), bytes(137), bytes(range(256)) * 2]
        for m in msgs:
            f.write(f"{m.hex() or '-'} {k256(m).hex()}\n")

    zeros = [ZERO]
    for _ in range(32):
        zeros.append(hash2(zeros[-1], zeros[-1]))
    with open(out / "zeros.txt", "w") as f:
        for z in zeros:
            f.write(hx(z) + "\n")

    depth = 4
    leaves = [rng.randrange(P) for _ in range(1 << depth)]
    with open(out / "merkle_d4_leaves.txt", "w") as f:
        for leaf in leaves:
            f.write(hx(leaf) + "\n")
    with open(out / "merkle_d4_roots.txt", "w") as f:
        for n in range(0, len(leaves) + 1):
            f.write(hx(naive_root(leaves[:n], depth)) + "\n")

    # Byte-layout goldens for the DACT data structures.
    payload = be32(1)
    od = k256(payload + be32(1002) + be32(3))
    tpc_zero = int.from_bytes(k256(bytes(32) + be32(1) + bytes(32)), "big") & ((1 << 73) - 1)
    caller, a1, a2 = b"\x11" * 20, b"\x22" * 20, b"\x33" * 20
    g = k256(caller + a1 + a2)
    tpc_g = int.from_bytes(k256(g + be32(7) + od), "big") & ((1 << 73) - 1)
    with open(out / "dact_layout.txt", "w") as f:
        f.write(f"obfuscate {od.hex()}\n")
        f.write(f"tpc_zero {hx(tpc_zero)}\n")
        f.write(f"global_hash {g.hex()}\n")
        f.write(f"tpc_g_v7 {hx(tpc_g)}\n")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures"))
