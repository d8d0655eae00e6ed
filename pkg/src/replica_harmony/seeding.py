"""Deterministic derivation of independent random streams."""

import hashlib


def derive_seed(*parts: object) -> int:
    """Map a tuple of labels to a stable 64-bit seed.

    Every random stream in a simulation (topology generation, workload
    generation, each per-datum optimizer run, requester draws) is seeded by
    hashing the root seed together with distinguishing labels. Streams with
    different labels are independent, and adding or skipping draws in one
    stream never perturbs another. The digest is platform-independent.
    """
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
