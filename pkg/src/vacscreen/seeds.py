"""Deterministic child-seed derivation.

Every randomized procedure in the toolkit takes one root seed; children are
derived by hashing the root together with a path of string labels:

    child = sha256("<root>/<label>/<label>/...") mod 2**63

The scheme is splittable (distinct paths give independent streams), stable
across platforms and processes, and documented so experiments can be
reproduced bit-for-bit.
"""

from __future__ import annotations

import hashlib


def child_seed(root: int, *path: object) -> int:
    """Derive a deterministic child seed from ``root`` and a label path."""
    material = "/".join([str(int(root))] + [str(p) for p in path])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)
