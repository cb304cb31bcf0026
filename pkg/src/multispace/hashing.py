"""Domain-separated hashing used by every other module.

All protocol hashes go through ``hash_fields``, which frames each field
with a fixed-width length prefix before concatenation.  Two different
field tuples can therefore never collide by concatenation ambiguity
(e.g. ``("ab", "c")`` vs ``("a", "bc")``).  The first field is always a
short ASCII tag naming the purpose of the hash ("label", "leaf",
"block", ...), so hashes from different subsystems live in disjoint
domains.
"""

import hashlib

DIGEST_BITS = 256
DIGEST_BYTES = DIGEST_BITS // 8

Field = bytes | int | str


def _sha256(data: bytes) -> bytes:
    # Single indirection point; tests hook this to count hash calls.
    return hashlib.sha256(data).digest()


def encode_field(field: Field) -> bytes:
    """Canonical byte encoding for a single field."""
    if isinstance(field, bytes):
        return field
    if isinstance(field, bool):  # bool is an int subclass; reject to be safe
        raise TypeError("bool is not a hashable field")
    if isinstance(field, int):
        if field < 0:
            raise ValueError("negative integers have no canonical encoding")
        return field.to_bytes(8, "big")
    if isinstance(field, str):
        return field.encode("utf-8")
    raise TypeError(f"unsupported field type: {type(field)!r}")


def hash_fields(*fields: Field) -> bytes:
    """Hash a tuple of fields, each framed as (8-byte length || bytes)."""
    parts = []
    for field in fields:
        encoded = encode_field(field)
        parts.append(len(encoded).to_bytes(8, "big"))
        parts.append(encoded)
    return _sha256(b"".join(parts))


def digest_to_int(digest: bytes) -> int:
    """Read a digest as a big-endian unsigned integer."""
    return int.from_bytes(digest, "big")


def hash_to_int(*fields: Field) -> int:
    return digest_to_int(hash_fields(*fields))
