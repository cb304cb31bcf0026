"""Deterministic stand-in for a public-key infrastructure.

The consensus layer only needs signatures to bind blocks and resource
commitments to an identity inside a closed simulation, so this module
implements a hash-based mock: anyone holding the public key can
recompute (and thus forge) a signature.  Signature forgery is not part
of the threat model exercised here; do not reuse this outside the
simulator.
"""

from dataclasses import dataclass

from .hashing import hash_fields

PK_BYTES = 32


@dataclass(frozen=True)
class Keypair:
    secret: bytes
    public: bytes

    @classmethod
    def from_seed(cls, seed: bytes | str) -> "Keypair":
        secret = hash_fields("keyseed", seed)
        return cls(secret=secret, public=hash_fields("pk", secret))


def sign(keypair: Keypair, message_digest: bytes) -> bytes:
    return hash_fields("sig", keypair.public, message_digest)


def verify_signature(public: bytes, message_digest: bytes, signature: bytes) -> bool:
    return signature == hash_fields("sig", public, message_digest)
