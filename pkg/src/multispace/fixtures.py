"""Binary fixture files for labeled graphs, plus JSON proof encoding.

Fixture layout (little-endian):

    u64  graph size S
    u32  degree
    u32  label bits (always 256)
    u32  nonce length
    ...  nonce bytes
    S *  32-byte labels, in index order
    32-byte commitment root

The binary format keeps golden labelings exact; proofs and challenges
cross the CLI boundary as JSON with hex-encoded digests.
"""

import struct
from pathlib import Path

from .hashing import DIGEST_BITS, DIGEST_BYTES
from .merkle import MerkleTree
from .poc import (
    OpeningProof,
    ParameterError,
    ParentOpening,
    PebblingGraph,
    ProofEntry,
    SecretState,
    SpaceCommitment,
)

_HEADER = struct.Struct("<QIII")


def write_fixture(path: str | Path, commitment: SpaceCommitment, state: SecretState) -> None:
    blob = bytearray()
    blob += _HEADER.pack(commitment.size, commitment.degree, DIGEST_BITS, len(commitment.nonce))
    blob += commitment.nonce
    for label in state.labels:
        blob += label
    blob += commitment.root
    Path(path).write_bytes(bytes(blob))


def read_fixture(path: str | Path) -> tuple[SpaceCommitment, SecretState]:
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise ParameterError("fixture file truncated")
    size, degree, label_bits, nonce_len = _HEADER.unpack_from(blob, 0)
    if label_bits != DIGEST_BITS:
        raise ParameterError(f"unsupported label width {label_bits}")
    offset = _HEADER.size
    nonce = blob[offset : offset + nonce_len]
    offset += nonce_len
    expected = offset + size * DIGEST_BYTES + DIGEST_BYTES
    if len(blob) != expected:
        raise ParameterError("fixture length does not match header")
    labels = tuple(
        blob[offset + i * DIGEST_BYTES : offset + (i + 1) * DIGEST_BYTES] for i in range(size)
    )
    root = blob[expected - DIGEST_BYTES :]
    graph = PebblingGraph(size=size, degree=degree, nonce=nonce)
    tree = MerkleTree(list(labels))
    commitment = SpaceCommitment(root=root, size=size, nonce=nonce, degree=degree)
    state = SecretState(graph=graph, labels=labels, tree=tree)
    return commitment, state


def fixture_consistent(commitment: SpaceCommitment, state: SecretState) -> bool:
    """True iff the stored root matches a tree rebuilt from the labels."""
    return state.tree.root == commitment.root


def proof_to_dict(proof: OpeningProof) -> dict:
    return {
        "entries": [
            {
                "index": entry.index,
                "label": entry.label.hex(),
                "path": [d.hex() for d in entry.path],
                "parents": [
                    {"label": p.label.hex(), "path": [d.hex() for d in p.path]}
                    for p in entry.parents
                ],
            }
            for entry in proof.entries
        ]
    }


def proof_from_dict(data: dict) -> OpeningProof:
    entries = tuple(
        ProofEntry(
            index=int(entry["index"]),
            label=bytes.fromhex(entry["label"]),
            path=tuple(bytes.fromhex(d) for d in entry["path"]),
            parents=tuple(
                ParentOpening(
                    label=bytes.fromhex(p["label"]),
                    path=tuple(bytes.fromhex(d) for d in p["path"]),
                )
                for p in entry["parents"]
            ),
        )
        for entry in data["entries"]
    )
    return OpeningProof(entries=entries)
