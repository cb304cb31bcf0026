"""Pebbling-graph proof of space.

A prover dedicates storage by labeling every node of a deterministic
DAG (each label hashes the node's parent labels) and committing to the
label list with a Merkle root.  Holding the labels is the "space"; a
verifier audits it by sampling node indices and demanding each sampled
label, its parent labels, and Merkle inclusion paths for all of them.

The scheme is the triple ``init`` / ``open`` / ``verify``.  Everything
is a pure function of its inputs: distinct commitments can be built
concurrently, and a built ``SecretState`` is immutable, so concurrent
opens against one state are safe.

The DAG itself is a pseudo-random graph: node ``i`` draws
``min(degree, i)`` distinct parents below it by rejection sampling on a
counter-mode hash of the nonce.  This gives a deterministic,
nonce-personalized topology that is adequate for protocol-level testing
(no pebbling-hardness guarantee is claimed for it).
"""

from dataclasses import dataclass

from .hashing import DIGEST_BYTES, hash_fields, hash_to_int
from .merkle import MerkleTree, is_power_of_two, verify_path

DEFAULT_DEGREE = 4
MAX_GRAPH_SIZE = 1 << 32


class ParameterError(ValueError):
    """Rejected graph parameters (size, degree, nonce)."""


class ChallengeError(ValueError):
    """Challenge indices outside the committed graph."""


def build_parents(nonce: bytes, degree: int, index: int) -> tuple[int, ...]:
    """Parent set of ``index``: min(degree, index) distinct indices below it.

    Rejection-samples candidates from hash(nonce, index, counter) until
    enough distinct parents accumulate; returns them sorted ascending.
    Total and deterministic for fixed inputs.
    """
    if degree < 1:
        raise ParameterError("degree must be at least 1")
    if index < 0:
        raise ParameterError("node index must be nonnegative")
    want = min(degree, index)
    parents: set[int] = set()
    counter = 0
    while len(parents) < want:
        candidate = hash_to_int("parent", nonce, index, counter) % index
        parents.add(candidate)
        counter += 1
    return tuple(sorted(parents))


@dataclass(frozen=True)
class PebblingGraph:
    """Deterministic DAG over vertices 0..size-1, edges only low-to-high."""

    size: int
    degree: int
    nonce: bytes

    def parents(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise ParameterError("node index outside graph")
        return build_parents(self.nonce, self.degree, index)


@dataclass(frozen=True)
class SpaceCommitment:
    """Public side of a space proof: Merkle root plus graph parameters."""

    root: bytes
    size: int
    nonce: bytes
    degree: int = DEFAULT_DEGREE


@dataclass(frozen=True)
class SecretState:
    """Prover side: all labels and the full Merkle tree over them."""

    graph: PebblingGraph
    labels: tuple[bytes, ...]
    tree: MerkleTree

    @property
    def label_bytes(self) -> int:
        return len(self.labels) * DIGEST_BYTES

    @property
    def tree_digests(self) -> int:
        return self.tree.digest_count


@dataclass(frozen=True)
class Challenge:
    """Node indices a prover must open; duplicates are allowed."""

    indices: tuple[int, ...]

    def __post_init__(self):
        if any(i < 0 for i in self.indices):
            raise ChallengeError("negative challenge index")


@dataclass(frozen=True)
class ParentOpening:
    label: bytes
    path: tuple[bytes, ...]


@dataclass(frozen=True)
class ProofEntry:
    index: int
    label: bytes
    path: tuple[bytes, ...]
    parents: tuple[ParentOpening, ...]


@dataclass(frozen=True)
class OpeningProof:
    """Per challenged index: its label, parent labels, inclusion paths."""

    entries: tuple[ProofEntry, ...]

    def canonical_bytes(self) -> bytes:
        parts = [len(self.entries).to_bytes(8, "big")]
        for entry in self.entries:
            parts.append(entry.index.to_bytes(8, "big"))
            parts.append(entry.label)
            parts.append(len(entry.path).to_bytes(8, "big"))
            parts.extend(entry.path)
            parts.append(len(entry.parents).to_bytes(8, "big"))
            for parent in entry.parents:
                parts.append(parent.label)
                parts.extend(parent.path)
        return b"".join(parts)


def node_label(nonce: bytes, index: int, parent_labels: tuple[bytes, ...]) -> bytes:
    return hash_fields("label", nonce, index, *parent_labels)


def init(size: int, nonce: bytes, degree: int = DEFAULT_DEGREE) -> tuple[SpaceCommitment, SecretState]:
    """Label the whole graph and commit; returns (public, secret)."""
    if size < 1 or size > MAX_GRAPH_SIZE:
        raise ParameterError(f"graph size must be in [1, {MAX_GRAPH_SIZE}]")
    if not is_power_of_two(size):
        raise ParameterError("graph size must be a power of two")
    if degree < 1:
        raise ParameterError("degree must be at least 1")
    graph = PebblingGraph(size=size, degree=degree, nonce=nonce)
    labels: list[bytes] = []
    for i in range(size):
        parent_labels = tuple(labels[p] for p in graph.parents(i))
        labels.append(node_label(nonce, i, parent_labels))
    tree = MerkleTree(labels)
    commitment = SpaceCommitment(root=tree.root, size=size, nonce=nonce, degree=degree)
    state = SecretState(graph=graph, labels=tuple(labels), tree=tree)
    return commitment, state


def open(state: SecretState, challenge: Challenge) -> OpeningProof:  # noqa: A001
    """Open the challenged indices against the committed tree."""
    size = state.graph.size
    entries = []
    for index in challenge.indices:
        if not 0 <= index < size:
            raise ChallengeError(f"challenge index {index} outside graph of size {size}")
        parents = tuple(
            ParentOpening(label=state.labels[p], path=state.tree.path(p))
            for p in state.graph.parents(index)
        )
        entries.append(
            ProofEntry(
                index=index,
                label=state.labels[index],
                path=state.tree.path(index),
                parents=parents,
            )
        )
    return OpeningProof(entries=tuple(entries))


def verify(commitment: SpaceCommitment, challenge: Challenge, proof: OpeningProof) -> bool:
    """Accept iff the proof opens exactly the challenge against the root.

    Checks, per challenged index: the entry targets that index, every
    inclusion path authenticates against the commitment root, and the
    node label recomputes from its parent labels.  Malformed structure
    rejects instead of raising.  Cost is O(q * degree * log size) hash
    calls for q challenged indices.
    """
    try:
        if len(proof.entries) != len(challenge.indices):
            return False
        height = commitment.size.bit_length() - 1  # size is a power of two
        for wanted, entry in zip(challenge.indices, proof.entries):
            if entry.index != wanted:
                return False
            if not 0 <= entry.index < commitment.size:
                return False
            if len(entry.path) != height:
                return False
            if not verify_path(commitment.root, entry.index, entry.label, entry.path):
                return False
            parent_indices = build_parents(commitment.nonce, commitment.degree, entry.index)
            if len(entry.parents) != len(parent_indices):
                return False
            for p_index, opening in zip(parent_indices, entry.parents):
                if len(opening.path) != height:
                    return False
                if not verify_path(commitment.root, p_index, opening.label, opening.path):
                    return False
            parent_labels = tuple(opening.label for opening in entry.parents)
            if entry.label != node_label(commitment.nonce, entry.index, parent_labels):
                return False
        return True
    except (TypeError, AttributeError, IndexError):
        return False


def init_audit_challenge(commitment: SpaceCommitment, count: int) -> Challenge:
    """Non-interactive audit challenges derived from the commitment root.

    Stands in for a verifier-supplied challenge at initialization time:
    indices come from hash(root, j), so the prover cannot grind them
    before fixing the root.
    """
    indices = tuple(
        hash_to_int("audit", commitment.root, j) % commitment.size for j in range(count)
    )
    return Challenge(indices=indices)
