"""Merkle commitments over node labels.

Leaf count is restricted to powers of two so the tree shape, and hence
every committed digest, is an unambiguous function of the labels (no
padding rule to pin down).  Leaves are hashed with a "leaf" tag and
interior nodes with a "node" tag, which prevents a second-preimage
confusion between the two layers.
"""

from .hashing import DIGEST_BYTES, hash_fields


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def leaf_digest(label: bytes) -> bytes:
    return hash_fields("leaf", label)


def node_digest(left: bytes, right: bytes) -> bytes:
    return hash_fields("node", left, right)


class MerkleTree:
    """Full binary Merkle tree over a power-of-two list of labels."""

    def __init__(self, labels: list[bytes]):
        if not is_power_of_two(len(labels)):
            raise ValueError("leaf count must be a power of two")
        level = [leaf_digest(label) for label in labels]
        self.levels = [level]
        while len(level) > 1:
            level = [node_digest(level[i], level[i + 1]) for i in range(0, len(level), 2)]
            self.levels.append(level)

    @property
    def root(self) -> bytes:
        return self.levels[-1][0]

    @property
    def size(self) -> int:
        return len(self.levels[0])

    @property
    def height(self) -> int:
        return len(self.levels) - 1

    @property
    def digest_count(self) -> int:
        return sum(len(level) for level in self.levels)

    @property
    def digest_bytes(self) -> int:
        return self.digest_count * DIGEST_BYTES

    def path(self, index: int) -> tuple[bytes, ...]:
        """Sibling digests from leaf level up to (excluding) the root."""
        if not 0 <= index < self.size:
            raise IndexError("leaf index out of range")
        siblings = []
        for level in self.levels[:-1]:
            siblings.append(level[index ^ 1])
            index >>= 1
        return tuple(siblings)


def verify_path(root: bytes, index: int, label: bytes, path: tuple[bytes, ...]) -> bool:
    """Check that ``label`` sits at ``index`` in the tree committed by ``root``."""
    if not 0 <= index < (1 << len(path)):
        return False
    digest = leaf_digest(label)
    for sibling in path:
        if index & 1:
            digest = node_digest(sibling, digest)
        else:
            digest = node_digest(digest, sibling)
        index >>= 1
    return digest == root
