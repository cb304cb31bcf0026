"""Single-chain block rules: challenges, weights, fork choice, verification.

A block's challenge is derived from the proof carried by the block
``window`` heights below it, so a miner cannot grind challenges without
re-mining history.  Block weight is (u / 2^256)^(1/S) for u the digest
of the block's opening proof and S the miner's space: the probability
that a miner's draw is the round maximum equals its fraction of total
space.  Chain competition picks the branch with the greatest summed
weight.

Weights are computed in the log domain, because the natural-log of a
256-bit digest is cheap to obtain to ~50 bits of relative precision
from its top 64 bits, and the argmax/compare operations only need the
exponent.  Values are exponentiated (and summed with ``math.fsum``)
only when a branch total is required.
"""

import math
import struct
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterable

from . import poc
from .hashing import DIGEST_BITS, hash_fields
from .poc import Challenge, OpeningProof
from .signer import Keypair, sign, verify_signature

if TYPE_CHECKING:  # commitment type lives with the multi-chain layer
    from .multichain import ResourceCommitment

_LN2 = math.log(2.0)

GENESIS_KEYPAIR = Keypair.from_seed(b"genesis")


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolParams:
    """Chain-level verification constants (a view of the scenario config)."""

    window: int  # challenge and market look-back depth, also genesis length
    proof_challenges: int = 30  # indices opened per proof
    graph_degree: int = poc.DEFAULT_DEGREE
    weight_log_tolerance: float = 1e-9  # on the weight exponent
    tx_per_round: int | None = None  # count-only record rule; None disables


@dataclass(frozen=True)
class Block:
    chain: int
    height: int
    miner: bytes
    records: tuple[bytes, ...]
    prev_hash: bytes
    proof: OpeningProof
    shared_proof: OpeningProof | None
    weight: float
    commitment: "ResourceCommitment | None"
    signature: bytes = b""

    def canonical_bytes(self) -> bytes:
        parts = [
            self.chain.to_bytes(8, "big"),
            self.height.to_bytes(8, "big"),
            self.miner,
            self.prev_hash,
            len(self.records).to_bytes(8, "big"),
        ]
        for record in self.records:
            parts.append(len(record).to_bytes(8, "big"))
            parts.append(record)
        proof_bytes = self.proof.canonical_bytes()
        parts.append(len(proof_bytes).to_bytes(8, "big"))
        parts.append(proof_bytes)
        shared = self.shared_proof.canonical_bytes() if self.shared_proof else b""
        parts.append(len(shared).to_bytes(8, "big"))
        parts.append(shared)
        parts.append(struct.pack("<d", self.weight))
        com = self.commitment.canonical_bytes() if self.commitment else b""
        parts.append(len(com).to_bytes(8, "big"))
        parts.append(com)
        return b"".join(parts)

    def block_hash(self) -> bytes:
        return hash_fields("block", self.canonical_bytes())


def proof_digest(proof: OpeningProof) -> bytes:
    """The digest u of a proof; feeds both challenges and block weight."""
    return hash_fields("proof", proof.canonical_bytes())


def expand_challenge(proof: OpeningProof, space: int, count: int) -> Challenge:
    """Challenge indices for the next block, from the previous proof.

    A single index is the proof digest reduced mod the prover's space;
    more indices append a counter to the hashed material.
    """
    if space < 1:
        raise ChainError("space must be positive")
    if count == 1:
        indices = (int.from_bytes(proof_digest(proof), "big") % space,)
    else:
        tau = proof.canonical_bytes()
        indices = tuple(
            int.from_bytes(hash_fields("proof", tau, j), "big") % space for j in range(count)
        )
    return Challenge(indices=indices)


def derive_challenge(branch: list[Block], height: int, window: int, space: int, count: int = 1) -> Challenge:
    """Challenge for the block at ``height``, read ``window`` blocks back."""
    if height < window:
        raise ChainError(f"height {height} is inside the genesis window {window}")
    anchor = branch[height - window]
    return expand_challenge(anchor.proof, space, count)


def log_weight_from_int(u: int, space: float) -> float:
    """log of (u / 2^256)^(1/space); -inf sentinel for u = 0."""
    if space <= 0:
        raise ChainError("space must be positive")
    if u == 0:
        return -math.inf
    bits = u.bit_length()
    if bits <= 64:
        ln_u = math.log(u)
    else:
        # top 64 bits carry far more precision than the float mantissa
        ln_u = math.log(u >> (bits - 64)) + (bits - 64) * _LN2
    return (ln_u - DIGEST_BITS * _LN2) / space


def log_block_weight(proof: OpeningProof, space: float) -> float:
    return log_weight_from_int(int.from_bytes(proof_digest(proof), "big"), space)


def block_weight(proof: OpeningProof, space: float) -> float:
    """Block weight in (0, 1]; 0.0 only for the impossible all-zero digest."""
    return math.exp(log_block_weight(proof, space))


def chain_weight(branch: Iterable[Block]) -> float:
    """Total branch weight: compensated sum of the block weights."""
    return math.fsum(block.weight for block in branch)


@dataclass
class ChainView:
    """Append-only block store for one chain; one writer, many readers."""

    chain: int
    blocks: dict[bytes, Block] = field(default_factory=dict)
    children: dict[bytes, list[bytes]] = field(default_factory=dict)
    genesis_hashes: list[bytes] = field(default_factory=list)

    def add(self, block: Block) -> None:
        digest = block.block_hash()
        if digest in self.blocks:
            return
        if block.height > 0 and block.prev_hash not in self.blocks:
            raise ChainError("predecessor not in view")
        self.blocks[digest] = block
        self.children.setdefault(block.prev_hash, []).append(digest)

    def tips(self) -> list[bytes]:
        return [h for h in self.blocks if not self.children.get(h)]

    def branch_to(self, tip_hash: bytes) -> list[Block]:
        branch = []
        cursor = tip_hash
        while cursor in self.blocks:
            block = self.blocks[cursor]
            branch.append(block)
            if block.height == 0:
                break
            cursor = block.prev_hash
        branch.reverse()
        if not branch or branch[0].height != 0:
            raise ChainError("branch does not reach genesis")
        return branch

    def height_of(self, block_hash: bytes) -> int:
        return self.blocks[block_hash].height


def fork_choice(view: ChainView) -> list[Block]:
    """Root-to-tip branch with the greatest total weight.

    Exact weight ties go to the lexicographically smaller tip hash so
    every node, whatever its insertion order, selects the same branch.
    """
    best: tuple[float, bytes] | None = None
    for tip in view.tips():
        total = chain_weight(view.branch_to(tip))
        if best is None or total > best[0] or (total == best[0] and tip < best[1]):
            best = (total, tip)
    if best is None:
        raise ChainError("view is empty")
    return view.branch_to(best[1])


def build_genesis(chain: int, window: int, space: int, degree: int = poc.DEFAULT_DEGREE) -> list[Block]:
    """Deterministic start-up blocks so challenge derivation is defined.

    Every chain begins with ``window`` blocks mined from a reserved
    per-chain nonce; later blocks read their challenges from this
    prefix.  Start-up blocks are trust anchors and skip verification.
    """
    nonce = hash_fields("genesis", chain)
    commitment, state = poc.init(space, nonce, degree)
    blocks: list[Block] = []
    prev_hash = hash_fields("genesis-prev", chain)
    for h in range(window):
        seed = int.from_bytes(hash_fields("genesis-seed", chain, h), "big")
        challenge = Challenge(indices=(seed % space,))
        proof = poc.open(state, challenge)
        block = Block(
            chain=chain,
            height=h,
            miner=GENESIS_KEYPAIR.public,
            records=(),
            prev_hash=prev_hash,
            proof=proof,
            shared_proof=None,
            weight=block_weight(proof, space),
            commitment=None,
        )
        block = replace(block, signature=sign(GENESIS_KEYPAIR, block.block_hash()))
        blocks.append(block)
        prev_hash = block.block_hash()
    return blocks


def new_chain(chain: int, window: int, genesis_space: int, degree: int = poc.DEFAULT_DEGREE) -> ChainView:
    view = ChainView(chain=chain)
    for block in build_genesis(chain, window, genesis_space, degree):
        view.blocks[block.block_hash()] = block
        view.children.setdefault(block.prev_hash, []).append(block.block_hash())
        view.genesis_hashes.append(block.block_hash())
    return view


def weights_match(declared: float, recomputed_log: float, tolerance: float) -> bool:
    if declared <= 0.0 or declared > 1.0:
        return False
    declared_log = math.log(declared)
    return abs(declared_log - recomputed_log) <= tolerance * max(1.0, abs(recomputed_log))


def verify_block(
    view: ChainView,
    block: Block,
    params: ProtocolParams,
    weight_space: float | None = None,
) -> tuple[bool, str | None]:
    """Single-chain verification; returns (accepted, reject reason).

    Checks signature, linkage, challenge recomputation, the opening
    proof against the miner's committed root for this chain, and that
    the declared weight recomputes from the proof.  ``weight_space``
    overrides the weight exponent's denominator (the multi-chain layer
    passes the capped effective space); the proof itself is always
    checked at the miner's raw committed size.
    """
    if block.chain != view.chain:
        return False, "wrong-chain"
    if not verify_signature(block.miner, block.block_hash(), block.signature):
        return False, "bad-signature"
    if block.prev_hash not in view.blocks:
        return False, "unknown-predecessor"
    parent = view.blocks[block.prev_hash]
    if block.height != parent.height + 1:
        return False, "bad-height"
    if block.height < params.window:
        return False, "genesis-window"
    if params.tx_per_round is not None and len(block.records) != params.tx_per_round:
        return False, "bad-records"
    if block.commitment is None:
        return False, "missing-commitment"
    com = block.commitment
    if view.chain >= len(com.sizes) or com.sizes[view.chain] < 1:
        return False, "missing-commitment"
    space = com.sizes[view.chain]
    branch = view.branch_to(block.prev_hash)
    challenge = derive_challenge(branch, block.height, params.window, space, params.proof_challenges)
    if tuple(e.index for e in block.proof.entries) != challenge.indices:
        return False, "challenge-mismatch"
    root_commitment = com.space_commitment(view.chain, params.graph_degree)
    if not poc.verify(root_commitment, challenge, block.proof):
        return False, "bad-chain-proof"
    exponent_space = weight_space if weight_space is not None else float(space)
    if exponent_space <= 0:
        return False, "weight-mismatch"
    recomputed = log_block_weight(block.proof, exponent_space)
    if not weights_match(block.weight, recomputed, params.weight_log_tolerance):
        return False, "weight-mismatch"
    return True, None
