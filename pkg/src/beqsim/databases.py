"""Databases modulo bit permutation and complementation.

A database is a set of basis indices.  Two databases need the same search
circuitry whenever one maps onto the other by permuting bit positions and
complementing a subset of bits, so we canonicalize by the lexicographically
smallest image over all n! * 2^n symmetry operations.

Bit positions are counted little-endian here (bit 0 is the least
significant); this is the only module that talks about bit positions of
database members directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

__all__ = [
    "Database",
    "SymmetryOp",
    "apply_symmetry",
    "canonical_form",
    "equivalence_classes",
    "stabilizer_perms",
]


@dataclass(frozen=True)
class Database:
    n: int
    members: tuple

    def __post_init__(self):
        if not self.members:
            raise ValueError("database is empty")
        if list(self.members) != sorted(set(self.members)):
            raise ValueError("members must be sorted and distinct")
        if self.members[-1] >= 2 ** self.n:
            raise ValueError("member outside the index space")


@dataclass(frozen=True)
class SymmetryOp:
    perm: tuple  # perm[i] = destination position of source bit i
    mask: int

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("perm is not a bijection")


def _permute_bits(value: int, perm: tuple) -> int:
    out = 0
    for src, dst in enumerate(perm):
        out |= ((value >> src) & 1) << dst
    return out


def apply_symmetry(db: Database, op: SymmetryOp) -> Database:
    members = sorted(_permute_bits(v, op.perm) ^ op.mask for v in db.members)
    return Database(db.n, tuple(members))


def all_ops(n: int):
    for perm in permutations(range(n)):
        for mask in range(2 ** n):
            yield SymmetryOp(perm, mask)


def canonical_form(db: Database) -> Database:
    return min((apply_symmetry(db, op) for op in all_ops(db.n)),
               key=lambda d: d.members)


def equivalence_classes(n: int, N: int):
    """Partition all N-member databases over n bits by canonical form.

    Returns a list of (representative, members) with representatives in
    lexicographic order; members are the full orbits.
    """
    classes = {}
    for combo in combinations(range(2 ** n), N):
        db = Database(n, combo)
        rep = canonical_form(db).members
        classes.setdefault(rep, []).append(combo)
    return sorted(classes.items())


def stabilizer_perms(db: Database):
    """Bit permutations (no complementation) fixing the database as a set."""
    found = []
    for perm in permutations(range(db.n)):
        if apply_symmetry(db, SymmetryOp(perm, 0)).members == db.members:
            found.append(perm)
    return found
