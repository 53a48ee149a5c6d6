"""Wiring skeletons of 2-qubit gate networks on three wires.

A topology is a string over {1,2,3}; each label names the wire a gate does
NOT touch.  Two topologies need the same search effort when they are
related by

* time reversal (reading the string backwards),
* relabeling the wires by a permutation the database's state space allows,
* sliding a swap out of one gate through its neighbours: a gate on wires
  {a, b} can absorb SWAP(a, b), and pushing that swap along the string
  relabels every in-between gate by the transposition fixing the untouched
  wire, until the swap is absorbed by the next gate on the same pair (or
  falls off the end, which amounts to a wire relabeling and is only allowed
  when that permutation is preserved).

Strings containing four or more consecutive equal labels are redundant
(three gates on one pair already exhaust the pair's unitaries) and are
pruned during generation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

__all__ = [
    "Topology",
    "canonical_topology",
    "enumerate_topologies",
    "topology_orbit",
    "FULL_S3",
]

# permutations given as mappings on labels {1,2,3}; identity first
FULL_S3 = (
    (1, 2, 3),
    (1, 3, 2),
    (2, 1, 3),
    (2, 3, 1),
    (3, 1, 2),
    (3, 2, 1),
)

# transposition that fixes label t (1-based): swaps the other two labels
_SIGMA = {1: {1: 1, 2: 3, 3: 2}, 2: {1: 3, 2: 2, 3: 1}, 3: {1: 2, 2: 1, 3: 3}}


@dataclass(frozen=True)
class Topology:
    slots: tuple

    def __post_init__(self):
        if any(s not in (1, 2, 3) for s in self.slots):
            raise ValueError("labels must be in {1,2,3}")

    def __len__(self):
        return len(self.slots)


def _relabel(s: tuple, perm) -> tuple:
    return tuple(perm[x - 1] for x in s)


def _push_swap_variants(s: tuple, preserved):
    """All strings reachable by sliding one swap out of one gate."""
    n = len(s)
    preserved_set = {p for p in preserved}
    for i in range(n):
        c = s[i]
        sigma = _SIGMA[c]
        # push to the right
        out = list(s)
        absorbed = False
        for j in range(i + 1, n):
            if s[j] == c:
                absorbed = True
                break
            out[j] = sigma[s[j]]
        if absorbed:
            yield tuple(out)
        else:
            # swap falls off the right end: legal iff the transposition
            # fixing c is an allowed wire relabeling
            if _SIGMA[c] in ({k: v for k, v in zip((1, 2, 3), p)} for p in preserved_set):
                yield tuple(out)
        # push to the left
        out = list(s)
        absorbed = False
        for j in range(i - 1, -1, -1):
            if s[j] == c:
                absorbed = True
                break
            out[j] = sigma[s[j]]
        if absorbed:
            yield tuple(out)
        else:
            if _SIGMA[c] in ({k: v for k, v in zip((1, 2, 3), p)} for p in preserved_set):
                yield tuple(out)


def topology_orbit(t: Topology, preserved_perms=FULL_S3) -> set:
    """Closure of one string under all the reductions (fixed length)."""
    seen = {t.slots}
    frontier = [t.slots]
    while frontier:
        s = frontier.pop()
        candidates = [tuple(reversed(s))]
        candidates += [_relabel(s, p) for p in preserved_perms]
        candidates += list(_push_swap_variants(s, preserved_perms))
        for c in candidates:
            if c not in seen:
                seen.add(c)
                frontier.append(c)
    return seen


def canonical_topology(t: Topology, preserved_perms=FULL_S3) -> Topology:
    orbit = topology_orbit(t, preserved_perms)
    # a push can temporarily create a redundant run; the representative is
    # the smallest orbit member without one
    clean = [s for s in orbit if not _has_long_run(s)]
    return Topology(min(clean if clean else orbit))


def _has_long_run(s: tuple) -> bool:
    run = 1
    for a, b in zip(s, s[1:]):
        run = run + 1 if a == b else 1
        if run > 3:
            return True
    return False


def enumerate_topologies(l: int, preserved_perms=FULL_S3):
    """One representative per equivalence class of length-l strings.

    Returned in lexicographic order of the canonical representative.
    """
    if l == 0:
        return [Topology(())]
    reps = set()
    for s in product((1, 2, 3), repeat=l):
        if _has_long_run(s):
            continue
        reps.add(canonical_topology(Topology(s), preserved_perms).slots)
    return [Topology(s) for s in sorted(reps)]
