"""Maximal contracting piece sets and the 2-matching on their complement."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from daride.bmatching import b_matching, deficiency_set, matching_size


@dataclass(frozen=True)
class RebalanceResult:
    S: frozenset[int]
    gamma_S: frozenset[int]
    pi: dict[int, int]  # piece outside S -> depot outside gamma_S


def neighbourhood(adj: Sequence[Sequence[int]], pieces) -> set[int]:
    return {f for p in pieces for f in adj[p]}


def max_contracting_set(adj: Sequence[Sequence[int]], n_depots: int) -> RebalanceResult:
    """Inclusion-maximal ``S`` with ``|N(S)| <= |S| / 2`` plus a 2-matching of the rest.

    ``S`` is grown by sets ``T`` of the residual graph whose 2-deficiency
    ``|T| - 2|N'(T)|`` is at least ``-(|S| - 2|N(S)|)``; the best such ``T``
    through a given piece is found by flooding that piece with copies in a
    capacity-2 matching.  When no piece admits one, no strict superset of
    ``S`` is contracting, and Hall's condition guarantees the 2-matching.
    """
    n_pieces = len(adj)
    S: set[int] = set()
    G: set[int] = set()
    while True:
        slack = len(S) - 2 * len(G)
        rest = [p for p in range(n_pieces) if p not in S]
        grown = False
        for p in rest:
            copies = 2 * (n_depots - len(G)) + 1
            left = [x for x in rest if x != p] + [p] * (copies + 1)
            ladj = [[f for f in adj[x] if f not in G] for x in left]
            match = b_matching(ladj, [0 if f in G else 2 for f in range(n_depots)])
            best = len(left) - matching_size(match) - copies
            if best >= -slack:
                reach, _ = deficiency_set(ladj, [0 if f in G else 2 for f in range(n_depots)], match)
                T = {left[i] for i in reach}
                S |= T
                G |= neighbourhood(adj, T)
                grown = True
                break
        if not grown:
            break

    rest = [p for p in range(n_pieces) if p not in S]
    ladj = [[f for f in adj[p] if f not in G] for p in rest]
    match = b_matching(ladj, [0 if f in G else 2 for f in range(n_depots)])
    if matching_size(match) != len(rest):
        raise AssertionError("no 2-matching on the complement of a maximal contracting set")
    pi = {p: f for p, f in zip(rest, match)}
    return RebalanceResult(frozenset(S), frozenset(G), pi)


def is_contracting(adj: Sequence[Sequence[int]], S) -> bool:
    return 2 * len(neighbourhood(adj, S)) <= len(S)
