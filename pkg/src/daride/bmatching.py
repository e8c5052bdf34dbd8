"""Capacitated bipartite matching with Hall-deficiency witnesses.

Left items are matched to at most one right node each; right node ``r``
accepts at most ``cap[r]`` items.  Augmenting paths are searched in index
order so results are reproducible.
"""

from __future__ import annotations

import sys
from typing import Sequence


def b_matching(adj: Sequence[Sequence[int]], cap: Sequence[int]) -> list[int | None]:
    """Maximum b-matching; returns the right node of each left item (or None)."""
    n_right = len(cap)
    match: list[int | None] = [None] * len(adj)
    holders: list[list[int]] = [[] for _ in range(n_right)]
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10 * (len(adj) + n_right) + 1000))
    try:
        for u in range(len(adj)):
            _augment(u, adj, cap, match, holders, set())
    finally:
        sys.setrecursionlimit(limit)
    return match


def _augment(u, adj, cap, match, holders, seen) -> bool:
    for r in sorted(adj[u]):
        if r in seen:
            continue
        seen.add(r)
        if len(holders[r]) < cap[r]:
            match[u] = r
            holders[r].append(u)
            return True
        for w in list(holders[r]):
            if _augment(w, adj, cap, match, holders, seen):
                holders[r].remove(w)
                match[u] = r
                holders[r].append(u)
                return True
    return False


def deficiency_set(adj: Sequence[Sequence[int]], cap: Sequence[int], match: Sequence[int | None]) -> tuple[set[int], set[int]]:
    """Left/right sets reachable by alternating paths from unmatched left items.

    For a maximum matching the left set ``L`` maximises
    ``|L| - sum(cap[r] for r in N(L))`` and the right set is exactly ``N(L)``.
    """
    holders: list[list[int]] = [[] for _ in range(len(cap))]
    for u, r in enumerate(match):
        if r is not None:
            holders[r].append(u)
    left = {u for u, r in enumerate(match) if r is None}
    right: set[int] = set()
    stack = sorted(left)
    while stack:
        u = stack.pop()
        for r in adj[u]:
            if r in right:
                continue
            right.add(r)
            for w in holders[r]:
                if w not in left:
                    left.add(w)
                    stack.append(w)
    return left, right


def matching_size(match: Sequence[int | None]) -> int:
    return sum(r is not None for r in match)
