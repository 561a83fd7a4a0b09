"""Exact rational linear algebra: echelon spans, nullspaces, quotients.

Everything uses deterministic pivoting (the minimal key of each row in a
fixed key order) so that reports are reproducible across runs and thread
counts.  Since every row's pivot is its minimal key, reducing a vector
against rows in increasing pivot order eliminates all pivot coordinates
in one pass.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Optional, Sequence

from .elements import Q


class LinearSpan:
    """Incremental echelon basis over sparse dict-vectors with orderable keys.

    Tracks how each echelon row decomposes over the inserted generators so
    that membership queries can return coordinates in the original list.
    """

    def __init__(self, key_order=None):
        self.rows: dict[Hashable, dict] = {}  # pivot -> row (pivot coeff 1)
        self.combos: dict[Hashable, dict[int, Q]] = {}  # pivot -> generator combo
        self.n_gens = 0
        self._key = key_order or (lambda k: k)

    @staticmethod
    def _norm(d: dict) -> dict:
        return {k: Q(v) for k, v in d.items() if v != 0}

    def _reduce(self, vec: dict):
        """Reduce vec against the rows (in pivot order), tracking combos."""
        vec = self._norm(vec)
        combo: dict[int, Q] = {}
        for piv in sorted(self.rows, key=self._key):
            c = vec.get(piv)
            if not c:
                continue
            for k, v in self.rows[piv].items():
                vec[k] = vec.get(k, Q(0)) - c * v
                if vec[k] == 0:
                    del vec[k]
            for g, v in self.combos[piv].items():
                combo[g] = combo.get(g, Q(0)) - c * v
                if combo[g] == 0:
                    del combo[g]
        return vec, combo

    def add(self, vec: dict) -> bool:
        """Insert a generator; returns True if it enlarged the span."""
        idx = self.n_gens
        self.n_gens += 1
        red, combo = self._reduce(vec)
        combo[idx] = combo.get(idx, Q(0)) + 1
        if not red:
            return False
        piv = min(red, key=self._key)
        c = red[piv]
        self.rows[piv] = {k: v / c for k, v in red.items()}
        self.combos[piv] = {g: v / c for g, v in combo.items()}
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains(self, vec: dict) -> bool:
        red, _ = self._reduce(vec)
        return not red

    def coordinates(self, vec: dict) -> Optional[list[Q]]:
        """Coefficients over the inserted generators, or None if outside."""
        red, combo = self._reduce(vec)
        if red:
            return None
        return [-combo.get(g, Q(0)) for g in range(self.n_gens)]

    def residual(self, vec: dict) -> dict:
        """Canonical representative modulo the span (no pivot support)."""
        return self._reduce(vec)[0]


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Q]]:
    """Kernel basis of the matrix given by dense rows."""
    mat = [[Q(x) for x in r] for r in rows]
    pivots: dict[int, list[Q]] = {}
    for r in mat:
        r = r[:]
        changed = True
        while changed:
            changed = False
            for c in sorted(pivots):
                if r[c] != 0:
                    f = r[c]
                    r = [x - f * y for x, y in zip(r, pivots[c])]
                    changed = True
        lead = next((i for i, x in enumerate(r) if x != 0), None)
        if lead is None:
            continue
        r = [x / r[lead] for x in r]
        pivots[lead] = r
    basis = []
    free = [c for c in range(ncols) if c not in pivots]
    for f in free:
        v = [Q(0)] * ncols
        v[f] = Q(1)
        for c in sorted(pivots, reverse=True):
            prow = pivots[c]
            v[c] = -sum((prow[j] * v[j] for j in range(c + 1, ncols)), Q(0))
        basis.append(v)
    return basis


def span_dim(vectors: Iterable[dict], key_order=None) -> int:
    s = LinearSpan(key_order)
    for v in vectors:
        s.add(v)
    return s.dim


def spans_equal(v1: Iterable[dict], v2: Iterable[dict], key_order=None) -> bool:
    a = LinearSpan(key_order)
    for v in v1:
        a.add(v)
    b = LinearSpan(key_order)
    for v in v2:
        b.add(v)
    if a.dim != b.dim:
        return False
    return all(a.contains(dict(r)) for r in b.rows.values())


class Quotient:
    """Ambient space (spanned by keys) modulo the span of ideal vectors.

    reduce() maps a vector to its canonical representative, supported on
    the non-pivot (coset) keys.
    """

    def __init__(self, ideal_vectors: Iterable[dict], ambient_keys: Sequence, key_order=None):
        self._key = key_order or (lambda k: k)
        self.span = LinearSpan(key_order)
        for v in ideal_vectors:
            self.span.add(v)
        piv = set(self.span.rows)
        self.coset_keys = [k for k in sorted(ambient_keys, key=self._key) if k not in piv]

    @property
    def dim(self) -> int:
        return len(self.coset_keys)

    def reduce(self, vec: dict) -> dict:
        return self.span.residual(vec)

    def contains(self, vec: dict) -> bool:
        return self.span.contains(vec)
