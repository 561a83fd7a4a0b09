"""Truncated graded carriers, flagged vectors and exact linear maps.

A Carrier is a finite ordered basis with non-negative integer degrees and
a distinguished vacuum label.  It truncates an implicit infinite space;
any computation whose result involves a label outside the basis is marked
inexact rather than silently projected.  FVec is a sparse rational vector
carrying an exactness flag; all flag propagation is conservative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Optional

from .elements import Q, rat

Label = Hashable


class CarrierMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Carrier:
    """Finite graded basis with a distinguished vacuum.

    degreewise_complete: every true vector of a degree present in the basis
    is a combination of basis labels of that degree (false e.g. for
    tensor-degree truncations of a tensor algebra).  whole: the carrier is
    the entire space, so nothing can ever escape it (finite-dimensional
    algebras viewed as state spaces).
    """

    labels: tuple[Label, ...]
    degrees: tuple[int, ...]
    vacuum: Label
    degreewise_complete: bool = True
    whole: bool = False

    def __post_init__(self):
        if len(self.labels) != len(self.degrees):
            raise ValueError("labels/degrees length mismatch")
        if self.vacuum not in self.labels:
            raise ValueError("vacuum label missing from basis")
        if any(d < 0 for d in self.degrees):
            raise ValueError("negative degree")
        object.__setattr__(self, "_index", {l: i for i, l in enumerate(self.labels)})
        by_deg: dict[int, list] = {}
        for l, d in zip(self.labels, self.degrees):
            by_deg.setdefault(d, []).append(l)
        object.__setattr__(self, "_by_degree", {d: tuple(ls) for d, ls in by_deg.items()})

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: Label) -> int:
        return self._index[label]

    def __contains__(self, label: Label) -> bool:
        return label in self._index

    def degree(self, label: Label) -> int:
        return self.degrees[self._index[label]]

    @property
    def max_degree(self) -> int:
        return max(self.degrees) if self.degrees else 0

    def by_degree(self, d: int) -> tuple[Label, ...]:
        return self._by_degree.get(d, ())

    def degrees_present(self) -> tuple[int, ...]:
        return tuple(sorted(self._by_degree))

    def sort_key(self, label: Label) -> int:
        return self._index[label]


class FVec:
    """Sparse exact vector with a certification flag.

    exact=True means the stored coefficients are the complete true result;
    exact=False means some computation step escaped the carrier (or used
    an uncertified input), so the value must not be asserted against.
    """

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs: Mapping[Label, Q] | None = None, exact: bool = True):
        self.coeffs = {l: c for l, c in (coeffs or {}).items() if c != 0}
        self.exact = exact

    @staticmethod
    def zero(exact: bool = True) -> "FVec":
        return FVec({}, exact)

    @staticmethod
    def basis(label: Label) -> "FVec":
        return FVec({label: Q(1)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "FVec") -> "FVec":
        c = dict(self.coeffs)
        for l, v in other.coeffs.items():
            c[l] = c.get(l, Q(0)) + v
            if c[l] == 0:
                del c[l]
        return FVec(c, self.exact and other.exact)

    def __sub__(self, other: "FVec") -> "FVec":
        return self + other.scale(-1)

    def scale(self, c) -> "FVec":
        c = rat(c)
        if c == 0:
            return FVec({}, self.exact)
        return FVec({l: v * c for l, v in self.coeffs.items()}, self.exact)

    def get(self, label: Label) -> Q:
        return self.coeffs.get(label, Q(0))

    def __eq__(self, other):
        return (
            isinstance(other, FVec)
            and self.coeffs == other.coeffs
            and self.exact == other.exact
        )

    def same_value(self, other: "FVec") -> bool:
        return self.coeffs == other.coeffs

    def render(self, carrier: Carrier) -> str:
        if not self.coeffs:
            s = "0"
        else:
            items = sorted(self.coeffs.items(), key=lambda t: carrier.sort_key(t[0]))
            s = " + ".join(f"{c}*{l}" for l, c in items)
        return s if self.exact else s + " [inexact]"

    def __repr__(self):
        flag = "" if self.exact else ", inexact"
        return f"FVec({self.coeffs}{flag})"


def vsum(vs: Iterable[FVec]) -> FVec:
    out = FVec.zero()
    for v in vs:
        out = out + v
    return out


class LinMap:
    """Column-sparse linear map on a carrier; absent columns are exact zero."""

    __slots__ = ("carrier", "columns")

    def __init__(self, carrier: Carrier, columns: Mapping[Label, FVec] | None = None):
        self.carrier = carrier
        self.columns = {}
        for l, v in (columns or {}).items():
            if v.is_zero() and v.exact:
                continue
            self.columns[l] = v

    @staticmethod
    def identity(carrier: Carrier) -> "LinMap":
        return LinMap(carrier, {l: FVec.basis(l) for l in carrier.labels})

    @staticmethod
    def from_fn(carrier: Carrier, fn: Callable[[Label], FVec]) -> "LinMap":
        return LinMap(carrier, {l: fn(l) for l in carrier.labels})

    def column(self, label: Label) -> FVec:
        return self.columns.get(label, FVec.zero())

    def apply(self, v: FVec) -> FVec:
        out = FVec.zero(v.exact)
        for l, c in v.coeffs.items():
            out = out + self.column(l).scale(c)
        return out

    def compose(self, inner: "LinMap") -> "LinMap":
        """self o inner."""
        return LinMap(self.carrier, {l: self.apply(col) for l, col in inner.columns.items()})

    def __add__(self, other: "LinMap") -> "LinMap":
        labels = set(self.columns) | set(other.columns)
        return LinMap(self.carrier, {l: self.column(l) + other.column(l) for l in labels})

    def scale(self, c) -> "LinMap":
        return LinMap(self.carrier, {l: v.scale(c) for l, v in self.columns.items()})

    def commutator(self, other: "LinMap") -> "LinMap":
        return self.compose(other) + other.compose(self).scale(-1)

    def certified_zero(self) -> bool:
        return all(v.is_zero() and v.exact for v in self.columns.values())
