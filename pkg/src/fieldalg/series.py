"""Window-truncated formal distribution arithmetic in one and two variables.

Coefficients outside a series' window are semantically unknown, not zero;
every operation narrows the window conservatively and records the
sub-window on which the result is provably exact.  An optional support
bound records directions in which the full (untruncated) series is known
to vanish, which is what lets products of expansions certify exactness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .elements import Q, QZERO, binom

INF = None  # open support bound


@dataclass(frozen=True)
class Window:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty window")

    def contains(self, e: int) -> bool:
        return self.lo <= e <= self.hi

    def intersect(self, other: "Window") -> Optional["Window"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Window(lo, hi) if lo <= hi else None

    def range(self):
        return range(self.lo, self.hi + 1)


class TruncSeries1:
    """One-variable Laurent series known on an exponent window.

    support_lo / support_hi, when not None, assert that the *true* series
    has zero coefficients below/above those exponents.
    """

    def __init__(self, var: str, window: Window, coeffs: Mapping[int, Q],
                 support_lo: Optional[int] = None, support_hi: Optional[int] = None):
        self.var = var
        self.window = window
        self.coeffs = {e: c for e, c in coeffs.items() if c != 0 and window.contains(e)}
        self.support_lo = support_lo
        self.support_hi = support_hi

    def known(self, e: int) -> bool:
        if self.window.contains(e):
            return True
        if self.support_lo is not None and e < self.support_lo:
            return True
        if self.support_hi is not None and e > self.support_hi:
            return True
        return False

    def coeff(self, e: int) -> Q:
        if not self.known(e):
            raise KeyError(f"coefficient at {e} not certified")
        return self.coeffs.get(e, QZERO)

    def __add__(self, other: "TruncSeries1") -> "TruncSeries1":
        if self.var != other.var:
            raise ValueError("variable mismatch")
        w = self.window.intersect(other.window)
        if w is None:
            raise ValueError("windows do not overlap")
        c = {e: self.coeffs.get(e, QZERO) + other.coeffs.get(e, QZERO) for e in w.range()}
        lo = None
        if self.support_lo is not None and other.support_lo is not None:
            lo = min(self.support_lo, other.support_lo)
        hi = None
        if self.support_hi is not None and other.support_hi is not None:
            hi = max(self.support_hi, other.support_hi)
        return TruncSeries1(self.var, w, c, lo, hi)

    def _entry_product(self, other: "TruncSeries1", e: int):
        """Value at exponent e of self*other, or None when not certifiable.

        Certification scans the factor with finite support; every split
        e = i + j with both factors potentially nonzero must have both
        coefficients known.
        """
        if self.support_lo is not None and self.support_hi is not None:
            lo, hi, flip = self.support_lo, self.support_hi, False
        elif other.support_lo is not None and other.support_hi is not None:
            lo, hi, flip = other.support_lo, other.support_hi, True
        else:
            return None
        tot = QZERO
        for i in range(lo, hi + 1):
            j = e - i
            a, b = (self, other) if not flip else (other, self)
            # here i indexes the finitely-supported factor a
            if a.known(i):
                ca = a.coeffs.get(i, QZERO)
                if ca == 0:
                    continue
                if not b.known(j):
                    return None
                tot += ca * b.coeffs.get(j, QZERO)
            else:
                # a unknown at i: only safe if b vanishes certifiably at j
                if b.known(j) and b.coeffs.get(j, QZERO) == 0:
                    continue
                return None
        return tot

    def __mul__(self, other: "TruncSeries1") -> "TruncSeries1":
        if self.var != other.var:
            raise ValueError("variable mismatch")
        lo = self.window.lo + other.window.lo
        hi = self.window.hi + other.window.hi
        out = {}
        exact = []
        for e in range(lo, hi + 1):
            v = self._entry_product(other, e)
            if v is not None:
                out[e] = v
                exact.append(e)
        if not exact:
            raise ValueError("product has empty exact window")
        w = Window(min(exact), max(exact))
        lo2 = (self.support_lo + other.support_lo) if (self.support_lo is not None and other.support_lo is not None) else None
        hi2 = (self.support_hi + other.support_hi) if (self.support_hi is not None and other.support_hi is not None) else None
        return TruncSeries1(self.var, w, {e: c for e, c in out.items() if w.contains(e)}, lo2, hi2)

    def equal_on(self, other: "TruncSeries1", window: Window) -> bool:
        return all(self.coeff(e) == other.coeff(e) for e in window.range())


@dataclass(frozen=True)
class Rect:
    x: Window
    z: Window

    def cells(self):
        for i in self.x.range():
            for j in self.z.range():
                yield (i, j)


class TruncSeries2:
    """Two-variable series with an expansion-domain tag.

    domain "x>z" means the series arose from expanding in the region
    |x| > |z| (i_{x,z}); "z>x" is the opposite expansion.  Binary
    operations require matching tags.
    """

    def __init__(self, xvar: str, zvar: str, domain: str, rect: Rect,
                 coeffs: Mapping[tuple[int, int], Q]):
        if domain not in ("x>z", "z>x"):
            raise ValueError("domain must be 'x>z' or 'z>x'")
        self.xvar = xvar
        self.zvar = zvar
        self.domain = domain
        self.rect = rect
        self.coeffs = {e: c for e, c in coeffs.items()
                       if c != 0 and rect.x.contains(e[0]) and rect.z.contains(e[1])}

    def coeff(self, i: int, j: int) -> Q:
        if not (self.rect.x.contains(i) and self.rect.z.contains(j)):
            raise KeyError(f"coefficient at {(i, j)} outside exact window")
        return self.coeffs.get((i, j), QZERO)

    def _binop(self, other, f):
        if (self.xvar, self.zvar) != (other.xvar, other.zvar):
            raise ValueError("variable mismatch")
        if self.domain != other.domain:
            raise ValueError("expansion-domain mismatch; re-expand first")
        wx = self.rect.x.intersect(other.rect.x)
        wz = self.rect.z.intersect(other.rect.z)
        if wx is None or wz is None:
            raise ValueError("windows do not overlap")
        r = Rect(wx, wz)
        return TruncSeries2(self.xvar, self.zvar, self.domain, r,
                            {e: f(self.coeffs.get(e, QZERO), other.coeffs.get(e, QZERO))
                             for e in r.cells()})

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def equal_on(self, other: "TruncSeries2", rect: Rect) -> bool:
        return all(self.coeff(i, j) == other.coeff(i, j) for i, j in rect.cells())


def expand_binomial(n: int, domain: str, rect: Rect,
                    xvar: str = "x", zvar: str = "z") -> TruncSeries2:
    """Expansion of (x - z)^n in the stated domain, restricted to a window.

    domain "x>z": sum_{j>=0} C(n,j) x^{n-j} (-z)^j; domain "z>x":
    sum_{j>=0} C(n,j) x^j (-z)^{n-j}.  Every window coefficient is exact.
    """
    coeffs: dict[tuple[int, int], Q] = {}
    if domain == "x>z":
        for j in range(max(0, rect.z.lo), rect.z.hi + 1):
            i = n - j
            if rect.x.contains(i):
                coeffs[(i, j)] = Q(binom(n, j)) * Q(-1) ** j
    elif domain == "z>x":
        for j in range(max(0, rect.x.lo), rect.x.hi + 1):
            i = n - j
            if rect.z.contains(i):
                coeffs[(j, i)] = Q(binom(n, j)) * Q(-1) ** (n - j)
    else:
        raise ValueError("domain must be 'x>z' or 'z>x'")
    return TruncSeries2(xvar, zvar, domain, rect, coeffs)


def delta_series(rect: Rect, xvar: str = "x", zvar: str = "z") -> TruncSeries2:
    """delta(x - z) = sum_j x^j z^{-j-1}, restricted to the window."""
    coeffs = {}
    for i in rect.x.range():
        j = -i - 1
        if rect.z.contains(j):
            coeffs[(i, j)] = Q(1)
    # the delta function is a domain-free distribution; tag it x>z by convention
    return TruncSeries2(xvar, zvar, "x>z", rect, coeffs)


def delta_z_derivative(j: int, rect: Rect, xvar: str = "x", zvar: str = "z") -> TruncSeries2:
    """(d/dz)^j delta(x - z) / j! on the window.

    Equals sum_m (-1)^j C(m+j, j) x^m z^{-m-j-1}; this is the
    coefficientwise oracle for the difference of the two expansions of
    (x-z)^{-j-1}.
    """
    coeffs = {}
    for i in rect.x.range():
        ze = -i - j - 1
        if rect.z.contains(ze):
            coeffs[(i, ze)] = Q(-1) ** j * Q(binom(i + j, j))
    return TruncSeries2(xvar, zvar, "x>z", rect, coeffs)
