"""End(V)-valued field arithmetic on truncated carriers.

A field is stored through its modes a_(n); columns are computed lazily
and cached, and every column is an FVec whose exactness flag records
whether the computation stayed inside the carrier at every intermediate
step.  Two kinds of *true* (untruncated) knowledge drive window
certification:

  * annihilation bounds: for n > max_mode(d) the mode a_(n) kills every
    true vector of degree d;
  * shift bounds (shift_dims): mode a_(n) moves degree d into degrees
    <= d + max(shift_dims) - n - 1.

For a homogeneous field of conformal dimension Delta both are the usual
graded statements with shift_dims = dims = {Delta}; parts like a(z)_+
keep the shift knowledge but get their own annihilation bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .carrier import Carrier, CarrierMismatch, FVec, Label, LinMap
from .elements import Q, binom

ModeWindow = tuple[int, int]

_NEG_INF = -(10**9)


class EndField:
    """A field a(z) = sum a_(n) z^{-n-1} on a carrier.

    column_fn(n, label) must be defined for every integer n; when dims is
    None, max_mode_fn(d) must be a true annihilation bound for every
    degree d >= 0 (not just the degrees present in the carrier).
    """

    __slots__ = ("carrier", "_column_fn", "_max_mode_fn", "dims", "shift_dims",
                 "name", "_cache", "_gmax")

    def __init__(
        self,
        carrier: Carrier,
        column_fn: Callable[[int, Label], FVec],
        max_mode_fn: Optional[Callable[[int], int]] = None,
        dims: Optional[frozenset] = None,
        shift_dims: Optional[frozenset] = None,
        name: str = "",
    ):
        if dims is None and max_mode_fn is None:
            raise ValueError("field needs dims or an explicit annihilation bound")
        self.carrier = carrier
        self._column_fn = column_fn
        self._max_mode_fn = max_mode_fn
        self.dims = dims
        self.shift_dims = dims if (shift_dims is None and dims is not None) else shift_dims
        self.name = name
        self._cache: dict[tuple[int, Label], FVec] = {}
        self._gmax: Optional[int] = None

    # -- truncation-safety bookkeeping ------------------------------------

    def max_mode(self, d: int) -> int:
        """True annihilation bound on degree-d inputs."""
        if self.dims is not None:
            return d + max(self.dims) - 1 if self.dims else _NEG_INF
        return self._max_mode_fn(d)

    def max_mode_up_to(self, r: int) -> int:
        """max of max_mode(d) over true degrees 0..r."""
        if r < 0:
            return _NEG_INF
        if self.dims is not None:
            return r + max(self.dims) - 1 if self.dims else _NEG_INF
        if self.carrier.whole:
            return self.global_max_mode()
        return max(self._max_mode_fn(d) for d in range(0, r + 1))

    def reach_bound(self, dmax: int, n_lo: int) -> int:
        """Max true degree of a_(n) x over deg x <= dmax, n >= n_lo."""
        if self.shift_dims is not None:
            if not self.shift_dims:
                return _NEG_INF
            return dmax + max(self.shift_dims) - n_lo - 1
        if self.carrier.whole:
            return self.carrier.max_degree
        raise ValueError(f"no shift bound available for field {self.name!r}")

    def global_max_mode(self) -> int:
        if self._gmax is None:
            self._gmax = max(self.max_mode(d) for d in self.carrier.degrees_present())
        return self._gmax

    # -- mode access -------------------------------------------------------

    def column(self, n: int, label: Label) -> FVec:
        if n > self.max_mode(self.carrier.degree(label)):
            return FVec.zero()
        key = (n, label)
        v = self._cache.get(key)
        if v is None:
            v = self._column_fn(n, label)
            self._cache[key] = v
        return v

    def apply(self, n: int, v: FVec) -> FVec:
        out = FVec.zero(v.exact)
        for l, c in v.coeffs.items():
            out = out + self.column(n, l).scale(c)
        return out

    def mode_map(self, n: int) -> LinMap:
        return LinMap(self.carrier, {l: self.column(n, l) for l in self.carrier.labels})

    # -- combinators ---------------------------------------------------------

    def __add__(self, other: "EndField") -> "EndField":
        if other.carrier is not self.carrier:
            raise CarrierMismatch("fields live on different carriers")
        dims = (
            self.dims | other.dims
            if (self.dims is not None and other.dims is not None)
            else None
        )
        shifts = (
            self.shift_dims | other.shift_dims
            if (self.shift_dims is not None and other.shift_dims is not None)
            else None
        )
        return EndField(
            self.carrier,
            lambda n, l: self.column(n, l) + other.column(n, l),
            lambda d: max(self.max_mode(d), other.max_mode(d)),
            dims=dims,
            shift_dims=shifts,
            name=f"({self.name}+{other.name})",
        )

    def scale(self, c) -> "EndField":
        return EndField(
            self.carrier,
            lambda n, l: self.column(n, l).scale(c),
            self._max_mode_fn,
            dims=self.dims,
            shift_dims=self.shift_dims,
            name=f"{c}*{self.name}",
        )

    def __sub__(self, other: "EndField") -> "EndField":
        return self + other.scale(-1)

    def derivative(self) -> "EndField":
        """d/dz: modes (da)_(n) = -n a_(n-1)."""
        up = lambda s: frozenset(x + 1 for x in s) if s is not None else None
        return EndField(
            self.carrier,
            lambda n, l: self.column(n - 1, l).scale(-n),
            (lambda d: self.max_mode(d) + 1) if self.dims is None else None,
            dims=up(self.dims),
            shift_dims=up(self.shift_dims),
            name=f"d({self.name})",
        )

    def plus_part(self) -> "EndField":
        """a(z)_+ = sum_{j <= -1} a_(j) z^{-j-1} (creation part)."""
        return EndField(
            self.carrier,
            lambda n, l: self.column(n, l) if n <= -1 else FVec.zero(),
            lambda d: -1,
            dims=None,
            shift_dims=self.shift_dims,
            name=f"{self.name}+",
        )

    def minus_part(self) -> "EndField":
        """a(z)_- = sum_{j >= 0} a_(j) z^{-j-1} (annihilation part)."""
        return EndField(
            self.carrier,
            lambda n, l: self.column(n, l) if n >= 0 else FVec.zero(),
            lambda d: self.max_mode(d),
            dims=None,
            shift_dims=self.shift_dims,
            name=f"{self.name}-",
        )


def identity_field(carrier: Carrier) -> EndField:
    return EndField(
        carrier,
        lambda n, l: FVec.basis(l) if n == -1 else FVec.zero(),
        dims=frozenset({0}),
        name="I",
    )


def zero_field(carrier: Carrier) -> EndField:
    return EndField(carrier, lambda n, l: FVec.zero(), dims=frozenset(), name="0")


def field_from_modes(
    carrier: Carrier,
    modes: dict[int, LinMap],
    shift_dims: Optional[frozenset] = None,
    name: str = "",
) -> EndField:
    """Field with explicitly known modes; all other modes are exactly zero."""
    hi = max(modes) if modes else _NEG_INF

    def col(n, l):
        m = modes.get(n)
        return m.column(l) if m is not None else FVec.zero()

    return EndField(carrier, col, lambda d: hi, dims=None, shift_dims=shift_dims, name=name)


def nth_product_fields(a: EndField, b: EndField, n: int) -> EndField:
    """The n-th product a(z)_(n) b(z).

    Modewise: (a_(n)b)_(m) = sum_{j>=0} (-1)^j C(n,j)
        [ a_(n-j) b_(m+j) - (-1)^n b_(n+m-j) a_(j) ],
    with the j-sums terminated by the operands' annihilation bounds.
    """
    if a.carrier is not b.carrier:
        raise CarrierMismatch("fields live on different carriers")
    carrier = a.carrier

    if a.dims is not None and b.dims is not None:
        dims = frozenset(da + db - n - 1 for da in a.dims for db in b.dims)
        maxf = None
    else:
        dims = None

        def maxf(d):
            B = b.max_mode_up_to(a.reach_bound(d, 0))
            return max(b.max_mode(d), a.max_mode(d) + B - n)

    shifts = (
        frozenset(sa + sb - n - 1 for sa in a.shift_dims for sb in b.shift_dims)
        if (a.shift_dims is not None and b.shift_dims is not None)
        else None
    )

    def col(m, l):
        d = carrier.degree(l)
        out = FVec.zero()
        jhi = b.max_mode(d) - m
        if n >= 0:
            jhi = min(jhi, n)
        for j in range(0, jhi + 1):
            c = binom(n, j) * (-1) ** j
            if c == 0:
                continue
            w = b.column(m + j, l)
            if w.is_zero() and w.exact:
                continue
            out = out + a.apply(n - j, w).scale(c)
        jhi2 = a.max_mode(d)
        if n >= 0:
            jhi2 = min(jhi2, n)
        s = -1 if n % 2 == 0 else 1
        for j in range(0, jhi2 + 1):
            c = binom(n, j) * (-1) ** j
            if c == 0:
                continue
            w = a.column(j, l)
            if w.is_zero() and w.exact:
                continue
            out = out + b.apply(n + m - j, w).scale(c * s)
        return out

    return EndField(
        carrier,
        col,
        maxf,
        dims=dims,
        shift_dims=shifts,
        name=f"({a.name})_({n})({b.name})",
    )


def normal_order(a: EndField, b: EndField) -> EndField:
    """:a(z) b(z): = a(z)_+ b(z) + b(z) a(z)_-.

    Computed from its own defining split; agrees with
    nth_product_fields(a, b, -1) on the common exact window.
    """
    if a.carrier is not b.carrier:
        raise CarrierMismatch("fields live on different carriers")
    carrier = a.carrier

    if a.dims is not None and b.dims is not None:
        dims = frozenset(da + db for da in a.dims for db in b.dims)
        maxf = None
    else:
        dims = None

        def maxf(d):
            B = b.max_mode_up_to(a.reach_bound(d, 0))
            return max(b.max_mode(d), a.max_mode(d) + B + 1)

    shifts = (
        frozenset(sa + sb for sa in a.shift_dims for sb in b.shift_dims)
        if (a.shift_dims is not None and b.shift_dims is not None)
        else None
    )

    def col(m, l):
        d = carrier.degree(l)
        out = FVec.zero()
        for j in range(m - 1 - b.max_mode(d), 0):
            w = b.column(m - 1 - j, l)
            if w.is_zero() and w.exact:
                continue
            out = out + a.apply(j, w)
        for j in range(0, a.max_mode(d) + 1):
            w = a.column(j, l)
            if w.is_zero() and w.exact:
                continue
            out = out + b.apply(m - 1 - j, w)
        return out

    return EndField(
        carrier, col, maxf, dims=dims, shift_dims=shifts, name=f":{a.name}{b.name}:"
    )


# -- free boson fixture ------------------------------------------------------


def _partitions_up_to(E: int):
    """All partitions (weakly decreasing tuples) with sum <= E."""
    out = [()]

    def rec(prefix, remaining, mx):
        for p in range(min(remaining, mx), 0, -1):
            w = prefix + (p,)
            out.append(w)
            rec(w, remaining - p, p)

    rec((), E, E)
    return sorted(out, key=lambda t: (sum(t), t))


def build_free_boson(E: int) -> tuple[Carrier, EndField]:
    """Fock truncation at energy E with [a_(m), a_(n)] = m delta_{m,-n}.

    Basis labels are energy partitions: (k1 >= ... >= kr) stands for
    a_{-k1} ... a_{-kr} |0>.  a_(n) for n > 0 annihilates (removing one
    letter n with coefficient n * multiplicity), a_(0) = 0, a_(-k)
    creates, overflowing the cutoff when the energy would exceed E.
    """
    if E < 0:
        raise ValueError("cutoff must be non-negative")
    labels = _partitions_up_to(E)
    carrier = Carrier(
        labels=tuple(labels),
        degrees=tuple(sum(l) for l in labels),
        vacuum=(),
        degreewise_complete=True,
    )

    def col(n: int, l: tuple) -> FVec:
        if n == 0:
            return FVec.zero()
        if n > 0:
            mult = l.count(n)
            if mult == 0:
                return FVec.zero()
            out = list(l)
            out.remove(n)
            return FVec({tuple(out): Q(n) * mult})
        k = -n
        w = tuple(sorted(l + (k,), reverse=True))
        if sum(w) > E:
            return FVec({}, exact=False)
        return FVec({w: Q(1)})

    a = EndField(carrier, col, dims=frozenset({1}), name="a")
    return carrier, a


# -- bivariate commutator machinery -------------------------------------------


@dataclass
class VecBiSeries:
    """A bivariate mode-indexed series of flagged vectors.

    Entry (m, k) is the coefficient of z^{-m-1} w^{-k-1}.  Entries are
    stored on [m_lo, m_hi] x [k_lo, k_hi]; beyond m_hi or k_hi the true
    value is certified zero, below m_lo / k_lo it is unknown.
    """

    entries: dict[tuple[int, int], FVec]
    m_lo: int
    m_hi: int
    k_lo: int
    k_hi: int

    def lookup(self, m: int, k: int) -> FVec:
        if m > self.m_hi or k > self.k_hi:
            return FVec.zero()
        if m < self.m_lo or k < self.k_lo:
            return FVec({}, exact=False)
        return self.entries.get((m, k), FVec.zero())

    def zw_pow_entry(self, N: int, m: int, k: int) -> FVec:
        """Entry (m, k) of (z - w)^N * self."""
        out = FVec.zero()
        for j in range(N + 1):
            c = binom(N, j) * (-1) ** j
            out = out + self.lookup(m + N - j, k + j).scale(c)
        return out

    def sub(self, other: "VecBiSeries") -> "VecBiSeries":
        m_lo = max(self.m_lo, other.m_lo)
        k_lo = max(self.k_lo, other.k_lo)
        m_hi = max(self.m_hi, other.m_hi)
        k_hi = max(self.k_hi, other.k_hi)
        ent = {}
        for m in range(m_lo, m_hi + 1):
            for k in range(k_lo, k_hi + 1):
                v = self.lookup(m, k) - other.lookup(m, k)
                if not (v.is_zero() and v.exact):
                    ent[(m, k)] = v
        return VecBiSeries(ent, m_lo, m_hi, k_lo, k_hi)


def commutator_on_vector(
    a: EndField, b: EndField, v: FVec, m_lo: int, k_lo: int
) -> VecBiSeries:
    """[a(z), b(w)] v with certified upper zero-bounds."""
    degs = [a.carrier.degree(l) for l in v.coeffs] or [0]
    dmax = max(degs)
    K1 = max(b.max_mode(dmax), b.max_mode_up_to(a.reach_bound(dmax, m_lo)))
    M1 = max(a.max_mode(dmax), a.max_mode_up_to(b.reach_bound(dmax, k_lo)))
    entries = {}
    bcols = {k: b.apply(k, v) for k in range(k_lo, K1 + 1)}
    acols = {m: a.apply(m, v) for m in range(m_lo, M1 + 1)}
    for m in range(m_lo, M1 + 1):
        for k in range(k_lo, K1 + 1):
            e = a.apply(m, bcols[k]) - b.apply(k, acols[m])
            if not (e.is_zero() and e.exact):
                entries[(m, k)] = e
    return VecBiSeries(entries, m_lo, M1, k_lo, K1)


@dataclass
class LocalityResult:
    kind: str  # "local" | "weak" | "on_vector"
    order: Optional[int]  # least certified order, None if not found up to n_max
    n_max: int
    witness: Optional[dict] = None
    excluded: int = 0  # window cells excluded for inexactness
    checked: int = 0

    @property
    def found(self) -> bool:
        return self.order is not None


def _scan_locality(series_list, N_max: int, window) -> LocalityResult:
    (m_lo, m_hi), (k_lo, k_hi) = window
    witness = None
    for N in range(0, N_max + 1):
        ok = True
        excluded = 0
        checked = 0
        witness = None
        for C, tag in series_list:
            for m in range(m_lo, m_hi + 1):
                for k in range(k_lo, k_hi + 1):
                    e = C.zw_pow_entry(N, m, k)
                    if not e.exact:
                        excluded += 1
                        continue
                    checked += 1
                    if not e.is_zero():
                        ok = False
                        witness = {"m": m, "k": k, "column": tag, "N": N}
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            return LocalityResult("local", N, N_max, None, excluded, checked)
    return LocalityResult("local", None, N_max, witness, excluded, checked)


def locality_order(
    a: EndField,
    b: EndField,
    mode: str = "local",
    N_max: int = 12,
    window=None,
    on_vector: Optional[FVec] = None,
    labels: Optional[Iterable[Label]] = None,
) -> LocalityResult:
    """Least locality order of the pair (a, b) on certified windows.

    mode "local": least N with (z-w)^N [a(z), b(w)] = 0;
    mode "weak": least N with a(z)_(n) b(z) = 0 for N <= n <= N_max;
    mode "on_vector": as "local" applied to the given vector.
    A certified nonzero coefficient is a genuine disproof; inexact cells
    only shrink the reported window.
    """
    if a.carrier is not b.carrier:
        raise CarrierMismatch("fields live on different carriers")
    carrier = a.carrier
    E = carrier.max_degree
    if window is None:
        window = ((-(E + 2), E + 2), (-(E + 2), E + 2))
    if mode == "weak":
        return _weak_locality(a, b, N_max, window, labels)
    if mode == "on_vector":
        if on_vector is None:
            raise ValueError("on_vector mode requires a vector")
        C = commutator_on_vector(a, b, on_vector, window[0][0], window[1][0])
        res = _scan_locality([(C, "v")], N_max, window)
        res.kind = "on_vector"
        return res
    series = []
    for l in labels if labels is not None else carrier.labels:
        series.append(
            (commutator_on_vector(a, b, FVec.basis(l), window[0][0], window[1][0]), str(l))
        )
    return _scan_locality(series, N_max, window)


def field_zero_on_window(f: EndField, m_window: ModeWindow, labels=None):
    """(certified_zero, witness, excluded, checked) for f's modes on a window."""
    carrier = f.carrier
    excluded = checked = 0
    for l in labels if labels is not None else carrier.labels:
        d = carrier.degree(l)
        hi = min(m_window[1], f.max_mode(d))
        for m in range(m_window[0], hi + 1):
            v = f.column(m, l)
            if not v.exact:
                excluded += 1
                continue
            checked += 1
            if not v.is_zero():
                return False, {"mode": m, "column": str(l)}, excluded, checked
    return True, None, excluded, checked


def _weak_locality(a, b, N_max, window, labels) -> LocalityResult:
    order = None
    witness = None
    excluded = checked = 0
    for n in range(N_max, -1, -1):
        prod = nth_product_fields(a, b, n)
        z, w, ex, ch = field_zero_on_window(prod, window[0], labels)
        excluded += ex
        checked += ch
        if z:
            order = n
        else:
            witness = {"n": n, **(w or {})}
            break
    return LocalityResult("weak", order, N_max, witness, excluded, checked)


def commutator_expansion(
    a: EndField, b: EndField, N_max: int = 12, window=None, labels=None
) -> tuple[list[tuple[int, EndField]], LocalityResult]:
    """Delta-derivative coefficients of a certified-local pair.

    Returns [(j, a_(j)b)] for j below the locality order, after asserting
    the expansion [a(z), b(w)] = sum_j (a_(j)b)(w) d_w^j delta(z-w)/j!
    coefficientwise on the certified window, i.e. the commutator formula
    [a_(m), b_(k)] = sum_j C(m, j) (a_(j)b)_(m+k-j).
    """
    res = locality_order(a, b, "local", N_max, window, labels=labels)
    if not res.found:
        raise ValueError(f"pair not certified local up to {N_max}: {res.witness}")
    N = res.order
    coeffs = [(j, nth_product_fields(a, b, j)) for j in range(N)]
    carrier = a.carrier
    E = carrier.max_degree
    if window is None:
        window = ((-(E + 2), E + 2), (-(E + 2), E + 2))
    (m_lo, m_hi), (k_lo, k_hi) = window
    for l in labels if labels is not None else carrier.labels:
        v = FVec.basis(l)
        C = commutator_on_vector(a, b, v, m_lo, k_lo)
        for m in range(m_lo, m_hi + 1):
            for k in range(k_lo, k_hi + 1):
                lhs = C.lookup(m, k)
                if not lhs.exact:
                    continue
                rhs = FVec.zero()
                for j, cj in coeffs:
                    c = binom(m, j)
                    if c == 0:
                        continue
                    rhs = rhs + cj.apply(m + k - j, v).scale(c)
                if not rhs.exact:
                    continue
                if not lhs.same_value(rhs):
                    raise AssertionError(
                        f"delta expansion mismatch at (m={m}, k={k}), column {l}"
                    )
    return coeffs, res
