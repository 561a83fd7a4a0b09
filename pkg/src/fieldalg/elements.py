"""Exact scalar and lambda-polynomial arithmetic over a C[T]-module of generators.

Scalars are arbitrary-precision rationals (fractions.Fraction).  Module
elements are finite sums  sum_i c_i * T^{k_i} g_i  where each g_i is a
declared generator symbol; central generators are killed by T, so any
term T^k g with k >= 1 and g central is identically zero.  Lambda
polynomials are finite maps  degree -> module element, and the engine
also provides multivariate polynomials (PolyME) used by identity sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

Q = Fraction

QZERO = Q(0)
QONE = Q(1)


def rat(x) -> Q:
    """Coerce ints, strings like '1/2' and Fractions to an exact rational."""
    if isinstance(x, Q):
        return x
    if isinstance(x, int):
        return Q(x)
    if isinstance(x, str):
        return Q(x)
    raise TypeError(f"not an exact rational: {x!r}")


def binom(n: int, k: int) -> int:
    """Binomial coefficient C(n, k) for any integer n and k >= 0."""
    if k < 0:
        return 0
    num = 1
    den = 1
    for j in range(k):
        num *= n - j
        den *= j + 1
    assert num % den == 0
    return num // den


@dataclass(frozen=True)
class GeneratorSet:
    """Declared symbols of a C[T]-module: free generators plus T-killed centrals."""

    free: tuple[str, ...]
    central: tuple[str, ...] = ()
    weights: Mapping[str, Q] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for s in self.free + self.central:
            if s in seen:
                raise ValueError(f"duplicate generator symbol {s!r}")
            seen.add(s)

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.free + self.central

    def is_central(self, sym: str) -> bool:
        return sym in self.central

    def index(self, sym: str) -> int:
        return self.symbols.index(sym)

    def weight(self, sym: str) -> Q:
        if sym in self.central:
            return QZERO
        return rat(self.weights.get(sym, QZERO))


class ModuleElement:
    """Canonical-form element  sum c * T^k g  of the module over a GeneratorSet.

    Terms are stored as a dict (symbol, k) -> coefficient with zero terms
    dropped and central terms with k >= 1 annihilated.  Instances are
    treated as immutable.
    """

    __slots__ = ("gens", "terms", "_key")

    def __init__(self, gens: GeneratorSet, terms: Mapping[tuple[str, int], Q]):
        clean: dict[tuple[str, int], Q] = {}
        for (sym, k), c in terms.items():
            if sym not in gens.symbols:
                raise ValueError(f"undeclared symbol {sym!r}")
            if k < 0:
                raise ValueError("negative T-power")
            if k >= 1 and gens.is_central(sym):
                continue
            c = rat(c)
            if c != 0:
                clean[(sym, k)] = clean.get((sym, k), QZERO) + c
                if clean[(sym, k)] == 0:
                    del clean[(sym, k)]
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "terms", clean)
        key = tuple(sorted(clean.items(), key=lambda t: (gens.index(t[0][0]), t[0][1])))
        object.__setattr__(self, "_key", key)

    def __setattr__(self, *a):
        raise AttributeError("ModuleElement is immutable")

    @staticmethod
    def zero(gens: GeneratorSet) -> "ModuleElement":
        return ModuleElement(gens, {})

    @staticmethod
    def gen(gens: GeneratorSet, sym: str, k: int = 0, coeff=QONE) -> "ModuleElement":
        return ModuleElement(gens, {(sym, k): rat(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        t = dict(self.terms)
        for kk, c in other.terms.items():
            t[kk] = t.get(kk, QZERO) + c
        return ModuleElement(self.gens, t)

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        return self + other.scale(-1)

    def __neg__(self) -> "ModuleElement":
        return self.scale(-1)

    def scale(self, c) -> "ModuleElement":
        c = rat(c)
        if c == 0:
            return ModuleElement.zero(self.gens)
        return ModuleElement(self.gens, {k: v * c for k, v in self.terms.items()})

    def apply_T(self, power: int = 1) -> "ModuleElement":
        """T raises every T-power by `power` and annihilates central terms."""
        if power == 0:
            return self
        out = {}
        for (sym, k), c in self.terms.items():
            if not self.gens.is_central(sym):
                out[(sym, k + power)] = c
        return ModuleElement(self.gens, out)

    def weight_components(self) -> dict[Q, "ModuleElement"]:
        """Split into weight-homogeneous parts; T^k g has weight Delta_g + k."""
        parts: dict[Q, dict] = {}
        for (sym, k), c in self.terms.items():
            w = self.gens.weight(sym) + k
            parts.setdefault(w, {})[(sym, k)] = c
        return {w: ModuleElement(self.gens, t) for w, t in sorted(parts.items())}

    def __eq__(self, other):
        return isinstance(other, ModuleElement) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for (sym, k), c in self._key:
            bits.append(f"{c}*T^{k} {sym}")
        return " + ".join(bits)

    def __repr__(self):
        return f"ModuleElement({self})"


class LambdaPoly:
    """Polynomial in lambda with ModuleElement coefficients: sum lam^k m_k."""

    __slots__ = ("gens", "coeffs")

    def __init__(self, gens: GeneratorSet, coeffs: Mapping[int, ModuleElement]):
        clean = {}
        for d, m in coeffs.items():
            if d < 0:
                raise ValueError("negative lambda degree")
            if m:
                clean[d] = m
        self.gens = gens
        self.coeffs = clean

    @staticmethod
    def zero(gens: GeneratorSet) -> "LambdaPoly":
        return LambdaPoly(gens, {})

    @staticmethod
    def const(m: ModuleElement) -> "LambdaPoly":
        return LambdaPoly(m.gens, {0: m})

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def coeff(self, d: int) -> ModuleElement:
        return self.coeffs.get(d, ModuleElement.zero(self.gens))

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        c = dict(self.coeffs)
        for d, m in other.coeffs.items():
            c[d] = c[d] + m if d in c else m
        return LambdaPoly(self.gens, c)

    def __sub__(self, other: "LambdaPoly") -> "LambdaPoly":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "LambdaPoly":
        return LambdaPoly(self.gens, {d: m.scale(c) for d, m in self.coeffs.items()})

    def shift_lambda(self, j: int) -> "LambdaPoly":
        """Multiply by lam^j."""
        return LambdaPoly(self.gens, {d + j: m for d, m in self.coeffs.items()})

    def map_coeffs(self, f) -> "LambdaPoly":
        return LambdaPoly(self.gens, {d: f(m) for d, m in self.coeffs.items()})

    def eval_at_zero(self) -> ModuleElement:
        return self.coeff(0)

    def eval_at_T(self, sign: int) -> ModuleElement:
        """Substitute lam^k -> (sign*T)^k acting on the coefficient."""
        out = ModuleElement.zero(self.gens)
        for d, m in self.coeffs.items():
            out = out + m.apply_T(d).scale(Q(sign) ** d)
        return out

    def __eq__(self, other):
        return isinstance(other, LambdaPoly) and self.coeffs == other.coeffs

    def __str__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for d in sorted(self.coeffs):
            m = self.coeffs[d]
            bits.append(f"({m})" if d == 0 else f"λ^{d} ({m})")
        return " + ".join(bits)

    def __repr__(self):
        return f"LambdaPoly({self})"


def lambda_integrate(p: LambdaPoly, bounds: str):
    """Integrate a lambda polynomial over one of the module's standard bounds.

    bounds = "0->lam":  returns the LambdaPoly  int_0^lam p(mu) dmu.
    bounds = "-T->0" or "0->-T": returns the ModuleElement obtained by
    evaluating the antiderivative, with lam^k |-> (-T)^k acting on the
    coefficient (T annihilates centrals).
    """
    gens = p.gens
    anti = LambdaPoly(gens, {d + 1: m.scale(Q(1, d + 1)) for d, m in p.coeffs.items()})
    if bounds == "0->lam":
        return anti
    if bounds == "-T->0":
        # F(0) - F(-T); F has no constant term so F(0) = 0
        return -anti.eval_at_T(-1)
    if bounds == "0->-T":
        return anti.eval_at_T(-1)
    raise ValueError(f"unknown bounds {bounds!r}")


def lambda_substitute(p: LambdaPoly, rule: str) -> LambdaPoly:
    """Apply lam -> -lam - T  (rule="neg_shift") or e^{T d/dlam} (rule="taylor_T").

    In both cases the T-part of the substitution acts on the ModuleElement
    coefficients (raising T-powers, killing centrals).
    """
    gens = p.gens
    out: dict[int, ModuleElement] = {}

    def add(d, m):
        if m:
            out[d] = out[d] + m if d in out else m

    if rule == "neg_shift":
        # lam^k -> (-lam - T)^k = sum_j C(k,j) (-lam)^j (-T)^{k-j}
        for k, m in p.coeffs.items():
            for j in range(k + 1):
                c = Q(binom(k, j)) * Q(-1) ** j * Q(-1) ** (k - j)
                add(j, m.apply_T(k - j).scale(c))
    elif rule == "taylor_T":
        # lam^k -> (lam + T)^k
        for k, m in p.coeffs.items():
            for j in range(k + 1):
                add(j, m.apply_T(k - j).scale(binom(k, j)))
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return LambdaPoly(gens, out)


class PolyME:
    """Multivariate polynomial in formal even variables with ModuleElement coefficients.

    Exponent vectors are tuples of fixed length nvars; used to expand
    identities in several lambda-type variables at once.
    """

    __slots__ = ("gens", "nvars", "coeffs")

    def __init__(self, gens: GeneratorSet, nvars: int, coeffs: Mapping[tuple, ModuleElement]):
        self.gens = gens
        self.nvars = nvars
        self.coeffs = {e: m for e, m in coeffs.items() if m}

    @staticmethod
    def zero(gens: GeneratorSet, nvars: int) -> "PolyME":
        return PolyME(gens, nvars, {})

    @staticmethod
    def const(m: ModuleElement, nvars: int) -> "PolyME":
        return PolyME(m.gens, nvars, {(0,) * nvars: m})

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        c = dict(self.coeffs)
        for e, m in other.coeffs.items():
            c[e] = c[e] + m if e in c else m
        return PolyME(self.gens, self.nvars, c)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return PolyME(self.gens, self.nvars, {e: m.scale(c) for e, m in self.coeffs.items()})

    def shift(self, exp: tuple) -> "PolyME":
        return PolyME(
            self.gens,
            self.nvars,
            {tuple(a + b for a, b in zip(e, exp)): m for e, m in self.coeffs.items()},
        )

    def map_coeffs(self, f):
        return PolyME(self.gens, self.nvars, {e: f(m) for e, m in self.coeffs.items()})

    def integrate(self, var: int, upper: int) -> "PolyME":
        """int_0^{x_upper} (...) d x_var; the result no longer involves x_var."""
        out = PolyME.zero(self.gens, self.nvars)
        for e, m in self.coeffs.items():
            k = e[var]
            m2 = m.scale(Q(1, k + 1))
            # antiderivative evaluated at x_upper minus at 0
            e_hi = list(e)
            e_hi[var] = 0
            e_hi[upper] += k + 1
            out = out + PolyME(self.gens, self.nvars, {tuple(e_hi): m2})
        return out

    def eval_var_zero(self, var: int) -> "PolyME":
        return PolyME(
            self.gens, self.nvars, {e: m for e, m in self.coeffs.items() if e[var] == 0}
        )

    def __eq__(self, other):
        return (
            isinstance(other, PolyME)
            and self.nvars == other.nvars
            and self.coeffs == other.coeffs
        )

    def __str__(self):
        if not self.coeffs:
            return "0"
        names = "λμνκ"
        bits = []
        for e in sorted(self.coeffs):
            mono = "".join(
                f"{names[i]}^{p}" for i, p in enumerate(e) if p
            )
            body = f"({self.coeffs[e]})"
            bits.append(f"{mono} {body}" if mono else body)
        return " + ".join(bits)
