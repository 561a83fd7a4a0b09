"""Presentation-level lambda-bracket calculus and exact axiom verification.

A conformal presentation is a list of free generators with weights, a
list of central (T-killed) generators, and a bracket table g_lam h.
Brackets of arbitrary module elements follow from the sesquilinearity
rules (T a)_lam b = -lam a_lam b and a_lam (T b) = (lam + T)(a_lam b);
central generators bracket to zero on both sides.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial
from typing import Mapping

from .elements import (
    GeneratorSet,
    LambdaPoly,
    ModuleElement,
    PolyME,
    Q,
    binom,
    lambda_integrate,
    lambda_substitute,
    rat,
)
from .report import FAIL, INCONCLUSIVE, PASS, CheckReport


@dataclass(frozen=True)
class ConformalPresentation:
    gens: GeneratorSet
    table: Mapping[tuple[str, str], LambdaPoly]
    skew: bool = False  # when True, only pairs (i, j) with i <= j are stored

    def __post_init__(self):
        for (a, b), p in self.table.items():
            for s in (a, b):
                if s not in self.gens.symbols:
                    raise ValueError(f"bracket table uses undeclared symbol {s!r}")
            if self.gens.is_central(a) or self.gens.is_central(b):
                if not p.is_zero():
                    raise ValueError(f"central generator in nonzero bracket ({a},{b})")

    def gen_element(self, sym: str, k: int = 0) -> ModuleElement:
        return ModuleElement.gen(self.gens, sym, k)

    def base_bracket(self, a: str, b: str) -> LambdaPoly:
        """Bracket of two plain generators, deriving the lower half when skew."""
        if self.gens.is_central(a) or self.gens.is_central(b):
            return LambdaPoly.zero(self.gens)
        if (a, b) in self.table:
            return self.table[(a, b)]
        if self.skew and (b, a) in self.table:
            return lambda_substitute(self.table[(b, a)], "neg_shift").scale(-1)
        return LambdaPoly.zero(self.gens)

    def is_graded(self) -> bool:
        """Each bracket term at lam-degree k must have weight Da + Db - k - 1."""
        for a, b in itertools.product(self.gens.symbols, repeat=2):
            target = self.gens.weight(a) + self.gens.weight(b)
            p = self.base_bracket(a, b)
            for k, m in p.coeffs.items():
                for (sym, t), _ in m.terms.items():
                    if self.gens.weight(sym) + t != target - k - 1:
                        return False
        return True


def _power_of_form(form: tuple[int, ...], r: int, nvars: int) -> dict[tuple, Q]:
    """Expansion of (sum_i form[i] * v_i)^r as exponent-vector -> coefficient."""
    out: dict[tuple, Q] = {(0,) * nvars: Q(1)}
    for _ in range(r):
        nxt: dict[tuple, Q] = {}
        for e, c in out.items():
            for i, ci in enumerate(form):
                if ci == 0:
                    continue
                e2 = list(e)
                e2[i] += 1
                key = tuple(e2)
                nxt[key] = nxt.get(key, Q(0)) + c * ci
        out = nxt
    return out


def bracket_form(
    pres: ConformalPresentation,
    x: ModuleElement,
    y: ModuleElement,
    form: tuple[int, ...],
    nvars: int,
) -> PolyME:
    """x_{nu} y as a PolyME, where nu = sum_i form[i] * v_i is T-free.

    Bilinear over the terms of x and y, using
    (T^p g)_{nu} (T^q h) = (-nu)^p (nu + T)^q (g_{nu} h).
    """
    gens = pres.gens
    out = PolyME.zero(gens, nvars)
    for (gx, p), cx in x.terms.items():
        for (gy, q), cy in y.terms.items():
            base = pres.base_bracket(gx, gy)
            if base.is_zero():
                continue
            c0 = cx * cy * Q(-1) ** p
            # (nu + T)^q with T acting on the ModuleElement coefficient
            for s in range(q + 1):
                cb = c0 * binom(q, s)
                for r, m in base.coeffs.items():
                    m2 = m.apply_T(q - s).scale(cb)
                    if not m2:
                        continue
                    # multiply by nu^{p + s + r}
                    for e, ce in _power_of_form(form, p + s + r, nvars).items():
                        out = out + PolyME(gens, nvars, {e: m2.scale(ce)})
    return out


def lambda_bracket(pres: ConformalPresentation, x: ModuleElement, y: ModuleElement) -> LambdaPoly:
    """The lambda-bracket x_lam y extended bilinearly from the table."""
    poly = bracket_form(pres, x, y, (1,), 1)
    return LambdaPoly(pres.gens, {e[0]: m for e, m in poly.coeffs.items()})


def _bracket_poly_left(
    pres: ConformalPresentation, x: PolyME, y: ModuleElement, form: tuple[int, ...]
) -> PolyME:
    """(x)_{nu} y for a PolyME first argument, bilinear over its monomials."""
    out = PolyME.zero(pres.gens, x.nvars)
    for e, m in x.coeffs.items():
        out = out + bracket_form(pres, m, y, form, x.nvars).shift(e)
    return out


def _bracket_poly_right(
    pres: ConformalPresentation, x: ModuleElement, y: PolyME, form: tuple[int, ...]
) -> PolyME:
    out = PolyME.zero(pres.gens, y.nvars)
    for e, m in y.coeffs.items():
        out = out + bracket_form(pres, x, m, form, y.nvars).shift(e)
    return out


def jacobi_defect(
    pres: ConformalPresentation, a: ModuleElement, b: ModuleElement, c: ModuleElement
) -> PolyME:
    """(a_lam b)_{lam+mu} c - a_lam(b_mu c) + b_mu(a_lam c); zero iff Jacobi holds."""
    lam, mu = (1, 0), (0, 1)
    ab = bracket_form(pres, a, b, lam, 2)
    lhs = _bracket_poly_left(pres, ab, c, (1, 1))
    bc = bracket_form(pres, b, c, mu, 2)
    r1 = _bracket_poly_right(pres, a, bc, lam)
    ac = bracket_form(pres, a, c, lam, 2)
    r2 = _bracket_poly_right(pres, b, ac, mu)
    return lhs - r1 + r2


def skew_defect(pres: ConformalPresentation, a: ModuleElement, b: ModuleElement) -> LambdaPoly:
    """a_lam b + b_{-lam-T} a; zero iff skewsymmetry holds for the pair."""
    ab = lambda_bracket(pres, a, b)
    ba = lambda_bracket(pres, b, a)
    return ab + lambda_substitute(ba, "neg_shift")


def translation_defects(
    pres: ConformalPresentation, a: ModuleElement, b: ModuleElement
) -> tuple[LambdaPoly, LambdaPoly]:
    """Defects of (Ta)_lam b = -lam a_lam b and a_lam(Tb) = (lam+T)(a_lam b)."""
    ab = lambda_bracket(pres, a, b)
    d1 = lambda_bracket(pres, a.apply_T(), b) + ab.shift_lambda(1)
    shifted = ab.shift_lambda(1) + ab.map_coeffs(lambda m: m.apply_T())
    d2 = lambda_bracket(pres, a, b.apply_T()) - shifted
    return d1, d2


def check_conformal_identity(pres: ConformalPresentation, kind: str) -> CheckReport:
    """Sweep jacobi / skewsymmetry / translation over all generator tuples."""
    syms = pres.gens.symbols
    if kind == "jacobi":
        for a, b, c in itertools.product(syms, repeat=3):
            d = jacobi_defect(pres, pres.gen_element(a), pres.gen_element(b), pres.gen_element(c))
            if not d.is_zero():
                return CheckReport(
                    identity="jacobi",
                    swept={"triples": len(syms) ** 3},
                    verdict=FAIL,
                    witness={"triple": [a, b, c], "defect": str(d)},
                )
        return CheckReport("jacobi", {"triples": len(syms) ** 3}, PASS)
    if kind == "skewsymmetry":
        for a, b in itertools.product(syms, repeat=2):
            d = skew_defect(pres, pres.gen_element(a), pres.gen_element(b))
            if not d.is_zero():
                return CheckReport(
                    identity="skewsymmetry",
                    swept={"pairs": len(syms) ** 2},
                    verdict=FAIL,
                    witness={"pair": [a, b], "defect": str(d)},
                )
        return CheckReport("skewsymmetry", {"pairs": len(syms) ** 2}, PASS)
    if kind == "translation":
        count = 0
        for a, b in itertools.product(syms, repeat=2):
            for p in range(3):
                for q in range(3):
                    x = pres.gen_element(a, p)
                    y = pres.gen_element(b, q)
                    d1, d2 = translation_defects(pres, x, y)
                    count += 1
                    if not d1.is_zero() or not d2.is_zero():
                        return CheckReport(
                            identity="translation",
                            swept={"instances": count},
                            verdict=FAIL,
                            witness={
                                "pair": [f"T^{p} {a}", f"T^{q} {b}"],
                                "left_defect": str(d1),
                                "right_defect": str(d2),
                            },
                        )
        return CheckReport("translation", {"instances": count}, PASS)
    raise ValueError(f"unknown identity kind {kind!r}")


def classify_presentation(pres: ConformalPresentation) -> tuple[str, list[CheckReport]]:
    """Return 'lie' / 'leibniz' / 'not-conformal' with the supporting reports."""
    reports = [check_conformal_identity(pres, k) for k in ("translation", "jacobi", "skewsymmetry")]
    trans, jac, skew = reports
    if not trans.ok or not jac.ok:
        return "not-conformal", reports
    return ("lie" if skew.ok else "leibniz"), reports


def derived_bracket(
    pres: ConformalPresentation, x: ModuleElement, y: ModuleElement
) -> ModuleElement:
    """[x, y] = int_{-T}^0 x_lam y dlam, the derived differential-algebra bracket."""
    return lambda_integrate(lambda_bracket(pres, x, y), "-T->0")


class ModeSum:
    """Finite formal sum of mode symbols g_[r] with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[str, int], Q] | None = None):
        self.terms = {k: rat(v) for k, v in (terms or {}).items() if v != 0}

    def add_term(self, sym: str, r: int, c: Q):
        if c == 0:
            return
        k = (sym, r)
        self.terms[k] = self.terms.get(k, Q(0)) + c
        if self.terms[k] == 0:
            del self.terms[k]

    def __eq__(self, other):
        return isinstance(other, ModeSum) and self.terms == other.terms

    def __add__(self, other):
        out = ModeSum(dict(self.terms))
        for (s, r), c in other.terms.items():
            out.add_term(s, r, c)
        return out

    def scale(self, c):
        return ModeSum({k: v * rat(c) for k, v in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(
            f"{c}*{s}_[{r}]" for (s, r), c in sorted(self.terms.items())
        )


def mode_bracket(pres: ConformalPresentation, x: str, m: int, y: str, n: int) -> ModeSum:
    """[x_[m], y_[n]] = sum_j C(m,j) (x_(j) y)_[m+n-j], reduced mode symbols.

    The j-sum terminates at the lambda-degree of the bracket.  Reduction
    uses (T a)_[r] = -r a_[r-1]; central symbols survive only at mode -1.
    """
    p = lambda_bracket(pres, pres.gen_element(x), pres.gen_element(y))
    out = ModeSum()
    for j, mj in p.coeffs.items():
        # x_(j) y = j! * (lam^j coefficient)
        cj = Q(binom(m, j)) * factorial(j)
        for (sym, k), c in mj.terms.items():
            # reduce (T^k sym)_[m+n-j]
            r = m + n - j
            coeff = c * cj
            for _ in range(k):
                coeff *= -r
                r -= 1
            if pres.gens.is_central(sym) and r != -1:
                continue
            out.add_term(sym, r, coeff)
    return out
