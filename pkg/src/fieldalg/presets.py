"""Stock conformal presentations used by tests, scripts and the CLI."""

from __future__ import annotations

from .conformal import ConformalPresentation
from .elements import GeneratorSet, LambdaPoly, ModuleElement, Q, rat


def free_boson_presentation() -> ConformalPresentation:
    """One even generator a of weight 1 with a_lam a = lam K, K central."""
    gens = GeneratorSet(free=("a",), central=("K",), weights={"a": Q(1)})
    table = {("a", "a"): LambdaPoly(gens, {1: ModuleElement.gen(gens, "K")})}
    return ConformalPresentation(gens, table, skew=True)


def virasoro_presentation(alpha="1/2") -> ConformalPresentation:
    """L_lam L = T L + 2 lam L + alpha lam^3 C with C central."""
    a = rat(alpha)
    gens = GeneratorSet(free=("L",), central=("C",), weights={"L": Q(2)})
    table = {
        ("L", "L"): LambdaPoly(
            gens,
            {
                0: ModuleElement.gen(gens, "L", 1),
                1: ModuleElement.gen(gens, "L").scale(2),
                3: ModuleElement.gen(gens, "C").scale(a),
            },
        )
    }
    return ConformalPresentation(gens, table, skew=True)


def corrupted_virasoro_presentation() -> ConformalPresentation:
    """Deliberately wrong table (T L + 3 lam L); fails the Jacobi sweep."""
    gens = GeneratorSet(free=("L",), central=("C",), weights={"L": Q(2)})
    table = {
        ("L", "L"): LambdaPoly(
            gens,
            {
                0: ModuleElement.gen(gens, "L", 1),
                1: ModuleElement.gen(gens, "L").scale(3),
            },
        )
    }
    return ConformalPresentation(gens, table, skew=True)


def abelian_presentation(n_gens: int = 2) -> ConformalPresentation:
    gens = GeneratorSet(
        free=tuple(f"x{i}" for i in range(n_gens)),
        weights={f"x{i}": Q(1) for i in range(n_gens)},
    )
    return ConformalPresentation(gens, {}, skew=True)
