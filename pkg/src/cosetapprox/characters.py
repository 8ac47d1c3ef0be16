"""Dirichlet characters mod n on top of the cyclic unit-group decomposition.

A character is stored as one exponent per cyclic factor; its value at a unit
is a root of unity tracked exactly as an integer exponent (log_value), so
triviality tests are integer comparisons.  Complex floats appear only when
values are materialized or summed.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .residue_group import Subgroup, UnitGroup

__all__ = [
    "DirichletCharacter",
    "all_characters",
    "char_sum",
    "character_matrix",
    "evaluate",
    "log_value",
    "orthogonality_deviation",
    "pv_bound",
    "pv_sweep_max",
    "quotient_characters",
]


@dataclass(eq=False)
class DirichletCharacter:
    """Character mod n given by exponents against the cyclic factors."""

    group: UnitGroup
    exponents: tuple[int, ...]

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.group is not self.group:
            raise ValueError("characters belong to different groups")
        exps = tuple(
            (a + b) % o
            for (a, b, (_, o)) in zip(self.exponents, other.exponents, self.group.cyclic_factors)
        )
        return DirichletCharacter(self.group, exps)

    def __call__(self, m: int) -> complex:
        return evaluate(self, m)


def all_characters(g: UnitGroup) -> list[DirichletCharacter]:
    """All phi(n) characters mod n, lexicographic in the exponent vector,
    principal character first."""
    orders = [o for _, o in g.cyclic_factors]
    return [DirichletCharacter(g, exps) for exps in itertools.product(*(range(o) for o in orders))]


def log_value(chi: DirichletCharacter, m: int) -> int | None:
    """Exact exponent t with chi(m) = exp(2 pi i t / L), L the group exponent;
    None when gcd(m, n) > 1 (where the character vanishes)."""
    g = chi.group
    if math.gcd(m, g.n) != 1:
        return None
    L = g.exponent()
    t = 0
    for e, dl, (_, order) in zip(chi.exponents, g.dlog(m % g.n), g.cyclic_factors):
        t += e * dl * (L // order)
    return t % L


def evaluate(chi: DirichletCharacter, m: int) -> complex:
    """chi(m): 0 off the units, a root of unity on them."""
    t = log_value(chi, m)
    if t is None:
        return 0j
    if t == 0:
        return 1 + 0j
    return cmath.exp(2j * cmath.pi * t / chi.group.exponent())


def char_sum(chi: DirichletCharacter, h: int) -> complex:
    """Partial sum of chi(k) for k = 1..h, folding over full periods."""
    if h < 0:
        raise ValueError(f"upper limit must be >= 0, got {h}")
    n = chi.group.n
    full, rem = divmod(h, n)
    total = complex(full * chi.group.phi) if chi.is_principal else 0j
    for k in range(1, rem + 1):
        total += evaluate(chi, k)
    return total


def quotient_characters(G: Subgroup) -> list[DirichletCharacter]:
    """The characters trivial on G: exactly index(G) of them, and precisely
    those arising from characters of the quotient group.

    Filters all characters on triviality over G's generators (or over every
    element when no generator list is attached).
    """
    tests = G.generators if G.generators is not None else G.elements
    out = []
    for chi in all_characters(G.group):
        if all(log_value(chi, t) == 0 for t in tests):
            out.append(chi)
    return out


def pv_bound(n: int) -> float:
    """Polya-Vinogradov bound 2 sqrt(n) log(n), natural logarithm."""
    if n < 2:
        raise ValueError(f"modulus must be >= 2, got {n}")
    return 2.0 * math.sqrt(n) * math.log(n)


# ---------------------------------------------------------------------------
# Vectorized value tables.  These exist so that full sweeps over all
# characters and all partial sums stay within the acceptance time budgets;
# the tests pin them against evaluate()/char_sum() on random samples.
# ---------------------------------------------------------------------------


def _dlog_rows(g: UnitGroup) -> tuple[np.ndarray, np.ndarray]:
    """Dlog matrix (one row per cyclic factor, columns 0..n-1) and unit mask."""
    n = g.n
    idx = np.arange(n, dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    rows = []
    for (q, gens), table in zip(g.components, g.component_tables()):
        local_mask = np.array([table[r] is not None for r in range(q)], dtype=bool)
        mask &= local_mask[idx % q]
        for j in range(len(gens)):
            local = np.array(
                [table[r][j] if table[r] is not None else 0 for r in range(q)],
                dtype=np.int64,
            )
            rows.append(local[idx % q])
    D = np.vstack(rows) if rows else np.zeros((0, n), dtype=np.int64)
    return D, mask


def character_matrix(g: UnitGroup, chars: list[DirichletCharacter]) -> np.ndarray:
    """Complex value table V[i, j] = chars[i](j) for j = 0..n-1."""
    D, mask = _dlog_rows(g)
    orders = np.array([o for _, o in g.cyclic_factors], dtype=np.int64)
    L = g.exponent()
    E = np.array([c.exponents for c in chars], dtype=np.int64).reshape(len(chars), len(orders))
    T = (E * (L // orders)) @ D % L
    V = np.exp((2j * np.pi / L) * T)
    V[:, ~mask] = 0
    return V


def pv_sweep_max(n: int) -> tuple[float, float]:
    """(max over non-principal chi and 1 <= h <= n of |char sum|, pv_bound(n)).

    Uses the value table plus a cumulative sum, so one call covers every
    character and every prefix length for the modulus.
    """
    from .residue_group import unit_group

    g = unit_group(n)
    chars = all_characters(g)
    V = character_matrix(g, chars)
    if len(chars) <= 1:
        return 0.0, pv_bound(n)
    prefix = np.cumsum(V[1:, 1:], axis=1)  # rows: non-principal; cols: h = 1..n-1
    return float(np.max(np.abs(prefix))), pv_bound(n)


def orthogonality_deviation(n: int) -> tuple[float, float]:
    """(max |sum over chi of chi(g)| for units g != 1,
        max |sum over units of chi(g)| for non-principal chi)."""
    from .residue_group import unit_group

    g = unit_group(n)
    chars = all_characters(g)
    V = character_matrix(g, chars)
    col = V.sum(axis=0)
    units = np.array([x for x in range(2, n) if math.gcd(x, n) == 1], dtype=np.int64)
    col_dev = float(np.max(np.abs(col[units]))) if units.size else 0.0
    row = V.sum(axis=1)
    row_dev = float(np.max(np.abs(row[1:]))) if len(chars) > 1 else 0.0
    return col_dev, row_dev
