"""Explicit structure of the unit group (Z/nZ)^*: cyclic decomposition with
reproducible generators, subgroups, cosets, and membership tests.

Everything is sized for moduli up to about 10^6: subgroups and cosets are
stored as explicit sorted element sets, and per prime-power discrete-log
tables are built on demand.  All objects are treated as immutable after
construction; operations are pure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .arith import Factorization, euler_phi, factor

__all__ = [
    "Coset",
    "Subgroup",
    "UnitGroup",
    "coset",
    "coset_contains",
    "dth_power_coset_contains",
    "dth_power_subgroup",
    "full_subgroup",
    "index",
    "inv_mod",
    "is_dth_power",
    "subgroup_from_generators",
    "unit_group",
    "xgcd",
]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def inv_mod(a: int, n: int) -> int:
    """Multiplicative inverse of a mod n via extended gcd."""
    a %= n
    g, x, _ = xgcd(a, n)
    if g != 1:
        raise ValueError(f"{a} is not invertible mod {n}")
    return x % n


def _primitive_root(p: int, e: int) -> int:
    """Smallest primitive root modulo the odd prime power p^e.

    Candidates are tested against every maximal proper divisor of the group
    order, so the result has exactly order phi(p^e) and is stable run to run.
    """
    q = p**e
    phi = p ** (e - 1) * (p - 1)
    prime_divs = {p for p, _ in factor(p - 1)}
    if e > 1:
        prime_divs.add(p)
    for g in range(2, q):
        if g % p == 0:
            continue
        if all(pow(g, phi // r, q) != 1 for r in prime_divs):
            return g
    raise ArithmeticError(f"no primitive root found mod {q}")


def _component_gens(p: int, e: int) -> tuple[tuple[int, int], ...]:
    """Local generators (g, order) of (Z/p^e Z)^*."""
    if p == 2:
        if e == 1:
            return ()
        if e == 2:
            return ((3, 2),)
        return ((2**e - 1, 2), (5, 2 ** (e - 2)))
    g = _primitive_root(p, e)
    return ((g, p ** (e - 1) * (p - 1)),)


@dataclass(eq=False)
class UnitGroup:
    """(Z/nZ)^* as a direct product of cyclic groups.

    cyclic_factors lists (generator, order) pairs with generators lifted to
    residues mod n; every unit has a unique exponent vector against them.
    Discrete-log tables (one per prime-power component) are built lazily.
    """

    n: int
    factorization: Factorization
    phi: int
    cyclic_factors: tuple[tuple[int, int], ...]
    components: tuple[tuple[int, tuple[tuple[int, int], ...]], ...]
    _tables: list = field(default=None, repr=False)

    def units(self) -> list[int]:
        return [x for x in range(1, self.n) if math.gcd(x, self.n) == 1]

    def is_unit(self, x: int) -> bool:
        return math.gcd(x, self.n) == 1

    def exponent(self) -> int:
        """lcm of the cyclic factor orders (1 for the trivial group)."""
        return math.lcm(*(o for _, o in self.cyclic_factors)) if self.cyclic_factors else 1

    def component_tables(self) -> list[list[tuple[int, ...] | None]]:
        """Per-component dlog tables: table[r] is the local exponent vector
        of the residue r, or None when r is not a unit of the component."""
        if self._tables is None:
            tables = []
            for q, gens in self.components:
                table: list[tuple[int, ...] | None] = [None] * q
                for exps in itertools.product(*(range(o) for _, o in gens)):
                    val = 1
                    for (g, _), e in zip(gens, exps):
                        val = val * pow(g, e, q) % q
                    table[val] = exps
                tables.append(table)
            self._tables = tables
        return self._tables

    def dlog(self, x: int) -> tuple[int, ...]:
        """Exponent vector of the unit x against cyclic_factors."""
        if math.gcd(x, self.n) != 1:
            raise ValueError(f"{x} is not a unit mod {self.n}")
        out: list[int] = []
        for (q, _), table in zip(self.components, self.component_tables()):
            out.extend(table[x % q])
        return tuple(out)


def unit_group(n: int) -> UnitGroup:
    """Build the unit group mod n (n >= 2) with deterministic generators."""
    if n < 2:
        raise ValueError(f"modulus must be >= 2, got {n}")
    f = factor(n)
    components = []
    cyclic = []
    for p, e in f:
        q = p**e
        gens = _component_gens(p, e)
        components.append((q, gens))
        rest = n // q
        for g, order in gens:
            if rest == 1:
                lifted = g % n
            else:
                # CRT lift: congruent to g mod q and to 1 mod n/q.
                t = (g - 1) * inv_mod(rest % q, q) % q
                lifted = (1 + rest * t) % n
            cyclic.append((lifted, order))
    return UnitGroup(
        n=n,
        factorization=f,
        phi=euler_phi(f),
        cyclic_factors=tuple(cyclic),
        components=tuple(components),
    )


@dataclass(eq=False)
class Subgroup:
    """Subgroup of a unit group, stored as an explicit sorted element set."""

    group: UnitGroup
    elements: tuple[int, ...]
    generators: tuple[int, ...] | None = None
    element_set: frozenset[int] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.element_set is None:
            self.element_set = frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x % self.group.n in self.element_set

    def validate(self) -> None:
        """Full invariant check: identity, closure, inverses, Lagrange."""
        n = self.group.n
        if 1 % n not in self.element_set:
            raise AssertionError("subgroup must contain 1")
        if self.group.phi % self.order != 0:
            raise AssertionError("order does not divide phi(n)")
        for x in self.elements:
            if math.gcd(x, n) != 1:
                raise AssertionError(f"{x} is not a unit")
            if inv_mod(x, n) not in self.element_set:
                raise AssertionError(f"inverse of {x} missing")
            for y in self.elements:
                if x * y % n not in self.element_set:
                    raise AssertionError(f"not closed: {x}*{y}")


@dataclass(eq=False)
class Coset:
    """Coset a*G of a subgroup G, with a a unit mod n."""

    subgroup: Subgroup
    representative: int
    elements: tuple[int, ...]
    element_set: frozenset[int] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.element_set is None:
            self.element_set = frozenset(self.elements)

    @property
    def n(self) -> int:
        return self.subgroup.group.n


def full_subgroup(g: UnitGroup) -> Subgroup:
    """The whole unit group as a subgroup of itself."""
    return Subgroup(
        group=g,
        elements=tuple(g.units()),
        generators=tuple(gen for gen, _ in g.cyclic_factors),
    )


def dth_power_subgroup(g: UnitGroup, d: int) -> Subgroup:
    """The subgroup {x^d : x unit mod n} of d-th power residues."""
    if d < 1:
        raise ValueError(f"power must be >= 1, got {d}")
    n = g.n
    elems = sorted({pow(x, d, n) for x in g.units()})
    gens = tuple(sorted({pow(gen, d, n) for gen, _ in g.cyclic_factors}))
    return Subgroup(group=g, elements=tuple(elems), generators=gens)


def subgroup_from_generators(g: UnitGroup, gens) -> Subgroup:
    """Smallest subgroup containing the given residues (all must be units)."""
    n = g.n
    norm = []
    for x in gens:
        if math.gcd(x, n) != 1:
            raise ValueError(f"generator {x} is not coprime to {n}")
        norm.append(x % n)
    seen = {1 % n}
    frontier = [1 % n]
    while frontier:
        cur = frontier.pop()
        for x in norm:
            nxt = cur * x % n
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return Subgroup(group=g, elements=tuple(sorted(seen)), generators=tuple(norm))


def coset(a: int, G: Subgroup) -> Coset:
    """The coset a*G; rejects a not coprime to the modulus."""
    n = G.group.n
    if math.gcd(a, n) != 1:
        raise ValueError(f"coset representative {a} is not a unit mod {n}")
    a %= n
    return Coset(
        subgroup=G,
        representative=a,
        elements=tuple(sorted(a * x % n for x in G.elements)),
    )


def coset_contains(c: Coset, p: int) -> bool:
    """Whether the integer p reduces into the coset (false for non-units)."""
    return p % c.n in c.element_set


def index(G: Subgroup) -> int:
    """Index of G in the unit group: phi(n) / |G|, an exact integer."""
    phi = G.group.phi
    if phi % G.order != 0:
        raise ArithmeticError("subgroup order does not divide phi(n)")
    return phi // G.order


# ---------------------------------------------------------------------------
# Fast membership tests that avoid materializing the subgroup.  These are the
# optional exponent-test shortcut; the test suite cross-checks them against
# the explicit element sets.
# ---------------------------------------------------------------------------


def is_dth_power(f: Factorization, x: int, d: int) -> bool:
    """Exponent test: is x a d-th power residue mod f.n?

    Works per prime power.  Odd p^e has a cyclic unit group of order m, where
    membership is the power test x^(m / gcd(d, m)) = 1.  For p = 2, e >= 3
    the unit group is {+-1} x <5>; a unit is an even-power residue iff it is
    1 mod 4 and passes the power test in <5>.  The modulus 1 is trivial.
    """
    n = f.n
    if n == 1:
        return True
    if math.gcd(x, n) != 1:
        return False
    for p, e in f:
        q = p**e
        r = x % q
        if p == 2:
            if e == 1 or d % 2 == 1:
                continue  # x -> x^d is onto for odd d on a 2-group
            if r % 4 != 1:
                return False
            if e == 2:
                continue
            m = 1 << (e - 2)
            if pow(r, m // math.gcd(d, m), q) != 1:
                return False
        else:
            m = q // p * (p - 1)
            if pow(r, m // math.gcd(d, m), q) != 1:
                return False
    return True


def dth_power_coset_contains(f: Factorization, a: int, p: int, d: int) -> bool:
    """Whether p lies in the coset a * (d-th powers) mod f.n, by exponent test."""
    n = f.n
    if n == 1:
        return True
    if math.gcd(p, n) != 1:
        return False
    return is_dth_power(f, inv_mod(a, n) * p % n, d)
