"""Desk-scale approximation experiments: divergence/equidistribution condition
checks, exact hit-finding for sampled reals, and a deterministic Monte Carlo
estimate of the measure of the approximable set.

A hit at index k is an integer p with |x - p/q_k^d| < alpha_k / q_k^d,
gcd(p, q_k) = 1 and p mod q_k inside the configured coset.  Every inequality
is decided with exact integer cross-multiplication; floats never touch a hit
decision.  Sampling is a per-index SHA-256 stream, so results are
reproducible and independent of the degree of parallelism.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import euler_phi, factor, primes_up_to, r_d
from .residue_group import inv_mod, is_dth_power

__all__ = [
    "AbelReport",
    "AlphaSequence",
    "ConditionsReport",
    "Experiment",
    "ExperimentConfig",
    "HitRecord",
    "MonteCarloResult",
    "QSequence",
    "abel_condition_check",
    "check_conditions",
    "find_hits",
    "monte_carlo_measure",
    "prepare",
]

def exact_str(x: Fraction) -> str:
    """num/den string for rationals whose digit count can exceed the
    interpreter's int-to-str guard (long partial sums stay exact)."""
    import sys

    digits = max(x.numerator.bit_length(), x.denominator.bit_length()) // 3 + 16
    old = sys.get_int_max_str_digits()
    if digits <= old:
        return str(x)
    sys.set_int_max_str_digits(digits)
    try:
        return str(x)
    finally:
        sys.set_int_max_str_digits(old)


def exact_fraction(s: str) -> Fraction:
    """Inverse of exact_str, tolerant of arbitrarily long digit strings."""
    import sys

    digits = len(s) + 16
    old = sys.get_int_max_str_digits()
    if digits <= old:
        return Fraction(s)
    sys.set_int_max_str_digits(digits)
    try:
        return Fraction(s)
    finally:
        sys.set_int_max_str_digits(old)


Q_KINDS = ("explicit", "integers", "primes", "primes-coprime-to-a")
ALPHA_KINDS = ("explicit", "c/k", "c/(k log k)", "c*2^-k")
SUBGROUP_MODES = ("full", "dth-powers", "generators")

_LOG_SCALE = 1 << 16  # dyadic resolution of the rounded log in c/(k log k)


@dataclass(frozen=True)
class QSequence:
    """Rule producing the strictly increasing moduli q_1 < q_2 < ..."""

    kind: str
    values: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in Q_KINDS:
            raise ValueError(f"q_sequence kind must be one of {Q_KINDS}, got {self.kind!r}")
        if (self.kind == "explicit") != (self.values is not None):
            raise ValueError("q_sequence values are required exactly for kind 'explicit'")


@dataclass(frozen=True)
class AlphaSequence:
    """Rule producing the exact rational radii alpha_k in (0, 1/2).

    The 'c/(k log k)' rule uses a dyadically rounded natural log (clamped at
    1 so it is defined from k = 1) to keep every alpha_k exactly rational.
    """

    kind: str
    c: Fraction | None = None
    values: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ALPHA_KINDS:
            raise ValueError(f"alpha_sequence kind must be one of {ALPHA_KINDS}, got {self.kind!r}")
        if self.kind == "explicit":
            if self.values is None:
                raise ValueError("alpha_sequence values are required for kind 'explicit'")
        elif self.c is None or self.c <= 0:
            raise ValueError(f"alpha_sequence rule {self.kind!r} needs a positive constant c")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run."""

    q_sequence: QSequence
    alpha_sequence: AlphaSequence
    d: int = 1
    a: int = 1
    subgroup_mode: str = "full"
    generators: tuple[int, ...] = ()
    K: int = 10_000
    samples: int = 500
    precision_bits: int = 128
    seed: int = 0
    min_hits: int = 5

    def __post_init__(self) -> None:
        if self.d < 1 or self.a < 1 or self.K < 1 or self.samples < 1:
            raise ValueError("d, a, K and samples must all be positive")
        if self.precision_bits < 8:
            raise ValueError("precision_bits must be at least 8")
        if self.min_hits < 1:
            raise ValueError("min_hits must be at least 1")
        if self.subgroup_mode not in SUBGROUP_MODES:
            raise ValueError(f"subgroup_mode must be one of {SUBGROUP_MODES}")
        if self.subgroup_mode == "generators" and not self.generators:
            raise ValueError("subgroup_mode 'generators' needs a nonempty generator list")

    def to_dict(self) -> dict:
        q: dict = {"kind": self.q_sequence.kind}
        if self.q_sequence.values is not None:
            q["values"] = list(self.q_sequence.values)
        al: dict = {"kind": self.alpha_sequence.kind}
        if self.alpha_sequence.c is not None:
            al["c"] = str(self.alpha_sequence.c)
        if self.alpha_sequence.values is not None:
            al["values"] = [str(v) for v in self.alpha_sequence.values]
        return {
            "schema_version": 1,
            "q_sequence": q,
            "alpha_sequence": al,
            "d": self.d,
            "a": self.a,
            "subgroup_mode": self.subgroup_mode,
            "generators": list(self.generators),
            "K": self.K,
            "samples": self.samples,
            "precision_bits": self.precision_bits,
            "seed": self.seed,
            "min_hits": self.min_hits,
        }

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        def need(name, cast=None):
            if name not in data:
                raise ValueError(f"config field '{name}' is missing")
            v = data[name]
            if cast is int and not isinstance(v, int):
                raise ValueError(f"config field '{name}' must be an integer, got {v!r}")
            return v

        version = data.get("schema_version", 1)
        if version != 1:
            raise ValueError(f"unsupported schema_version {version}")
        qd = need("q_sequence")
        if not isinstance(qd, dict) or "kind" not in qd:
            raise ValueError("config field 'q_sequence' must be an object with a 'kind'")
        qseq = QSequence(
            kind=qd["kind"],
            values=tuple(int(v) for v in qd["values"]) if "values" in qd else None,
        )
        ad = need("alpha_sequence")
        if not isinstance(ad, dict) or "kind" not in ad:
            raise ValueError("config field 'alpha_sequence' must be an object with a 'kind'")
        aseq = AlphaSequence(
            kind=ad["kind"],
            c=Fraction(ad["c"]) if "c" in ad else None,
            values=tuple(Fraction(v) for v in ad["values"]) if "values" in ad else None,
        )
        return ExperimentConfig(
            q_sequence=qseq,
            alpha_sequence=aseq,
            d=need("d", int),
            a=need("a", int),
            subgroup_mode=need("subgroup_mode"),
            generators=tuple(int(g) for g in data.get("generators", [])),
            K=need("K", int),
            samples=need("samples", int),
            precision_bits=int(data.get("precision_bits", 128)),
            seed=need("seed", int),
            min_hits=int(data.get("min_hits", 5)),
        )


@dataclass(frozen=True)
class HitRecord:
    """One solved inequality: |x - p/q^d| < alpha_k/q^d with p in the coset."""

    k: int
    q: int
    p: int
    error: Fraction


def _first_primes(count: int, avoid: int = 1) -> list[int]:
    bound = 100
    if count > 10:
        bound = int(count * (math.log(count) + math.log(math.log(count))) * 1.3) + 100
    while True:
        ps = [p for p in primes_up_to(bound) if avoid % p != 0]
        if len(ps) >= count:
            return ps[:count]
        bound *= 2


def _materialize_q(cfg: ExperimentConfig) -> tuple[int, ...]:
    kind = cfg.q_sequence.kind
    if kind == "explicit":
        vals = cfg.q_sequence.values
        if len(vals) < cfg.K:
            raise ValueError(f"explicit q list has {len(vals)} entries, K={cfg.K}")
        vals = vals[: cfg.K]
    elif kind == "integers":
        vals = tuple(range(1, cfg.K + 1))
    elif kind == "primes":
        vals = tuple(_first_primes(cfg.K))
    else:  # primes-coprime-to-a
        vals = tuple(_first_primes(cfg.K, avoid=cfg.a))
    prev = 0
    for q in vals:
        if q <= prev:
            raise ValueError("q sequence must be strictly increasing and positive")
        prev = q
    return tuple(vals)


def _materialize_alpha(cfg: ExperimentConfig) -> tuple[Fraction, ...]:
    seq = cfg.alpha_sequence
    if seq.kind == "explicit":
        if len(seq.values) < cfg.K:
            raise ValueError(f"explicit alpha list has {len(seq.values)} entries, K={cfg.K}")
        vals = seq.values[: cfg.K]
    elif seq.kind == "c/k":
        vals = tuple(seq.c / k for k in range(1, cfg.K + 1))
    elif seq.kind == "c*2^-k":
        vals = tuple(seq.c / (1 << k) for k in range(1, cfg.K + 1))
    else:  # c/(k log k)
        vals = tuple(
            seq.c / (k * Fraction(max(_LOG_SCALE, round(math.log(k) * _LOG_SCALE)), _LOG_SCALE))
            for k in range(1, cfg.K + 1)
        )
    half = Fraction(1, 2)
    for k, a in enumerate(vals, start=1):
        if not (0 < a < half):
            raise ValueError(f"alpha_{k} = {a} outside (0, 1/2)")
    return tuple(vals)


@dataclass(eq=False)
class Experiment:
    """A config with its sequences materialized and per-index machinery built."""

    config: ExperimentConfig
    qs: tuple[int, ...]
    alphas: tuple[Fraction, ...]
    moduli: tuple[int, ...] = field(repr=False)  # q_k ** d
    orders: tuple[int, ...] = field(repr=False)  # |G_k|
    _members: list = field(repr=False)  # per-index coset membership tests

    def find_hits(self, x) -> list[HitRecord]:
        """All hit records for the exact rational x in (0, 1), k = 1..K.

        For each k only the integers floor(x q^d) - 1, 0, +1 are tried: with
        alpha < 1/2 the target interval has length < 1, so it contains at
        most one integer and that integer is within 1 of floor(x q^d).
        """
        x = Fraction(x)
        if not (0 < x < 1):
            raise ValueError(f"sample point must lie in (0, 1), got {x}")
        xn, xd = x.numerator, x.denominator
        hits = []
        for i, (q, Q, alpha, member) in enumerate(
            zip(self.qs, self.moduli, self.alphas, self._members)
        ):
            an, ad = alpha.numerator, alpha.denominator
            m, delta = divmod(xn * Q, xd)
            rhs = an * xd
            for p, dist in ((m, delta), (m + 1, xd - delta), (m - 1, xd + delta)):
                if dist * ad < rhs and math.gcd(p, q) == 1 and member(p % q):
                    hits.append(HitRecord(k=i + 1, q=q, p=p, error=Fraction(dist, xd * Q)))
                    break
        return hits

    def monte_carlo(self, threads: int = 1) -> "MonteCarloResult":
        cfg = self.config
        n = cfg.samples
        if threads <= 1:
            per_sample = [
                self.find_hits(_sample_point(cfg.seed, i, cfg.precision_bits)) for i in range(n)
            ]
        else:
            workers = min(threads, n)
            step = -(-n // workers)
            ranges = [(lo, min(n, lo + step)) for lo in range(0, n, step)]
            cfg_dict = cfg.to_dict()
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(
                    pool.map(_mc_chunk, [cfg_dict] * len(ranges), *zip(*ranges))
                )
            per_sample = [hits for part in parts for hits in part]
        ladder = _k_ladder(cfg.K)
        ms = tuple(range(1, cfg.min_hits + 1))
        counts = {
            m: {kp: 0 for kp in ladder} for m in ms
        }
        for hits in per_sample:
            ks = [h.k for h in hits]
            for kp in ladder:
                c = sum(1 for k in ks if k <= kp)
                for m in ms:
                    if c >= m:
                        counts[m][kp] += 1
        union = Fraction(0)
        for alpha, order, q in zip(self.alphas, self.orders, self.qs):
            union += 2 * alpha * Fraction(order, q)
        return MonteCarloResult(
            config=cfg,
            k_ladder=ladder,
            m_values=ms,
            samples=n,
            counts=counts,
            union_bound=union,
            total_hits=sum(len(h) for h in per_sample),
            per_sample_hits=per_sample,
        )


def _k_ladder(K: int) -> tuple[int, ...]:
    rungs = {K}
    p = 100
    while p < K:
        rungs.add(p)
        p *= 10
    return tuple(sorted(rungs))


def _sample_point(seed: int, i: int, bits: int) -> Fraction:
    """Uniform dyadic rational with the given precision, from an indexed
    SHA-256 stream (split by sample index, so any parallel schedule agrees)."""
    out, need, j = 0, bits, 0
    while need > 0:
        digest = hashlib.sha256(f"{seed}:{i}:{j}".encode()).digest()
        take = min(need, 256)
        out = (out << take) | (int.from_bytes(digest, "big") >> (256 - take))
        need -= take
        j += 1
    return Fraction(out if out else 1, 1 << bits)


def _mc_chunk(cfg_dict: dict, lo: int, hi: int) -> list[list[HitRecord]]:
    cfg = ExperimentConfig.from_dict(cfg_dict)
    exp = prepare(cfg)
    return [
        exp.find_hits(_sample_point(cfg.seed, i, cfg.precision_bits)) for i in range(lo, hi)
    ]


def _closure(gens: tuple[int, ...], q: int) -> set[int]:
    seen = {1 % q}
    frontier = [1 % q]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = cur * g % q
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def prepare(cfg: ExperimentConfig) -> Experiment:
    """Materialize the sequences, validate the coset data, build membership
    tests (exponent fast path for d-th powers, explicit sets for generator
    mode, gcd only for the full group)."""
    qs = _materialize_q(cfg)
    alphas = _materialize_alpha(cfg)
    members = []
    orders = []
    for q in qs:
        if math.gcd(cfg.a, q) != 1:
            raise ValueError(f"coset representative a={cfg.a} shares a factor with q={q}")
        if q == 1:
            members.append(lambda p: True)
            orders.append(1)
            continue
        f = factor(q)
        if cfg.subgroup_mode == "full":
            members.append(lambda p: True)  # coprimality is checked by the hit predicate
            orders.append(euler_phi(f))
        elif cfg.subgroup_mode == "dth-powers":
            ai = inv_mod(cfg.a, q)
            members.append(
                lambda p, f=f, ai=ai, q=q, d=cfg.d: is_dth_power(f, ai * p % q, d)
            )
            orders.append(r_d(f, cfg.d))
        else:
            for g in cfg.generators:
                if math.gcd(g, q) != 1:
                    raise ValueError(f"generator {g} shares a factor with q={q}")
            sub = _closure(tuple(g % q for g in cfg.generators), q)
            cs = frozenset(cfg.a * x % q for x in sub)
            members.append(lambda p, cs=cs: p in cs)
            orders.append(len(sub))
    return Experiment(
        config=cfg,
        qs=qs,
        alphas=alphas,
        moduli=tuple(q**cfg.d for q in qs),
        orders=tuple(orders),
        _members=members,
    )


def find_hits(x, cfg: ExperimentConfig) -> list[HitRecord]:
    """Convenience wrapper: prepare the config and locate all hits for x."""
    return prepare(cfg).find_hits(x)


def monte_carlo_measure(cfg: ExperimentConfig, threads: int = 1) -> "MonteCarloResult":
    """Sample dyadic rationals and tabulate hit-count fractions F(m, K')."""
    return prepare(cfg).monte_carlo(threads=threads)


# ---------------------------------------------------------------------------
# Condition checking.
# ---------------------------------------------------------------------------


def _checkpoints(K: int) -> tuple[int, ...]:
    if K <= 1024:
        return tuple(range(1, K + 1))
    cps = set(range(1, 65)) | {K}
    p = 2
    while p <= K:
        cps.add(p)
        p *= 2
    step = K // 64
    cps |= {i * step for i in range(1, 65)}
    return tuple(sorted(c for c in cps if 1 <= c <= K))


@dataclass(frozen=True)
class ConditionsReport:
    """Prefix sums behind the divergence and subgroup-size conditions.

    Exact rationals are recorded on a checkpoint grid (every prefix when K is
    small); the running minimum and final value of the density ratio are
    exact over all prefixes regardless of the grid.
    """

    epsilon: float
    checkpoints: tuple[int, ...]
    partial_sum_alpha: tuple[Fraction, ...]
    weighted_sum: tuple[Fraction, ...]
    c_ratio: tuple[Fraction, ...]
    c_ratio_min: Fraction
    c_ratio_final: Fraction
    cond_c_values: tuple[float, ...]
    cond_c_first_decile_mean: float
    cond_c_last_decile_mean: float
    cond_c_decreasing: bool


def check_conditions(cfg: ExperimentConfig, epsilon: float = 0.05) -> ConditionsReport:
    """Evaluate the two series conditions and the subgroup-size condition.

    Reports, per prefix n: the plain radius sum, the density-weighted sum
    sum(alpha_k |G_k| / q_k), their ratio (whose running minimum is an
    empirical lower estimate of the constant c), and per index k the decay
    statistic phi(q_k) / (q_k^(1/2 - epsilon) |G_k|).
    """
    exp = prepare(cfg)
    cps = _checkpoints(cfg.K)
    cps_set = set(cps)
    a_sum = Fraction(0)
    w_sum = Fraction(0)
    ratio_min = None
    ratio_final = None
    rows_a, rows_w, rows_r = [], [], []
    cond_c = []
    for i, (q, alpha, order) in enumerate(zip(exp.qs, exp.alphas, exp.orders)):
        n = i + 1
        a_sum += alpha
        w_sum += alpha * Fraction(order, q)
        ratio = w_sum / a_sum
        if ratio_min is None or ratio < ratio_min:
            ratio_min = ratio
        ratio_final = ratio
        phi_q = 1 if q == 1 else euler_phi(factor(q))
        cond_c.append(phi_q / (q ** (0.5 - epsilon) * order))
        if n in cps_set:
            rows_a.append(a_sum)
            rows_w.append(w_sum)
            rows_r.append(ratio)
    dec = max(1, len(cond_c) // 10)
    first = sum(cond_c[:dec]) / dec
    last = sum(cond_c[-dec:]) / dec
    return ConditionsReport(
        epsilon=epsilon,
        checkpoints=cps,
        partial_sum_alpha=tuple(rows_a),
        weighted_sum=tuple(rows_w),
        c_ratio=tuple(rows_r),
        c_ratio_min=ratio_min,
        c_ratio_final=ratio_final,
        cond_c_values=tuple(cond_c),
        cond_c_first_decile_mean=first,
        cond_c_last_decile_mean=last,
        cond_c_decreasing=last < first,
    )


@dataclass(frozen=True)
class AbelReport:
    """Summation-by-parts check: an average density bound implies the
    weighted condition with the same constant when the radii are
    non-increasing."""

    checkpoints: tuple[int, ...]
    density_partial: tuple[Fraction, ...]  # S_n = sum of |G_k|/q_k at checkpoints
    c_star: Fraction  # min over all prefixes of S_n / n
    weighted_lhs: tuple[Fraction, ...]  # sum alpha_k |G_k|/q_k at checkpoints
    weighted_rhs: tuple[Fraction, ...]  # c_star * sum alpha_k at checkpoints
    implication_holds: bool


def abel_condition_check(cfg: ExperimentConfig) -> AbelReport:
    """Verify on the computed prefixes that S_n > c n forces the weighted
    condition with the same c.  Rejects configs whose radii increase."""
    exp = prepare(cfg)
    prev = None
    for alpha in exp.alphas:
        if prev is not None and alpha > prev:
            raise ValueError("Abel check requires a non-increasing alpha sequence")
        prev = alpha
    cps = _checkpoints(cfg.K)
    cps_set = set(cps)
    s = Fraction(0)
    c_star = None
    s_rows = []
    for i, (q, order) in enumerate(zip(exp.qs, exp.orders)):
        s += Fraction(order, q)
        val = s / (i + 1)
        if c_star is None or val < c_star:
            c_star = val
        if i + 1 in cps_set:
            s_rows.append(s)
    a_sum = Fraction(0)
    w_sum = Fraction(0)
    lhs_rows, rhs_rows = [], []
    holds = True
    for i, (q, alpha, order) in enumerate(zip(exp.qs, exp.alphas, exp.orders)):
        a_sum += alpha
        w_sum += alpha * Fraction(order, q)
        if w_sum < c_star * a_sum:
            holds = False
        if i + 1 in cps_set:
            lhs_rows.append(w_sum)
            rhs_rows.append(c_star * a_sum)
    return AbelReport(
        checkpoints=cps,
        density_partial=tuple(s_rows),
        c_star=c_star,
        weighted_lhs=tuple(lhs_rows),
        weighted_rhs=tuple(rhs_rows),
        implication_holds=holds,
    )


# ---------------------------------------------------------------------------
# Monte Carlo result.
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class MonteCarloResult:
    config: ExperimentConfig
    k_ladder: tuple[int, ...]
    m_values: tuple[int, ...]
    samples: int
    counts: dict  # counts[m][K'] = samples with at least m hits among k <= K'
    union_bound: Fraction
    total_hits: int
    per_sample_hits: list

    def fraction(self, m: int, k_prime: int) -> Fraction:
        return Fraction(self.counts[m][k_prime], self.samples)

    def summary_dict(self) -> dict:
        table = {}
        for m in self.m_values:
            row = {}
            for kp in self.k_ladder:
                c = self.counts[m][kp]
                row[str(kp)] = {
                    "count": c,
                    "fraction": str(Fraction(c, self.samples)),
                    "value": c / self.samples,
                }
            table[str(m)] = row
        return {
            "schema_version": 1,
            "config": self.config.to_dict(),
            "samples": self.samples,
            "k_ladder": list(self.k_ladder),
            "m_values": list(self.m_values),
            "F": table,
            "union_bound": {"exact": exact_str(self.union_bound), "value": float(self.union_bound)},
            "total_hits": self.total_hits,
        }
