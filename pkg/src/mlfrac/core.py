"""Exponent arithmetic, parameter validation, balls and corner masks.

Exponents live in the extended half-line [1, oo].  Finite exponents are kept
as :class:`fractions.Fraction` so that the harmonic-mean and dual-exponent
identities hold exactly; infinity is the dedicated singleton :data:`INF`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence, Union


class _Infinity:
    """The point at infinity of the exponent half-line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __float__(self):
        return math.inf

    def __eq__(self, other):
        return other is self or (isinstance(other, float) and other == math.inf)

    def __hash__(self):
        return hash(math.inf)

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

Exponent = Union[Fraction, _Infinity]


def as_exponent(value) -> Exponent:
    """Coerce ``value`` to an exponent; floats go through their decimal repr."""
    if value is INF:
        return INF
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        return Fraction(value)
    if isinstance(value, float):
        if math.isinf(value) and value > 0:
            return INF
        return Fraction(repr(value))
    return Fraction(value)


def reciprocal(p: Exponent) -> Fraction:
    return Fraction(0) if p is INF else 1 / p


def dual(p: Exponent) -> Exponent:
    """Conjugate exponent with 1' = oo and oo' = 1."""
    if p is INF:
        return Fraction(1)
    if p == 1:
        return INF
    return p / (p - 1)


def to_float(p) -> float:
    return math.inf if p is INF else float(p)


@dataclass(frozen=True)
class ExponentVector:
    entries: tuple

    def __init__(self, entries: Sequence):
        values = tuple(as_exponent(e) for e in entries)
        if not values:
            raise ValueError("exponent vector must be nonempty")
        for e in values:
            if e is not INF and e < 1:
                raise ValueError(f"exponent {e} outside [1, inf]")
        object.__setattr__(self, "entries", values)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def p(self) -> Exponent:
        return harmonic_exponent(self)

    @property
    def inv_p(self) -> Fraction:
        return sum((reciprocal(e) for e in self.entries), Fraction(0))

    @property
    def duals(self) -> tuple:
        return tuple(dual(e) for e in self.entries)

    @property
    def xi(self):
        return xi(self)

    @property
    def I1(self) -> tuple:
        return tuple(i for i, e in enumerate(self.entries) if e == 1)

    @property
    def I2(self) -> tuple:
        return tuple(i for i, e in enumerate(self.entries) if e is INF or e > 1)

    @property
    def I2_finite(self) -> tuple:
        return tuple(i for i in self.I2 if self.entries[i] is not INF)

    @property
    def I2_infinite(self) -> tuple:
        return tuple(i for i in self.I2 if self.entries[i] is INF)

    def cardinals(self) -> dict:
        return {
            "m1": len(self.I1),
            "m2": len(self.I2),
            "m2_1": len(self.I2_finite),
            "m2_2": len(self.I2_infinite),
        }

    def as_floats(self) -> list:
        return [to_float(e) for e in self.entries]

    @classmethod
    def uniform(cls, m: int, inv_p) -> "ExponentVector":
        """Equal entries p_i with sum of reciprocals ``inv_p``."""
        inv_p = as_exponent(inv_p)
        if inv_p == 0:
            return cls([INF] * m)
        return cls([m / inv_p] * m)


def harmonic_exponent(p_vec: ExponentVector) -> Exponent:
    """p with 1/p = sum 1/p_i; INF when every entry is infinite."""
    s = p_vec.inv_p
    return INF if s == 0 else 1 / s


class XiUndefined(ValueError):
    """Raised when m p <= 1, so that p/(mp - 1) is not a valid exponent."""


def xi(p_vec: ExponentVector, m: int | None = None):
    """Return p/(mp - 1), equivalently the exponent with 1/xi = sum 1/p_i'.

    Returns None when mp <= 1 (the quantity is undefined).
    """
    m = p_vec.m if m is None else m
    inv = m - p_vec.inv_p  # = (mp - 1)/p
    if inv <= 0:
        return None
    return 1 / inv


def require_xi(p_vec: ExponentVector, m: int | None = None) -> Fraction:
    value = xi(p_vec, m)
    if value is None:
        raise XiUndefined(f"xi undefined for p = {p_vec.p} with m = {m or p_vec.m}")
    return value


@dataclass(frozen=True)
class ParamSet:
    m: int
    n: int
    alpha: float
    delta: float
    delta_tilde: float
    beta: float
    gamma: float = 1.0
    beta_split: tuple | None = None

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive integers")
        if self.beta_split is None:
            object.__setattr__(self, "beta_split", tuple([self.beta / self.m] * self.m))
        else:
            split = tuple(float(b) for b in self.beta_split)
            if len(split) != self.m:
                raise ValueError("beta_split must have m entries")
            object.__setattr__(self, "beta_split", split)

    def with_(self, **changes) -> "ParamSet":
        data = {
            "m": self.m, "n": self.n, "alpha": self.alpha, "delta": self.delta,
            "delta_tilde": self.delta_tilde, "beta": self.beta, "gamma": self.gamma,
            "beta_split": self.beta_split,
        }
        if "beta" in changes and "beta_split" not in changes:
            data["beta_split"] = None
        data.update(changes)
        return ParamSet(**data)

    def kernel_decay(self, i: int) -> float:
        """Exponent n - beta_i + delta/m of the i-th dual-norm kernel."""
        return self.n - self.beta_split[i] + self.delta / self.m

    def alpha_tilde(self, kind: str) -> float:
        if kind == "sum":
            return self.alpha + self.delta
        if kind == "product":
            return self.alpha + self.m * self.delta
        raise ValueError(f"unknown commutator kind {kind!r}")


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __init__(self, center, radius: float):
        c = (float(center),) if isinstance(center, (int, float)) else tuple(float(x) for x in center)
        if not radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(radius))

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.n) * self.radius ** self.n

    @property
    def center_norm(self) -> float:
        return math.hypot(*self.center)

    def dilate(self, factor: float) -> "Ball":
        return Ball(self.center, self.radius * factor)

    def contains(self, x) -> bool:
        x = (x,) if isinstance(x, (int, float)) else x
        return math.dist(x, self.center) < self.radius


def dyadic_balls(ball: Ball, k_max: int) -> list:
    """B_k = B(x_B, 2^k R) for k = 0..k_max."""
    return [ball.dilate(2.0 ** k) for k in range(k_max + 1)]


@dataclass(frozen=True)
class SigmaMask:
    bits: tuple

    def __init__(self, bits):
        b = tuple(int(x) for x in bits)
        if any(x not in (0, 1) for x in b):
            raise ValueError("sigma entries must be 0 or 1")
        object.__setattr__(self, "bits", b)

    @property
    def complement(self) -> "SigmaMask":
        return SigmaMask(1 - b for b in self.bits)

    @property
    def weight(self) -> int:
        return sum(self.bits)

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    @classmethod
    def ones(cls, m: int) -> "SigmaMask":
        return cls([1] * m)

    @classmethod
    def zeros(cls, m: int) -> "SigmaMask":
        return cls([0] * m)


def all_masks(m: int) -> Iterator[SigmaMask]:
    for bits in itertools.product((0, 1), repeat=m):
        yield SigmaMask(bits)


def theta(sigma: SigmaMask, params: ParamSet) -> float:
    """Sum over sigma_i = 1 of (1 - beta_i/n + delta/(mn))."""
    n, m = params.n, params.m
    return math.fsum(
        1 - params.beta_split[i] / n + params.delta / (m * n)
        for i, s in enumerate(sigma.bits) if s
    )


@dataclass
class ValidationReport:
    mode: str
    checks: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append({"check": name, "pass": bool(ok), "detail": detail})

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks)

    @property
    def failures(self) -> list:
        return [c["check"] for c in self.checks if not c["pass"]]


def validate_params(params: ParamSet, mode: str, p_vec: ExponentVector | None = None) -> ValidationReport:
    """Check the hypotheses attached to ``mode``.

    ``mode`` is one of ``"sum"``, ``"product"`` (commutator boundedness
    hypotheses) or ``"weight"`` (the weight-class definition alone).
    """
    if mode not in ("sum", "product", "weight"):
        raise ValueError(f"unknown validation mode {mode!r}")
    rep = ValidationReport(mode)
    m, n = params.m, params.n
    rep.add("m >= 1", m >= 1)
    rep.add("sum beta_i = beta", math.isclose(math.fsum(params.beta_split), params.beta,
                                              rel_tol=1e-12, abs_tol=1e-15),
            f"sum={math.fsum(params.beta_split)!r}")
    rep.add("0 < beta_i < n", all(0 < b < n for b in params.beta_split))
    if p_vec is not None:
        rep.add("len(p) = m", p_vec.m == m)
    if mode == "weight":
        return rep

    rep.add("0 < alpha < mn", 0 < params.alpha < m * n)
    rep.add("0 < gamma <= 1", 0 < params.gamma <= 1)
    rep.add("delta > 0", params.delta > 0)
    rep.add("delta < gamma", params.delta < params.gamma)
    if mode == "sum":
        rep.add("delta < mn - alpha", params.delta < m * n - params.alpha)
    else:
        rep.add("delta < (mn - alpha)/m", params.delta < (m * n - params.alpha) / m)
    at = params.alpha_tilde(mode)
    rep.add("beta = alpha_tilde", math.isclose(params.beta, at, rel_tol=1e-12),
            f"alpha_tilde={at!r}")
    rep.add("delta_tilde <= delta", params.delta_tilde <= params.delta)
    if p_vec is not None:
        inv_p = float(p_vec.inv_p)
        # p > n/alpha_tilde  <=>  1/p < alpha_tilde/n
        rep.add("p > n/alpha_tilde", inv_p < at / n, f"1/p={inv_p!r}, alpha_tilde/n={at / n!r}")
    return rep
