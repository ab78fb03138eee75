"""Multilinear fractional integrals, their commutators, kernels and symbols.

All operators are evaluated pointwise (n = 1) by direct quadrature.  Around
the evaluation point the product space is parametrized by L1-polar
coordinates ``|x - y_i| = r theta_i`` with ``theta`` on the unit simplex, so
that the kernel singularity ``(sum |x - y_i|)^(alpha - m)`` turns into the
endpoint weight ``r^(alpha - 1)``.  Both sides ``y_i = x +- r theta_i`` are
summed inside the integrand.  Every jump or kink of an input becomes a panel
boundary; points where an input has unbounded derivative (such as the
origin for ``|x|^delta``) additionally get geometric grading.

Two engines are provided: ``"graded"`` (vectorized fixed Gauss panels, for
m <= 2) and ``"adaptive"`` (nested QUADPACK, any m).  The latter serves as
the reference.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from mlfrac.quadrature import (GradedRule, IntegralResult, QuadSpec, combine, graded_nodes,
                               integrate_interval, integrate_power_singular)

DEFAULT_RULE = GradedRule()


# -- kernels -------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelSpec:
    """K(x, y) with the size bound C (sum |x - y_i|)^(alpha - mn).

    ``func`` is None for the standard kernel.  A custom ``func(x, ys)`` must
    accept a list of numpy arrays ``ys``.
    """

    alpha: float
    m: int
    n: int = 1
    gamma: float = 1.0
    c: float = 2.0
    func: Callable | None = None
    scale: float = 1.0
    kind: str = "standard"

    @classmethod
    def standard(cls, alpha: float, m: int, n: int = 1, gamma: float = 1.0) -> "KernelSpec":
        return cls(alpha, m, n, gamma)

    @classmethod
    def custom(cls, func: Callable, alpha: float, m: int, gamma: float = 1.0, c: float = 2.0) -> "KernelSpec":
        return cls(alpha, m, 1, gamma, c, func, 1.0, "custom")

    def scaled(self, factor: float) -> "KernelSpec":
        return KernelSpec(self.alpha, self.m, self.n, self.gamma, self.c, self.func,
                          self.scale * factor, "custom" if self.func else self.kind)

    def __call__(self, x, ys):
        if self.func is not None:
            return self.scale * self.func(x, ys)
        s = sum(np.abs(np.subtract(x, y)) for y in ys)
        return self.scale * s ** (self.alpha - self.m * self.n)

    def radial_part(self, x, ys, r):
        """K(x, y) / r^(alpha - mn) where r = sum |x - y_i|."""
        if self.func is None:
            return self.scale
        return self(x, ys) / r ** (self.alpha - self.m * self.n)


@dataclass
class KernelCheck:
    c_size: float
    c_smooth: float
    gamma_estimate: float
    violations: list = field(default_factory=list)
    samples: int = 0


def check_kernel(K: KernelSpec, sample_budget: int = 2000, rng: np.random.Generator | None = None,
                 size_bound: float | None = None) -> KernelCheck:
    """Empirical size and smoothness constants of ``K`` (n = 1).

    Smoothness is sampled only where sum |x - y_i| > c |x - x'|.  The
    exponent estimate is the median local log-slope of |K(x) - K(x')| in
    |x - x'| as |x - x'| shrinks by a factor 10.  Samples whose size ratio
    exceeds ``size_bound`` (default: the kernel's scale) are violations.
    """
    rng = rng or np.random.default_rng(0)
    m, a = K.m, K.alpha
    bound = K.scale if size_bound is None else size_bound
    c_size, c_smooth, slopes, viol = 0.0, 0.0, [], []
    for _ in range(sample_budget):
        x = float(rng.uniform(-2, 2))
        ys = [float(v) for v in rng.uniform(-4, 4, size=m)]
        s = sum(abs(x - y) for y in ys)
        if s == 0:
            continue
        kx = float(K(x, ys))
        ratio = abs(kx) / s ** (a - m)
        c_size = max(c_size, ratio)
        if ratio > bound * (1 + 1e-12):
            viol.append({"x": x, "ys": ys, "ratio": ratio})
        h = float(rng.uniform(0.0, 1.0)) * s / K.c
        if h == 0:
            continue
        sign = 1.0 if rng.random() < 0.5 else -1.0
        diff = abs(kx - float(K(x + sign * h, ys)))
        c_smooth = max(c_smooth, diff * s ** (m - a + K.gamma) / h ** K.gamma)
        diff2 = abs(kx - float(K(x + sign * h / 10, ys)))
        if diff > 0 and diff2 > 0:
            slopes.append(math.log10(diff / diff2))
    gamma_est = float(np.median(slopes)) if slopes else math.nan
    return KernelCheck(c_size, c_smooth, gamma_est, viol, sample_budget)


# -- symbols and test functions ------------------------------------------------------------

@dataclass(frozen=True)
class Symbol:
    """A Lipschitz symbol with its order, seminorm and irregular points.

    ``kinks`` are points of non-differentiability; ``singular`` lists the
    subset where the derivative is unbounded.
    """

    func: Callable
    delta: float
    seminorm: float
    kinks: tuple = ()
    singular: tuple = ()
    label: str = ""
    spec: dict = field(default_factory=dict)

    def __call__(self, y):
        return self.func(y)

    def scaled(self, lam: float) -> "Symbol":
        f = self.func
        return Symbol(lambda y: lam * f(y), self.delta, abs(lam) * self.seminorm, self.kinks,
                      self.singular, f"{lam:g}*{self.label}",
                      {**self.spec, "scale": lam * self.spec.get("scale", 1.0)})

    @classmethod
    def constant(cls, value: float = 1.0, delta: float = 0.5) -> "Symbol":
        return cls(lambda y: np.full(np.shape(y), float(value)) if np.ndim(y) else float(value),
                   delta, 0.0, (), (), f"const({value:g})", {"kind": "constant", "value": value})

    @classmethod
    def coordinate(cls) -> "Symbol":
        return cls(lambda y: y, 1.0, 1.0, (), (), "x", {"kind": "coordinate"})

    @classmethod
    def power(cls, delta: float, center: float = 0.0) -> "Symbol":
        """|x - center|^delta, which has Lambda(delta) seminorm 1."""
        return cls(lambda y: np.abs(y - center) ** delta, delta, 1.0, (center,), (center,),
                   f"|x-{center:g}|^{delta:g}", {"kind": "power", "delta": delta, "center": center})

    @classmethod
    def clipped(cls, lo: float, hi: float, delta: float) -> "Symbol":
        """The coordinate clipped to [lo, hi]; seminorm (hi - lo)^(1 - delta)."""
        return cls(lambda y: np.clip(y, lo, hi), delta, (hi - lo) ** (1 - delta), (lo, hi), (),
                   f"clip[{lo:g},{hi:g}]", {"kind": "clipped", "lo": lo, "hi": hi, "delta": delta})


@dataclass(frozen=True)
class SymbolVector:
    entries: tuple

    def __init__(self, entries: Sequence[Symbol]):
        object.__setattr__(self, "entries", tuple(entries))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def seminorm(self) -> float:
        return max(b.seminorm for b in self.entries)

    def scaled(self, lam: float) -> "SymbolVector":
        return SymbolVector([b.scaled(lam) for b in self.entries])


@dataclass(frozen=True)
class TestFunction:
    """A bounded function supported in [a, b] with declared irregular points.

    ``func`` must accept numpy arrays; values outside [a, b] are masked to 0.
    """

    __test__ = False  # not a pytest class

    func: Callable
    a: float
    b: float
    kinks: tuple = ()
    singular: tuple = ()
    label: str = ""
    spec: dict = field(default_factory=dict)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        inside = (y >= self.a) & (y <= self.b)
        with np.errstate(all="ignore"):
            out = np.where(inside, self.func(y), 0.0)
        return float(out) if out.ndim == 0 else out

    def times(self, g: Callable, kinks=(), singular=(), label="") -> "TestFunction":
        f = self.func
        return TestFunction(lambda y: f(y) * g(y), self.a, self.b, self.kinks + tuple(kinks),
                            self.singular + tuple(singular), label or f"{self.label}*g", self.spec)

    def times_symbol(self, b: Symbol, label="") -> "TestFunction":
        return self.times(b.func, b.kinks, b.singular, label or f"{self.label}*{b.label}")

    def scaled(self, c: float) -> "TestFunction":
        return self.times(lambda y: c, label=f"{c:g}*{self.label}")

    def __add__(self, other: "TestFunction") -> "TestFunction":
        f, g = self, other
        return TestFunction(lambda y: f(y) + g(y), min(self.a, other.a), max(self.b, other.b),
                            self.kinks + other.kinks + (self.a, self.b, other.a, other.b),
                            self.singular + other.singular, f"{self.label}+{other.label}")

    @property
    def breakpoints(self) -> tuple:
        return tuple(sorted({self.a, self.b, *self.kinks, *self.singular}))

    @classmethod
    def indicator(cls, center: float = 0.5, radius: float = 0.5) -> "TestFunction":
        return cls(lambda y: np.ones_like(y), center - radius, center + radius, (), (),
                   f"chi[{center - radius:g},{center + radius:g}]",
                   {"kind": "indicator", "center": center, "radius": radius})

    @classmethod
    def bump(cls, center: float = 0.0, radius: float = 1.0, height: float = 1.0) -> "TestFunction":
        """Triangular bump of the given height."""
        return cls(lambda y: height * np.maximum(0.0, 1 - np.abs(y - center) / radius),
                   center - radius, center + radius, (center,), (), f"bump({center:g},{radius:g})",
                   {"kind": "bump", "center": center, "radius": radius, "height": height})

    @classmethod
    def gaussian(cls, center: float = 0.0, radius: float = 1.0, width: float = 0.5) -> "TestFunction":
        """Gaussian truncated to [center - radius, center + radius]."""
        return cls(lambda y: np.exp(-0.5 * ((y - center) / width) ** 2), center - radius,
                   center + radius, (), (), f"gauss({center:g},{width:g})",
                   {"kind": "gaussian", "center": center, "radius": radius, "width": width})

    @classmethod
    def zero(cls, center: float = 0.5, radius: float = 0.5) -> "TestFunction":
        return cls(lambda y: np.zeros_like(y), center - radius, center + radius, (), (), "0",
                   {"kind": "zero", "center": center, "radius": radius})

    def check_support(self, probes: Sequence[float] = (-1e3, -10.0, 10.0, 1e3)) -> bool:
        return all(self(y) == 0.0 for y in probes if not (self.a <= y <= self.b))


TestFunctionVector = Sequence[TestFunction]


# -- radial profiles ---------------------------------------------------------------------------

@dataclass
class _Profile:
    """Distances s = |x - y| at which one input is irregular, seen from x."""

    lo: float
    hi: float
    breaks: list
    singular: set

    def in_range(self, s):
        return self.lo <= s <= self.hi


def _profile(x: float, f: TestFunction) -> _Profile | None:
    if f.b <= f.a:
        return None
    lo = 0.0 if f.a <= x <= f.b else min(abs(f.a - x), abs(f.b - x))
    hi = max(abs(f.a - x), abs(f.b - x))
    breaks = sorted({abs(p - x) for p in f.breakpoints if lo <= abs(p - x) <= hi} | {lo, hi})
    singular = {abs(p - x) for p in f.singular}
    return _Profile(lo, hi, breaks, singular)


def _side_sum(x: float, f: TestFunction, s):
    return f(x + s) + f(x - s)


# -- graded engine (m <= 2) --------------------------------------------------------------------

def _near(v: float, pool, scale: float) -> bool:
    return any(abs(v - p) <= 1e-12 * max(scale, 1e-300) for p in pool)


def _close(end: float, other: float, pool, scale: float) -> bool:
    """True if a point of ``pool`` sits at ``end`` or outside the panel
    [end, other] within one panel width of ``end``."""
    h = abs(other - end)
    for p in pool:
        d = (p - end) if other < end else (end - p)
        if abs(p - end) <= 1e-12 * max(scale, 1e-300) or 0 <= d <= h:
            return True
    return False


def _geometric(a: float, b: float, sl: bool, sr: bool):
    """Split [a, b] (a > 0) at a 4^j so that no piece is wider than three times its left end.

    Functions of r/a (a column t = s/r, the weight r^p) are then analytic on
    a neighbourhood of every piece that is large relative to the piece.
    """
    if a <= 0 or b <= 4 * a:
        return [(a, b, sl, sr)]
    cuts = [a]
    while cuts[-1] * 4 < b * (1 - 1e-12):
        cuts.append(cuts[-1] * 4)
    if b - cuts[-1] < 0.25 * cuts[-1] and len(cuts) > 1:
        cuts.pop()
    cuts.append(b)
    n = len(cuts) - 1
    return [(cuts[i], cuts[i + 1], sl and i == 0, sr and i == n - 1) for i in range(n)]


def _graded_1(x, f, K, rule):
    pr = _profile(x, f)
    power = K.alpha - 1.0
    br = [0.0] + [b for b in pr.breaks if b > 0]
    total = []
    for a, b in zip(br[:-1], br[1:]):
        if b <= pr.lo:
            continue
        sl, sr = _close(a, b, pr.singular, b), _close(b, a, pr.singular, b)
        if a == 0:
            r, w = graded_nodes(a, b, rule, sl, sr, power=power)
        else:
            parts = [graded_nodes(lo, hi, rule, gl, gr) for lo, hi, gl, gr in _geometric(a, b, sl, sr)]
            r = np.concatenate([q[0] for q in parts])
            w = np.concatenate([q[1] for q in parts]) * r ** power
        if K.func is None:
            g = _side_sum(x, f, r) * K.scale
        else:
            g = sum(K.radial_part(x, [x + e * r], r) * f(x + e * r) for e in (-1.0, 1.0))
        total.append(math.fsum(w * g))
    return math.fsum(total)


def _column(kind: int, s: float, r):
    return s / r if kind == 1 else 1 - s / r


def _t_integral(x, f1, f2, K, rule, r, rm, cols, p1, p2):
    """Inner integral over t in [0, 1] at each radius in ``r``.

    ``cols`` lists the piece boundaries (kind, s, graded) in increasing t at
    r = rm.  A piece end is also graded when a singular column, active or
    not, lies just outside it.
    """
    acc = np.zeros_like(r)
    sing_t = [_column(1, s, rm) for s in p1.singular] + [_column(2, s, rm) for s in p2.singular]
    for (ka, sa, ga), (kb, sb, gb) in zip(cols[:-1], cols[1:]):
        t0, t1 = _column(ka, sa, rm), _column(kb, sb, rm)
        tm = 0.5 * (t0 + t1)
        # skip pieces where one of the inputs vanishes identically
        if not (p1.in_range(rm * tm) and p2.in_range(rm * (1 - tm))):
            continue
        ga = ga or _close(t0, t1, sing_t, 1.0)
        gb = gb or _close(t1, t0, sing_t, 1.0)
        u, wu = graded_nodes(0.0, 1.0, rule, ga, gb)
        ta, tb = _column(ka, sa, r), _column(kb, sb, r)
        h = (tb - ta)[:, None]
        T = ta[:, None] + h * u[None, :]
        S1 = r[:, None] * T
        S2 = r[:, None] - S1
        if K.func is None:
            g = _side_sum(x, f1, S1) * _side_sum(x, f2, S2) * K.scale
        else:
            g = 0.0
            for e1, e2 in itertools.product((-1.0, 1.0), repeat=2):
                y1, y2 = x + e1 * S1, x + e2 * S2
                g = g + K.radial_part(x, [y1, y2], r[:, None]) * f1(y1) * f2(y2)
        acc += (g * (h * wu[None, :])).sum(axis=1)
    return acc


def _graded_2(x, f1, f2, K, rule):
    p1, p2 = _profile(x, f1), _profile(x, f2)
    power = K.alpha - 1.0
    r_lo, r_hi = p1.lo + p2.lo, p1.hi + p2.hi
    b1 = [0.0, *p1.breaks, *p1.singular]
    b2 = [0.0, *p2.breaks, *p2.singular]
    cand = {u + v for u in b1 for v in b2}
    sing_r = {u + v for u in b1 for v in b2 if u in p1.singular or v in p2.singular}
    rb = sorted({0.0, r_lo, r_hi} | {c for c in cand if r_lo < c < r_hi})
    # t-breakpoints: (kind, s, singular) with t = s/r (kind 1) or t = 1 - s/r (kind 2)
    tcand = [(1, s, s in p1.singular) for s in set(b1) if s > 0] + \
            [(2, s, s in p2.singular) for s in set(b2) if s > 0]
    sing0, sing1 = 0.0 in p1.singular, 0.0 in p2.singular
    total = []
    for a, b in zip(rb[:-1], rb[1:]):
        if b <= r_lo or b - a <= 1e-15 * r_hi:
            continue
        sl, sr = _close(a, b, sing_r, r_hi), _close(b, a, sing_r, r_hi)
        if a == 0:
            r, wr = graded_nodes(a, b, rule, sl, sr, power=power)
        else:
            parts = [graded_nodes(lo, hi, rule, gl, gr) for lo, hi, gl, gr in _geometric(a, b, sl, sr)]
            r = np.concatenate([q[0] for q in parts])
            wr = np.concatenate([q[1] for q in parts]) * r ** power
        rm = 0.5 * (a + b)
        active = []
        for kind, s, sg in tcand:
            t = s / rm if kind == 1 else 1 - s / rm
            if 0 < t < 1:
                active.append((t, kind, s, sg))
        active.sort()
        # A column t = s/r (kind 1) meets a column t = 1 - s'/r (kind 2) at
        # r = s + s'; the ends are t = 0 = 0/r and t = 1 = 1 - 0/r.  A column
        # is graded when it is singular or meets a singular column of the
        # other kind inside [a, b] or within one panel width of it.
        def graded(kind, s, sg):
            if sg:
                return True
            others = p2.singular if kind == 1 else p1.singular
            return any(2 * a - b <= s + o <= 2 * b - a for o in others)
        cols = [(1, 0.0, graded(1, 0.0, sing0))]
        cols += [(kind, s, graded(kind, s, sg)) for _, kind, s, sg in active]
        cols.append((2, 0.0, graded(2, 0.0, sing1)))
        acc = _t_integral(x, f1, f2, K, rule, r, rm, cols, p1, p2)
        total.append(math.fsum(wr * acc))
    return math.fsum(total)


# -- adaptive engine (reference, any m) -------------------------------------------------------------

def _orthant_data(x: float, f: TestFunction, eps: int):
    """Distance range and breakpoints of y = x + eps*s (s >= 0) inside supp f."""
    pts = f.breakpoints
    if eps > 0:
        lo, hi = f.a - x, f.b - x
        kinks = [k - x for k in pts]
    else:
        lo, hi = x - f.b, x - f.a
        kinks = [x - k for k in pts]
    lo = max(lo, 0.0)
    if hi <= lo:
        return None
    return lo, hi, sorted({lo, hi, *(k for k in kinks if lo < k < hi)})


def _simplex_integral(G: Callable, m: int, r: float, coords_bps: list, spec: QuadSpec) -> float:
    """Integrate G(theta) over the simplex {theta >= 0, sum theta = 1}."""
    if m == 1:
        return G((1.0,))
    if m == 2:
        pts = [s / r for s in coords_bps[0]] + [1 - s / r for s in coords_bps[1]]
        return integrate_interval(lambda t: G((t, 1.0 - t)), 0.0, 1.0, spec, pts).value

    def rec(prefix, remaining, i):
        if i == m - 1:
            return G(tuple(prefix) + (remaining,))
        pts = [s / r for s in coords_bps[i]]
        if i + 1 == m - 1:
            pts += [remaining - s / r for s in coords_bps[i + 1]]
        return integrate_interval(lambda t: rec(prefix + [t], remaining - t, i + 1), 0.0, remaining,
                                  spec, pts).value

    return rec([], 1.0, 0)


def _adaptive(x, factors, kernel, spec) -> IntegralResult:
    m = len(factors)
    parts = []
    for eps in itertools.product((-1, 1), repeat=m):
        data = [_orthant_data(x, f, e) for f, e in zip(factors, eps)]
        if any(d is None for d in data):
            continue
        r_lo = math.fsum(d[0] for d in data)
        r_hi = math.fsum(d[1] for d in data)
        coords_bps = [d[2] for d in data]
        # G is irregular when subsets of coordinates sit at their breakpoints
        r_pts = {sum(c) for c in itertools.product(*[[0.0, *b] for b in coords_bps])}

        def G_of_r(r, eps=eps):
            if r <= 0:
                return 0.0

            def G(theta):
                ys = [x + e * r * t for e, t in zip(eps, theta)]
                val = float(kernel.radial_part(x, ys, r))
                for f, y in zip(factors, ys):
                    val *= float(f(y))
                    if val == 0.0:
                        return 0.0
                return val

            return _simplex_integral(G, m, r, coords_bps, spec)

        power = kernel.alpha - 1.0
        if r_lo > 0:
            res = integrate_interval(lambda r: r ** power * G_of_r(r), r_lo, r_hi, spec, r_pts)
        else:
            res = integrate_power_singular(G_of_r, power, r_hi, spec, r_pts)
        parts.append(res)
    return combine(parts)


def multilinear_integral(x: float, factors: Sequence[TestFunction], kernel: KernelSpec,
                         spec: QuadSpec = QuadSpec(), engine: str = "auto",
                         rule: GradedRule = DEFAULT_RULE) -> IntegralResult:
    """Integral of K(x, y) * prod factors_i(y_i) over R^m (n = 1).

    ``engine`` is ``"graded"``, ``"adaptive"`` or ``"auto"`` (graded when
    m <= 2).  The graded engine reports no error estimate (``err_estimate``
    is nan); its accuracy is pinned by comparison with the adaptive one.
    """
    if kernel.n != 1:
        raise NotImplementedError("operators are evaluated for n = 1")
    m = len(factors)
    if m != kernel.m:
        raise ValueError("kernel arity does not match the number of inputs")
    if not 0 < kernel.alpha < m:
        raise ValueError("need 0 < alpha < mn")
    x = float(x)
    if engine == "auto":
        engine = "graded" if m <= 2 else "adaptive"
    if engine == "adaptive":
        return _adaptive(x, factors, kernel, spec)
    if engine != "graded":
        raise ValueError(f"unknown engine {engine!r}")
    if m == 1:
        value = _graded_1(x, factors[0], kernel, rule)
    elif m == 2:
        value = _graded_2(x, factors[0], factors[1], kernel, rule)
    else:
        raise NotImplementedError("the graded engine handles m <= 2")
    return IntegralResult(value, math.nan, 0.0, True)


# -- operators ------------------------------------------------------------------------------------

def _kernel_for(K, m: int) -> KernelSpec:
    if isinstance(K, KernelSpec):
        return K
    if K is None:
        raise ValueError("a kernel (KernelSpec, ParamSet or alpha) is required")
    return KernelSpec.standard(float(getattr(K, "alpha", K)), m)


def ialpha_m(f: Sequence[TestFunction], x: float, params, spec: QuadSpec = QuadSpec(),
             engine: str = "auto", rule: GradedRule = DEFAULT_RULE) -> float:
    """I_alpha^m f(x) with the standard kernel (``params`` is a ParamSet or alpha)."""
    K = KernelSpec.standard(float(getattr(params, "alpha", params)), len(f))
    return multilinear_integral(x, f, K, spec, engine, rule).value


def t_alpha(f: Sequence[TestFunction], x: float, K, spec: QuadSpec = QuadSpec(),
            engine: str = "auto", rule: GradedRule = DEFAULT_RULE) -> float:
    return multilinear_integral(x, f, _kernel_for(K, len(f)), spec, engine, rule).value


def _commuted(f: TestFunction, b: Symbol, x: float) -> TestFunction:
    bx = float(b(x))
    return f.times(lambda y: bx - b.func(y), b.kinks, b.singular, f"({b.label}(x)-{b.label})*{f.label}")


def sum_commutator(b: SymbolVector, f: Sequence[TestFunction], x: float, j="all", K=None,
                   spec: QuadSpec = QuadSpec(), route: str = "direct", engine: str = "auto",
                   rule: GradedRule = DEFAULT_RULE) -> float:
    """T_{alpha,b_j} f(x) for j in 0..m-1, or their sum for ``j="all"``.

    ``route="direct"`` integrates (b_j(x) - b_j(y_j)) K prod f_i;
    ``route="expansion"`` evaluates b_j(x) T f - T(..., b_j f_j, ...).
    """
    m = len(f)
    K = _kernel_for(K, m)
    if j == "all":
        return math.fsum(sum_commutator(b, f, x, jj, K, spec, route, engine, rule) for jj in range(m))
    if route == "direct":
        factors = list(f)
        factors[j] = _commuted(f[j], b[j], x)
        return multilinear_integral(x, factors, K, spec, engine, rule).value
    if route == "expansion":
        mod = list(f)
        mod[j] = f[j].times_symbol(b[j])
        return float(b[j](x)) * t_alpha(f, x, K, spec, engine, rule) - t_alpha(mod, x, K, spec, engine, rule)
    raise ValueError(f"unknown route {route!r}")


def product_commutator_direct(b: SymbolVector, f: Sequence[TestFunction], x: float, K,
                              spec: QuadSpec = QuadSpec(), engine: str = "auto",
                              rule: GradedRule = DEFAULT_RULE) -> float:
    """Integral of K(x, y) prod (b_i(x) - b_i(y_i)) f_i(y_i)."""
    K = _kernel_for(K, len(f))
    factors = [_commuted(fi, bi, x) for bi, fi in zip(b, f)]
    return multilinear_integral(x, factors, K, spec, engine, rule).value


def product_commutator_expansion(b: SymbolVector, f: Sequence[TestFunction], x: float, K,
                                 spec: QuadSpec = QuadSpec(), engine: str = "auto",
                                 rule: GradedRule = DEFAULT_RULE) -> float:
    """Sum over sigma in {0,1}^m of (-1)^(m-|sigma|) prod b_i(x)^sigma_i
    times T(f_1 b_1^(1-sigma_1), ..., f_m b_m^(1-sigma_m))(x)."""
    m = len(f)
    K = _kernel_for(K, m)
    bx = [float(bi(x)) for bi in b]
    terms = []
    for sigma in itertools.product((0, 1), repeat=m):
        coef = (-1) ** (m - sum(sigma)) * math.prod(bx[i] for i in range(m) if sigma[i])
        if coef == 0:
            continue
        mod = [fi if s else fi.times_symbol(bi) for fi, bi, s in zip(f, b, sigma)]
        terms.append(coef * t_alpha(mod, x, K, spec, engine, rule))
    return math.fsum(terms)


def difference_of_products(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> tuple:
    """Both sides of prod(a-b) - prod(c-b) = sum_j (a_j-c_j) prod_{i<j}(a_i-b_i) prod_{i>j}(c_i-b_i)."""
    if not len(a) == len(b) == len(c):
        raise ValueError("a, b and c must have equal length")
    m = len(a)
    lhs = math.prod(ai - bi for ai, bi in zip(a, b)) - math.prod(ci - bi for ci, bi in zip(c, b))
    rhs = math.fsum(
        (a[j] - c[j]) * math.prod(a[i] - b[i] for i in range(j)) * math.prod(c[i] - b[i] for i in range(j + 1, m))
        for j in range(m)
    )
    return lhs, rhs


@dataclass
class SeminormEstimate:
    value: float
    pairs: int
    min_separation: float


def lipschitz_seminorm(b: Callable, delta: float, rng: np.random.Generator | None = None,
                       pairs: int = 4000, window: float = 4.0, kinks: Sequence[float] = ()) -> SeminormEstimate:
    """Lower estimate of sup |b(x) - b(y)| / |x - y|^delta from sampled pairs.

    Half of the pairs are drawn uniformly in [-window, window]; the rest have
    one end at a declared kink and log-uniform separations down to 1e-12.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    rng = rng or np.random.default_rng(0)
    k = np.arange(pairs)
    uni = rng.uniform(-window, window, size=(pairs, 2))
    anchors = np.asarray(list(kinks) or [0.0], dtype=float)
    sep = rng.choice((-1.0, 1.0), size=pairs) * 10 ** rng.uniform(-12, math.log10(window), size=pairs)
    x = np.where(k % 2 == 0, uni[:, 0], anchors[(k // 2) % len(anchors)])
    y = np.where(k % 2 == 0, uni[:, 1], x + sep)
    h = np.abs(x - y)
    keep = h > 0
    x, y, h = x[keep], y[keep], h[keep]
    q = np.abs(np.asarray(b(x), dtype=float) - np.asarray(b(y), dtype=float)) / h ** delta
    return SeminormEstimate(float(q.max()) if q.size else 0.0, pairs, float(h.min()) if h.size else math.inf)
