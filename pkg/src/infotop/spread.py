"""Knowledge-spread model: exact polynomial solutions and an RK4 integrator.

For a method with transmission rate ``g`` the probabilities evolve as

    p0' = 1 - g,   p1' = g,   pn' = (n - 1) g p_{n-1}   (1 < n <= M)

which is triangular and linear, so each ``p_n`` is a polynomial in ``t``
with rational coefficients.  Those polynomials are the normative solution;
the RK4 integrator exists to cross-check them.  The right-hand sides for
``n = 0, 1`` do not conserve total mass and entries leave [0, 1] for large
``t``.  Both effects are reported, never repaired.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import IndexOutOfRange, MethodSetMismatch
from .observers import Observer, line_ground, obs_join, obs_meet
from .rational import ONE, ZERO, decimal, render, scalar, unit_scalar


def sawtooth_gamma(x) -> Fraction:
    """``(1 + 3x + floor(-3x)) / 100``: period 1/3, peak 1/100 where 3x is whole."""
    x = scalar(x)
    return (1 + 3 * x + math.floor(-3 * x)) / Fraction(100)


@dataclass(frozen=True)
class SpreadModel:
    """Methods (name, numeric tag), their rates, the cap ``M`` and initial tables."""

    methods: tuple
    gamma: Mapping[str, Fraction]
    M: int
    time_interval: tuple = (ZERO, Fraction(10))
    p0: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be a positive integer")
        names = [m for m, _ in self.methods]
        if len(set(names)) != len(names):
            raise ValueError("method names must be unique")
        gam = {m: unit_scalar(self.gamma[m]) for m in names}
        lo, hi = (scalar(v) for v in self.time_interval)
        if not lo <= 0 <= hi:
            raise ValueError("the time interval must contain 0")
        init = {}
        for m in names:
            row = tuple(unit_scalar(v) for v in self.p0.get(m, (ZERO,) * (self.M + 1)))
            if len(row) != self.M + 1:
                raise ValueError(f"initial table for {m} needs {self.M + 1} entries")
            init[m] = row
        object.__setattr__(self, "methods", tuple((m, scalar(tag)) for m, tag in self.methods))
        object.__setattr__(self, "gamma", gam)
        object.__setattr__(self, "time_interval", (lo, hi))
        object.__setattr__(self, "p0", init)

    @classmethod
    def from_tags(cls, tags: Sequence, M: int = 10, time_interval=(0, 10), gamma_fn=sawtooth_gamma, p0=None):
        """One method per numeric tag, named by its exact value, rate ``gamma_fn(tag)``."""
        methods = [(render(scalar(x)), scalar(x)) for x in tags]
        return cls(tuple(methods), {n: gamma_fn(x) for n, x in methods}, M, time_interval, p0 or {})

    @property
    def names(self) -> list[str]:
        return [m for m, _ in self.methods]

    def _check(self, method):
        if method not in self.gamma:
            raise KeyError(f"unknown method {method!r}")


# --------------------------------------------------------------- exact path


def _integrate(poly: list) -> list:
    return [ZERO] + [c / (i + 1) for i, c in enumerate(poly)]


def _polyval(poly, t):
    acc = ZERO
    for c in reversed(poly):
        acc = acc * t + c
    return acc


@lru_cache(maxsize=512)
def _polys(g: Fraction, init: tuple) -> tuple:
    M = len(init) - 1
    out = [[init[0], 1 - g]]
    if M >= 1:
        out.append([init[1], g])
    for n in range(2, M + 1):
        p = _integrate([(n - 1) * g * c for c in out[n - 1]])
        p[0] = init[n]
        out.append(p)
    return tuple(tuple(_trim(p)) for p in out)


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def pn_polynomials(model: SpreadModel, method: str) -> tuple:
    """Coefficient tuples (constant term first) of p_0 .. p_M."""
    model._check(method)
    return _polys(model.gamma[method], model.p0[method])


def pn_closed_form(model: SpreadModel, method: str, n: int, t) -> Fraction:
    """Exact ``p_n(t)``."""
    if not 0 <= n <= model.M:
        raise IndexOutOfRange(f"n = {n} outside 0..{model.M}")
    t = scalar(t)
    lo, hi = model.time_interval
    if not lo <= t <= hi:
        raise IndexOutOfRange(f"t = {render(t)} outside [{render(lo)}, {render(hi)}]")
    return _polyval(pn_polynomials(model, method)[n], t)


def pn_closed_form_grid(model: SpreadModel, method: str, ts) -> np.ndarray:
    """Float samples of every ``p_n`` on ``ts``; shape (len(ts), M + 1)."""
    ts = np.asarray(ts, dtype=float)
    polys = pn_polynomials(model, method)
    return np.stack([np.polyval([float(c) for c in reversed(p)], ts) for p in polys], axis=1)


def display_formula(g, init: Sequence, n: int, t) -> Fraction:
    """The textbook closed form with a uniform ``(n-1)!`` prefactor.

    Agrees with the exact solution for ``n <= 3``; from ``n = 4`` on the
    coefficient of ``p_m(0)`` should be ``(n-1)!/(m-1)!``, so the two differ
    whenever some ``p_m(0)`` with ``m >= 3`` is nonzero.
    """
    g, t = scalar(g), scalar(t)
    init = [scalar(v) for v in init]
    if n == 0:
        return (1 - g) * t + init[0]
    if n == 1:
        return g * t + init[1]
    fact = math.factorial(n - 1)
    total = fact * g**n * t**n / math.factorial(n)
    for m in range(1, n):
        total += fact * g ** (n - m) * init[m] * t ** (n - m) / math.factorial(n - m)
    return total + init[n]


def expected_spread(model: SpreadModel, method: str, t) -> Fraction:
    """Exact ``sum n * p_n(t)``."""
    return sum((n * pn_closed_form(model, method, n, t) for n in range(1, model.M + 1)), ZERO)


# ------------------------------------------------------------- numeric path


@dataclass(frozen=True)
class SpreadState:
    t: float
    p: tuple
    range_flags: tuple

    @property
    def mass(self) -> float:
        return float(sum(self.p))

    @property
    def out_of_range(self) -> bool:
        return any(self.range_flags)


def _system(g: float, M: int):
    A = np.zeros((M + 1, M + 1))
    b = np.zeros(M + 1)
    b[0] = 1 - g
    if M >= 1:
        b[1] = g
    for n in range(2, M + 1):
        A[n, n - 1] = (n - 1) * g
    return A, b


def integrate_numeric(model: SpreadModel, method: str, t_end, step) -> list[SpreadState]:
    """Fixed-step RK4 from t = 0; one state per step (a short last step if needed)."""
    model._check(method)
    step = float(scalar(step))
    if step <= 0:
        raise ValueError("step must be positive")
    t_end = float(scalar(t_end))
    A, b = _system(float(model.gamma[method]), model.M)
    y = np.array([float(v) for v in model.p0[method]])
    n_full = int(math.floor(t_end / step + 1e-9))
    times = [i * step for i in range(n_full + 1)]
    if t_end - times[-1] > 1e-12 * max(1.0, t_end):
        times.append(t_end)
    out = [_state(times[0], y)]
    for t0, t1 in zip(times, times[1:]):
        h = t1 - t0
        k1 = A @ y + b
        k2 = A @ (y + h / 2 * k1) + b
        k3 = A @ (y + h / 2 * k2) + b
        k4 = A @ (y + h * k3) + b
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(_state(t1, y))
    return out


def _state(t, y):
    vals = tuple(float(v) for v in y)
    return SpreadState(t, vals, tuple(not 0.0 <= v <= 1.0 for v in vals))


def max_discrepancy(model: SpreadModel, method: str, t_end=10, step=Fraction(1, 1000)) -> float:
    """Largest |exact - RK4| over the trajectory and every n."""
    traj = integrate_numeric(model, method, t_end, step)
    ts = [s.t for s in traj]
    num = np.array([s.p for s in traj])
    return float(np.max(np.abs(num - pn_closed_form_grid(model, method, ts))))


# --------------------------------------------------------------- algebra side


def gamma_observer(model: SpreadModel) -> Observer:
    """The rate table as a one-dimensional observer over the methods."""
    return Observer(line_ground(model.names, "gamma"), [model.gamma[m] for m in model.names])


def gamma_algebra_bridge(a: SpreadModel, b: SpreadModel) -> tuple[SpreadModel, SpreadModel]:
    """Models whose rates are the entrywise max and min of the two rate tables."""
    if a.names != b.names:
        raise MethodSetMismatch("models use different method lists")
    ga, gb = gamma_observer(a), gamma_observer(b)
    j, m = obs_join(ga, gb), obs_meet(ga, gb)

    def rebuild(obs):
        return SpreadModel(a.methods, dict(zip(a.names, obs.values)), a.M, a.time_interval, a.p0)

    return rebuild(j), rebuild(m)


def level_model(names: Sequence[str], level, M: int, time_interval=(0, 10)) -> SpreadModel:
    return SpreadModel(tuple((n, ZERO) for n in names), {n: scalar(level) for n in names}, M, time_interval)


# ------------------------------------------------------------------ figures

CURVE_TAGS = (Fraction(4), Fraction(9, 2), Fraction(49, 10))


def _grid(lo, hi, step) -> list[Fraction]:
    lo, hi, step = scalar(lo), scalar(hi), scalar(step)
    n = int((hi - lo) / step)
    return [lo + i * step for i in range(n + 1)]


def emit_figure_data(
    figure: str,
    model: SpreadModel | None = None,
    n: int = 2,
    t_grid=None,
    x_grid=None,
    methods: Sequence | None = None,
) -> list[list[str]]:
    """CSV rows (header first) for the rate sawtooth, p_n curves and the p_n surface.

    ``sawtooth``: columns x, gamma.  ``curves``: t then one column per method.
    ``surface``: x, t, p_n.  Values use 12 significant digits.
    """
    t_grid = list(t_grid) if t_grid is not None else _grid(0, 10, Fraction(1, 10))
    if figure == "sawtooth":
        xs = list(x_grid) if x_grid is not None else _grid(0, 2, Fraction(1, 60))
        return [["x", "gamma"]] + [[decimal(x), decimal(sawtooth_gamma(x))] for x in xs]
    if figure == "curves":
        tags = list(methods) if methods is not None else list(CURVE_TAGS)
        model = model or SpreadModel.from_tags(tags)
        names = [render(scalar(x)) for x in tags]
        rows = [["t"] + [f"p{n}[x={nm}]" for nm in names]]
        for t in t_grid:
            rows.append([decimal(t)] + [decimal(pn_closed_form(model, nm, n, t)) for nm in names])
        return rows
    if figure == "surface":
        xs = list(x_grid) if x_grid is not None else _grid(4, 5, Fraction(1, 20))
        model = model or SpreadModel.from_tags(xs)
        rows = [["x", "t", f"p{n}"]]
        for x in xs:
            nm = render(scalar(x))
            for t in t_grid:
                rows.append([decimal(x), decimal(t), decimal(pn_closed_form(model, nm, n, t))])
        return rows
    raise ValueError(f"unknown figure {figure!r}")
