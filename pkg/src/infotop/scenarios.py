"""Shift-map scenarios for the knowledge-spread topologies.

Finite scenario: methods ``x1..xk`` with cyclic shift.  The opens are the
rate tables ``(1/M) g_S`` where ``g_S`` is 1 on a subset ``S`` and
``default_level`` elsewhere.  Those with ``|S| = 1`` are the canonical
one-peak representatives.  The remaining ones are forced by closing under
max/min and include ``F`` (``S = X``) and ``O`` (``S`` empty).

Windowed scenario: points ``x_-W .. x_W``, shift ``x_j -> x_(j+1)`` with the
right end absorbing, constant background ``theta``.  An observer differing
from ``theta`` only on ``{-i+1, .., i-1}`` has radius ``i``.  Every finite
deviation has some radius, so inside the window the opens are all observers
below ``theta``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .covers import Cover, cover_pullback, make_cover, map_entropy, min_subcover
from .errors import WindowTooSmall
from .observers import CompleteObserverSpace, DownSetFamily, Observer, line_ground, observer_universe
from .rational import ONE, scalar, unit_scalar
from .topology import PointMap, Topology, compose, pull_back, pullback_space


@dataclass
class ShiftScenario:
    topology: Topology
    f: PointMap
    catalog: list[Cover]
    peaks: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)


def build_shift_scenario_finite(k: int, default_level=0, M: int = 10) -> ShiftScenario:
    if k < 2:
        raise ValueError("k must be at least 2")
    level = unit_scalar(default_level)
    if level == ONE:
        raise ValueError("default_level 1 makes every representative equal to F")
    pts = [f"x{i}" for i in range(1, k + 1)]
    ground = line_ground(pts, "gamma")
    hi, lo = Fraction(1, M), level / M

    def table(subset):
        return Observer(ground, [hi if p in subset else lo for p in pts])

    subsets = [frozenset(s) for r in range(k + 1) for s in itertools.combinations(pts, r)]
    elements = [table(s) for s in subsets]
    uni = observer_universe(elements)
    F, O = table(pts), table(())
    top = Topology(uni, F, elements, O)
    f = PointMap.from_dict({p: pts[(i + 1) % k] for i, p in enumerate(pts)})
    peaks = {p: table({p}) for p in pts}
    half = pts[: k // 2]
    catalog = [
        make_cover(F, [F], top, "trivial"),
        make_cover(F, list(peaks.values()), top, "peaks"),
        make_cover(F, [table(half), table(set(pts) - set(half))], top, "halves"),
    ]
    return ShiftScenario(top, f, catalog, peaks, {"k": k, "default_level": level, "M": M})


def _label(j: int) -> str:
    return f"x{j}"


def build_shift_scenario_windowed(k: int, window: int, theta) -> ShiftScenario:
    """Window ``[-window, window]`` with the radius ``k + 1`` cover of ``2k`` members.

    Member ``S_j`` (``-k < j <= k``) equals ``theta`` except that it is 0 on
    ``{-k+1, .., k}`` minus ``{j}``; their max is ``theta`` and no member
    can be dropped, so the first term is ``log(2k)``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if window <= k:
        raise WindowTooSmall(f"window {window} must exceed k = {k}")
    theta = unit_scalar(theta)
    if theta == 0:
        raise ValueError("theta must be positive")
    idx = list(range(-window, window + 1))
    pts = [_label(j) for j in idx]
    ground = line_ground(pts, "gamma")
    space = CompleteObserverSpace(ground)
    F = Observer.constant(ground, theta)
    top = Topology(space, F, DownSetFamily(F), Observer.constant(ground, 0))
    f = PointMap.from_dict({_label(j): _label(min(j + 1, window)) for j in idx})
    core = range(-k + 1, k + 1)
    members = {}
    for j in core:
        members[j] = Observer(ground, [0 if (i in core and i != j) else theta for i in idx])
    cover = make_cover(F, list(members.values()), top, f"radius-{k + 1}")
    params = {"k": k, "window": window, "theta": theta, "target": math.log(2 * k)}
    return ShiftScenario(top, f, [cover], {j: m for j, m in members.items()}, params)


def radius(obs: Observer, theta, window: int) -> int:
    """Least ``i`` with ``obs == theta`` outside ``{-i+1, .., i-1}``."""
    theta = scalar(theta)
    idx = range(-window, window + 1)
    dev = [abs(j) for j, v in zip(idx, obs.values) if v != theta]
    return max(dev) + 1 if dev else 0


@dataclass
class WindowedReport:
    k: int
    window: int
    target: float
    trace: object
    pulled_counts: tuple
    radius_steps: list
    monotone: bool

    @property
    def invariant(self) -> bool:
        return self.pulled_counts[0] == self.pulled_counts[1]

    @property
    def radius_ok(self) -> bool:
        return all(after <= before + 1 for before, after in self.radius_steps)

    def lines(self) -> list[str]:
        N = self.trace.N
        return [
            f"k {self.k} window {self.window}",
            "N_n " + " ".join(str(x) for x in N),
            f"prefix estimate {self.trace.estimate:.12g} at n={self.trace.argmin}",
            f"certified limit {self.trace.limit} ({self.trace.certificate})",
            f"target log(2k) {self.target:.12g}",
            f"a_1 equals target: {math.isclose(math.log(N[0]), self.target)}",
            f"N invariant under pull-back: {self.invariant}",
            f"pull-back raises radius by at most 1: {self.radius_ok}",
            f"a_n nondecreasing: {self.monotone}",
        ]


def run_windowed(scn: ShiftScenario, n_max: int = 8, size_cap: int = 100_000) -> WindowedReport:
    """Trace, f-invariance of N and the radius step of the pull-back."""
    top, f = scn.topology, scn.f
    c = scn.catalog[0]
    trace = map_entropy(f, c, top, n_max, size_cap)
    pulled = cover_pullback(c, f, top)
    counts = (min_subcover(c, top).count, min_subcover(pulled, top).count)
    theta, window = scn.params["theta"], scn.params["window"]
    steps = [(radius(m, theta, window), radius(pull_back(m, f), theta, window)) for m in c.members]
    mono = all(a <= b for a, b in zip(trace.N, trace.N[1:]))
    return WindowedReport(scn.params["k"], window, scn.params["target"], trace, counts, steps, mono)


def relabeled_conjugate(scn: ShiftScenario, rotation: int = 1, prefix: str = "y"):
    """A copy of a finite scenario on renamed points, with the renaming ``h``.

    ``h: Y -> X`` sends ``y_i`` to ``x_(i + rotation)``; ``g = h^-1 o f o h``
    is the conjugate shift and the Y topology is pulled back along ``h``.
    """
    top, f = scn.topology, scn.f
    xs = list(f.source)
    ys = [f"{prefix}{i + 1}" for i in range(len(xs))]
    h = PointMap.from_dict({y: xs[(i + rotation) % len(xs)] for i, y in enumerate(ys)}, source=ys, target=xs)
    g = compose(h.inverse(), compose(f, h))
    return g, h, pullback_space(h, top)
