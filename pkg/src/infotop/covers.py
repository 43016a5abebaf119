"""Open covers, compactness, minimal subcovers and open-cover entropy.

A cover of ``H`` is a finite list of opens together with a witness ``H1``
from their sup-set satisfying ``H == meet(H1, F)``.  Every constructor here
re-validates its result, so no unvalidated :class:`Cover` escapes.

When the universe's supremum is the entrywise max, "does this subfamily
cover H" reduces exactly to a set-cover instance over table entries, which
the compiled kernel in :mod:`infotop._kernels` solves.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import _kernels
from .algebra import AlgebraUniverse
from .errors import (
    HypothesisNotMet,
    HypothesisViolation,
    NonCommutativeMeet,
    NotACover,
    NotHomeomorphism,
    NotIntertwining,
    SizeCapExceeded,
    TargetMismatch,
    TheoremViolation,
    Undecidable,
)
from .observers import CompleteObserverSpace, DownSetFamily, Observer, ScaleFamily, family_member, zero
from .rational import render
from .topology import (
    PointMap,
    Topology,
    check_continuous,
    compose,
    product_space,
    pull_back,
)

ENUMERATION_CAP = 20


@dataclass(frozen=True)
class Cover:
    target: Any
    members: tuple
    witness: Any
    witnesses: tuple = ()
    name: str = ""

    def __len__(self):
        return len(self.members)


# ------------------------------------------------------------ cover checks


def _encode_problem(members: Sequence, target, t: Topology):
    """Set-cover encoding of "sub-family covers target", or None if unavailable.

    Entry ``v`` is hit by member ``m`` when ``m[v] >= F[v]`` (if the target
    reaches F there) or ``m[v] == target[v]`` (otherwise).  Members exceeding
    the target where it sits below F can never appear in a cover.
    """
    uni = t.universe
    if not getattr(uni, "lub_is_cellwise", False) or uni.encoder is None:
        return None
    enc = uni.encoder
    h, f = enc(target), enc(t.F)
    strict = [v for v in range(len(h)) if h[v] < f[v]]
    masks, allowed = [], []
    for idx, m in enumerate(members):
        e = enc(m)
        if any(e[v] > h[v] for v in strict):
            continue
        mask = 0
        for v in range(len(h)):
            if (e[v] >= f[v]) if h[v] == f[v] else (e[v] == h[v]):
                mask |= 1 << v
        masks.append(mask)
        allowed.append(idx)
    return masks, allowed, (1 << len(h)) - 1


def covering_witnesses(members: Sequence, target, t: Topology) -> list:
    """Sup-set elements S of ``members`` with ``meet(S, F) == target``."""
    return [s for s in t.universe.sup_set(list(members)) if t.meet(s, t.F) == target]


def covers(members: Sequence, target, t: Topology) -> bool:
    return bool(members) and bool(covering_witnesses(members, target, t))


def _check_members_open(members, t: Topology):
    for m in members:
        if not t.is_member(m):
            raise NotACover(f"cover member {m!r} is not open")


def make_cover(target, members: Sequence, t: Topology, name: str = "") -> Cover:
    """Validate ``members`` as an open cover of ``target``."""
    members = tuple(dict.fromkeys(members))
    if not members:
        raise NotACover("a cover needs at least one member")
    _check_members_open(members, t)
    ws = covering_witnesses(members, target, t)
    if not ws:
        raise NotACover("no sup-set element S of the members has S ^ F equal to the target")
    return Cover(target, members, ws[0], tuple(ws), name)


def _validated(target, members, witness, t: Topology, what: str, name: str = "") -> Cover:
    members = tuple(dict.fromkeys(members))
    _check_members_open(members, t)
    sup = t.universe.sup_set(list(members))
    if witness not in sup or t.meet(witness, t.F) != target:
        raise NotACover(f"{what}: derived witness does not certify the cover")
    return Cover(target, members, witness, tuple(s for s in sup if t.meet(s, t.F) == target), name)


# ---------------------------------------------------------- minimal covers


@dataclass
class Subcover:
    count: int
    members: tuple
    method: str
    examined: int = 0


def min_subcover(c: Cover, t: Topology) -> Subcover:
    """Smallest sub-list of ``c.members`` that still covers ``c.target``.

    Exact in both routes: the set-cover kernel when the supremum is the
    entrywise max, otherwise a search by increasing cardinality.
    """
    prob = _encode_problem(c.members, c.target, t)
    if prob is not None:
        masks, allowed, full = prob
        picked = _kernels.min_set_cover(masks, full)
        if picked is None:
            raise NotACover("cover lost its covering property")
        if not picked:
            # every entry satisfied by any allowed member alone
            picked = [0]
        chosen = tuple(c.members[allowed[j]] for j in picked)
        return Subcover(len(chosen), chosen, f"set-cover kernel ({_kernels.BACKEND})")
    return _min_subcover_search(c, t)


def _min_subcover_search(c: Cover, t: Topology) -> Subcover:
    examined = 0
    for r in range(1, len(c.members) + 1):
        for sub in itertools.combinations(c.members, r):
            examined += 1
            if covers(sub, c.target, t):
                return Subcover(r, sub, "cardinality search", examined)
    raise NotACover("cover lost its covering property")


@dataclass(frozen=True)
class LogCount:
    n: int

    @property
    def log(self) -> float:
        return math.log(self.n)

    def __float__(self):
        return self.log


def cover_entropy(c: Cover, t: Topology) -> LogCount:
    """Natural log of the minimal subcover size, carried with its integer."""
    return LogCount(min_subcover(c, t).count)


# ---------------------------------------------------------- constructions


def meet_is_commutative(universe) -> bool:
    cached = getattr(universe, "_meet_commutative", None)
    if cached is not None:
        return cached
    if isinstance(universe, CompleteObserverSpace):
        res = not universe.free_dims
    elif getattr(universe, "finite", False):
        els = universe.elements
        res = all(universe.meet(a, b) == universe.meet(b, a) for a in els for b in els)
    elif getattr(universe, "factors", None):
        res = all(meet_is_commutative(u) for u in universe.factors)
    else:
        raise Undecidable("cannot decide meet commutativity on this universe")
    try:
        universe._meet_commutative = res
    except AttributeError:
        pass
    return res


def _require_commutative(t: Topology):
    if not meet_is_commutative(t.universe):
        raise NonCommutativeMeet("cover joins assume a commutative meet")


def cover_join(a: Cover, b: Cover, t: Topology) -> Cover:
    """Pairwise meets ``E ^ G`` (E from a, G from b), witness ``a.witness ^ b.witness``."""
    if a.target != b.target:
        raise TargetMismatch("covers have different targets")
    _require_commutative(t)
    meet = t.meet
    members = [meet(e, g) for e in a.members for g in b.members]
    return _validated(a.target, members, meet(a.witness, b.witness), t, "cover join")


def cover_union_refine(a: Cover, b: Cover, t: Topology) -> Cover:
    """Meets ``E ^ G`` over ordered pairs from the union, witness ``a.witness v b.witness``."""
    if a.target != b.target:
        raise TargetMismatch("covers have different targets")
    _require_commutative(t)
    meet = t.meet
    pool = list(dict.fromkeys(a.members + b.members))
    members = [meet(e, g) for e in pool for g in pool]
    return _validated(a.target, members, t.join(a.witness, b.witness), t, "union refinement")


def cover_pullback(c: Cover, f: PointMap, t_source: Topology) -> Cover:
    """``H o f`` for every member; validated on the source topology."""
    return _validated(
        pull_back(c.target, f),
        [pull_back(m, f) for m in c.members],
        pull_back(c.witness, f),
        t_source,
        "pull-back",
        c.name,
    )


# -------------------------------------------------------------- compactness


@dataclass
class CompactVerdict:
    compact: bool
    reason: str
    cover: Cover | None = None
    witness_sequence: list = field(default_factory=list)

    def __bool__(self):
        return self.compact


def is_compact(h, t: Topology) -> CompactVerdict:
    """Decide compactness of ``h`` (which must satisfy ``h == h ^ F``)."""
    if t.meet(h, t.F) != h:
        raise ValueError("compactness is defined for H with H = H ^ F")
    if isinstance(t.opens, ScaleFamily):
        return _compact_scale_family(h, t)
    if isinstance(t.opens, DownSetFamily):
        return _compact_downset(h, t)
    c = find_cover(h, t)
    if c is None:
        return CompactVerdict(False, "no open cover exists")
    return CompactVerdict(True, "finite opens: every cover is already finite", c)


def find_cover(h, t: Topology, cap: int = ENUMERATION_CAP) -> Cover | None:
    opens = t.opens
    prob = _encode_problem(opens, h, t)
    if prob is not None:
        masks, allowed, full = prob
        picked = _kernels.min_set_cover(masks, full)
        if picked is None:
            return None
        picked = picked or [0]
        if not allowed:
            return None
        return make_cover(h, [opens[allowed[j]] for j in picked], t)
    if covers(opens, h, t):
        return make_cover(h, opens, t)
    if len(opens) > cap:
        raise Undecidable(f"{len(opens)} opens exceed the enumeration cap {cap}")
    for r in range(1, len(opens) + 1):
        for sub in itertools.combinations(opens, r):
            if covers(sub, h, t):
                return make_cover(h, sub, t)
    return None


def _compact_scale_family(h, t: Topology) -> CompactVerdict:
    fam: ScaleFamily = t.opens
    m = family_member(fam, h)
    if not m.member:
        raise Undecidable("only family members are supported as compactness targets")
    r0 = m.scale
    if r0 == fam.lo:
        return CompactVerdict(True, f"scale {render(r0)} is the least scale: {{H}} is a cover and every cover contains H")
    seq = [fam.lo + (r0 - fam.lo) * Fraction(n, n + 1) for n in range(1, 6)]
    return CompactVerdict(
        False,
        f"scales r_n = {render(fam.lo)} + ({render(r0 - fam.lo)}) n/(n+1) have sup {render(r0)}, "
        "attained by no finite sub-family",
        witness_sequence=seq,
    )


def _compact_downset(h, t: Topology) -> CompactVerdict:
    if all(v == 0 for v in h.values):
        return CompactVerdict(True, "H is zero: every cover consists of H itself")
    seq = [Fraction(n, n + 1) for n in range(1, 6)]
    return CompactVerdict(
        False,
        "members (n/(n+1)) H lie in the family, their sup is H, and no finite sub-family reaches it",
        witness_sequence=seq,
    )


def enumerate_covers(h, t: Topology, cap: int = ENUMERATION_CAP) -> list[tuple]:
    """Every subset of the (finite) opens that covers ``h``."""
    opens = list(t.opens)
    if len(opens) > cap:
        raise Undecidable(f"{len(opens)} opens exceed the enumeration cap {cap}")
    prob = _encode_problem(opens, h, t)
    if prob is not None:
        masks, allowed, full = prob
        out = []
        for s in _kernels.covering_subsets(masks, full):
            if s:
                out.append(tuple(opens[allowed[j]] for j in range(len(allowed)) if s >> j & 1))
        return out
    out = []
    for r in range(1, len(opens) + 1):
        for sub in itertools.combinations(opens, r):
            if covers(sub, h, t):
                out.append(sub)
    return out


@dataclass
class CompactJoinVerdict:
    h_compact: bool
    k_compact: bool
    hypothesis_met: bool
    join_compact: bool
    inclusion_holds: bool
    covers_checked: int = 0
    inclusion_pairs: int = 0

    @property
    def holds(self) -> bool:
        return self.inclusion_holds and (
            not (self.h_compact and self.k_compact and self.hypothesis_met) or self.join_compact
        )


def check_compact_join(h, k, t: Topology, cap: int = ENUMERATION_CAP, inclusion_samples: int = 4000, seed: int = 0) -> CompactJoinVerdict:
    """Compactness of ``h v k`` plus the sup-set inclusion it rests on.

    The shared-cover hypothesis is checked by enumerating every cover of
    ``h v k``; an unmet hypothesis is reported, not raised.
    """
    hk = t.join(h, k)
    hc, kc = bool(is_compact(h, t)), bool(is_compact(k, t))
    cov = enumerate_covers(hk, t, cap)
    hyp = all(covers(c, h, t) and covers(c, k, t) for c in cov)
    jc = bool(is_compact(hk, t))
    inclusion, pairs = _sup_join_inclusion(t, inclusion_samples, seed)
    return CompactJoinVerdict(hc, kc, hyp, jc, inclusion, len(cov), pairs)


def _sup_join_inclusion(t: Topology, samples: int, seed: int):
    """{H v K : H in sup(A), K in sup(B)} is inside sup(A u B) for subsets of the opens."""
    opens = list(t.opens)
    uni = t.universe
    subsets = [s for r in range(1, len(opens) + 1) for s in itertools.combinations(opens, r)]
    pairs = list(itertools.product(subsets, repeat=2))
    if len(pairs) > samples:
        rng = random.Random(seed)
        pairs = rng.sample(pairs, samples)
    for a, b in pairs:
        target = uni.sup_set(list(dict.fromkeys(a + b)))
        for x in uni.sup_set(list(a)):
            for y in uni.sup_set(list(b)):
                if t.join(x, y) not in target:
                    return False, len(pairs)
    return True, len(pairs)


@dataclass
class ProductCompactVerdict:
    factors_compact: list
    product_compact: bool
    covers_enumerated: int
    shape_equivalence: bool
    product: Topology | None = None

    @property
    def holds(self) -> bool:
        return not all(self.factors_compact) or (self.product_compact and self.shape_equivalence)


def check_product_compact(factors: Sequence[Topology], cap: int = ENUMERATION_CAP) -> ProductCompactVerdict:
    """Product of compact factors is compact; product-shaped covers match factor covers."""
    p = product_space(factors)
    fc = [bool(is_compact(f.F, f)) for f in factors]
    pc = bool(is_compact(p.F, p))
    found = enumerate_covers(p.F, p, cap)
    factor_subsets = [
        [s for r in range(1, len(f.opens) + 1) for s in itertools.combinations(f.opens, r)] for f in factors
    ]
    from .topology import ProductElement

    equiv = True
    for combo in itertools.product(*factor_subsets):
        each = all(covers(s, f.F, f) for s, f in zip(combo, factors))
        members = [ProductElement(parts) for parts in itertools.product(*combo)]
        if covers(members, p.F, p) != each:
            equiv = False
            break
    return ProductCompactVerdict(fc, pc, len(found), equiv, p)


@dataclass
class PullbackCompactVerdict:
    pulled_compact: bool
    compact: bool
    correspondence: bool
    subsets_checked: int

    @property
    def holds(self) -> bool:
        return self.correspondence and (not self.pulled_compact or self.compact)


def check_pullback_compact(d, f: PointMap, top_x: Topology, top_y: Topology, cap: int = ENUMERATION_CAP) -> PullbackCompactVerdict:
    """Compactness of ``d o f`` on Y transfers back to ``d`` on X.

    Requires the Y universe to be exactly the pulled-back X universe and the
    pull-back to separate elements; raises :class:`HypothesisNotMet` otherwise.
    """
    ux, uy = top_x.universe, top_y.universe
    if not check_continuous(f, top_y, top_x):
        raise HypothesisNotMet("the map is not continuous")
    if getattr(ux, "finite", False):
        pulled = {}
        for e in ux.elements:
            p = pull_back(e, f)
            if p in pulled and pulled[p] != e:
                raise HypothesisNotMet(f"pull-back identifies {pulled[p]!r} and {e!r}")
            pulled[p] = e
        if not getattr(uy, "finite", False) or set(pulled) != set(uy.elements):
            raise HypothesisNotMet("Y universe is not the pulled-back X universe")
    elif not f.is_bijective:
        raise HypothesisNotMet("on complete observer spaces the hypotheses need a bijective map")
    df = pull_back(d, f)
    opens = list(top_x.opens)
    if len(opens) > cap:
        raise Undecidable(f"{len(opens)} opens exceed the enumeration cap {cap}")
    checked = 0
    corr = True
    for r in range(1, len(opens) + 1):
        for sub in itertools.combinations(opens, r):
            checked += 1
            if covers(sub, d, top_x) != covers([pull_back(s, f) for s in sub], df, top_y):
                corr = False
    return PullbackCompactVerdict(bool(is_compact(df, top_y)), bool(is_compact(d, top_x)), corr, checked)


# ---------------------------------------------------------------- entropy


@dataclass
class EntropyTrace:
    """Joined-cover entropies ``a_n = log N_n`` for n = 1..n_max."""

    name: str
    N: list[int]
    sizes: list[int]
    estimate: float
    argmin: int
    limit: Fraction | None
    certificate: str
    converged: bool
    last_delta: float

    @property
    def a(self) -> list[float]:
        return [math.log(n) for n in self.N]

    @property
    def ratios(self) -> list[float]:
        return [math.log(n) / (i + 1) for i, n in enumerate(self.N)]

    @property
    def value(self) -> float:
        """The certified limit when available, else the prefix infimum."""
        return float(self.limit) if self.limit is not None else self.estimate

    def subadditivity_violations(self) -> list[tuple[int, int]]:
        N = self.N
        return [
            (m, n)
            for m in range(1, len(N) + 1)
            for n in range(1, len(N) + 1 - m)
            if N[m + n - 1] > N[m - 1] * N[n - 1]
        ]

    def rows(self) -> list[tuple]:
        return [(i + 1, n, math.log(n), math.log(n) / (i + 1)) for i, n in enumerate(self.N)]


def _growth_bound(c: Cover, t: Topology):
    """An integer bounding every joined-cover size, with its justification."""
    if not t.is_family:
        return len(t.opens), f"joined covers are subsets of the {len(t.opens)} opens"
    uni = t.universe
    if getattr(uni, "finite", False):
        return len(uni.elements), f"joined covers are subsets of the {len(uni.elements)}-element universe"
    if getattr(uni, "lub_is_cellwise", False) and uni.encoder is not None:
        vals = {v for m in c.members for v in uni.encoder(m)}
        cells = len(uni.encoder(c.target))
        return len(vals) ** cells, (
            f"members only take the {len(vals)} values present in the cover on {cells} entries"
        )
    return None, ""


def map_entropy(
    f: PointMap, c: Cover, t: Topology, n_max: int = 8, size_cap: int = 100_000
) -> EntropyTrace:
    """Entropy of ``f`` relative to the cover ``c`` of ``F``.

    ``a_n`` is the entropy of the join of ``c o f^i`` for i < n.  The reported
    ``estimate`` is ``min a_n / n`` over the computed prefix, which equals the
    limit by subadditivity once the prefix is long enough.  ``limit`` is set to
    exactly 0 when every ``N_n`` is provably bounded.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if pull_back(t.F, f) != t.F:
        raise HypothesisViolation("F o f differs from F")
    if c.target != t.F:
        raise TargetMismatch("entropy is defined for covers of F")
    _require_commutative(t)
    joined = c
    shifted = c
    N, sizes = [], []
    for n in range(1, n_max + 1):
        if n > 1:
            shifted = cover_pullback(shifted, f, t)
            joined = cover_join(joined, shifted, t)
        if len(joined.members) > size_cap:
            raise SizeCapExceeded(f"joined cover at n={n} has {len(joined.members)} members (cap {size_cap})")
        N.append(min_subcover(joined, t).count)
        sizes.append(len(joined.members))
    ratios = [math.log(x) / (i + 1) for i, x in enumerate(N)]
    best = min(range(n_max), key=lambda i: (ratios[i], i))
    bound, why = _growth_bound(c, t)
    trace = EntropyTrace(
        name=c.name,
        N=N,
        sizes=sizes,
        estimate=ratios[best],
        argmin=best + 1,
        limit=Fraction(0) if bound is not None else None,
        certificate=(f"N_n <= {bound} for all n ({why}), so a_n / n -> 0" if bound is not None else ""),
        converged=n_max > 1 and ratios[-1] == ratios[-2],
        last_delta=(ratios[-1] - ratios[-2]) if n_max > 1 else float("nan"),
    )
    bad = trace.subadditivity_violations()
    if bad:
        raise TheoremViolation(f"subadditivity fails at index pairs {bad[:3]}")
    return trace


@dataclass
class SystemEntropy:
    value: float
    traces: list[EntropyTrace]
    certified: bool
    label: str = "maximum over the cover catalog (a lower bound for the supremum over all covers)"


def system_entropy(f: PointMap, catalog: Sequence[Cover], t: Topology, n_max: int = 8, size_cap: int = 100_000) -> SystemEntropy:
    """Catalog maximum of per-cover entropies (certified limits where available)."""
    if not catalog:
        raise ValueError("catalog is empty")
    traces = [map_entropy(f, c, t, n_max, size_cap) for c in catalog]
    certified = all(tr.limit is not None for tr in traces)
    label = SystemEntropy.label if certified else (
        "maximum over the catalog; uncertified entries use the prefix infimum, an upper estimate of their limit"
    )
    return SystemEntropy(max(tr.value for tr in traces), traces, certified, label)


@dataclass
class PowerVerdict:
    k: int
    per_cover: list[dict]
    system_f: float
    system_fk: float

    @property
    def holds(self) -> bool:
        return self.system_fk >= self.k * self.system_f and all(r["holds"] for r in self.per_cover)


def check_power_inequality(f: PointMap, k: int, catalog: Sequence[Cover], t: Topology, n_max: int = 8, size_cap: int = 100_000) -> PowerVerdict:
    """Compare the entropy of ``f^k`` with ``k`` times that of ``f`` on one catalog.

    Besides the limit comparison, records the integer sequences
    ``N_n(f^k)`` and ``N_{kn}(f)`` so both orderings can be inspected.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    fk = f.power(k)
    rows = []
    for c in catalog:
        tf = map_entropy(f, c, t, k * n_max, size_cap)
        tk = map_entropy(fk, c, t, n_max, size_cap)
        pairs = [(tk.N[n - 1], tf.N[k * n - 1]) for n in range(1, n_max + 1)]
        rows.append(
            {
                "cover": c.name,
                "e_f": tf.value,
                "e_fk": tk.value,
                "holds": tk.value >= k * tf.value,
                "N_fk": tk.N,
                "N_f_kn": [b for _, b in pairs],
                "refinement_order": all(a <= b for a, b in pairs),
                "reverse_order": all(a >= b for a, b in pairs),
            }
        )
    return PowerVerdict(
        k,
        rows,
        max(r["e_f"] for r in rows),
        max(r["e_fk"] for r in rows),
    )


@dataclass
class ConjugacyVerdict:
    per_cover: list[dict]

    @property
    def holds(self) -> bool:
        return all(r["equal"] for r in self.per_cover)


def check_conjugacy(
    f: PointMap,
    g: PointMap,
    h: PointMap,
    top_x: Topology,
    top_y: Topology,
    catalog: Sequence[Cover],
    n_max: int = 8,
    size_cap: int = 100_000,
) -> ConjugacyVerdict:
    """``h: Y -> X`` a homeomorphism with ``h o g == f o h``: traces agree per n.

    Each cover ``c`` of F is matched with ``c o h`` on Y and the integer
    sequences ``N_n`` are compared exactly.
    """
    if not h.is_bijective:
        raise NotHomeomorphism("h is not a bijection")
    if not check_continuous(h, top_y, top_x):
        raise NotHomeomorphism("h is not continuous")
    if not check_continuous(h.inverse(), top_x, top_y):
        raise NotHomeomorphism("h^-1 is not continuous")
    lhs, rhs = compose(h, g), compose(f, h)
    if lhs.as_dict() != rhs.as_dict():
        bad = next(p for p in h.source if lhs(p) != rhs(p))
        raise NotIntertwining(f"h(g({bad})) = {lhs(bad)} but f(h({bad})) = {rhs(bad)}")
    rows = []
    for c in catalog:
        tx = map_entropy(f, c, top_x, n_max, size_cap)
        ty = map_entropy(g, cover_pullback(c, h, top_y), top_y, n_max, size_cap)
        rows.append({"cover": c.name, "N_f": tx.N, "N_g": ty.N, "equal": tx.N == ty.N})
    return ConjugacyVerdict(rows)
