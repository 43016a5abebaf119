"""Line-oriented system-definition files.

A section starts with an upper-case keyword; the lines up to the next
keyword are its entries.  ``#`` starts a comment.  Example::

    POINTS X
      x1 x2 x3
    DIMS X
      T A
    OBSERVER fT X
      x1 95/100 80/100
      x2 0.9    1/2
      x3 1      0
    OBSERVER top X
      const 1
    TOPOLOGY tau
      F top
      O bottom
      opens bottom fT top
    MAP shift X X
      x1 x2
      x2 x3
      x3 x1
    COVER c
      topology tau
      members fT top

Observer entries are rows ``<point> <value per dim>`` or a single
``const v``, ``join a b``, ``meet a b`` or ``scale r a`` line.  Topologies
take ``universe closure|list <observers>`` or ``universe complete [free
dims]`` and ``opens <observers>`` or ``family <name>``.  Parsing resolves
every reference; :func:`serialize` writes a definition back out such that
re-parsing it gives an equal object.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import meet_closure
from .errors import DefinitionSyntaxError, UnresolvedReference, ValueOutOfRange
from .observers import (
    CompleteObserverSpace,
    DownSetFamily,
    GroundSet,
    Observer,
    ScaleFamily,
    obs_join,
    obs_meet,
    obs_scale,
    observer_universe,
)
from .rational import render
from .topology import PointMap, Topology

SECTIONS = ("POINTS", "DIMS", "OBSERVER", "FAMILY", "TOPOLOGY", "MAP", "COVER", "SPREAD", "SCENARIO")
DEFAULT_GROUND = "X"
DEFAULT_DIM = "level"


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


@dataclass
class FamilyDecl:
    kind: str
    base: str
    lo: Fraction = Fraction(0)
    hi: Fraction = Fraction(1)
    free: tuple = ()


@dataclass
class TopologyDecl:
    F: str
    O: str
    opens: tuple = ()
    family: str | None = None
    universe_kind: str = "closure"
    universe: tuple = ()
    free: tuple = ()


@dataclass
class MapDecl:
    source: str
    target: str
    table: tuple


@dataclass
class CoverDecl:
    topology: str
    members: tuple
    target: str | None = None


@dataclass
class SpreadDecl:
    M: int
    interval: tuple
    methods: tuple  # (name, tag, gamma or None)
    init: tuple = ()  # (method, values)


@dataclass
class SystemDefinition:
    grounds: dict = field(default_factory=dict)
    observers: dict = field(default_factory=dict)  # name -> (ground name, Observer)
    families: dict = field(default_factory=dict)
    topologies: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    covers: dict = field(default_factory=dict)
    spreads: dict = field(default_factory=dict)
    scenarios: dict = field(default_factory=dict)  # name -> tuple of (key, value)

    def observer(self, name: str) -> Observer:
        return self.observers[name][1]


# ------------------------------------------------------------------ lexing


def _tokenize(text: str):
    """Yield (line number, indent flag, tokens) for non-blank lines."""
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks, col, i = [], 0, 0
        while i < len(body):
            if body[i].isspace():
                i += 1
                continue
            j = i
            while j < len(body) and not body[j].isspace():
                j += 1
            toks.append(Token(body[i:j], ln, i + 1))
            i = j
        if toks:
            yield toks


def _number(tok: Token) -> Fraction:
    try:
        return Fraction(tok.text)
    except (ValueError, ZeroDivisionError):
        raise DefinitionSyntaxError(f"not a rational number: {tok.text!r}", tok.line, tok.column) from None


def _unit(tok: Token) -> Fraction:
    v = _number(tok)
    if not 0 <= v <= 1:
        raise ValueOutOfRange(f"{tok.text} is outside [0, 1]", tok.line, tok.column)
    return v


def _integer(tok: Token) -> int:
    v = _number(tok)
    if v.denominator != 1:
        raise DefinitionSyntaxError(f"expected an integer, got {tok.text!r}", tok.line, tok.column)
    return int(v)


# ----------------------------------------------------------------- parsing


class _Parser:
    def __init__(self):
        self.d = SystemDefinition()
        self.refs = []  # (kind, name, token) checked after parsing

    def ref(self, kind, tok):
        self.refs.append((kind, tok.text, tok))
        return tok.text

    def parse(self, text: str) -> SystemDefinition:
        sections, current = [], None
        for toks in _tokenize(text):
            if toks[0].text in SECTIONS:
                current = (toks[0], toks[1:], [])
                sections.append(current)
            elif current is None:
                t = toks[0]
                raise DefinitionSyntaxError(f"entry before any section: {t.text!r}", t.line, t.column)
            else:
                current[2].append(toks)
        if not sections:
            raise DefinitionSyntaxError("no sections", 1, 1)
        # grounds first so observers may appear in any order relative to them
        for head, args, body in sections:
            if head.text in ("POINTS", "DIMS"):
                self._ground_part(head, args, body)
        self._finish_grounds()
        for head, args, body in sections:
            if head.text not in ("POINTS", "DIMS"):
                getattr(self, "_" + head.text.lower())(head, args, body)
        self._check_refs()
        return self.d

    def _name(self, head, args, what="name"):
        if not args:
            raise DefinitionSyntaxError(f"{head.text} needs a {what}", head.line, head.column + len(head.text))
        return args[0]

    def _unique(self, table, tok):
        if tok.text in table:
            raise DefinitionSyntaxError(f"duplicate name {tok.text!r}", tok.line, tok.column)

    # grounds ------------------------------------------------------------
    def _ground_part(self, head, args, body):
        gname = args[0].text if args else DEFAULT_GROUND
        inline = args[1:]
        items = [t.text for t in inline] + [t.text for line in body for t in line]
        store = self.__dict__.setdefault("_gparts", {})
        slot = store.setdefault(gname, {})
        key = head.text
        if key in slot:
            raise DefinitionSyntaxError(f"{key} for {gname} declared twice", head.line, head.column)
        if not items:
            raise DefinitionSyntaxError(f"{key} for {gname} is empty", head.line, head.column)
        if len(set(items)) != len(items):
            raise DefinitionSyntaxError(f"{key} for {gname} has duplicates", head.line, head.column)
        slot[key] = (tuple(items), head)

    def _finish_grounds(self):
        for gname, slot in self.__dict__.get("_gparts", {}).items():
            if "POINTS" not in slot:
                head = slot["DIMS"][1]
                raise DefinitionSyntaxError(f"DIMS for {gname} without POINTS", head.line, head.column)
            dims = slot["DIMS"][0] if "DIMS" in slot else (DEFAULT_DIM,)
            self.d.grounds[gname] = GroundSet(slot["POINTS"][0], dims)

    def _ground(self, tok: Token | None) -> str:
        name = tok.text if tok is not None else DEFAULT_GROUND
        if name not in self.d.grounds:
            t = tok or Token(name, 0, 0)
            raise UnresolvedReference(f"unknown ground set {name!r}", t.line, t.column)
        return name

    # observers -----------------------------------------------------------
    def _observer(self, head, args, body):
        nt = self._name(head, args)
        self._unique(self.d.observers, nt)
        gname = self._ground(args[1] if len(args) > 1 else None)
        g = self.d.grounds[gname]
        if not body:
            raise DefinitionSyntaxError(f"observer {nt.text} has no entries", head.line, head.column)
        first = body[0]
        op = first[0].text
        if op in ("const", "join", "meet", "scale"):
            if len(body) > 1:
                t = body[1][0]
                raise DefinitionSyntaxError(f"{op} takes a single line", t.line, t.column)
            obs = self._derived(op, first, g)
        else:
            rows = {}
            for line in body:
                p = line[0]
                if p.text not in g.points:
                    raise UnresolvedReference(f"unknown point {p.text!r}", p.line, p.column)
                if p.text in rows:
                    raise DefinitionSyntaxError(f"row for {p.text} repeated", p.line, p.column)
                if len(line) - 1 != len(g.dims):
                    t = line[-1]
                    raise DefinitionSyntaxError(
                        f"row for {p.text} needs {len(g.dims)} values, got {len(line) - 1}", t.line, t.column
                    )
                rows[p.text] = [_unit(t) for t in line[1:]]
            missing = [p for p in g.points if p not in rows]
            if missing:
                raise DefinitionSyntaxError(f"observer {nt.text} lacks rows for {missing}", head.line, head.column)
            obs = Observer.from_rows(g, rows)
        self.d.observers[nt.text] = (gname, obs)

    def _defined(self, tok, g):
        if tok.text not in self.d.observers:
            raise UnresolvedReference(f"observer {tok.text!r} is not defined above", tok.line, tok.column)
        obs = self.d.observers[tok.text][1]
        if obs.ground != g:
            raise DefinitionSyntaxError(f"observer {tok.text!r} lives on another ground set", tok.line, tok.column)
        return obs

    def _derived(self, op, line, g):
        need = {"const": 2, "join": 3, "meet": 3, "scale": 3}[op]
        if len(line) != need:
            raise DefinitionSyntaxError(f"{op} takes {need - 1} arguments", line[0].line, line[0].column)
        if op == "const":
            return Observer.constant(g, _unit(line[1]))
        if op == "scale":
            return obs_scale(_unit(line[1]), self._defined(line[2], g))
        a, b = self._defined(line[1], g), self._defined(line[2], g)
        return obs_join(a, b) if op == "join" else obs_meet(a, b)

    # families ------------------------------------------------------------
    def _family(self, head, args, body):
        nt = self._name(head, args)
        self._unique(self.d.families, nt)
        kv = self._keyed(body, {"kind", "base", "range", "free"})
        kind = kv["kind"][1].text if "kind" in kv else "scale"
        if kind not in ("scale", "downset"):
            t = kv["kind"][1]
            raise DefinitionSyntaxError(f"unknown family kind {kind!r}", t.line, t.column)
        if "base" not in kv:
            raise DefinitionSyntaxError("family needs a base", head.line, head.column)
        base = self.ref("observer", kv["base"][1])
        lo, hi = Fraction(0), Fraction(1)
        if "range" in kv:
            line = kv["range"]
            if len(line) != 3:
                raise DefinitionSyntaxError("range takes lo and hi", line[0].line, line[0].column)
            lo, hi = _unit(line[1]), _unit(line[2])
            if lo > hi:
                raise ValueOutOfRange("range has lo > hi", line[1].line, line[1].column)
        free = tuple(t.text for t in kv["free"][1:]) if "free" in kv else ()
        self.d.families[nt.text] = FamilyDecl(kind, base, lo, hi, free)

    def _keyed(self, body, allowed):
        out = {}
        for line in body:
            k = line[0]
            if k.text not in allowed:
                raise DefinitionSyntaxError(f"unexpected entry {k.text!r}", k.line, k.column)
            if k.text in out:
                raise DefinitionSyntaxError(f"{k.text} given twice", k.line, k.column)
            out[k.text] = line
        return out

    # topologies ----------------------------------------------------------
    def _topology(self, head, args, body):
        nt = self._name(head, args)
        self._unique(self.d.topologies, nt)
        kv = self._keyed(body, {"F", "O", "opens", "family", "universe"})
        for k in ("F", "O"):
            if k not in kv or len(kv[k]) != 2:
                raise DefinitionSyntaxError(f"topology {nt.text} needs one {k}", head.line, head.column)
        if ("opens" in kv) == ("family" in kv):
            raise DefinitionSyntaxError("give exactly one of opens / family", head.line, head.column)
        decl = TopologyDecl(self.ref("observer", kv["F"][1]), self.ref("observer", kv["O"][1]))
        if "opens" in kv:
            decl.opens = tuple(self.ref("observer", t) for t in kv["opens"][1:])
        else:
            decl.family = self.ref("family", kv["family"][1])
        if "universe" in kv:
            line = kv["universe"]
            if len(line) < 2 or line[1].text not in ("closure", "list", "complete"):
                raise DefinitionSyntaxError("universe is closure, list or complete", line[0].line, line[0].column)
            decl.universe_kind = line[1].text
            if decl.universe_kind == "complete":
                decl.free = tuple(t.text for t in line[2:])
            else:
                decl.universe = tuple(self.ref("observer", t) for t in line[2:])
        elif decl.family is not None:
            decl.universe_kind = "complete"
        self.d.topologies[nt.text] = decl

    # maps ----------------------------------------------------------------
    def _map(self, head, args, body):
        nt = self._name(head, args)
        self._unique(self.d.maps, nt)
        src = self._ground(args[1] if len(args) > 1 else None)
        dst = self._ground(args[2] if len(args) > 2 else (args[1] if len(args) > 1 else None))
        table = {}
        for line in body:
            toks = [t for t in line if t.text != "->"]
            if len(toks) != 2:
                raise DefinitionSyntaxError("map rows are '<point> <image>'", line[0].line, line[0].column)
            p, q = toks
            if p.text not in self.d.grounds[src].points:
                raise UnresolvedReference(f"unknown source point {p.text!r}", p.line, p.column)
            if q.text not in self.d.grounds[dst].points:
                raise UnresolvedReference(f"unknown target point {q.text!r}", q.line, q.column)
            if p.text in table:
                raise DefinitionSyntaxError(f"point {p.text} mapped twice", p.line, p.column)
            table[p.text] = q.text
        missing = [p for p in self.d.grounds[src].points if p not in table]
        if missing:
            raise DefinitionSyntaxError(f"map {nt.text} is not total: {missing}", head.line, head.column)
        order = self.d.grounds[src].points
        self.d.maps[nt.text] = MapDecl(src, dst, tuple((p, table[p]) for p in order))

    # covers --------------------------------------------------------------
    def _cover(self, head, args, body):
        nt = self._name(head, args)
        self._unique(self.d.covers, nt)
        kv = self._keyed(body, {"topology", "target", "members"})
        if "topology" not in kv or "members" not in kv:
            raise DefinitionSyntaxError("cover needs topology and members", head.line, head.column)
        self.d.covers[nt.text] = CoverDecl(
            self.ref("topology", kv["topology"][1]),
            tuple(self.ref("observer", t) for t in kv["members"][1:]),
            self.ref("observer", kv["target"][1]) if "target" in kv else None,
        )

    # spread --------------------------------------------------------------
    def _spread(self, head, args, body):
        nt = self._name(head, args)
        self._unique(self.d.spreads, nt)
        M, interval, methods, init = None, (Fraction(0), Fraction(10)), [], []
        for line in body:
            k = line[0]
            if k.text == "M" and len(line) == 2:
                M = _integer(line[1])
            elif k.text == "interval" and len(line) == 3:
                interval = (_number(line[1]), _number(line[2]))
            elif k.text == "method" and len(line) in (3, 5):
                gamma = None
                if len(line) == 5:
                    if line[3].text != "gamma":
                        raise DefinitionSyntaxError("expected 'gamma'", line[3].line, line[3].column)
                    gamma = _unit(line[4])
                methods.append((line[1].text, _number(line[2]), gamma))
            elif k.text == "init" and len(line) >= 2:
                init.append((line[1].text, tuple(_unit(t) for t in line[2:])))
            else:
                raise DefinitionSyntaxError(f"bad spread entry {k.text!r}", k.line, k.column)
        if M is None or M < 1:
            raise DefinitionSyntaxError("spread needs a positive M", head.line, head.column)
        if not methods:
            raise DefinitionSyntaxError("spread needs at least one method", head.line, head.column)
        names = {m for m, _, _ in methods}
        for m, vals in init:
            if m not in names:
                raise UnresolvedReference(f"init for unknown method {m!r}", head.line, head.column)
            if len(vals) != M + 1:
                raise DefinitionSyntaxError(f"init for {m} needs {M + 1} values", head.line, head.column)
        self.d.spreads[nt.text] = SpreadDecl(M, interval, tuple(methods), tuple(init))

    # scenarios -----------------------------------------------------------
    def _scenario(self, head, args, body):
        nt = self._name(head, args)
        self._unique(self.d.scenarios, nt)
        kv = self._keyed(body, {"kind", "k", "default", "M", "window", "theta"})
        if "kind" not in kv or kv["kind"][1].text not in ("finite", "windowed"):
            raise DefinitionSyntaxError("scenario kind is finite or windowed", head.line, head.column)
        params = [("kind", kv["kind"][1].text)]
        for key in ("k", "M", "window"):
            if key in kv:
                params.append((key, _integer(kv[key][1])))
        for key in ("default", "theta"):
            if key in kv:
                params.append((key, _unit(kv[key][1])))
        if "k" not in kv:
            raise DefinitionSyntaxError("scenario needs k", head.line, head.column)
        self.d.scenarios[nt.text] = tuple(params)

    def _check_refs(self):
        tables = {"observer": self.d.observers, "family": self.d.families, "topology": self.d.topologies}
        for kind, name, tok in self.refs:
            if name not in tables[kind]:
                raise UnresolvedReference(f"unknown {kind} {name!r}", tok.line, tok.column)


def parse_definition(text: str) -> SystemDefinition:
    return _Parser().parse(text)


def load(path) -> SystemDefinition:
    with open(path, encoding="utf-8") as fh:
        return parse_definition(fh.read())


# ---------------------------------------------------------- serialization


def serialize(d: SystemDefinition) -> str:
    out = []
    for gname, g in d.grounds.items():
        out += [f"POINTS {gname}", "  " + " ".join(g.points), f"DIMS {gname}", "  " + " ".join(g.dims)]
    for name, (gname, obs) in d.observers.items():
        out.append(f"OBSERVER {name} {gname}")
        for p in obs.ground.points:
            out.append("  " + " ".join([p] + [render(v) for v in obs.row(p)]))
    for name, f in d.families.items():
        out += [f"FAMILY {name}", f"  kind {f.kind}", f"  base {f.base}", f"  range {render(f.lo)} {render(f.hi)}"]
        if f.free:
            out.append("  free " + " ".join(f.free))
    for name, t in d.topologies.items():
        out += [f"TOPOLOGY {name}", f"  F {t.F}", f"  O {t.O}"]
        out.append(f"  family {t.family}" if t.family is not None else "  opens " + " ".join(t.opens))
        extra = t.free if t.universe_kind == "complete" else t.universe
        out.append(" ".join(["  universe", t.universe_kind, *extra]).rstrip())
    for name, m in d.maps.items():
        out.append(f"MAP {name} {m.source} {m.target}")
        out += [f"  {p} {q}" for p, q in m.table]
    for name, c in d.covers.items():
        out += [f"COVER {name}", f"  topology {c.topology}", "  members " + " ".join(c.members)]
        if c.target is not None:
            out.append(f"  target {c.target}")
    for name, s in d.spreads.items():
        out += [f"SPREAD {name}", f"  M {s.M}", f"  interval {render(s.interval[0])} {render(s.interval[1])}"]
        for m, tag, g in s.methods:
            out.append(f"  method {m} {render(tag)}" + (f" gamma {render(g)}" if g is not None else ""))
        for m, vals in s.init:
            out.append("  init " + " ".join([m] + [render(v) for v in vals]))
    for name, params in d.scenarios.items():
        out.append(f"SCENARIO {name}")
        out += [f"  {k} {render(v) if isinstance(v, (int, Fraction)) else v}" for k, v in params]
    return "\n".join(out) + "\n"


# ------------------------------------------------------------- resolution


class Workspace:
    """Runtime objects built from a definition, cached by name."""

    def __init__(self, d: SystemDefinition):
        self.d = d
        self._tops = {}

    def map(self, name: str) -> PointMap:
        m = self.d.maps[name]
        return PointMap(self.d.grounds[m.source].points, self.d.grounds[m.target].points, tuple(q for _, q in m.table))

    def family(self, name: str):
        f = self.d.families[name]
        base = self.d.observer(f.base)
        if f.kind == "downset":
            return DownSetFamily(base)
        return ScaleFamily(base, f.lo, f.hi, frozenset(f.free))

    def topology(self, name: str) -> Topology:
        if name not in self._tops:
            t = self.d.topologies[name]
            F, O = self.d.observer(t.F), self.d.observer(t.O)
            if t.family is not None:
                opens = self.family(t.family)
            else:
                opens = [self.d.observer(n) for n in t.opens]
            if t.universe_kind == "complete":
                uni = CompleteObserverSpace(F.ground, t.free)
            else:
                listed = [self.d.observer(n) for n in t.universe]
                base = list(dict.fromkeys(listed + [F, O] + (opens if isinstance(opens, list) else [])))
                if t.universe_kind == "closure":
                    base = meet_closure(base, observer_universe(base, "open-world"))
                uni = observer_universe(base)
            self._tops[name] = Topology(uni, F, opens, O)
        return self._tops[name]

    def cover(self, name: str):
        from .covers import make_cover

        c = self.d.covers[name]
        top = self.topology(c.topology)
        target = self.d.observer(c.target) if c.target is not None else top.F
        return make_cover(target, [self.d.observer(n) for n in c.members], top, name)

    def spread(self, name: str):
        from .spread import SpreadModel, sawtooth_gamma

        s = self.d.spreads[name]
        methods = tuple((m, tag) for m, tag, _ in s.methods)
        gamma = {m: (g if g is not None else sawtooth_gamma(tag)) for m, tag, g in s.methods}
        return SpreadModel(methods, gamma, s.M, s.interval, dict(s.init))

    def scenario(self, name: str):
        from .scenarios import build_shift_scenario_finite, build_shift_scenario_windowed

        p = dict(self.d.scenarios[name])
        if p["kind"] == "finite":
            return build_shift_scenario_finite(p["k"], p.get("default", 0), p.get("M", 10))
        return build_shift_scenario_windowed(p["k"], p.get("window", 6), p.get("theta", Fraction(1, 2)))
