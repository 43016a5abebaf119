"""Command-line front-end.

Exit status: 0 success, 1 a check failed, 2 usage or parse error.
Reports are deterministic: fixed ordering, exact rationals or 12
significant digits, no timestamps.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from fractions import Fraction

from . import covers as cv
from . import spread as sp
from .algebra import check_axioms, meet_closure
from .defs import Workspace, load
from .errors import DefinitionError, InfotopError
from .observers import observer_universe
from .rational import decimal, render
from .scenarios import relabeled_conjugate, run_windowed
from .topology import (
    check_continuous,
    interior,
    is_closed,
    is_open,
    product_space,
    validate_topology,
)


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


def _pick(table: dict, name, kind: str) -> str:
    if name is not None:
        if name not in table:
            raise UsageError(f"no {kind} named {name!r}")
        return name
    if not table:
        raise UsageError(f"the file declares no {kind}")
    return next(iter(table))


def _obs(ws: Workspace, name: str):
    if name not in ws.d.observers:
        raise UsageError(f"no observer named {name!r}")
    return ws.d.observer(name)


def _show(x) -> str:
    return repr(x)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _write(args, filename: str, text: str) -> str:
    os.makedirs(args.output, exist_ok=True)
    path = os.path.join(args.output, filename)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _num(x) -> str:
    return "0" if x == 0 else decimal(x)


# ------------------------------------------------------------------ commands


def cmd_check_axioms(ws, args, out):
    d = ws.d
    names = args.names or list(d.observers)
    groups = {}
    for n in names:
        _obs(ws, n)
        bucket = groups.setdefault(d.observers[n][0], [])
        if d.observer(n) not in bucket:
            bucket.append(d.observer(n))
    ok = True
    for gname, seed in groups.items():
        elems = meet_closure(seed, observer_universe(seed, "open-world"))
        uni = observer_universe(elems)
        rep = check_axioms(uni, sample_budget=args.budget, seed=args.seed)
        out.append(f"universe {gname}: {len(elems)} elements, {rep.mode}, {rep.triples_checked} triples")
        out += rep.lines()
        ok &= rep.all_hold
    if not ok:
        raise CheckFailed("an axiom fails")


def cmd_validate_topology(ws, args, out):
    name = _pick(ws.d.topologies, args.topology, "topology")
    v = validate_topology(ws.topology(name), seed=args.seed)
    out.append(f"topology {name} ({v.mode})")
    out += v.lines()
    out.append("valid" if v.valid else "invalid")
    if not v.valid:
        raise CheckFailed("topology is invalid")


def _top(ws, args):
    return ws.topology(_pick(ws.d.topologies, args.topology, "topology"))


def cmd_interior(ws, args, out):
    t = _top(ws, args)
    for g in interior(_obs(ws, args.observer), t):
        out.append(_show(g))


def cmd_is_open(ws, args, out):
    v = is_open(_obs(ws, args.observer), _top(ws, args))
    out.append(("open" if v.is_open else "not open") + f" (in own interior: {v.in_interior})")


def cmd_is_closed(ws, args, out):
    out.append("closed" if is_closed(_obs(ws, args.observer), _top(ws, args)) else "not closed")


def cmd_continuity(ws, args, out):
    f = ws.map(_pick(ws.d.maps, args.map, "map"))
    dom = ws.topology(_pick(ws.d.topologies, args.domain, "topology"))
    cod = ws.topology(_pick(ws.d.topologies, args.codomain, "topology"))
    v = check_continuous(f, dom, cod)
    out.append(f"F o f == G: {v.F_matches}")
    for why, w in v.failures:
        out.append(f"failure: {why}: {_show(w)}")
    out.append("continuous" if v else "not continuous")
    if not v:
        raise CheckFailed("map is not continuous")


def cmd_product(ws, args, out):
    names = args.names or list(ws.d.topologies)
    p = product_space([ws.topology(_pick(ws.d.topologies, n, "topology")) for n in names])
    out.append(f"product of {' x '.join(names)}: {len(p.opens)} opens, valid")
    v = cv.is_compact(p.F, p)
    out.append(f"F compact: {v.compact} ({v.reason})")


def cmd_compact(ws, args, out):
    t = _top(ws, args)
    h = _obs(ws, args.observer) if args.observer else t.F
    v = cv.is_compact(h, t)
    out.append(("compact" if v.compact else "not compact") + f": {v.reason}")
    if v.cover is not None:
        out.append("cover " + " ".join(_show(m) for m in v.cover.members))
    if v.witness_sequence:
        out.append("scales " + " ".join(render(r) for r in v.witness_sequence))


def _cover(ws, args):
    name = _pick(ws.d.covers, args.cover, "cover")
    c = ws.cover(name)
    return c, ws.topology(ws.d.covers[name].topology)


def cmd_cover(ws, args, out):
    c, _ = _cover(ws, args)
    out.append(f"cover {c.name}: {len(c.members)} members, valid")
    out.append(f"witness {_show(c.witness)}")
    if len(c.witnesses) > 1:
        out.append(f"{len(c.witnesses)} witnesses")


def cmd_min_subcover(ws, args, out):
    c, t = _cover(ws, args)
    s = cv.min_subcover(c, t)
    out.append(f"N {s.count}")
    out.append(f"E {_num(math.log(s.count))}")
    out += [_show(m) for m in s.members]


def _entropy_inputs(ws, args):
    """(map, catalog, topology) from a scenario or from MAP/COVER sections."""
    d = ws.d
    name = args.name
    if name in d.scenarios or (name is None and d.scenarios and not d.covers):
        scn = ws.scenario(_pick(d.scenarios, name, "scenario"))
        return scn.f, scn.catalog, scn.topology, scn
    f = ws.map(_pick(d.maps, args.map, "map"))
    names = [name] if name is not None else list(d.covers)
    cat = [ws.cover(_pick(d.covers, n, "cover")) for n in names]
    tops = {d.covers[n].topology for n in names}
    if len(tops) != 1:
        raise UsageError("catalog covers must share one topology")
    return f, cat, ws.topology(tops.pop()), None


def cmd_entropy_trace(ws, args, out):
    f, cat, t, scn = _entropy_inputs(ws, args)
    if args.cover is not None:
        picked = [c for c in cat if c.name == args.cover]
        if not picked:
            raise UsageError(f"no catalog cover named {args.cover!r}")
        c = picked[0]
    elif scn is not None:
        c = max(cat, key=lambda x: len(x.members))
    else:
        c = cat[0]
    tr = cv.map_entropy(f, c, t, args.n, args.size_cap)
    rows = [["n", "N_n", "a_n", "a_n/n"]] + [[n, N, _num(a), _num(r)] for n, N, a, r in tr.rows()]
    text = _csv(rows)
    if args.output:
        _write(args, f"trace_{c.name or 'cover'}.csv", text)
    out += text.rstrip("\n").split("\n")
    out.append(f"prefix-inf {_num(tr.estimate)} at n={tr.argmin}")
    if tr.limit is not None:
        out.append(f"certificate {tr.certificate}")
    out.append(f"estimate {_num(tr.value)}")


def cmd_system_entropy(ws, args, out):
    f, cat, t, _ = _entropy_inputs(ws, args)
    se = cv.system_entropy(f, cat, t, args.n, args.size_cap)
    for tr in se.traces:
        out.append(f"cover {tr.name}: N {' '.join(map(str, tr.N))} value {_num(tr.value)}")
    out.append(se.label)
    out.append(f"estimate {_num(se.value)}")


def cmd_conjugacy(ws, args, out):
    d = ws.d
    if args.f is None:
        scn = ws.scenario(_pick(d.scenarios, args.name, "scenario"))
        if scn.params.get("window") is not None:
            raise UsageError("conjugacy via a scenario needs a finite scenario")
        g, h, top_y = relabeled_conjugate(scn, args.rotation)
        f, top_x, cat = scn.f, scn.topology, scn.catalog
    else:
        f, g, h = (ws.map(_pick(d.maps, n, "map")) for n in (args.f, args.g, args.h))
        top_x = ws.topology(_pick(d.topologies, args.x, "topology"))
        top_y = ws.topology(_pick(d.topologies, args.y, "topology"))
        cat = [ws.cover(n) for n in (args.covers or list(d.covers))]
    v = cv.check_conjugacy(f, g, h, top_x, top_y, cat, args.n, args.size_cap)
    for r in v.per_cover:
        out.append(f"cover {r['cover']}: N_f {' '.join(map(str, r['N_f']))} | N_g {' '.join(map(str, r['N_g']))} | equal {r['equal']}")
    out.append("traces agree" if v.holds else "traces differ")
    if not v.holds:
        raise CheckFailed("conjugate traces differ")


def _spread(ws, args):
    return ws.spread(_pick(ws.d.spreads, args.name, "spread"))


def cmd_spread_closed_form(ws, args, out):
    m = _spread(ws, args)
    t = Fraction(args.t)
    for name in m.names:
        v = sp.pn_closed_form(m, name, args.n, t)
        out.append(f"{name}: p{args.n}({render(t)}) = {render(v)} ({decimal(v)})")


def cmd_spread_integrate(ws, args, out):
    m = _spread(ws, args)
    t_end = Fraction(args.t_end)
    step = Fraction(args.step)
    worst = 0.0
    for name in m.names:
        traj = sp.integrate_numeric(m, name, t_end, step)
        err = sp.max_discrepancy(m, name, t_end, step)
        worst = max(worst, err)
        flagged = sum(s.out_of_range for s in traj)
        out.append(f"{name}: {len(traj)} states, max |exact - rk4| {err:.3e}, {flagged} states out of [0,1]")
        if args.output:
            rows = [["t"] + [f"p{n}" for n in range(m.M + 1)]]
            rows += [[_num(s.t)] + [decimal(v) for v in s.p] for s in traj]
            _write(args, f"trajectory_{name.replace('/', '_')}.csv", _csv(rows))
    if worst > args.tolerance:
        raise CheckFailed(f"discrepancy {worst:.3e} exceeds {args.tolerance}")


def cmd_figures(ws, args, out):
    model = None
    if ws is not None and ws.d.spreads:
        model = _spread(ws, args)
    for fig in ("sawtooth", "curves", "surface"):
        kw = {}
        if fig == "curves" and model is not None:
            kw = {"model": model, "methods": [tag for _, tag in model.methods]}
        path = _write(args, f"{fig}.csv", _csv(sp.emit_figure_data(fig, **kw)))
        out.append(f"wrote {path}")


def cmd_scenario(ws, args, out):
    name = _pick(ws.d.scenarios, args.name, "scenario")
    scn = ws.scenario(name)
    p = scn.params
    if "window" in p:
        rep = run_windowed(scn, args.n, args.size_cap)
        out += rep.lines()
        if not (rep.invariant and rep.radius_ok):
            raise CheckFailed("windowed property check failed")
        return
    t = scn.topology
    v = validate_topology(t, seed=args.seed)
    out.append(f"finite shift k={p['k']}: {len(t.opens)} opens, topology {'valid' if v.valid else 'invalid'}")
    comp = cv.is_compact(t.F, t)
    out.append(f"F compact: {comp.compact}")
    se = cv.system_entropy(scn.f, scn.catalog, t, args.n, args.size_cap)
    for tr in se.traces:
        out.append(f"cover {tr.name}: N {' '.join(map(str, tr.N))}")
    out.append(f"system entropy {_num(se.value)}")
    if not v.valid or se.value != 0:
        raise CheckFailed("finite shift scenario check failed")


COMMANDS = {
    "check-axioms": cmd_check_axioms,
    "validate-topology": cmd_validate_topology,
    "interior": cmd_interior,
    "is-open": cmd_is_open,
    "is-closed": cmd_is_closed,
    "continuity": cmd_continuity,
    "product": cmd_product,
    "compact": cmd_compact,
    "cover": cmd_cover,
    "min-subcover": cmd_min_subcover,
    "entropy-trace": cmd_entropy_trace,
    "system-entropy": cmd_system_entropy,
    "conjugacy": cmd_conjugacy,
    "spread-closed-form": cmd_spread_closed_form,
    "spread-integrate": cmd_spread_integrate,
    "figures": cmd_figures,
    "scenario": cmd_scenario,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", help="directory for CSV artifacts")
    common.add_argument("--n", type=int, default=8, help="number of trace steps")
    common.add_argument("--size-cap", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--step", default="1/1000", help="integration step (rational)")

    p = _Parser(prog="infotop", description="Information topological spaces and knowledge-spread scenarios.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, file_required=True):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("file", nargs=None if file_required else "?")
        return s

    s = add("check-axioms")
    s.add_argument("names", nargs="*")
    s.add_argument("--budget", type=int, default=1_000_000)
    s = add("validate-topology")
    s.add_argument("--topology")
    for name in ("interior", "is-open", "is-closed"):
        s = add(name)
        s.add_argument("observer")
        s.add_argument("--topology")
    s = add("continuity")
    s.add_argument("map", nargs="?")
    s.add_argument("--domain")
    s.add_argument("--codomain")
    s = add("product")
    s.add_argument("names", nargs="*")
    s = add("compact")
    s.add_argument("observer", nargs="?")
    s.add_argument("--topology")
    for name in ("cover", "min-subcover"):
        s = add(name)
        s.add_argument("cover", nargs="?")
    for name in ("entropy-trace", "system-entropy"):
        s = add(name)
        s.add_argument("name", nargs="?", help="scenario or cover name")
        s.add_argument("--map")
        if name == "entropy-trace":
            s.add_argument("--cover")
    s = add("conjugacy")
    s.add_argument("name", nargs="?", help="finite scenario to relabel")
    s.add_argument("--rotation", type=int, default=1)
    for opt in ("--f", "--g", "--h", "--x", "--y"):
        s.add_argument(opt)
    s.add_argument("--covers", nargs="*")
    s = add("spread-closed-form")
    s.add_argument("name", nargs="?")
    s.add_argument("--order", dest="n_order", type=int)
    s.add_argument("--t", default="10")
    s = add("spread-integrate")
    s.add_argument("name", nargs="?")
    s.add_argument("--t-end", default="10")
    s.add_argument("--tolerance", type=float, default=1e-6)
    s = add("figures", file_required=False)
    s.add_argument("--name")
    s = add("scenario")
    s.add_argument("name", nargs="?")
    return p


def run_command(argv, stdout=None) -> int:
    stdout = stdout or sys.stdout
    out: list[str] = []
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        if args.command == "spread-closed-form" and args.n_order is not None:
            args.n = args.n_order
        if args.command == "figures" and not args.output:
            args.output = "figures"
        try:
            Fraction(args.step)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"--step must be a rational, got {args.step!r}") from None
        ws = Workspace(load(args.file)) if args.file else None
        COMMANDS[args.command](ws, args, out)
        status = 0
    except UsageError as e:
        out.append(f"usage error: {e}")
        status = 2
    except DefinitionError as e:
        out.append(f"parse error: {e}")
        status = 2
    except (ValueError, KeyError) as e:
        out.append(f"input error: {e}")
        status = 2
    except OSError as e:
        out.append(f"error: {e}")
        status = 2
    except CheckFailed as e:
        out.append(f"check failed: {e}")
        status = 1
    except InfotopError as e:
        out.append(f"check failed: {type(e).__name__}: {e}")
        status = 1
    stdout.write("\n".join(out) + ("\n" if out else ""))
    return status


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
