"""Information topological spaces over observer algebras.

Exact rational observers with entrywise max/min, F-topologies and their
checks, open-cover entropy of point maps, and a knowledge-spread model with
its shift-map scenarios.
"""
from ._kernels import BACKEND
from .algebra import AlgebraUniverse, check_axioms, meet_closure, sup_set
from .covers import (
    Cover,
    check_compact_join,
    check_conjugacy,
    check_power_inequality,
    check_product_compact,
    check_pullback_compact,
    cover_entropy,
    cover_join,
    cover_pullback,
    cover_union_refine,
    is_compact,
    make_cover,
    map_entropy,
    min_subcover,
    system_entropy,
)
from .errors import InfotopError
from .observers import (
    CompleteObserverSpace,
    DownSetFamily,
    GroundSet,
    Observer,
    ScaleFamily,
    embed_classical,
    family_member,
    line_ground,
    obs_join,
    obs_meet,
    obs_scale,
    observer_universe,
)
from .scenarios import build_shift_scenario_finite, build_shift_scenario_windowed, run_windowed
from .spread import SpreadModel, integrate_numeric, pn_closed_form, sawtooth_gamma
from .topology import (
    PointMap,
    Topology,
    check_closed_meet,
    check_continuous,
    complement_of,
    interior,
    is_closed,
    is_open,
    product_space,
    pull_back,
    pullback_space,
    validate_topology,
)

__version__ = "0.1.0"

_SUBMODULES = {"algebra", "covers", "errors", "observers", "rational", "scenarios", "spread", "topology"}
__all__ = [n for n in dir() if not n.startswith("_") and n not in _SUBMODULES] + ["__version__"]
