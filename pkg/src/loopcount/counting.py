"""Exact counts of nilpotent loops of order 2q.

A nilpotent loop of order 2q is either the cyclic group Z_2q or a central
extension of Z2 by Zq, so counting reduces to orbits on the cocycle space.
Modulo coboundaries that space is the space of functions on Zq x Zq modulo
those of the form g(X) + h(Y) + f(X + Y), and isotopy acts through the maps
(X, Y) -> (uX + s, uY + t). Burnside over that group of order q^2 (q - 1)
needs the fixed-space dimension of each element:

* identity: (q-1)(q-2)
* translation with s, t, s+t all nonzero: q - 1
* translation with exactly one of s, t, s+t zero: 0
* an element with multiplier u of order k > 1: (q-1)(q-2)/k

Restricting to the multipliers u alone counts isomorphism classes.
"""

from __future__ import annotations

import json
from importlib import resources

from loopcount import gf2
from loopcount.action import (
    DEFAULT_GROUP_CAP,
    compile_all,
    compile_generator,
    generators_from_config,
    group_closure,
    isotope_renorm,
    partition_orbits,
)
from loopcount.cocycles import dimension
from loopcount.errors import NonIntegral
from loopcount.ntheory import check_odd_prime, divisors_of, euler_phi
from loopcount.report import METHODS, CountReport
from loopcount.subspaces import decompose, preserves

PER_COMPONENT_MIN_BITS = 36


def load_config(name: str) -> list[dict]:
    """A bundled generator config: ``isotopy_2q`` or ``isomorphism_2q``."""
    text = resources.files("loopcount").joinpath("generators", f"{name}.json").read_text()
    return json.loads(text)


def isotopy_config() -> list[dict]:
    return load_config("isotopy_2q")


def isomorphism_config() -> list[dict]:
    return load_config("isomorphism_2q")


# --- closed form -------------------------------------------------------------


def _formula_terms(q: int) -> dict:
    m = (q - 1) * (q - 2)
    scalings = {}
    for k in divisors_of(q - 1):
        if k > 1:
            scalings[k] = {"elements": q * q * euler_phi(k), "fixed_dim": m // k}
    return {
        "group_order": q * q * (q - 1),
        "identity": {"elements": 1, "fixed_dim": m},
        "translations_generic": {"elements": (q - 1) * (q - 2), "fixed_dim": q - 1},
        "translations_axis": {"elements": 3 * (q - 1), "fixed_dim": 0},
        "multiplier_order": scalings,
    }


def count_via_formula(q: int) -> CountReport:
    check_odd_prime(q)
    terms = _formula_terms(q)
    parts = [terms["identity"], terms["translations_generic"], terms["translations_axis"]]
    parts += list(terms["multiplier_order"].values())
    total = sum(p["elements"] << p["fixed_dim"] for p in parts)
    order = terms["group_order"]
    if total % order:
        raise NonIntegral(f"formula sum {total} not divisible by {order}")
    m = (q - 1) * (q - 2)
    iso_total = (1 << m) + sum(p["elements"] // (q * q) << p["fixed_dim"] for p in terms["multiplier_order"].values())
    if iso_total % (q - 1):
        raise NonIntegral(f"isomorphism sum {iso_total} not divisible by {q - 1}")
    n_iso = total // order
    breakdown = {
        "terms": terms,
        "fixed_point_sum": total,
        "families": _families(n_iso),
    }
    return CountReport(q, n_iso, iso_total // (q - 1), "formula", breakdown)


def _families(n_classes: int) -> dict:
    # the kernel-Zq family only produces Z_2q, which is also the coboundary class
    return {
        "kernel_z2_classes": n_classes,
        "kernel_zq_classes": 1,
        "shared_classes": 1,
        "nonassociative_classes": n_classes - 1,
    }


# --- Burnside over the enumerated group ---------------------------------------


def cyclic_generator(q: int):
    """Compiled diagonal isotope (a=1, b=1); a linear map of order q."""
    return compile_generator(isotope_renorm(1, 1), q)


def burnside_sum(q: int, elements, *, per_component: bool = False) -> tuple[int, int, dict]:
    """(fixed-point sum, group order, stats) for an enumerated group."""
    n = dimension(q)
    ident = gf2.identity(n)
    stats = {"per_component_elements": 0, "full_space_elements": 0}
    dec = decompose(q, cyclic_generator(q)) if per_component else None
    if dec is not None:
        stats["components"] = [
            {"factor": c.label.bitstring(), "rank": c.rank} for c in dec.components
        ]
    cache: dict = {}
    total = 0
    order = 0
    for g in elements:
        order += 1
        entry = cache.get(g.cols)
        if entry is None:
            if dec is not None and all(preserves(g.cols, c.basis) for c in dec.components):
                solvers = [
                    gf2.LinearSolver([gf2.matvec(g.cols, b) ^ b for b in c.basis]) for c in dec.components
                ]
                entry = ("split", solvers)
            else:
                entry = ("full", gf2.LinearSolver(gf2.add(g.cols, ident)))
            cache[g.cols] = entry
        kind, data = entry
        if kind == "split":
            stats["per_component_elements"] += 1
            dim = 0
            for solver, part in zip(data, dec.project(g.shift) if g.shift else [0] * len(data)):
                if solver.solve(part) is None:
                    dim = None
                    break
                dim += len(solver.kernel)
        else:
            stats["full_space_elements"] += 1
            dim = len(data.kernel) if data.solve(g.shift) is not None else None
        if dim is not None:
            total += 1 << dim
    return total, order, stats


def count_via_burnside(q: int, generator_config=None, *, cap: int = DEFAULT_GROUP_CAP,
                       per_component: bool | None = None) -> CountReport:
    """Burnside over the closure of the configured generators.

    Per-component evaluation (through the invariant subspaces of the diagonal
    isotope) is the default once the space has 2^36 or more vectors.
    """
    check_odd_prime(q)
    config = isotopy_config() if generator_config is None else generator_config
    maps = compile_all(generators_from_config(config, q), q)
    elements = group_closure(maps, q, cap=cap)
    if per_component is None:
        per_component = dimension(q) >= PER_COMPONENT_MIN_BITS
    total, order, stats = burnside_sum(q, elements, per_component=per_component)
    if total % order:
        raise NonIntegral(f"fixed-point sum {total} is not divisible by group order {order}")
    count = total // order
    breakdown = {
        "group_order": order,
        "fixed_point_sum": total,
        "evaluation": "per_component" if per_component else "full_space",
        **stats,
    }
    return CountReport(q, count, None, "burnside", breakdown)


def count_via_orbits(q: int, generator_config=None) -> CountReport:
    check_odd_prime(q)
    config = isotopy_config() if generator_config is None else generator_config
    part = partition_orbits(q, generators_from_config(config, q))
    sizes = sorted(part.sizes)
    breakdown = {"space_size": 1 << dimension(q), "largest_orbit": sizes[-1], "smallest_orbit": sizes[0]}
    return CountReport(q, len(part), None, "orbit_enumeration", breakdown)


def count_isomorphism_baseline(q: int, *, method: str = "burnside", cap: int = DEFAULT_GROUP_CAP) -> CountReport:
    """Orbits under multipliers plus coboundary shifts only: isomorphism classes."""
    check_odd_prime(q)
    config = isomorphism_config()
    if method == "orbit_enumeration":
        n = len(partition_orbits(q, generators_from_config(config, q)))
        breakdown = {}
    else:
        method = "burnside"
        maps = compile_all(generators_from_config(config, q), q)
        elements = group_closure(maps, q, cap=cap)
        total, order, _ = burnside_sum(q, elements)
        if total % order:
            raise NonIntegral(f"fixed-point sum {total} is not divisible by group order {order}")
        n = total // order
        breakdown = {"group_order": order, "fixed_point_sum": total}
    breakdown["restricted_group"] = True
    return CountReport(q, None, n, method, breakdown)
