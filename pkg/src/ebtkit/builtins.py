"""Registry of named channels reachable from the command line.

Names take colon-separated parameters, e.g. ``identity:3`` or
``depolarizing:2:0.2``.
"""

from __future__ import annotations

import numpy as np

from .channels import (
    Channel,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    point_channel,
)
from .extremality import tetrahedron_channel, trine_block_channel
from .linalg import proj

BUILTINS = {
    "identity": ("identity:d", "identity channel on C^d"),
    "depolarizing": ("depolarizing:d:lam", "rho -> lam*rho + (1-lam) I/d (Choi form)"),
    "dephasing": ("dephasing:d", "complete dephasing in the standard basis (CQ form)"),
    "point": ("point[:d]", "constant channel onto a state (default |0><0|, or the 'state' payload)"),
    "tetrahedron": ("tetrahedron", "d=3 measure-and-prepare channel on the tetrahedron vertices"),
    "trine4": ("trine4", "d=4 QC channel with a trine POVM on a 2-dim block"),
}


class UnknownBuiltin(ValueError):
    pass


def parse_builtin_name(spec: str) -> tuple[str, list[str]]:
    name, *params = spec.strip().split(":")
    return name, params


_ARITY = {
    "identity": (int,),
    "depolarizing": (int, float),
    "dephasing": (int,),
    "tetrahedron": (),
    "trine4": (),
}


def make_builtin(spec: str, state=None) -> Channel:
    """Construct the builtin named by ``spec``; ``state`` overrides the point channel's image.

    Malformed names raise :class:`UnknownBuiltin`; parameters that give an
    invalid channel (e.g. a non-CP depolarizing strength) raise the
    validation error of the underlying constructor.
    """
    name, params = parse_builtin_name(spec)
    if name not in BUILTINS:
        raise UnknownBuiltin(f"unknown builtin {name!r}; available: {', '.join(BUILTINS)}")
    types = (int,) if name == "point" else _ARITY[name]
    if len(params) > len(types) or (name != "point" and len(params) != len(types)):
        raise UnknownBuiltin(f"bad parameters for builtin {spec!r}; usage: {BUILTINS[name][0]}")
    try:
        args = [t(p) for t, p in zip(types, params)]
    except ValueError as exc:
        raise UnknownBuiltin(f"bad parameters for builtin {spec!r}: {exc}") from exc

    if name == "identity":
        return identity_channel(*args)
    if name == "depolarizing":
        return depolarizing_channel(*args)
    if name == "dephasing":
        return dephasing_channel(*args)
    if name == "point":
        if state is not None:
            return point_channel(state)
        d = args[0] if args else 2
        return point_channel(proj(np.eye(d)[0]))
    if name == "tetrahedron":
        return tetrahedron_channel()
    return trine_block_channel()
