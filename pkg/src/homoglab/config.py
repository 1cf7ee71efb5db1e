"""TOML run configurations.

Sections (all optional unless a command needs them):

    [field]
    kind = "single-scale" | "multi-scale" | "quasi-periodic"
    dimension = 1
    components = ["2 + sin(2*pi*r)"]
    kappa = 6.2832            # optional declared Lipschitz constant
    sup_norm = 3.0            # optional declared sup norm (scalar or list)
    u_box = [-10.0, 10.0]     # multi-scale sampling box
    t_box = [-10.0, 10.0]

    [field.qp]
    frequency = [1.0, 1.618033988749895]
    modes = [[0, 0, 3.0, 0.0], [1, 0, 0.5, 0.0], [-1, 0, 0.5, 0.0]]
    sigma = 1.0
    c_xi = 0.38

    [coupled]
    a = [2.0, 3.0]
    f = ["sin(2*pi*t)", "0"]
    c = [0.0, 0.0]

    [transport]
    phi = "u"
    lip_phi = 1.0
    grid = [{min = 0.0, max = 1.0, points = 64}]
    t = 2.0
    epsilon = [1e-1, 3e-2, 1e-2]

    [highdim]
    pairs_per_axis = 8
    horizon = 200.0
    frequency = [1.0, 1.618033988749895]
    modes = [[0, 0, 2.0, 0.0], [1, 1, 0.5, 0.0], [-1, -1, 0.5, 0.0]]

    [run]
    eps = [1e-1, 3e-2, 1e-2]
    horizon = 10.0
    tol = 1e-3
    budget = 1e-4
    seed = 0
"""

from __future__ import annotations

import sys

import numpy as np

from .coupled import coupled_spec
from .fields import (
    FieldError,
    QuasiPeriodicField,
    multi_scale,
    quasi_periodic,
    single_scale,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "load_config",
    "field_from_config",
    "coupled_from_config",
    "transport_params",
    "highdim_params",
    "run_params",
]


def load_config(path):
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _modes_from_rows(rows):
    modes = {}
    for row in rows:
        *k, re_part, im_part = row
        modes[tuple(int(x) for x in k)] = complex(float(re_part), float(im_part))
    return modes


def qp_from_section(section):
    return QuasiPeriodicField(
        frequency=section["frequency"],
        modes=_modes_from_rows(section["modes"]),
        sigma=section.get("sigma", 1.0),
        c_xi=section.get("c_xi"),
    )


def field_from_config(cfg):
    section = cfg.get("field")
    if section is None:
        raise FieldError("config has no [field] section")
    kind = section.get("kind", "single-scale")
    kappa = section.get("kappa")
    sup = section.get("sup_norm")
    if kind == "quasi-periodic":
        return quasi_periodic(qp_from_section(section["qp"]))
    components = section.get("components")
    if not components:
        raise FieldError("[field] needs a components list")
    if kind == "single-scale":
        return single_scale(*components, kappa=kappa, sup=sup)
    if kind == "multi-scale":
        if len(components) != 1:
            raise FieldError("multi-scale fields are scalar (one component)")
        return multi_scale(
            components[0],
            u_box=tuple(section.get("u_box", (-10.0, 10.0))),
            t_box=tuple(section.get("t_box", (-10.0, 10.0))),
            kappa=kappa,
            sup=sup,
        )
    raise FieldError(f"unknown field kind {kind!r}")


def coupled_from_config(cfg):
    section = cfg.get("coupled")
    if section is None:
        raise ValueError("config has no [coupled] section")
    return coupled_spec(section["a"], section["f"], section["c"])


def grid_from_spec(spec_rows):
    axes = [
        np.linspace(float(g["min"]), float(g["max"]), int(g["points"]))
        for g in spec_rows
    ]
    if len(axes) == 1:
        return axes[0]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def transport_params(cfg):
    section = cfg.get("transport")
    if section is None:
        raise ValueError("config has no [transport] section")
    return {
        "phi": section["phi"],
        "lip_phi": float(section.get("lip_phi", 1.0)),
        "grid": grid_from_spec(section["grid"]),
        "t": float(section["t"]),
        "eps_list": [float(e) for e in section["epsilon"]],
    }


def highdim_params(cfg):
    section = cfg.get("highdim", {})
    out = {
        "pairs_per_axis": int(section.get("pairs_per_axis", 8)),
        "horizon": float(section.get("horizon", 200.0)),
    }
    if "frequency" in section:
        out["frequency"] = [float(x) for x in section["frequency"]]
    if "modes" in section:
        out["modes"] = _modes_from_rows(section["modes"])
    return out


def run_params(cfg, **defaults):
    section = cfg.get("run", {})
    out = dict(defaults)
    if "eps" in section:
        out["eps"] = [float(e) for e in section["eps"]]
    for key in ("horizon", "tol", "budget"):
        if key in section:
            out[key] = float(section[key])
    if "seed" in section:
        out["seed"] = int(section["seed"])
    return out
