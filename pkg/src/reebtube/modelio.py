"""Structure definition files (JSON or TOML) and the named-model registry."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import structures as st
from .exprparse import compile_vector


def _load_raw(path) -> dict:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return json.loads(text)
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ImportError:  # pragma: no cover - python < 3.11
            import tomli as tomllib
        return tomllib.loads(text)
    raise ValueError(f"unsupported structure file type: {path.suffix!r}")


def _profile(spec) -> st.RadialProfile:
    kind = spec["kind"]
    if kind == "poly":
        return st.PolyProfile(spec["coeffs"])
    if kind == "trig":
        return st.TrigProfile(spec.get("a", 1.0), spec.get("omega", 0.5),
                              spec.get("phase", 0.0))
    if kind == "table":
        return st.TableProfile(spec["r"], spec["values"])
    raise ValueError(f"unknown radial profile kind {kind!r}")


def structure_from_dict(data: dict) -> st.StructureSpec:
    kind = data["kind"]
    if kind == "frame":
        domain = st.DomainBox(tuple(data.get("lo", (-50.0,) * 3)),
                              tuple(data.get("hi", (50.0,) * 3)))
        return st.FrameStructure(
            data.get("name", "frame"),
            f0=compile_vector(data["f0"]),
            f1=compile_vector(data["f1"]),
            f2=compile_vector(data["f2"]),
            domain=domain,
            h_fd=data.get("h_fd", 1e-5))
    if kind == "radial":
        return st.RadialModel(data.get("name", "radial"),
                              _profile(data["alpha"]), _profile(data["beta"]),
                              r_max=data.get("r_max", 10.0))
    if kind == "kcontact":
        return st.kcontact(float(data["kappa"]))
    if kind == "perturbed":
        return st.perturbed(float(data["eps"]), r_max=data.get("r_max", 4.0))
    raise ValueError(f"unknown structure kind {kind!r}")


def load_structure(path) -> st.StructureSpec:
    return structure_from_dict(_load_raw(path))


def parse_profile_arg(text: str) -> st.RadialProfile:
    """Compact CLI profile syntax: poly:c0,c1,... or trig:a,omega,phase or
    table:r1,v1;r2,v2;..."""
    kind, _, rest = text.partition(":")
    if kind == "poly":
        return st.PolyProfile([float(v) for v in rest.split(",")])
    if kind == "trig":
        vals = [float(v) for v in rest.split(",")]
        return st.TrigProfile(*vals)
    if kind == "table":
        pairs = [tuple(float(v) for v in pair.split(",")) for pair in rest.split(";")]
        rs, vals = zip(*pairs)
        return st.TableProfile(rs, vals)
    raise ValueError(f"unknown profile syntax {text!r}")


def resolve_model(name: str | None, file: str | None, kappa: float | None,
                  eps: float | None, alpha: str | None, beta: str | None,
                  r_max: float | None = None) -> st.StructureSpec:
    """CLI model selection shared by all subcommands."""
    if file:
        return load_structure(file)
    if name is None:
        raise ValueError("either a model name or --file is required")
    if name == "kcontact":
        if kappa is None:
            raise ValueError("kcontact requires --kappa")
        return st.kcontact(kappa)
    if name == "perturbed":
        return st.perturbed(eps if eps is not None else 0.01)
    if name == "radial":
        if alpha is None or beta is None:
            raise ValueError("radial requires --alpha and --beta")
        return st.RadialModel("radial", parse_profile_arg(alpha),
                              parse_profile_arg(beta),
                              r_max=r_max if r_max else 10.0)
    if name in st.BUILTIN_FACTORIES:
        return st.BUILTIN_FACTORIES[name]()
    raise ValueError(f"unknown model {name!r}")


def default_probes(s: st.StructureSpec, n: int = 60) -> np.ndarray:
    """Deterministic off-axis probe lattice inside the structure domain."""
    radii = np.linspace(0.25, 2.2, 5)
    angles = np.linspace(0.1, 2 * np.pi, 6, endpoint=False)
    heights = np.linspace(-0.6, 0.6, 2)
    pts = [(r * np.cos(t), r * np.sin(t), z)
           for r in radii for t in angles for z in heights]
    pts = [p for p in pts if s.contains(np.asarray(p))]
    return np.asarray(pts[:n])
