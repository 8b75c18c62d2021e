"""Command-line interface: config-driven runs with machine-readable outputs.

Subcommands: signature, check, simulate, extremize, brane, clifford.
Configs are YAML (nested key-value sections); unknown keys are rejected with
their line number. Every JSON summary carries the subcommand, the sha256
digest of the config text, the tool version, and the effective seed, and all
floats are printed with 17 significant digits so identical config + seed
reproduce byte-identical outputs.

Exit codes: 0 success, 1 physics-domain error, 2 config error.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .action import ExtremizeResult, extremize, straight_chord_path
from .brane import (
    BraneSpec,
    brane_action,
    component_count,
    constant_brane_potential,
    cylinder_patch_embedding,
    graph_embedding,
    gridded_embedding,
    integral_gauge_check,
    minor_indices,
    tilted_plane_embedding,
)
from .clifford import (
    abelian_algebra,
    build_dirac_gammas,
    lorentz_vector_algebra,
    mass_shell_determinant_residual,
    perturb_gammas,
    rotation_vector_algebra,
    solve_quadratic_generators,
    vector_covariance_check,
    verify_lie_closure,
)
from .errors import ConfigError, RepMechError
from .fields import (
    constant_potential,
    symmetric_tensor,
    uniform_magnetic_potential,
    zero_potential,
)
from .geometry import (
    causality_class,
    constant_diagonal_metric,
    constant_metric,
    euclidean_metric,
    minkowski_metric,
    signature,
)
from .lagrangian import LagrangianSpec
from .sweeps import standard_sweeps
from .worldline import GaugeChoice, conserved_drift, integrate

SUBCOMMANDS = ("signature", "check", "simulate", "extremize", "brane", "clifford")


# ---------------------------------------------------------------------------
# deterministic JSON with 17 significant digits
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return f"{x:.17g}"


def to_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {to_json(obj[k], indent + 1)}' for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        items = [f"{inner}{to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent)
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


# ---------------------------------------------------------------------------
# YAML with key line numbers
# ---------------------------------------------------------------------------

def _key_lines(node, prefix=()):
    lines = {}
    if isinstance(node, yaml.MappingNode):
        for k_node, v_node in node.value:
            path = prefix + (str(k_node.value),)
            lines[path] = k_node.start_mark.line + 1
            lines.update(_key_lines(v_node, path))
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            lines.update(_key_lines(item, prefix + (str(i),)))
    return lines


class Section:
    """A config mapping with its path and source lines, for precise errors."""

    def __init__(self, data, path, lines):
        if not isinstance(data, dict):
            raise ConfigError(f"section '{'.'.join(path) or '<root>'}' must be a mapping")
        self.data = data
        self.path = path
        self.lines = lines

    def _line(self, key):
        return self.lines.get(self.path + (key,))

    def where(self, key) -> str:
        line = self._line(key)
        loc = f" (line {line})" if line is not None else ""
        name = ".".join(self.path + (key,))
        return f"'{name}'{loc}"

    def require_keys(self, allowed, required=()):
        for key in self.data:
            if key not in allowed:
                raise ConfigError(f"unknown key {self.where(key)}")
        for key in required:
            if key not in self.data:
                name = ".".join(self.path + (key,))
                raise ConfigError(f"missing required key '{name}'")

    def child(self, key) -> "Section":
        return Section(self.data[key], self.path + (key,), self.lines)

    def get(self, key, default=None):
        return self.data.get(key, default)

    def number(self, key, default=None):
        val = self.data.get(key, default)
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise ConfigError(f"{self.where(key)} must be a number")
        return float(val)

    def integer(self, key, default=None):
        val = self.data.get(key, default)
        if not isinstance(val, int) or isinstance(val, bool):
            raise ConfigError(f"{self.where(key)} must be an integer")
        return int(val)

    def string(self, key, default=None, choices=None):
        val = self.data.get(key, default)
        if not isinstance(val, str):
            raise ConfigError(f"{self.where(key)} must be a string")
        if choices is not None and val not in choices:
            raise ConfigError(f"{self.where(key)} must be one of {sorted(choices)}")
        return val

    def vector(self, key, default=None):
        val = self.data.get(key, default)
        if not isinstance(val, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in val):
            raise ConfigError(f"{self.where(key)} must be a list of numbers")
        return np.asarray(val, dtype=float)


class RunConfig:
    def __init__(self, subcommand, payload, seed, digest, warnings):
        self.subcommand = subcommand
        self.payload = payload
        self.seed = seed
        self.digest = digest
        self.warnings = warnings


# ---------------------------------------------------------------------------
# field/spec construction from config sections
# ---------------------------------------------------------------------------

def _build_metric(sec: Section):
    kind = sec.string("kind", choices={"minkowski", "euclidean", "constant_diagonal", "constant"})
    if kind in ("minkowski", "euclidean"):
        sec.require_keys({"kind", "dim"}, required=("dim",))
        dim = sec.integer("dim")
        return minkowski_metric(dim) if kind == "minkowski" else euclidean_metric(dim)
    if kind == "constant_diagonal":
        sec.require_keys({"kind", "diagonal"}, required=("diagonal",))
        return constant_diagonal_metric(sec.vector("diagonal"))
    sec.require_keys({"kind", "matrix"}, required=("matrix",))
    matrix = sec.get("matrix")
    if not isinstance(matrix, list):
        raise ConfigError(f"{sec.where('matrix')} must be a list of rows")
    return constant_metric(np.asarray(matrix, dtype=float))


def _build_potential(sec: Section, dim: int, metric_where: str):
    kind = sec.string("kind", choices={"zero", "constant", "uniform_magnetic"})
    if kind == "zero":
        sec.require_keys({"kind"})
        return zero_potential(dim)
    if kind == "constant":
        sec.require_keys({"kind", "components"}, required=("components",))
        comp = sec.vector("components")
        if comp.size != dim:
            raise ConfigError(
                f"dimension mismatch: {metric_where} has dim {dim} but "
                f"{sec.where('components')} has {comp.size} components"
            )
        return constant_potential(comp)
    sec.require_keys({"kind", "strength", "plane"}, required=("strength",))
    plane = sec.get("plane", [1, 2])
    if not (isinstance(plane, list) and len(plane) == 2
            and all(isinstance(p, int) for p in plane)):
        raise ConfigError(f"{sec.where('plane')} must be two integer indices")
    return uniform_magnetic_potential(dim, sec.number("strength"), tuple(plane))


def _parse_tensor_entries(sec: Section, rank: int, dim: int, warnings: list):
    raw = sec.get("entries")
    if not isinstance(raw, dict) or not raw:
        raise ConfigError(f"{sec.where('entries')} must be a non-empty mapping")
    entries = {}
    for key, val in raw.items():
        try:
            idx = tuple(int(p) for p in str(key).split(","))
        except ValueError:
            raise ConfigError(f"{sec.where('entries')}: bad multi-index '{key}'")
        if len(idx) != rank:
            raise ConfigError(
                f"{sec.where('entries')}: index '{key}' does not have rank {rank}"
            )
        if any(i < 0 or i >= dim for i in idx):
            raise ConfigError(
                f"{sec.where('entries')}: index '{key}' out of range for dim {dim}"
            )
        canon = tuple(sorted(idx))
        if canon != idx:
            warnings.append(
                f"tensor entry index {idx} normalized to sorted form {canon}"
            )
        if canon in entries:
            raise ConfigError(f"{sec.where('entries')}: duplicate multi-index {canon}")
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise ConfigError(f"{sec.where('entries')}: value for '{key}' must be a number")
        entries[canon] = float(val)
    return entries


def _build_spec(sec: Section, warnings: list) -> LagrangianSpec:
    sec.require_keys({"mass", "charge", "metric", "potential", "extra_terms"},
                     required=("metric",))
    metric = _build_metric(sec.child("metric"))
    dim = metric.dim
    potential = None
    if "potential" in sec.data:
        potential = _build_potential(sec.child("potential"), dim, sec.where("metric"))
    terms = []
    raw_terms = sec.get("extra_terms", [])
    if not isinstance(raw_terms, list):
        raise ConfigError(f"{sec.where('extra_terms')} must be a list")
    for i, _ in enumerate(raw_terms):
        tsec = Section(raw_terms[i], sec.path + ("extra_terms", str(i)), sec.lines)
        tsec.require_keys({"coupling", "rank", "entries"}, required=("coupling", "rank", "entries"))
        rank = tsec.integer("rank")
        if rank < 3:
            raise ConfigError(f"{tsec.where('rank')} must be >= 3")
        entries = _parse_tensor_entries(tsec, rank, dim, warnings)
        terms.append((tsec.number("coupling"), symmetric_tensor(rank, dim, entries)))
    return LagrangianSpec(
        metric=metric,
        mass=sec.number("mass", 0.0),
        charge=sec.number("charge", 0.0),
        potential=potential,
        extra_terms=tuple(terms),
    )


# ---------------------------------------------------------------------------
# per-subcommand parsing
# ---------------------------------------------------------------------------

def parse_config(text: str, subcommand: str) -> RunConfig:
    """Validate config text for a subcommand; errors name the offending key and line."""
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand '{subcommand}'")
    try:
        data = yaml.safe_load(text)
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}")
    if data is None:
        data = {}
    lines = _key_lines(node) if node is not None else {}
    root = Section(data, (), lines)
    warnings: list = []

    seed = 0
    if "seed" in root.data:
        seed = root.integer("seed")
        if seed < 0:
            raise ConfigError(f"{root.where('seed')} must be nonnegative")

    parser = {
        "signature": _parse_signature,
        "check": _parse_check,
        "simulate": _parse_simulate,
        "extremize": _parse_extremize,
        "brane": _parse_brane,
        "clifford": _parse_clifford,
    }[subcommand]
    payload = parser(root, warnings)
    digest = hashlib.sha256(text.encode()).hexdigest()
    return RunConfig(subcommand, payload, seed, digest, warnings)


def _parse_signature(root: Section, warnings):
    root.require_keys({"seed", "metric", "tolerance"}, required=("metric",))
    metric = _build_metric(root.child("metric"))
    tol = root.number("tolerance", 1e-10)
    return {"metric": metric, "tolerance": tol}


def _parse_check(root: Section, warnings):
    root.require_keys({"seed", "samples"})
    samples = root.integer("samples", 1000)
    if samples < 10:
        raise ConfigError(f"{root.where('samples')} must be at least 10")
    return {"samples": samples}


def _parse_simulate(root: Section, warnings):
    root.require_keys({"seed", "spec", "gauge", "initial", "tau_end", "step"},
                      required=("spec", "initial", "tau_end", "step"))
    spec = _build_spec(root.child("spec"), warnings)
    gauge_name = root.string("gauge", "coordinate_time",
                             choices={"coordinate_time", "proper_time"})
    init = root.child("initial")
    init.require_keys({"position", "velocity"}, required=("position", "velocity"))
    x0 = init.vector("position")
    v0 = init.vector("velocity")
    for name, vec in (("position", x0), ("velocity", v0)):
        if vec.size != spec.dim:
            raise ConfigError(
                f"dimension mismatch: {root.where('spec')} metric has dim {spec.dim} "
                f"but {init.where(name)} has {vec.size} components"
            )
    return {
        "spec": spec,
        "gauge": GaugeChoice(gauge_name),
        "x0": x0,
        "v0": v0,
        "tau_end": root.number("tau_end"),
        "step": root.number("step"),
    }


def _parse_extremize(root: Section, warnings):
    root.require_keys(
        {"seed", "spec", "start", "end", "interior_points", "perturbation",
         "max_iters", "grad_tol"},
        required=("spec", "start", "end"),
    )
    spec = _build_spec(root.child("spec"), warnings)
    start = root.vector("start")
    end = root.vector("end")
    for name, vec in (("start", start), ("end", end)):
        if vec.size != spec.dim:
            raise ConfigError(
                f"dimension mismatch: {root.where('spec')} metric has dim {spec.dim} "
                f"but {root.where(name)} has {vec.size} components"
            )
    k = root.integer("interior_points", 9)
    if k < 1:
        raise ConfigError(f"{root.where('interior_points')} must be >= 1")
    return {
        "spec": spec,
        "start": start,
        "end": end,
        "K": k,
        "perturbation": root.number("perturbation", 0.0),
        "max_iters": root.integer("max_iters", 200),
        "grad_tol": root.number("grad_tol", 1e-8),
    }


def _parse_brane(root: Section, warnings):
    root.require_keys({"seed", "embedding", "spec"}, required=("embedding", "spec"))
    esec = root.child("embedding")
    kind = esec.string("kind", choices={"tilted_plane", "graph", "cylinder_patch", "grid_csv"})
    box = esec.get("box")
    resolution = esec.get("resolution")

    def box_arr(default):
        if box is None:
            return np.asarray(default, dtype=float)
        try:
            arr = np.asarray(box, dtype=float)
        except (TypeError, ValueError):
            raise ConfigError(f"{esec.where('box')} must be a list of [lo, hi] pairs")
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ConfigError(f"{esec.where('box')} must be a list of [lo, hi] pairs")
        return arr

    def res_tuple(default, d):
        if resolution is None:
            return tuple(default)
        if not (isinstance(resolution, list) and len(resolution) == d
                and all(isinstance(r, int) and r >= 2 for r in resolution)):
            raise ConfigError(
                f"{esec.where('resolution')} must be {d} integers >= 2"
            )
        return tuple(resolution)

    if kind == "tilted_plane":
        esec.require_keys({"kind", "slope", "box", "resolution"}, required=("slope",))
        emb = tilted_plane_embedding(esec.number("slope"), box_arr([[0, 1], [0, 1]]),
                                     res_tuple((128, 128), 2))
    elif kind == "cylinder_patch":
        esec.require_keys({"kind", "radius", "box", "resolution"}, required=("radius",))
        emb = cylinder_patch_embedding(esec.number("radius"),
                                       box_arr([[0, 1], [0, math.pi]]),
                                       res_tuple((64, 64), 2))
    elif kind == "graph":
        esec.require_keys({"kind", "linear", "quadratic", "box", "resolution"})
        b = box_arr([[0, 1], [0, 1]])
        d = b.shape[0]
        lin = esec.vector("linear", [0.0] * d)
        if lin.size != d:
            raise ConfigError(
                f"dimension mismatch: {esec.where('box')} has {d} axes but "
                f"{esec.where('linear')} has {lin.size} components"
            )
        quad_raw = esec.get("quadratic")
        quad = np.zeros((d, d))
        if quad_raw is not None:
            quad = np.asarray(quad_raw, dtype=float)
            if quad.shape != (d, d):
                raise ConfigError(f"{esec.where('quadratic')} must be a {d}x{d} matrix")

        def f(Z, lin=lin, quad=quad):
            Z = np.atleast_2d(Z)
            return Z @ lin + np.einsum("na,ab,nb->n", Z, quad, Z)

        def grad(Z, lin=lin, quad=quad):
            Z = np.atleast_2d(Z)
            return lin[None, :] + Z @ (quad + quad.T)

        emb = graph_embedding(f, grad=grad, box=b, resolution=res_tuple((64,) * d, d))
    else:  # grid_csv
        esec.require_keys({"kind", "path", "d", "dim_m"}, required=("path", "d", "dim_m"))
        emb = _load_grid_csv(Path(esec.string("path")), esec.integer("d"),
                             esec.integer("dim_m"), esec)

    ssec = root.child("spec")
    ssec.require_keys({"metric", "mass", "charge", "potential"}, required=("metric",))
    metric = _build_metric(ssec.child("metric"))
    if metric.dim != emb.dim_m:
        raise ConfigError(
            f"dimension mismatch: {ssec.where('metric')} has dim {metric.dim} but "
            f"{esec.where('kind')} embedding targets dim {emb.dim_m}"
        )
    potential = None
    if "potential" in ssec.data:
        psec = ssec.child("potential")
        psec.require_keys({"kind", "components"}, required=("kind", "components"))
        psec.string("kind", choices={"constant"})
        comp = psec.vector("components")
        n_comp = component_count(emb.dim_m, emb.d)
        if comp.size != n_comp:
            raise ConfigError(
                f"dimension mismatch: {psec.where('components')} has {comp.size} entries "
                f"but the embedding has {n_comp} minor components"
            )
        potential = constant_brane_potential(emb.dim_m, comp)
    spec = BraneSpec(metric=metric, mass=ssec.number("mass", 1.0),
                     charge=ssec.number("charge", 1.0), potential=potential)
    return {"embedding": emb, "spec": spec}


def _load_grid_csv(path: Path, d: int, dim_m: int, esec: Section):
    """CSV rows: z coordinates then x coordinates; nodes on a regular grid."""
    if not path.exists():
        raise ConfigError(f"{esec.where('path')}: file '{path}' not found")
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    if rows.shape[1] != d + dim_m:
        raise ConfigError(
            f"{esec.where('path')}: expected {d + dim_m} columns (z then x), "
            f"got {rows.shape[1]}"
        )
    zs = rows[:, :d]
    xs = rows[:, d:]
    axes = [np.unique(zs[:, a]) for a in range(d)]
    shape = tuple(a.size for a in axes)
    if int(np.prod(shape)) != rows.shape[0]:
        raise ConfigError(f"{esec.where('path')}: nodes do not form a regular grid")
    values = np.full(shape + (dim_m,), np.nan)
    idx = tuple(np.searchsorted(axes[a], zs[:, a]) for a in range(d))
    values[idx] = xs
    if np.any(np.isnan(values)):
        raise ConfigError(f"{esec.where('path')}: grid has missing nodes")
    return gridded_embedding(axes, values)


def _parse_clifford(root: Section, warnings):
    root.require_keys({"seed", "algebra", "form", "perturbation", "trials", "det_samples"})
    algebra = root.string("algebra", "lorentz", choices={"lorentz", "so3", "abelian"})
    form = root.string("form", "minkowski", choices={"minkowski", "euclidean"})
    perturbation = root.number("perturbation", 0.0)
    trials = root.integer("trials", 1)
    if trials < 1:
        raise ConfigError(f"{root.where('trials')} must be >= 1")
    return {
        "algebra": algebra,
        "form": form,
        "perturbation": perturbation,
        "trials": trials,
        "det_samples": root.integer("det_samples", 1000),
    }


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------

def _write_csv(path: Path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{float(v):.17g}" for v in row) + "\n")


def _run_signature(cfg, out_dir):
    metric = cfg.payload["metric"]
    g = metric(np.zeros(metric.dim))
    sig = signature(g, tol=cfg.payload["tolerance"])
    report = {
        "signature": {
            "n_plus": sig.n_plus, "n_minus": sig.n_minus, "n_zero": sig.n_zero,
            "tolerance": sig.tolerance,
        }
    }
    cls = causality_class(sig)
    causality = {"class": cls.kind.value}
    if cls.witness is not None:
        causality.update({
            "witness": cls.witness,
            "witness_model_frame": cls.witness_model,
            "spatial_speed_sq": cls.spatial_speed_sq,
            "quadratic_form_value": cls.timelike_norm,
        })
    report["causality"] = causality
    return report, []


def _run_check(cfg, out_dir):
    results = standard_sweeps(seed=cfg.seed, samples=cfg.payload["samples"])
    return {
        "properties": [
            {"property": r.name, "samples": r.samples, "max_residual": r.max_residual,
             "tolerance": r.tolerance, "pass": r.passed}
            for r in results
        ],
        "all_pass": all(r.passed for r in results),
    }, []


def _run_simulate(cfg, out_dir):
    p = cfg.payload
    wl = integrate(p["spec"], p["gauge"], p["x0"], p["v0"], p["tau_end"], p["step"])
    dim = p["spec"].dim
    header = (["tau"] + [f"x{i}" for i in range(dim)] + [f"v{i}" for i in range(dim)]
              + ["mass_shell_residual"])
    rows = np.column_stack([wl.tau, wl.x, wl.v, wl.drift])
    csv_path = out_dir / "trajectory.csv"
    _write_csv(csv_path, header, rows)
    return {
        "gauge": wl.gauge.value,
        "steps": len(wl) - 1,
        "tau_end": float(wl.tau[-1]),
        "final_position": wl.x[-1],
        "final_velocity": wl.v[-1],
        "max_mass_shell_residual": conserved_drift(wl, p["spec"]),
        "max_gauge_residual": float(np.max(wl.gauge_residual)),
        "trajectory_csv": csv_path.name,
    }, [csv_path]


def _run_extremize(cfg, out_dir):
    p = cfg.payload
    perturbation = None
    if p["perturbation"] != 0.0:
        rng = np.random.default_rng(cfg.seed)
        perturbation = p["perturbation"] * rng.normal(size=(p["K"], p["spec"].dim))
        perturbation[:, 0] = 0.0  # keep segments timelike
    path0 = straight_chord_path(p["start"], p["end"], p["K"], perturbation)
    result: ExtremizeResult = extremize(p["spec"], path0,
                                        max_iters=p["max_iters"], grad_tol=p["grad_tol"])
    pts = result.path.points()
    csv_path = out_dir / "path.csv"
    _write_csv(csv_path, ["k"] + [f"x{i}" for i in range(p["spec"].dim)],
               [np.concatenate(([k], pt)) for k, pt in enumerate(pts)])
    return {
        "action": result.action,
        "grad_norm": result.grad_norm_inf,
        "iterations": result.iterations,
        "degenerate_modes": result.degenerate_modes,
        "converged": result.converged,
        "message": result.message,
        "path_csv": csv_path.name,
    }, [csv_path]


def _run_brane(cfg, out_dir):
    emb = cfg.payload["embedding"]
    action, details = brane_action(cfg.payload["spec"], emb, details=True)
    return {
        "action": action,
        "component_count": details["component_count"],
        "gauge_deviation": integral_gauge_check(emb),
        "cells": details["cells"],
        "min_radicand": details["min_radicand"],
    }, []


def _run_clifford(cfg, out_dir):
    p = cfg.payload
    gam = build_dirac_gammas(p["form"])
    if p["algebra"] == "lorentz":
        alg = lorentz_vector_algebra(gam.form)
    elif p["algebra"] == "so3":
        alg = rotation_vector_algebra(gam.form)
    else:
        alg = abelian_algebra(4)
    rng = np.random.default_rng(cfg.seed)

    trial_residuals = []
    last = None
    for _ in range(p["trials"]):
        gam_t = gam if p["perturbation"] == 0.0 else perturb_gammas(gam, p["perturbation"], rng)
        sol = solve_quadratic_generators(alg, gam_t)
        trial_residuals.append(float(np.max(sol.residuals)))
        last = (gam_t, sol)
    gam_t, sol = last

    det_worst = 0.0
    mink = build_dirac_gammas("minkowski")
    for _ in range(p["det_samples"]):
        pi = rng.normal(size=4) * 1.5
        m = float(rng.uniform(0.0, 2.0))
        target = (float(pi @ np.linalg.inv(mink.form) @ pi) - m * m) ** 2
        res = mass_shell_determinant_residual(0.0, m, np.zeros(4), pi, mink)
        det_worst = max(det_worst, res / max(1.0, abs(target)))

    return {
        "algebra": p["algebra"],
        "form": p["form"],
        "perturbation": p["perturbation"],
        "anticommutator_residual": gam_t.residual,
        "residuals": sol.residuals,
        "kernel_dims": [sol.kernel_dim] * alg.n_generators,
        "grade_leakage": sol.grade_leakage,
        "closure_residual": verify_lie_closure(sol, alg),
        "covariance_residual": vector_covariance_check(sol, alg, gam_t),
        "trial_max_residuals": trial_residuals,
        "determinant_check": {
            "samples": p["det_samples"],
            "max_relative_residual": det_worst,
        },
    }, []


_RUNNERS = {
    "signature": _run_signature,
    "check": _run_check,
    "simulate": _run_simulate,
    "extremize": _run_extremize,
    "brane": _run_brane,
    "clifford": _run_clifford,
}


def run(subcommand: str, cfg: RunConfig, out_dir: Path):
    """Execute a parsed config; returns (summary dict, written artifact paths)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    payload_summary, artifacts = _RUNNERS[subcommand](cfg, out_dir)
    summary = {
        "subcommand": subcommand,
        "version": __version__,
        "config_digest": cfg.digest,
        "seed": cfg.seed,
    }
    summary.update(payload_summary)
    summary_path = out_dir / f"{subcommand}_summary.json"
    summary_path.write_text(to_json(summary) + "\n")
    return summary, [summary_path] + artifacts


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="repmech",
        description="Reparametrization-invariant mechanics toolkit",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="YAML config path")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        sp.add_argument("--json", action="store_true",
                        help="print the JSON summary to stdout")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"config error: cannot read '{args.config}': {exc}", file=sys.stderr)
        return 2

    try:
        cfg = parse_config(text, args.subcommand)
        if args.seed is not None:
            cfg.seed = args.seed
        for warning in cfg.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        summary, _ = run(args.subcommand, cfg, Path(args.out))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RepMechError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    if args.json:
        print(to_json(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
