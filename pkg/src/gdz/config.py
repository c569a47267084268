"""Graph configuration files (JSON) and CSV result export.

Complex numbers are serialized as [re, im] pairs.  CSV output uses 17
significant digits and LF line endings so that written values round-trip
bit-exactly through float parsing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .graphs import (DiracParams, MetricGraph, RoseGraph, SpinVertexConditions,
                     VertexConditions, circle_conditions, expand_spin_conditions,
                     rose_spin_conditions)
from .quadrature import QuadratureSettings
from .spectrum import Spectrum
from .zeta import ZetaResult

_KINDS = ("rose", "circle", "general", "spin-general")
_TOP_KEYS = {"kind", "lengths", "thetas", "A", "B", "u_origin", "u_terminus",
             "mass", "alpha", "quadrature"}
_QUAD_KEYS = {"rel_tol", "abs_tol", "max_levels"}


@dataclass(frozen=True)
class GraphConfig:
    graph_kind: str
    lengths: tuple[float, ...]
    thetas: tuple[float, ...] | None
    a: np.ndarray | None
    b: np.ndarray | None
    u_origin: tuple[np.ndarray, ...] | None
    u_terminus: tuple[np.ndarray, ...] | None
    mass: float
    alpha: float
    quadrature: QuadratureSettings


def _as_float(x, what: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{what} must be a number, got {type(x).__name__}")
    return float(x)


def _complex_matrix(node, what: str) -> np.ndarray:
    try:
        arr = np.asarray(node, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what}: expected nested arrays of [re, im]") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ConfigError(f"{what}: expected shape (n, n, 2), got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _matrix_to_lists(m: np.ndarray):
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def load_config(path) -> GraphConfig:
    """Parse and cross-validate a graph configuration file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: parse error at line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise ConfigError(f"{path}: kind must be one of {_KINDS}, got {kind!r}")
    if "lengths" not in doc or not isinstance(doc["lengths"], list) or not doc["lengths"]:
        raise ConfigError(f"{path}: lengths must be a non-empty list")
    lengths = tuple(_as_float(x, "length") for x in doc["lengths"])
    if any(x <= 0 for x in lengths):
        raise ConfigError(f"{path}: lengths must be positive")
    nb = len(lengths)

    thetas = None
    if "thetas" in doc:
        thetas = tuple(_as_float(x, "theta") for x in doc["thetas"])
    a = b = None
    u_o = u_t = None
    if kind == "rose":
        if thetas is None or len(thetas) != nb:
            raise ConfigError(f"{path}: rose needs one theta per loop")
    elif kind == "circle":
        if nb != 1:
            raise ConfigError(f"{path}: circle is a single bond")
    elif kind == "general":
        if "A" not in doc or "B" not in doc:
            raise ConfigError(f"{path}: general kind needs A and B")
        a = _complex_matrix(doc["A"], "A")
        b = _complex_matrix(doc["B"], "B")
        if a.shape != (4 * nb, 4 * nb) or b.shape != (4 * nb, 4 * nb):
            raise ConfigError(
                f"{path}: A, B must be {4 * nb}x{4 * nb} for {nb} bonds")
    elif kind == "spin-general":
        if "A" not in doc or "B" not in doc:
            raise ConfigError(f"{path}: spin-general kind needs A and B (reduced)")
        a = _complex_matrix(doc["A"], "A")
        b = _complex_matrix(doc["B"], "B")
        if a.shape != (2 * nb, 2 * nb) or b.shape != (2 * nb, 2 * nb):
            raise ConfigError(
                f"{path}: reduced A, B must be {2 * nb}x{2 * nb} for {nb} bonds")
        u_o = tuple(_complex_matrix(u, "u_origin") for u in doc.get("u_origin", []))
        u_t = tuple(_complex_matrix(u, "u_terminus") for u in doc.get("u_terminus", []))
        if len(u_o) != nb or len(u_t) != nb:
            raise ConfigError(f"{path}: need {nb} SU(2) matrices per endpoint list")

    mass = _as_float(doc.get("mass", 0.0), "mass")
    if mass < 0:
        raise ConfigError(f"{path}: mass must be non-negative")
    alpha = _as_float(doc.get("alpha", np.pi / 2), "alpha")
    if not (0.0 < alpha < np.pi):
        raise ConfigError(f"{path}: alpha must lie in (0, pi)")

    qs = doc.get("quadrature", {})
    if not isinstance(qs, dict) or set(qs) - _QUAD_KEYS:
        raise ConfigError(f"{path}: quadrature accepts keys {sorted(_QUAD_KEYS)}")
    quad = QuadratureSettings(
        rel_tol=_as_float(qs.get("rel_tol", 1e-10), "rel_tol"),
        abs_tol=_as_float(qs.get("abs_tol", 1e-14), "abs_tol"),
        max_levels=int(qs.get("max_levels", 12)))

    cfg = GraphConfig(graph_kind=kind, lengths=lengths, thetas=thetas, a=a, b=b,
                      u_origin=u_o, u_terminus=u_t, mass=mass, alpha=alpha,
                      quadrature=quad)
    build_objects(cfg)   # reject anything the model layer would reject
    return cfg


def build_objects(cfg: GraphConfig):
    """Instantiate the model objects described by a config.

    Returns (kind, rose_or_none, vertex_conditions, metric_graph, params).
    The rose kind also provides its expanded conditions so that either
    representation can be used.
    """
    params = DiracParams(mass=cfg.mass, alpha=cfg.alpha)
    graph = MetricGraph(cfg.lengths)
    if cfg.graph_kind == "rose":
        rose = RoseGraph(cfg.lengths, cfg.thetas)
        vc = expand_spin_conditions(rose_spin_conditions(rose))
        return "rose", rose, vc, graph, params
    if cfg.graph_kind == "circle":
        vc = circle_conditions(cfg.lengths[0])
        return "circle", None, vc, graph, params
    if cfg.graph_kind == "general":
        vc = VertexConditions(cfg.a, cfg.b)
        return "general", None, vc, graph, params
    svc = SpinVertexConditions(cfg.a, cfg.b, cfg.u_origin, cfg.u_terminus)
    return "spin-general", None, expand_spin_conditions(svc), graph, params


def write_config(path, cfg: GraphConfig) -> None:
    doc: dict = {"kind": cfg.graph_kind,
                 "lengths": [float(x) for x in cfg.lengths],
                 "mass": cfg.mass, "alpha": cfg.alpha}
    if cfg.thetas is not None:
        doc["thetas"] = [float(x) for x in cfg.thetas]
    if cfg.a is not None:
        doc["A"] = _matrix_to_lists(cfg.a)
        doc["B"] = _matrix_to_lists(cfg.b)
    if cfg.u_origin is not None:
        doc["u_origin"] = [_matrix_to_lists(u) for u in cfg.u_origin]
        doc["u_terminus"] = [_matrix_to_lists(u) for u in cfg.u_terminus]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# CSV export

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_spectrum(path, spectrum: Spectrum) -> None:
    """CSV with header index,k; roots repeated according to multiplicity."""
    lines = ["index,k"]
    idx = 0
    for root, mult in zip(spectrum.positive_roots, spectrum.multiplicities):
        for _ in range(int(mult)):
            lines.append(f"{idx},{_fmt(float(root))}")
            idx += 1
    _write_lines(path, lines)


def write_zeta(path, results: list[ZetaResult]) -> None:
    lines = ["s_re,s_im,zeta_re,zeta_im,err"]
    for r in results:
        s, v = complex(r.s), complex(r.value)
        lines.append(",".join(_fmt(x) for x in
                              (s.real, s.imag, v.real, v.imag, r.err_estimate)))
    _write_lines(path, lines)


def write_det(path, result) -> None:
    lines = ["closed_re,closed_im,viazeta_re,viazeta_im,rel_disc"]
    c = complex(result.closed_form)
    v = complex(result.via_zeta) if result.via_zeta is not None else complex(np.nan)
    d = result.rel_discrepancy if result.rel_discrepancy is not None else np.nan
    lines.append(",".join(_fmt(x) for x in (c.real, c.imag, v.real, v.imag, d)))
    _write_lines(path, lines)


def read_zeta(path) -> list[tuple[complex, complex, float]]:
    """Re-read a zeta CSV as (s, value, err) triples."""
    rows = Path(path).read_text(encoding="utf-8").splitlines()
    if not rows or rows[0] != "s_re,s_im,zeta_re,zeta_im,err":
        raise ConfigError(f"{path}: not a zeta result file")
    out = []
    for row in rows[1:]:
        sr, si, zr, zi, err = (float(x) for x in row.split(","))
        out.append((complex(sr, si), complex(zr, zi), err))
    return out


def _write_lines(path, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
