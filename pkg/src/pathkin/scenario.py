"""Scenario files: parsing, validation and construction of configurations.

A scenario is a TOML document::

    [scenario]
    format = "pathkin-scenario"
    version = 1

    [geometry]
    kind = "minkowski4"        # or "euclidean-n", "custom-connection"
    c = 1.0

    [particle1]
    worldline = "inertial"
    mass = 1.0
    velocity = [0.6, 0.0, 0.0]

    [particle2]
    ...

    [observer]
    worldline = "rest"

    [sweep]
    s_min = 0.0
    s_max = 1.0
    samples = 5

    [numerics]               # optional
    [outputs]                # optional: quantities = ["E21", "h21", ...]

See README.md for every key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .builders import cartesian_to_polar_path, sr_configuration
from .errors import ConfigurationError
from .geometry import ManifoldChart, Path, flat_chart, polar_chart
from .kinematics import Numerics, ObserverConfiguration, Particle
from .metric import constant_metric, euclidean_metric, polar_metric
from .sr import SRParticleSpec
from .transport import ConnectionTransport, FlatTransport

__all__ = [
    "FORMAT",
    "VERSION",
    "ScenarioError",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "VECTOR_QUANTITIES",
    "SCALAR_QUANTITIES",
    "COMPONENT_QUANTITIES",
]

FORMAT = "pathkin-scenario"
VERSION = 1

VECTOR_QUANTITIES = ("dV21", "h21", "V21", "dA21", "A21", "dp21")
SCALAR_QUANTITIES = ("E21", "E12", "E11", "E22", "dpi2", "E21_via_dp")
COMPONENT_QUANTITIES = ("p1_1", "p21_1", "dpi21_1", "dp21_1", "p1_1prime")
_GEOMETRIES = ("minkowski4", "euclidean-n", "custom-connection")


class ScenarioError(ConfigurationError):
    """Validation failure, tagged with the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass
class Scenario:
    name: str
    geometry: str
    config: ObserverConfiguration
    s_values: np.ndarray
    outputs: tuple
    raw: dict = field(repr=False, default_factory=dict)
    sr_specs: tuple | None = None
    c: float = 1.0
    # linear time maps tau(s) = scale * s + shift, recorded for the oracles
    time_rates: tuple = (1.0, 1.0)


# -- small field readers -------------------------------------------------------

def _get(section: dict, key: str, where: str, default=None, required=False):
    if key not in section:
        if required:
            raise ScenarioError(f"{where}.{key}", "missing required field")
        return default
    return section[key]


def _number(section, key, where, default=None, required=False, positive=False) -> float | None:
    val = _get(section, key, where, default, required)
    if val is None:
        return None
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ScenarioError(f"{where}.{key}", f"expected a finite number, got {val!r}")
    if positive and not val > 0:
        raise ScenarioError(f"{where}.{key}", "must be positive")
    return float(val)


def _vector(section, key, where, length=None, default=None, required=False) -> np.ndarray | None:
    val = _get(section, key, where, default, required)
    if val is None:
        return None
    try:
        arr = np.array(val, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise ScenarioError(f"{where}.{key}", f"expected a list of numbers, got {val!r}") from None
    if length is not None and arr.shape[0] != length:
        raise ScenarioError(f"{where}.{key}", f"expected {length} numbers, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{where}.{key}", "entries must be finite")
    return arr


def _section(doc: dict, name: str, required=True) -> dict:
    sec = doc.get(name)
    if sec is None:
        if required:
            raise ScenarioError(name, "missing section")
        return {}
    if not isinstance(sec, dict):
        raise ScenarioError(name, "must be a table")
    return sec


# -- loading -------------------------------------------------------------------

def load_scenario(path) -> Scenario:
    path = FsPath(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(str(path), f"cannot read file ({exc.strerror})") from None
    return parse_scenario(text)


_SECTIONS = ("scenario", "geometry", "particle1", "particle2", "observer", "sweep", "numerics", "outputs")


def parse_scenario(text: str) -> Scenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError("file", f"not valid TOML: {exc}") from None
    for key in doc:
        if key not in _SECTIONS:
            raise ScenarioError(key, f"unknown section; expected one of {', '.join(_SECTIONS)}")

    head = _section(doc, "scenario")
    if head.get("format") != FORMAT:
        raise ScenarioError("scenario.format", f"expected {FORMAT!r}")
    if head.get("version") != VERSION:
        raise ScenarioError("scenario.version", f"unsupported version {head.get('version')!r}; expected {VERSION}")
    name = str(head.get("name", "scenario"))

    sweep = _section(doc, "sweep")
    s_min = _number(sweep, "s_min", "sweep", required=True)
    s_max = _number(sweep, "s_max", "sweep", required=True)
    samples = _get(sweep, "samples", "sweep", required=True)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        raise ScenarioError("sweep.samples", "must be an integer >= 1")
    if s_max < s_min:
        raise ScenarioError("sweep.s_max", "must not be smaller than s_min")
    s_values = np.array([s_min]) if samples == 1 else np.linspace(s_min, s_max, samples)

    numerics = _parse_numerics(_section(doc, "numerics", required=False))
    geo = _section(doc, "geometry")
    kind = geo.get("kind")
    if kind not in _GEOMETRIES:
        raise ScenarioError("geometry.kind", f"expected one of {', '.join(_GEOMETRIES)}, got {kind!r}")

    if kind == "minkowski4":
        sc = _build_minkowski(doc, geo, s_min, s_max, numerics)
    else:
        sc = _build_general(doc, geo, kind, s_min, s_max, numerics)

    outputs = _parse_outputs(_section(doc, "outputs", required=False), sc["config"])
    scenario = Scenario(name=name, geometry=kind, s_values=s_values, outputs=outputs, raw=doc, **sc)
    _check_ranges(scenario)
    return scenario


def _parse_numerics(sec: dict) -> Numerics:
    kw = {}
    for key in ("rk4_steps", "simpson_panels"):
        if key in sec:
            val = sec[key]
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise ScenarioError(f"numerics.{key}", "must be an integer >= 1")
            kw[key] = val
    if "fd_step" in sec:
        kw["fd_step"] = _number(sec, "fd_step", "numerics", positive=True)
    if "tol" in sec:
        kw["tol"] = _number(sec, "tol", "numerics", positive=True)
    if "scheme" in sec:
        if sec["scheme"] not in ("central-2", "central-4"):
            raise ScenarioError("numerics.scheme", "expected 'central-2' or 'central-4'")
        kw["scheme"] = sec["scheme"]
    if "epsilon_zero_sign" in sec:
        if sec["epsilon_zero_sign"] not in (1, -1):
            raise ScenarioError("numerics.epsilon_zero_sign", "must be +1 or -1")
        kw["epsilon_zero"] = int(sec["epsilon_zero_sign"])
    return Numerics(**kw)


def _parse_outputs(sec: dict, cfg: ObserverConfiguration) -> tuple:
    known = VECTOR_QUANTITIES + SCALAR_QUANTITIES + COMPONENT_QUANTITIES
    if "quantities" not in sec:
        chosen = list(VECTOR_QUANTITIES)
        if cfg.metric is not None:
            chosen += list(SCALAR_QUANTITIES[:5])
        return tuple(chosen)
    q = sec["quantities"]
    if not isinstance(q, list) or not q:
        raise ScenarioError("outputs.quantities", "expected a non-empty list")
    for item in q:
        if item not in known:
            raise ScenarioError("outputs.quantities", f"unknown quantity {item!r}")
        if cfg.metric is None and item not in VECTOR_QUANTITIES:
            raise ScenarioError("outputs.quantities", f"{item} needs a metric")
    return tuple(q)


def _sweep_domain(s_min, s_max, pad=1.0):
    span = s_max - s_min
    return (s_min - pad - 0.1 * span, s_max + pad + 0.1 * span)


# -- minkowski -----------------------------------------------------------------

def _sr_spec(sec: dict, where: str, c: float) -> SRParticleSpec:
    kind = sec.get("worldline", "inertial")
    offset = _vector(sec, "offset", where, 4, default=[0.0] * 4)
    if kind == "inertial":
        mass = _number(sec, "mass", where, required=True)
        if not mass > 0:
            raise ScenarioError(f"{where}.mass", "an inertial massive particle needs mass > 0 (use worldline = 'photon')")
        v = _vector(sec, "velocity", where, 3, required=True)
        if not np.linalg.norm(v) < c:
            raise ScenarioError(f"{where}.velocity", f"speed must be below c = {c}")
        return SRParticleSpec(mass, tuple(v), tuple(offset))
    if kind == "photon":
        n = _vector(sec, "direction", where, 3, required=True)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ScenarioError(f"{where}.direction", "must be nonzero")
        energy = _number(sec, "energy", where, required=True, positive=True)
        return SRParticleSpec(0.0, tuple(c * n / norm), tuple(offset), energy)
    raise ScenarioError(f"{where}.worldline", f"minkowski4 supports 'inertial' or 'photon', got {kind!r}")


def _build_minkowski(doc, geo, s_min, s_max, numerics):
    c = _number(geo, "c", "geometry", default=1.0, positive=True)
    spec1 = _sr_spec(_section(doc, "particle1"), "particle1", c)
    spec2 = _sr_spec(_section(doc, "particle2"), "particle2", c)
    domain = _sweep_domain(s_min, s_max)
    obs = _section(doc, "observer", required=False)
    okind = obs.get("worldline", "rest")
    y = _vector(obs, "offset", "observer", 4, default=[0.0] * 4)
    if okind == "rest":
        u = np.zeros(3)
    elif okind == "inertial":
        u = _vector(obs, "velocity", "observer", 3, required=True)
        if not np.linalg.norm(u) < c:
            raise ScenarioError("observer.velocity", f"speed must be below c = {c}")
    else:
        raise ScenarioError("observer.worldline", f"minkowski4 supports 'rest' or 'inertial', got {okind!r}")
    config = sr_configuration(spec1, spec2, c, u, y, domain, numerics)
    return dict(config=config, sr_specs=(spec1, spec2), c=c)


# -- euclidean / custom connection ---------------------------------------------

def _general_worldline(sec, where, dim, domain, polar):
    kind = sec.get("worldline")
    if kind is None:
        raise ScenarioError(f"{where}.worldline", "missing required field")
    dom = _vector(sec, "domain", where, 2, default=None)
    dom = tuple(dom) if dom is not None else domain
    cart = polar and sec.get("coordinates", "chart") == "cartesian"
    if polar and sec.get("coordinates", "chart") not in ("chart", "cartesian"):
        raise ScenarioError(f"{where}.coordinates", "expected 'chart' or 'cartesian'")
    n = 2 if cart else dim
    if kind in ("rest", "inertial"):
        offset = _vector(sec, "offset", where, n, default=[0.0] * n)
        v = np.zeros(n) if kind == "rest" else _vector(sec, "velocity", where, n, required=True)
        p = Path.affine(offset, v, dom)
    elif kind == "polynomial":
        coeffs = _get(sec, "coefficients", where, required=True)
        if not isinstance(coeffs, list) or len(coeffs) != n:
            raise ScenarioError(f"{where}.coefficients", f"expected {n} coefficient lists")
        for i, row in enumerate(coeffs):
            _vector({"c": row}, "c", f"{where}.coefficients[{i}]")
        p = Path.polynomial(coeffs, dom)
    elif kind == "table":
        params = _vector(sec, "params", where, required=True)
        pts = _get(sec, "points", where, required=True)
        try:
            pts = np.array(pts, dtype=float)
        except (TypeError, ValueError):
            raise ScenarioError(f"{where}.points", "expected a list of points") from None
        if pts.ndim != 2 or pts.shape != (params.shape[0], n):
            raise ScenarioError(f"{where}.points", f"expected {params.shape[0]} rows of {n} numbers")
        if params.shape[0] < 4 or np.any(np.diff(params) <= 0):
            raise ScenarioError(f"{where}.params", "need >= 4 strictly increasing samples")
        p = Path.tabulated(params, pts)
    else:
        raise ScenarioError(f"{where}.worldline", f"expected rest, inertial, polynomial or table, got {kind!r}")
    if cart:
        xy = p.eval_many(np.linspace(p.domain[0], p.domain[1], 257))
        if np.min(np.hypot(xy[:, 0], xy[:, 1])) < 1e-6:
            raise ScenarioError(f"{where}", "a polar-chart worldline must avoid the origin")
        p = cartesian_to_polar_path(p)
    return p


def _time_map(sec, where):
    scale = _number(sec, "time_scale", where, default=1.0)
    shift = _number(sec, "time_shift", where, default=0.0)
    if not scale > 0:
        raise ScenarioError(f"{where}.time_scale", "time map must be strictly increasing")
    if scale == 1.0 and shift == 0.0:
        return (lambda s: s), 1.0
    return (lambda s: scale * s + shift), scale


def _general_particle(sec, where, dim, domain, polar):
    wl = _general_worldline(sec, where, dim, domain, polar)
    tau, rate = _time_map(sec, where)
    mass = _number(sec, "mass", where, default=1.0)
    if mass < 0:
        raise ScenarioError(f"{where}.mass", "must be non-negative")
    mu = None
    if "mu" in sec:
        mu_val = _number(sec, "mu", where)
        if mu_val == 0:
            raise ScenarioError(f"{where}.mu", "must be nonzero")
        mu = lambda s_a: mu_val
    elif mass == 0:
        raise ScenarioError(f"{where}.mu", "a massless particle needs an explicit mu")
    return Particle(wl, tau, mass, mu, where), rate


def _build_general(doc, geo, kind, s_min, s_max, numerics):
    polar = False
    consistent = False
    if kind == "euclidean-n":
        dim = _get(geo, "dim", "geometry", required=True)
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise ScenarioError("geometry.dim", "must be an integer >= 1")
        chart = flat_chart(dim, f"euclidean-{dim}")
        metric = euclidean_metric(dim)
        transport = FlatTransport()
        consistent = True
    else:
        preset = geo.get("preset")
        if preset == "polar":
            polar = True
            chart = polar_chart()
            dim = 2
            metric = polar_metric()
            consistent = True
        elif preset is None:
            G = _get(geo, "christoffel", "geometry", required=True)
            try:
                G = np.array(G, dtype=float)
            except (TypeError, ValueError):
                raise ScenarioError("geometry.christoffel", "expected a nested list of numbers") from None
            if G.ndim != 3 or len(set(G.shape)) != 1 or not np.all(np.isfinite(G)):
                raise ScenarioError("geometry.christoffel", "expected a finite dim x dim x dim array")
            dim = G.shape[0]
            chart = ManifoldChart(dim, lambda x, G=G: G, "constant-connection")
            metric = None
            if "metric" in geo:
                M = np.array(geo["metric"], dtype=float)
                if M.shape != (dim, dim) or not np.allclose(M, M.T) or abs(np.linalg.det(M)) <= 1e-12:
                    raise ScenarioError("geometry.metric", "expected a symmetric nondegenerate dim x dim matrix")
                metric = constant_metric(M)
            consistent = bool(geo.get("metric_consistent", False))
        else:
            raise ScenarioError("geometry.preset", f"unknown preset {preset!r}")
        transport = ConnectionTransport(chart, numerics.rk4_steps)

    domain = _sweep_domain(s_min, s_max)
    p1, r1 = _general_particle(_section(doc, "particle1"), "particle1", dim, domain, polar)
    p2, r2 = _general_particle(_section(doc, "particle2"), "particle2", dim, domain, polar)
    obs_sec = _section(doc, "observer")
    observer = _general_worldline(obs_sec, "observer", dim, domain, polar)
    config = ObserverConfiguration(
        observer=observer,
        particle1=p1,
        particle2=p2,
        transport=transport,
        chart=chart,
        metric=metric,
        numerics=numerics,
        metric_consistent=consistent,
    )
    return dict(config=config, time_rates=(r1, r2))


def _check_ranges(sc: Scenario) -> None:
    cfg = sc.config
    for s in (sc.s_values[0], sc.s_values[-1]):
        if not cfg.observer.contains(s):
            raise ScenarioError("sweep", f"s = {s} outside the observer domain {cfg.observer.domain}")
        for label, part in (("particle1", cfg.particle1), ("particle2", cfg.particle2)):
            s_a = part.param(s)
            if not part.worldline.contains(s_a):
                raise ScenarioError(label, f"time map sends s = {s} to {s_a}, outside the worldline domain "
                                           f"{part.worldline.domain}")
