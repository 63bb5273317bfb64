"""Parameter sweeps over HOM / correlation observables and their serialization.

A sweep has a base parameter set, up to two axes from ``delta, e0, dt, tau,
xi`` and one observable.  Rows are produced in outer-axis-major order no
matter how many worker processes are used.
"""

from __future__ import annotations

import copy
import csv
import enum
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .amplitudes import CorrMethod, Pair
from .core import JcParams, Ports, TwoPhotonInput
from .correlations import g2_norm_constant, g2_raw_with_error
from .hom import HomMethod, hom_gamma
from .oracle import QuadSpec, quad_g2, quad_gamma
from .scattering import transmission_probability
from .spectrum import Branch, beam_splitter_energies, jc_energy

AXIS_NAMES = ("delta", "e0", "dt", "tau", "xi")
COLUMNS = ("delta", "e0", "dt", "tau", "value", "abs_err", "status", "method", "xi")
NUMERIC = ("delta", "e0", "dt", "tau", "value", "abs_err", "xi")

#: agreement required between a sweep value and its brute-force check
ORACLE_GAMMA_TOL = 1e-5
ORACLE_G2_RTOL = 1e-5


class Observable(enum.Enum):
    GAMMA = "gamma"
    GAMMA_LIN = "gamma_lin"
    G2_12 = "g2_12"
    G2_11 = "g2_11"
    G2_22_SAME_SIDE = "g2_22_same_side"
    G2_11_SAME_SIDE = "g2_11_same_side"
    TRANSMISSION = "transmission"

    @property
    def pair(self) -> Pair | None:
        return {"g2_12": Pair.P12, "g2_11": Pair.P11, "g2_22_same_side": Pair.P22,
                "g2_11_same_side": Pair.P11}.get(self.value)

    @property
    def ports(self) -> Ports:
        return Ports.SAME if self.value.endswith("same_side") else Ports.DIFFERENT


class Carrier(enum.Enum):
    """How the common packet carrier ``nu0`` is chosen at each point."""

    E0 = "e0"                    # nu0 = wc + e0/2
    OMEGA1_PLUS = "omega1_plus"  # 50/50 point Omega^(1)_+
    OMEGA2_PLUS = "omega2_plus"  # 50/50 point Omega^(2)_+
    EPS1_PLUS = "eps1_plus"      # one-polariton energy


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; choose from {AXIS_NAMES}")
        if len(self.values) < 2:
            raise ValueError(f"axis {self.name!r} needs at least two points")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError(f"axis {self.name!r} has non-finite values")

    @classmethod
    def linspace(cls, name: str, start: float, stop: float, num: int) -> "Axis":
        return cls(name, tuple(float(v) for v in np.linspace(start, stop, int(num))))


@dataclass(frozen=True)
class SweepSpec:
    params: JcParams
    xi: float
    dt: float = 0.0
    e0: float = 0.0
    tau: float = 0.0
    carrier: Carrier = Carrier.E0
    axes: tuple[Axis, ...] = ()
    observable: Observable = Observable.GAMMA
    method: CorrMethod = CorrMethod.RESIDUE
    linear: bool = False
    normalize: bool = True
    oracle: bool = False
    threads: int = 1

    def __post_init__(self):
        if len(self.axes) > 2:
            raise ValueError("at most two sweep axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("axes must be distinct")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def points(self) -> list[dict[str, float]]:
        base = {"delta": self.params.delta, "e0": self.e0, "dt": self.dt, "tau": self.tau,
                "xi": self.xi}
        out = []
        for combo in itertools.product(*(a.values for a in self.axes)):
            pt = dict(base)
            pt.update(zip((a.name for a in self.axes), combo))
            out.append(pt)
        return out


@dataclass(frozen=True)
class Row:
    delta: float
    e0: float
    dt: float
    tau: float
    value: float
    abs_err: float
    status: str
    method: str
    xi: float

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in COLUMNS}


def point_setup(spec: SweepSpec, pt: dict[str, float]):
    """Scatterer, two-photon input and effective ``e0`` for one sweep point."""
    base = spec.params
    params = JcParams(omega_c=base.omega_c, omega_q=base.omega_c - pt["delta"], g=base.g,
                      kappa=base.kappa)
    if spec.carrier is Carrier.E0:
        nu0 = params.omega_c + pt["e0"] / 2
    elif spec.carrier is Carrier.EPS1_PLUS:
        nu0 = jc_energy(1, Branch.PLUS, params)
    else:
        bs = beam_splitter_energies(params)
        nu0 = bs.plus1 if spec.carrier is Carrier.OMEGA1_PLUS else bs.plus2
    inp = TwoPhotonInput.symmetric(nu0, pt["xi"], pt["dt"], spec.observable.ports)
    return params, inp, 2 * (nu0 - params.omega_c)


def _method_label(spec: SweepSpec) -> str:
    obs = spec.observable
    if obs is Observable.TRANSMISSION:
        label = "closed_form"
    elif obs is Observable.GAMMA_LIN:
        label = HomMethod.LINEAR.value
    elif obs is Observable.GAMMA:
        label = _hom_method(spec).value
    else:
        label = spec.method.value + ("+linear" if spec.linear else "")
        label += "+normalized" if spec.normalize else "+raw"
    return label + ("+oracle" if spec.oracle and obs is not Observable.TRANSMISSION else "")


def _hom_method(spec: SweepSpec) -> HomMethod:
    if spec.observable is Observable.GAMMA_LIN or spec.linear:
        return HomMethod.LINEAR
    if spec.method is CorrMethod.QUADRATURE:
        return HomMethod.EXACT_QUADRATURE
    return HomMethod.EXACT_RESIDUE


def _evaluate_group(spec: SweepSpec, pts: list[dict[str, float]]) -> list[Row]:
    """Rows for points that differ at most in ``tau``; failures become status text."""
    label = _method_label(spec)
    try:
        params, inp, e0 = point_setup(spec, pts[0])
        values, errs, status = _compute(spec, params, inp, [p["tau"] for p in pts])
    except Exception as exc:  # per-point failures never abort a sweep
        e0 = pts[0]["e0"]
        values = [math.nan] * len(pts)
        errs = [math.nan] * len(pts)
        status = [f"error: {type(exc).__name__}: {exc}"] * len(pts)
    return [Row(p["delta"], e0, p["dt"], p["tau"], float(v), float(e), s, label, p["xi"])
            for p, v, e, s in zip(pts, values, errs, status)]


def _compute(spec: SweepSpec, params: JcParams, inp: TwoPhotonInput, taus: list[float]):
    obs = spec.observable
    n = len(taus)
    if obs is Observable.TRANSMISSION:
        nu0 = inp.packet1.nu0
        return [float(transmission_probability(nu0, params))] * n, [0.0] * n, ["ok"] * n
    if obs in (Observable.GAMMA, Observable.GAMMA_LIN):
        res = hom_gamma(inp, params, _hom_method(spec))
        status = "ok"
        if spec.oracle:
            ref, _ = quad_gamma(inp, params, QuadSpec(1e-9, 1e-7),
                                linear=res.method is HomMethod.LINEAR)
            if abs(ref - res.gamma) > ORACLE_GAMMA_TOL:
                status = f"oracle_mismatch: brute force {ref:.10g}"
        return [res.gamma] * n, [res.abs_err] * n, [status] * n
    pair = obs.pair
    raw, err = g2_raw_with_error(pair, np.array(taus), inp, params, spec.method, spec.linear)
    norm = g2_norm_constant(pair, inp, params) if spec.normalize else 1.0
    status = ["ok"] * n
    if spec.oracle:
        for k, t in enumerate(taus):
            ref, _ = quad_g2(pair, t, inp, params, QuadSpec(1e-9, 1e-7), linear=spec.linear)
            if abs(ref - raw[k]) > ORACLE_G2_RTOL * max(abs(ref), norm if spec.normalize
                                                        else abs(ref)):
                status[k] = f"oracle_mismatch: brute force {ref:.10g}"
    return list(raw / norm), list(err / norm), status


def _tasks(spec: SweepSpec):
    """Group point indices that can share one correlation evaluation."""
    pts = spec.points()
    if spec.observable.pair is None or not any(a.name == "tau" for a in spec.axes):
        return [[(i, p)] for i, p in enumerate(pts)]
    groups: dict[tuple, list] = {}
    for i, p in enumerate(pts):
        key = tuple(p[k] for k in AXIS_NAMES if k != "tau")
        groups.setdefault(key, []).append((i, p))
    return list(groups.values())


def _run_task(args):
    spec, task = args
    rows = _evaluate_group(spec, [p for _, p in task])
    return [(i, r) for (i, _), r in zip(task, rows)]


def run_sweep(spec: SweepSpec) -> list[Row]:
    """Evaluate every point; the row order is independent of ``spec.threads``."""
    jobs = [(spec, t) for t in _tasks(spec)]
    if spec.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.threads) as pool:
            results = list(pool.map(_run_task, jobs, chunksize=max(1, len(jobs) // (8 * spec.threads))))
    else:
        results = [_run_task(j) for j in jobs]
    indexed = sorted(itertools.chain.from_iterable(results), key=lambda x: x[0])
    return [r for _, r in indexed]


# --------------------------------------------------------------------------
# output


def format_number(x: float) -> str:
    return format(float(x), ".17g")


def _csv_text(rows: list[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow([format_number(getattr(r, c)) if c in NUMERIC else getattr(r, c)
                         for c in COLUMNS])
    return buf.getvalue()


def _json_number(x: float) -> str:
    return format_number(x) if math.isfinite(x) else "null"


def _jsonl_text(rows: list[Row]) -> str:
    lines = []
    for r in rows:
        parts = [f'"{c}": ' + (_json_number(getattr(r, c)) if c in NUMERIC
                               else json.dumps(getattr(r, c)))
                 for c in COLUMNS]
        lines.append("{" + ", ".join(parts) + "}\n")
    return "".join(lines)


def emit(rows: list[Row], fmt: str = "csv", path="-") -> None:
    """Write rows as CSV (with header) or JSON lines; ``path='-'`` is stdout."""
    if fmt == "csv":
        text = _csv_text(rows)
    elif fmt == "jsonl":
        text = _jsonl_text(rows)
    else:
        raise ValueError(f"unknown format {fmt!r} (csv or jsonl)")
    if str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write sweep output to {path}: {exc}") from exc


def read_rows(path, fmt: str = "csv") -> list[Row]:
    """Parse a file written by :func:`emit`."""
    text = Path(path).read_text(encoding="utf-8")
    rows = []
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(text, newline=""))
        for rec in reader:
            rows.append(Row(**{c: float(rec[c]) if c in NUMERIC else rec[c] for c in COLUMNS}))
    else:
        for line in text.splitlines():
            rec = json.loads(line)
            rows.append(Row(**{c: (math.nan if rec[c] is None else float(rec[c]))
                               if c in NUMERIC else rec[c] for c in COLUMNS}))
    return rows


# --------------------------------------------------------------------------
# configuration


def load_schema() -> dict:
    return json.loads(resources.files("jchom").joinpath("data/sweep.schema.json")
                      .read_text(encoding="utf-8"))


PRESETS = {
    "fig2b": {
        "observable": "transmission",
        "params": {"kappa": 0.1, "xi": 0.01},
        "axes": [{"name": "delta", "start": -6, "stop": 6, "num": 121},
                 {"name": "e0", "start": -14, "stop": 14, "num": 561}],
    },
    "fig3a": {
        "observable": "gamma",
        "params": {"kappa": 0.1, "xi": 0.01},
        "axes": [{"name": "delta", "start": -4, "stop": 4, "num": 201},
                 {"name": "e0", "start": -3, "stop": 3, "num": 201}],
    },
    "fig4d": {
        "observable": "g2_12",
        "params": {"delta": 2.0, "kappa": 0.1, "xi": 0.01, "carrier": "omega1_plus"},
        "axes": [{"name": "dt", "values": [0, 200, 500, 1000]},
                 {"name": "tau", "start": -1500, "stop": 1500, "num": 1201}],
    },
}

_PARAM_KEYS = ("delta", "kappa", "g", "omega_c", "xi", "dt", "e0", "tau", "carrier")
_TOP_KEYS = ("observable", "method", "linear", "normalize", "units", "oracle", "threads")


def preset_config(name: str) -> dict:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return copy.deepcopy(PRESETS[name])


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(config: dict, overrides: list[str]) -> dict:
    """Apply ``key=value`` overrides: parameter names, top-level options, or ``axis.field``."""
    cfg = copy.deepcopy(config)
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        key, value = key.strip(), _parse_value(raw.strip())
        if "." in key:
            axis_name, fld = key.split(".", 1)
            axes = cfg.setdefault("axes", [])
            match = [a for a in axes if a["name"] == axis_name]
            if not match:
                raise ValueError(f"override {item!r}: no axis named {axis_name!r}")
            axis = match[0]
            if fld in ("start", "stop", "num"):
                axis.pop("values", None)
            elif fld == "values":
                for k in ("start", "stop", "num"):
                    axis.pop(k, None)
            axis[fld] = value
        elif key in _PARAM_KEYS:
            cfg.setdefault("params", {})[key] = value
        elif key in _TOP_KEYS:
            cfg[key] = value
        else:
            raise ValueError(f"unknown override key {key!r}")
    return cfg


def spec_from_config(config: dict) -> SweepSpec:
    """Validate a configuration mapping against the schema and build the spec."""
    jsonschema.validate(config, load_schema())
    p = config.get("params", {})
    units = config.get("units", "g")
    g = float(p.get("g", 1.0))
    if units == "g" and g != 1.0:
        raise ValueError("with units 'g' all rates are in units of g; g must be 1 "
                         "(use units 'absolute' for raw angular frequencies)")
    omega_c = float(p.get("omega_c", 0.0))
    delta = float(p.get("delta", 0.0))
    params = JcParams(omega_c=omega_c, omega_q=omega_c - delta, g=g,
                      kappa=float(p.get("kappa", 0.1)))
    axes = []
    for a in config.get("axes", []):
        if "values" in a:
            axes.append(Axis(a["name"], tuple(float(v) for v in a["values"])))
        else:
            axes.append(Axis.linspace(a["name"], a["start"], a["stop"], a["num"]))
    return SweepSpec(
        params=params, xi=float(p.get("xi", 0.1 * params.kappa)), dt=float(p.get("dt", 0.0)),
        e0=float(p.get("e0", 0.0)), tau=float(p.get("tau", 0.0)),
        carrier=Carrier(p.get("carrier", "e0")), axes=tuple(axes),
        observable=Observable(config.get("observable", "gamma")),
        method=CorrMethod(config.get("method", "residue")),
        linear=bool(config.get("linear", False)), normalize=bool(config.get("normalize", True)),
        oracle=bool(config.get("oracle", False)), threads=int(config.get("threads", 1)))
