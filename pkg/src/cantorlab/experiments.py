"""Batch experiments: config schema, named presets, and the N-ladder runner.

A config pins base, digit map, heights, regime, reference law, grid
parameters, and seed; running it produces one CSV row per height with
the fixed column schema

    N, L, h_star, T_star, regime, bridge, tau1, tau2, qf, g, total,
    dk_lo, dk_hi, w1, dstar, predicted_rate

Identical config and seed give byte-identical CSV output.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .empirical import (Interval, PointMassCDF, UniformCDF, empirical_cdf,
                        kolmogorov, star_discrepancy, value_vector,
                        wasserstein1)
from .errors import ConfigError, UnknownPreset
from .limitlaw import cf_truncated, limit_cdf_conv
from .mixed_radix import CantorBase, build_base, length
from .qadditive import DigitMap
from .window_bounds import optimize_window, predicted_rate, resolve_regime

CSV_COLUMNS = ("N", "L", "h_star", "T_star", "regime", "bridge", "tau1", "tau2",
               "qf", "g", "total", "dk_lo", "dk_hi", "w1", "dstar",
               "predicted_rate")

PRESET_NAMES = ("vdc-q2", "vdc-cantor-factorial", "regimeB-binary",
                "regimeC-ternary", "regimeA-skewed", "example-I", "example-II",
                "qadic-delange", "zero-map")

_REFERENCE_KINDS = ("grid", "uniform", "point")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run."""

    name: str
    base: dict
    map: dict
    reference: dict
    ns: Optional[tuple[int, ...]] = None
    ladder: Optional[dict] = None
    regime: str = "auto"
    rho_inf: Optional[float] = None
    grid: Optional[dict] = None
    seed: int = 0
    out: Optional[str] = None
    trace_out: Optional[str] = None
    rate_family: Optional[dict] = None

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["ns"] is not None:
            d["ns"] = list(d["ns"])
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        return _validate_config(d)

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("<root>", f"not valid JSON: {e}") from e
        return _validate_config(d)

    # -- resolution ---------------------------------------------------------

    def heights(self) -> list[int]:
        if self.ns is not None:
            return list(self.ns)
        lad = self.ladder
        out, n = [], lad["start"]
        while n <= lad["stop"]:
            out.append(n)
            n *= lad["factor"]
        return out


def _cfg_err(path: str, msg: str):
    raise ConfigError(path, msg)


def _validate_config(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        _cfg_err("<root>", f"config must be an object, got {type(d).__name__}")
    allowed = {"name", "base", "map", "reference", "ns", "ladder", "regime",
               "rho_inf", "grid", "seed", "out", "trace_out", "rate_family"}
    for k in d:
        if k not in allowed:
            _cfg_err(k, "unknown config field")
    name = d.get("name", "experiment")
    if not isinstance(name, str) or not name:
        _cfg_err("name", "must be a nonempty string")
    for req in ("base", "map", "reference"):
        if not isinstance(d.get(req), dict):
            _cfg_err(req, "required object field")
    try:
        build_base(d["base"])
    except Exception as e:
        _cfg_err("base", str(e))
    try:
        DigitMap(d["map"])
    except Exception as e:
        _cfg_err("map", str(e))

    ref = d["reference"]
    kind = ref.get("kind")
    if kind not in _REFERENCE_KINDS:
        _cfg_err("reference.kind", f"must be one of {_REFERENCE_KINDS}, got {kind!r}")
    if kind == "uniform":
        lo, hi = ref.get("lo"), ref.get("hi")
        if not (isinstance(lo, (int, float)) and isinstance(hi, (int, float)) and hi > lo):
            _cfg_err("reference", f"uniform needs numbers hi > lo, got lo={lo!r}, hi={hi!r}")
    if kind == "point" and not isinstance(ref.get("c"), (int, float)):
        _cfg_err("reference.c", "point reference needs a numeric center")

    ns = d.get("ns")
    ladder = d.get("ladder")
    if (ns is None) == (ladder is None):
        _cfg_err("ns", "exactly one of 'ns' and 'ladder' must be given")
    if ns is not None:
        if not (isinstance(ns, list) and ns and all(isinstance(n, int) and n >= 2 for n in ns)):
            _cfg_err("ns", "must be a nonempty list of integers >= 2")
        ns = tuple(ns)
    if ladder is not None:
        for k in ("start", "stop", "factor"):
            v = ladder.get(k)
            if not isinstance(v, int) or v < (2 if k != "stop" else ladder.get("start", 2)):
                _cfg_err(f"ladder.{k}", f"must be an integer >= 2 (and stop >= start), got {v!r}")

    regime = d.get("regime", "auto")
    if regime not in ("auto", "A", "B", "C"):
        _cfg_err("regime", f"must be auto, A, B or C, got {regime!r}")
    rho_inf = d.get("rho_inf")
    if rho_inf is not None and not (isinstance(rho_inf, (int, float)) and rho_inf > 0):
        _cfg_err("rho_inf", f"must be a positive number, got {rho_inf!r}")

    grid = d.get("grid")
    if kind == "grid":
        if not isinstance(grid, dict):
            _cfg_err("grid", "required when reference.kind is 'grid'")
        for k in ("x0", "x1", "w"):
            if not isinstance(grid.get(k), (int, float)):
                _cfg_err(f"grid.{k}", "must be a number")
        if not grid["x1"] > grid["x0"]:
            _cfg_err("grid.x1", "must exceed grid.x0")
        if not grid["w"] > 0:
            _cfg_err("grid.w", "must be positive")
        depth = grid.get("depth")
        if depth is not None and (not isinstance(depth, int) or depth < 1):
            _cfg_err("grid.depth", f"must be a positive integer or null, got {depth!r}")

    seed = d.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        _cfg_err("seed", f"must be a nonnegative integer, got {seed!r}")
    for k in ("out", "trace_out"):
        if d.get(k) is not None and not isinstance(d[k], str):
            _cfg_err(k, "must be a path string or null")

    rate = d.get("rate_family")
    if rate is not None:
        fam = rate.get("family")
        if fam == "example-I":
            if not (isinstance(rate.get("alpha"), (int, float)) and rate["alpha"] > 1):
                _cfg_err("rate_family.alpha", "example-I needs alpha > 1")
        elif fam == "example-II":
            beta = rate.get("beta")
            if not (isinstance(beta, (int, float)) and 0 < beta < 1):
                _cfg_err("rate_family.beta", "example-II needs 0 < beta < 1")
        else:
            _cfg_err("rate_family.family", f"must be example-I or example-II, got {fam!r}")
        q = rate.get("q", 2)
        if not isinstance(q, int) or q < 2:
            _cfg_err("rate_family.q", f"must be an integer >= 2, got {q!r}")

    return ExperimentConfig(
        name=name, base=dict(d["base"]), map=dict(d["map"]),
        reference=dict(ref), ns=ns,
        ladder=dict(ladder) if ladder is not None else None,
        regime=regime,
        rho_inf=float(rho_inf) if rho_inf is not None else None,
        grid=dict(grid) if grid is not None else None,
        seed=seed, out=d.get("out"), trace_out=d.get("trace_out"),
        rate_family=dict(rate) if rate is not None else None)


# -- presets -------------------------------------------------------------------


def preset(name: str) -> ExperimentConfig:
    """A fully specified, ready-to-run configuration by name."""
    if name == "vdc-q2":
        d = {"name": name,
             "base": {"kind": "constant", "q": 2},
             "map": {"family": "radical-inverse"},
             "reference": {"kind": "uniform", "lo": 0.0, "hi": 1.0},
             "ladder": {"start": 16, "stop": 65536, "factor": 2},
             "regime": "B", "rho_inf": 1.0}
    elif name == "vdc-cantor-factorial":
        d = {"name": name,
             "base": {"kind": "affine", "c": 1, "d": 2},
             "map": {"family": "radical-inverse"},
             "reference": {"kind": "uniform", "lo": 0.0, "hi": 1.0},
             "ladder": {"start": 16, "stop": 65536, "factor": 2},
             "regime": "B", "rho_inf": 1.0}
    elif name == "regimeB-binary":
        d = {"name": name,
             "base": {"kind": "constant", "q": 2},
             "map": {"family": "radical-inverse"},
             "reference": {"kind": "grid"},
             "grid": {"x0": 0.0, "x1": 1.0, "w": 2.0 ** -20, "depth": None},
             "ladder": {"start": 256, "stop": 1048576, "factor": 4},
             "regime": "B", "rho_inf": 1.0}
    elif name == "regimeC-ternary":
        d = {"name": name,
             "base": {"kind": "constant", "q": 3},
             "map": {"family": "symmetric-ternary"},
             "reference": {"kind": "grid"},
             "grid": {"x0": -1.625, "x1": 1.625, "w": 2.0 ** -20, "depth": None},
             "ladder": {"start": 256, "stop": 1048576, "factor": 4},
             "regime": "auto"}
    elif name == "regimeA-skewed":
        d = {"name": name,
             "base": {"kind": "constant", "q": 4},
             "map": {"family": "skewed-polyweight"},
             "reference": {"kind": "grid"},
             "grid": {"x0": 0.0, "x1": 5.5, "w": 2.0 ** -16, "depth": None},
             "ladder": {"start": 256, "stop": 1048576, "factor": 4},
             "regime": "auto"}
    elif name == "example-I":
        d = {"name": name,
             "base": {"kind": "constant", "q": 2},
             "map": {"family": "polynomial", "alpha": 1.5, "g": [0.0, 1.0]},
             "reference": {"kind": "grid"},
             "grid": {"x0": 0.0, "x1": 3.75, "w": 2.0 ** -14, "depth": None},
             "ladder": {"start": 256, "stop": 1048576, "factor": 4},
             "regime": "A",
             "rate_family": {"family": "example-I", "alpha": 1.5, "q": 2}}
    elif name == "example-II":
        d = {"name": name,
             "base": {"kind": "constant", "q": 2},
             "map": {"family": "geometric", "beta": 0.5, "g": [0.0, 1.0]},
             "reference": {"kind": "grid"},
             "grid": {"x0": 0.0, "x1": 2.0, "w": 2.0 ** -21, "depth": None},
             "ladder": {"start": 256, "stop": 1048576, "factor": 2},
             "regime": "A",
             "rate_family": {"family": "example-II", "beta": 0.5, "q": 2}}
    elif name == "qadic-delange":
        d = {"name": name,
             "base": {"kind": "constant", "q": 5},
             "map": {"family": "radical-inverse"},
             "reference": {"kind": "uniform", "lo": 0.0, "hi": 1.0},
             "ladder": {"start": 25, "stop": 390625, "factor": 5},
             "regime": "B", "rho_inf": 1.0,
             "trace_out": "qadic-delange-cf.csv"}
    elif name == "zero-map":
        d = {"name": name,
             "base": {"kind": "constant", "q": 2},
             "map": {"family": "geometric", "beta": 0.5, "g": [0.0, 0.0]},
             "reference": {"kind": "point", "c": 0.0},
             "ladder": {"start": 16, "stop": 4096, "factor": 4},
             "regime": "B", "rho_inf": 1.0}
    else:
        raise UnknownPreset(f"no preset named {name!r}; known: {', '.join(PRESET_NAMES)}")
    return _validate_config(d)


# -- running --------------------------------------------------------------------


def build_reference(config: ExperimentConfig, dmap: DigitMap, base: CantorBase):
    kind = config.reference["kind"]
    if kind == "uniform":
        return UniformCDF(config.reference["lo"], config.reference["hi"])
    if kind == "point":
        return PointMassCDF(config.reference["c"])
    g = config.grid
    return limit_cdf_conv(dmap, base, g["x0"], g["x1"], g["w"], depth=g.get("depth"))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _one_row(dmap, base, ref, regime, rho_inf, rate, n) -> dict:
    h_star, t_star, report = optimize_window(dmap, base, n, regime,
                                             rho_inf=rho_inf, ref=ref)
    ecdf = empirical_cdf(dmap, base, n)
    dk = kolmogorov(ecdf, ref)
    if isinstance(dk, Interval):
        dk_lo, dk_hi = dk.lo, dk.hi
    else:
        dk_lo = dk_hi = dk
    w1 = wasserstein1(ecdf, ref)
    dstar = None
    if dmap.family == "radical-inverse":
        dstar = star_discrepancy(value_vector(dmap, base, n))
    pred = None
    if rate is not None:
        pred = predicted_rate(rate["family"], n, alpha=rate.get("alpha"),
                              beta=rate.get("beta"), q=rate.get("q", 2))
    return {"N": n, "L": report.L, "h_star": h_star, "T_star": t_star,
            "regime": report.regime, "bridge": report.bridge,
            "tau1": report.tau1, "tau2": report.tau2_h, "qf": report.qf_term,
            "g": report.g_term, "total": report.total, "dk_lo": dk_lo,
            "dk_hi": dk_hi, "w1": w1, "dstar": dstar, "predicted_rate": pred,
            "conditional": report.conditional}


def rows_to_csv(rows: list[dict]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def write_cf_trace(dmap: DigitMap, base: CantorBase, path: str,
                   t_lo: float = -10.0, t_hi: float = 10.0, n_t: int = 201) -> None:
    """CSV trace of the truncated per-digit product on an even t grid."""
    ts = np.linspace(t_lo, t_hi, n_t)
    phi, err, depth = cf_truncated(dmap, base, ts)
    lines = ["t,re_phi,im_phi,abs_phi,truncation_bound,depth"]
    for t, p in zip(ts, phi):
        lines.append(f"{float(t)!r},{float(p.real)!r},{float(p.imag)!r},"
                     f"{float(abs(p))!r},{float(err)!r},{depth}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def run_experiment(config: ExperimentConfig, threads: int = 1) -> list[dict]:
    """All ladder rows, ordered by height; writes CSV/trace when configured.

    The returned rows carry a trailing 'conditional' flag (not a CSV
    column) so callers can distinguish certified from conditional output.
    """
    dmap = DigitMap(config.map)
    base = build_base(config.base)
    heights = config.heights()
    ref = build_reference(config, dmap, base)
    regime = config.regime
    if regime == "auto":
        regime = resolve_regime(dmap, base, length(base, max(heights)), config.rho_inf)

    rate = config.rate_family
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [pool.submit(_one_row, dmap, base, ref, regime,
                                config.rho_inf, rate, n) for n in heights]
            rows = [f.result() for f in futs]
    else:
        rows = [_one_row(dmap, base, ref, regime, config.rho_inf, rate, n)
                for n in heights]

    if config.out:
        with open(config.out, "w") as fh:
            fh.write(rows_to_csv(rows))
    if config.trace_out:
        write_cf_trace(dmap, base, config.trace_out)
    return rows
