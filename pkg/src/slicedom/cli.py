"""Command-line front end: verification sweeps and reproduction experiments.

Every command resolves a :class:`JobConfig` (built-in defaults, then an
optional JSON file, then flags), runs, and writes a JSON report or a CSV
table. Exit codes: 0 success, 2 invariant violation, 3 configuration error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import counterexample as cx
from . import slice_topology as st
from .continuation import (
    HolomorphicGerm,
    continue_npart,
    log_germ,
    reciprocal_germ,
)
from .errors import (
    BrokenJunction,
    HorizonExceeded,
    LengthMismatch,
    NotAUnit,
    NotFullSliceRank,
    OnCut,
    ShapeMismatch,
    Singular,
    SingularityHit,
    SizeCap,
    TruncationBudgetExceeded,
)
from .formulas import (
    SlicePolynomial,
    SliceValueVector,
    classical_repr,
    cr_residual,
    extend_two_slices,
    extension_function,
    represent,
    represent_condition,
)
from .paths import Arc, NPartPath, PlanarPath, Segment
from .quaternion import (
    ImaginaryUnit,
    Quaternion,
    dist_to_slice,
    embed,
    random_units,
    sample_sphere,
    unit_from_json,
    unit_to_json,
)
from .slice_calculus import MAX_N, UnitMatrix, full_slice_rank, random_full_rank, verify_conjugation, verify_intertwine

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4

INVARIANT_ERRORS = (NotAUnit, NotFullSliceRank, BrokenJunction, ShapeMismatch, LengthMismatch)
NUMERIC_ERRORS = (SingularityHit, TruncationBudgetExceeded, Singular, HorizonExceeded, OnCut)

CR_STEPS = [1e-2 * 2.0 ** -k for k in range(7)]


class ConfigError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    seed: int = 0
    tol: float | None = None
    format: str = "json"
    out: str | None = None
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> JobConfig:
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "command" not in obj:
            raise ConfigError("config needs a 'command'")
        return cls(**obj)


@dataclass
class Outcome:
    report: dict
    passed: bool
    rows: list = field(default_factory=list)
    header: list = field(default_factory=list)

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()


def _q(q: Quaternion) -> list[float]:
    return q.to_json()


def _qcols(q: Quaternion) -> list[float]:
    return [float(v) for v in q.array]


# --- verify-intertwine -----------------------------------------------------


def run_verify_intertwine(cfg: JobConfig) -> Outcome:
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    rows, per_n = [], {}
    for N in range(p["n_min"], p["n_max"] + 1):
        worst = 0.0
        for s in range(p["samples"]):
            v = rng.standard_normal((N, 3))
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            if p["perturb"] and N == p["n_min"] and s == 0:
                # injected fault: a real part breaks purity of the first unit
                units = [ImaginaryUnit(p["perturb"], *v[0])]
            else:
                units = [ImaginaryUnit.from_vector(row) for row in v]
            res = verify_intertwine(units)
            worst = max(worst, res)
            rows.append([N, s, res])
        per_n[str(N)] = worst
    worst = max(per_n.values())
    passed = worst <= cfg.tol
    report = {"max_residual": worst, "max_residual_by_N": per_n, "passed": passed}
    return Outcome(report, passed, rows, ["N", "sample", "residual"])


# --- verify-conjugation ----------------------------------------------------


def run_verify_conjugation(cfg: JobConfig) -> Outcome:
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    rows, per_n = [], {}
    for N in range(p["n_min"], p["n_max"] + 1):
        worst = 0.0
        for s in range(p["samples"]):
            J = random_full_rank(rng, N)
            res = verify_conjugation(J)
            margin = min(full_slice_rank(J).margins)
            worst = max(worst, res)
            rows.append([N, s, res, margin])
        per_n[str(N)] = worst
    worst = max(per_n.values())
    passed = worst <= cfg.tol
    report = {"max_residual": worst, "max_residual_by_N": per_n, "passed": passed}
    return Outcome(report, passed, rows, ["N", "sample", "residual", "min_log10_det_margin"])


# --- repr-eval -------------------------------------------------------------


def run_repr_eval(cfg: JobConfig) -> Outcome:
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    N = p["N"]
    J = UnitMatrix.from_json(p["unit_matrix"]) if p["unit_matrix"] else random_full_rank(rng, N)
    N = J.N
    poly = SlicePolynomial.from_json(p["polynomial"]) if p["polynomial"] else SlicePolynomial.random(rng, p["degree"])
    end = complex(*p["endpoint"])
    F = SliceValueVector(N, tuple(poly(embed(end, row[-1])) for row in J.rows))
    Ks = [("row", row) for row in J.rows]
    Ks += [("random", tuple(random_units(rng, N))) for _ in range(p["k_samples"])]

    rows, err_rand, err_row, err_classical = [], 0.0, 0.0, 0.0
    for k, (source, K) in enumerate(Ks):
        val = represent(K, J, F)
        ref = poly(embed(end, K[-1]))
        err = (val - ref).norm()
        classical = math.nan
        if N == 1:
            c = classical_repr(K[0], J.rows[0][0], J.rows[1][0], F.values[0], F.values[1])
            classical = (val - c).norm()
            err_classical = max(err_classical, classical)
        if source == "row":
            err_row = max(err_row, err)
        else:
            err_rand = max(err_rand, err)
        rows.append([k, source, json.dumps([unit_to_json(u) for u in K])] + _qcols(val) + _qcols(ref) + [err, classical])
    passed = err_rand <= cfg.tol and err_row <= p["row_tol"] and err_classical <= p["classical_tol"]
    report = {
        "N": N,
        "unit_matrix": J.to_json(),
        "polynomial": poly.to_json(),
        "condition_number": represent_condition(J),
        "max_error_random": err_rand,
        "max_error_rows": err_row,
        "max_classical_difference": err_classical if N == 1 else None,
        "passed": passed,
    }
    header = ["index", "source", "K"]
    header += [f"formula_{c}" for c in "wxyz"] + [f"oracle_{c}" for c in "wxyz"] + ["abs_error", "classical_diff"]
    return Outcome(report, passed, rows, header)


# --- extend ----------------------------------------------------------------


def _unit_or_random(value, rng) -> ImaginaryUnit:
    return unit_from_json(value) if value is not None else random_units(rng, 1)[0]


def run_extend(cfg: JobConfig) -> Outcome:
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    I1, I2, J = (_unit_or_random(p[k], rng) for k in ("I1", "I2", "J"))
    poly = SlicePolynomial.from_json(p["polynomial"]) if p["polynomial"] else SlicePolynomial.random(rng, p["degree"])
    z = complex(*p["point"])
    if z.imag < 0:
        raise ConfigError("the extension point needs y >= 0")
    f1 = lambda w: poly(embed(w, I1))  # noqa: E731
    f2 = lambda w: poly(embed(w, I2))  # noqa: E731
    value = extend_two_slices(f1(z), f2(z), I1, I2, J)
    oracle = poly(embed(z, J))
    err = (value - oracle).norm()
    reproduce = (extend_two_slices(f1(z), f2(z), I1, I2, I1) - f1(z)).norm()
    F = extension_function(f1, f2, I1, I2, J)
    res = [cr_residual(F, J, z, h) for h in p["steps"]]
    ratios = [a / b if b > 0 else math.inf for a, b in zip(res, res[1:])]
    lo, hi = p["ratio_band"]
    ratio_ok = all(lo <= r <= hi for r in ratios)
    passed = err <= cfg.tol and reproduce == 0.0 and ratio_ok
    report = {
        "units": {"I1": unit_to_json(I1), "I2": unit_to_json(I2), "J": unit_to_json(J)},
        "polynomial": poly.to_json(),
        "value": _q(value),
        "oracle": _q(oracle),
        "abs_error": err,
        "reproduce_I1_error": reproduce,
        "cr_residuals": res,
        "cr_ratios": ratios,
        "ratio_band_ok": ratio_ok,
        "passed": passed,
    }
    rows = [[h, r, ratios[k - 1] if k else math.nan] for k, (h, r) in enumerate(zip(p["steps"], res))]
    return Outcome(report, passed, rows, ["h", "cr_residual", "ratio_to_previous"])


# --- continue-path ---------------------------------------------------------


def default_npart(N: int, end: complex) -> NPartPath:
    """Upper semicircles hopping between real points, then a segment to ``end``."""
    parts, x = [], 0.5
    for _ in range(N - 1):
        parts.append(PlanarPath.of(Arc(complex(x - 0.5), 0.5, 0.0, math.pi)))
        x -= 1.0
    parts.append(PlanarPath.of(Segment(complex(x), end)))
    return NPartPath(tuple(parts))


def _log_oracle(start_value: Quaternion, g: NPartPath, units, branch: float, samples: int = 20001) -> Quaternion:
    # closed-form tracking: sum of per-part log increments, each in its own slice
    acc = start_value
    for part, u in zip(g.parts, units):
        w = part.sample(samples) - branch
        dlog = math.log(abs(w[-1]) / abs(w[0])) + 1j * float(np.sum(np.angle(w[1:] / w[:-1])))
        acc = acc + embed(dlog, u)
    return acc


def run_continue_path(cfg: JobConfig) -> Outcome:
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    germ_cfg = dict(p["germ"])
    kind = germ_cfg.get("kind", "polynomial")
    g = NPartPath.from_json(p["path"]) if p["path"] else default_npart(p["N"], complex(*p["endpoint"]))
    units = [unit_from_json(u) for u in p["units"]] if p["units"] else random_units(rng, g.N)
    center = g.start.real
    if kind == "polynomial":
        poly = (
            SlicePolynomial.from_json(germ_cfg["polynomial"])
            if "polynomial" in germ_cfg
            else SlicePolynomial.random(rng, int(germ_cfg.get("degree", 4)))
        )
        germ = HolomorphicGerm.polynomial(poly, center)
        oracle = poly(embed(g.end, units[-1]))
    elif kind == "log":
        b = float(germ_cfg.get("branch_point", 0.0))
        germ = log_germ(center, b)
        oracle = _log_oracle(germ.value, g, units, b)
    elif kind == "reciprocal":
        pole = float(germ_cfg.get("pole", 0.0))
        germ = reciprocal_germ(center, pole)
        oracle = embed(1.0 / (g.end - pole), units[-1])
    else:
        raise ConfigError(f"unknown germ kind {kind!r}")
    value = continue_npart(germ, g, units)
    err = (value - oracle).norm()
    passed = err <= cfg.tol
    report = {
        "germ": kind,
        "path": g.to_json(),
        "units": [unit_to_json(u) for u in units],
        "value": _q(value),
        "oracle": _q(oracle),
        "abs_error": err,
        "passed": passed,
    }
    rows = [[g.N] + _qcols(value) + _qcols(oracle) + [err]]
    header = ["N"] + [f"value_{c}" for c in "wxyz"] + [f"oracle_{c}" for c in "wxyz"] + ["abs_error"]
    return Outcome(report, passed, rows, header)


# --- counterexample --------------------------------------------------------


def run_counterexample(cfg: JobConfig) -> Outcome:
    try:
        ccfg = cx.CounterexampleConfig.from_json(cfg.params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    rep = cx.counterexample_report(ccfg)
    gap = rep.monodromy_abs
    obstruction = rep.coverage_complete and abs(gap - 2.0 * math.pi) <= cfg.tol
    out = rep.to_json()
    out["obstruction"] = obstruction
    out["status"] = "obstruction certified" if obstruction else "no obstruction"
    buf = rep.sweep_csv().splitlines()
    header = buf[0].split(",")
    rows = [line.split(",") for line in buf[1:]]
    return Outcome(out, obstruction, rows, header)


# --- topology --------------------------------------------------------------


def _units_for(p) -> list[ImaginaryUnit]:
    return sample_sphere(p["n_units"], p["scheme"], p["unit_seed"])


def run_topology(cfg: JobConfig) -> Outcome:
    p = cfg.params
    base = unit_from_json(p["unit"])
    example = p["example"]
    units = _units_for(p)
    if example == "ellipse":
        S = st.ellipse_union(base)
        slices = [base] + units
        opening = st.is_slice_open_sampled(S, slices, p["points_per_slice"])
        probes = st.approach_units(base) + units
        escapes = [st.euclidean_ball_escape(S, 0.0, 2.0 ** -k, probes) for k in range(1, p["k_max"] + 1)]
        passed = opening.passed and all(e.escaped for e in escapes)
        report = {
            "example": "ellipse",
            "slice_open": opening.to_json(),
            "ball_escapes": [e.to_json() for e in escapes],
            "passed": passed,
        }
        rows = [
            [u.x, u.y, u.z, dist_to_slice(u, base), c]
            for u, c in zip(opening.units, opening.min_clearance)
        ]
        return Outcome(report, passed, rows, ["jx", "jy", "jz", "dist_to_slice", "min_clearance"])
    if example == "ball":
        S = st.ball(base, 0.5)
        slices = [base] + units
        comps = st.slice_components(S, slices, p["grid"], (-2.0, 2.0, -2.0, 2.0))
        realc = st.is_real_connected(S)
        avoid = comps.pieces_avoid_real
        passed = comps.counts[0] == 1 and all(avoid) and not realc.intervals
        report = {
            "example": "ball",
            "components": comps.to_json(),
            "real_trace": realc.to_json(),
            "pieces_avoid_real": all(avoid),
            "slices_with_pieces": int(sum(1 for n in comps.counts if n > 0)),
            "passed": passed,
        }
        rows = [[u.x, u.y, u.z, dist_to_slice(u, base), n, int(not any(f))] for u, n, f in zip(comps.units, comps.counts, comps.meets_real)]
        return Outcome(report, passed, rows, ["jx", "jy", "jz", "dist_to_slice", "components", "avoids_real"])
    if example == "custom":
        if not p["file"]:
            raise ConfigError("topology custom needs --file")
        try:
            S = st.slice_set_from_json(json.loads(Path(p["file"]).read_text()))
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot read slice set from {p['file']}: {exc}") from exc
        opening = st.is_slice_open_sampled(S, units, p["points_per_slice"])
        realc = st.is_real_connected(S)
        C1 = st.axially_symmetric_completion(S, units)
        C2 = st.axially_symmetric_completion(C1, units)
        rng = np.random.default_rng(cfg.seed)
        qs = [Quaternion.from_array(v) for v in rng.uniform(-3.0, 3.0, size=(p["completion_samples"], 4))]
        mismatch = [q.to_json() for q in qs if C1.contains(q) != C2.contains(q)]
        consistent = st.real_trace_consistent(S, units, np.linspace(-5.0, 5.0, 201))
        passed = not mismatch and consistent
        report = {
            "example": "custom",
            "slice_open": opening.to_json(),
            "real_trace": realc.to_json(),
            "completion_idempotent": not mismatch,
            "completion_mismatches": mismatch,
            "real_trace_consistent": consistent,
            "passed": passed,
        }
        rows = [[u.x, u.y, u.z, c] for u, c in zip(opening.units, opening.min_clearance)]
        return Outcome(report, passed, rows, ["jx", "jy", "jz", "min_clearance"])
    raise ConfigError(f"unknown topology example {example!r}")


# --- command table ---------------------------------------------------------


@dataclass(frozen=True)
class Param:
    name: str
    default: object
    help: str
    type: object = None
    nargs: object = None
    flag: bool = True


COMMANDS: dict = {
    "verify-intertwine": (
        run_verify_intertwine,
        1e-12,
        "max |K_N zeta(K) - zeta(K) sigma_N| over random unit tuples",
        [
            Param("n_min", 1, "smallest N", int),
            Param("n_max", 6, f"largest N (at most {MAX_N})", int),
            Param("samples", 200, "random unit tuples per N", int),
            Param("perturb", 0.0, "fault injection: real part added to the first unit", float),
        ],
    ),
    "verify-conjugation": (
        run_verify_conjugation,
        1e-10,
        "max-norm of sigma_N M(J)^-1 - M(J)^-1 D_N(J) over random full slice-rank J",
        [
            Param("n_min", 1, "smallest N", int),
            Param("n_max", 5, f"largest N (at most {MAX_N})", int),
            Param("samples", 50, "random unit matrices per N", int),
        ],
    ),
    "repr-eval": (
        run_repr_eval,
        1e-9,
        "representation formula against a polynomial oracle over a K sweep",
        [
            Param("N", 2, "number of slices in the unit tuples", int),
            Param("degree", 6, "degree of the random polynomial oracle", int),
            Param("k_samples", 100, "random unit tuples K", int),
            Param("endpoint", [0.3, 0.7], "path endpoint x y in slice coordinates", float, 2),
            Param("row_tol", 1e-10, "tolerance at K = rows of J", float),
            Param("classical_tol", 1e-12, "tolerance against the classical formula at N = 1", float),
            Param("unit_matrix", None, "unit matrix JSON (config file only)", flag=False),
            Param("polynomial", None, "polynomial JSON (config file only)", flag=False),
        ],
    ),
    "extend": (
        run_extend,
        1e-10,
        "two-slice extension against a polynomial oracle, with the Cauchy-Riemann residual",
        [
            Param("degree", 6, "degree of the random polynomial oracle", int),
            Param("point", [0.4, 0.6], "point x y with y >= 0", float, 2),
            Param("steps", CR_STEPS, "finite-difference steps h", float, "+"),
            Param("ratio_band", [3.5, 4.5], "accepted residual ratio per halving of h", float, 2),
            Param("I1", None, "first data unit (config file only)", flag=False),
            Param("I2", None, "second data unit (config file only)", flag=False),
            Param("J", None, "target unit (config file only)", flag=False),
            Param("polynomial", None, "polynomial JSON (config file only)", flag=False),
        ],
    ),
    "continue-path": (
        run_continue_path,
        1e-10,
        "disk-chain continuation along a lifted N-part path",
        [
            Param("N", 2, "parts of the default path", int),
            Param("endpoint", [0.2, 0.6], "endpoint x y of the default path", float, 2),
            Param("germ", {"kind": "polynomial", "degree": 4}, "germ JSON: polynomial, log or reciprocal", json.loads),
            Param("path", None, "N-part path JSON (config file only)", flag=False),
            Param("units", None, "one unit per part (config file only)", flag=False),
        ],
    ),
    "counterexample": (
        run_counterexample,
        1e-4,
        "witness coverage of the probe circle and monodromy of the log germ around it",
        [
            Param("n_circle", 256, "sampled probe circle points", int),
            Param("n_units", 512, "sampled units in the witness search", int),
            Param("scheme", "fibonacci", "unit sampling scheme: fibonacci, grid or random", str),
            Param("probe_center", [0.0, 2.0], "probe circle center x y", float, 2),
            Param("probe_radius", 1.0, "probe circle radius", float),
            Param("cut_clearance", cx.CUT_CLEARANCE, "minimum distance from a cut", float),
            Param("openness_units", 32, "slices sampled for the openness check", int),
            Param("unit", [1.0, 0.0, 0.0], "base unit (config file only)", flag=False),
            Param("arc_points", cx.ARC_POINTS, "polyline vertices on each cut arc", int),
            Param("openness_grid", 16, "grid points per axis in the openness check", int),
            Param("openness_box", [-4.0, 3.0, -4.0, 5.0], "openness sampling box (config file only)", flag=False),
        ],
    ),
    "topology": (
        run_topology,
        None,
        "slice topology examples: ellipse, ball, or a custom slice set file",
        [
            Param("example", "ellipse", "ellipse, ball or custom", str),
            Param("file", None, "slice set JSON for the custom example", str),
            Param("n_units", st.DEFAULT_UNITS, "sampled units", int),
            Param("scheme", "fibonacci", "unit sampling scheme", str),
            Param("unit_seed", 0, "seed for the random unit scheme", int),
            Param("grid", st.DEFAULT_GRID, "pixel grid per slice for component counts", int),
            Param("points_per_slice", 256, "sample points per slice for openness", int),
            Param("k_max", 20, "ball radii 2^-k for k = 1..k_max", int),
            Param("completion_samples", 200, "random points for the completion idempotence check", int),
            Param("unit", [1.0, 0.0, 0.0], "base unit (config file only)", flag=False),
        ],
    ),
}

# the counterexample seed only matters for the random scheme
_SEEDED_PARAMS = {"counterexample": "seed"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slicedom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, tol, desc, params) in COMMANDS.items():
        sp = sub.add_parser(name, help=desc, description=desc)
        sp.add_argument("--config", help="JSON job config; flags override its fields")
        sp.add_argument("--seed", type=int, help="random seed (default: 0)")
        sp.add_argument("--tol", type=float, help=f"pass tolerance (default: {tol})")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=["json", "csv"], help="report format (default: json)")
        for prm in params:
            if not prm.flag:
                continue
            kw = {"dest": prm.name, "help": f"{prm.help} (default: {prm.default})"}
            if prm.type is not None:
                kw["type"] = prm.type
            if prm.nargs is not None:
                kw["nargs"] = prm.nargs
            sp.add_argument("--" + prm.name.replace("_", "-"), **kw)
    return parser


def resolve_config(args: argparse.Namespace) -> JobConfig:
    name = args.command
    _, tol, _, params = COMMANDS[name]
    defaults = {prm.name: prm.default for prm in params}
    cfg = JobConfig(command=name, tol=tol, params=dict(defaults))
    if args.config:
        try:
            obj = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        filecfg = JobConfig.from_json({"command": name, **obj})
        if filecfg.command != name:
            raise ConfigError(f"config is for {filecfg.command!r}, not {name!r}")
        unknown = set(filecfg.params) - set(defaults) - set(_SEEDED_PARAMS.values())
        if unknown:
            raise ConfigError(f"unknown {name} params: {sorted(unknown)}")
        cfg.seed = filecfg.seed
        cfg.tol = filecfg.tol if filecfg.tol is not None else tol
        cfg.format = filecfg.format
        cfg.out = filecfg.out
        cfg.params.update(filecfg.params)
    for key in ("seed", "tol", "format", "out"):
        v = getattr(args, key)
        if v is not None:
            setattr(cfg, key, v)
    for prm in params:
        v = getattr(args, prm.name, None) if prm.flag else None
        if v is not None:
            cfg.params[prm.name] = v
    if name in _SEEDED_PARAMS:
        cfg.params[_SEEDED_PARAMS[name]] = cfg.seed
    validate(cfg)
    return cfg


def validate(cfg: JobConfig) -> None:
    p = cfg.params
    if cfg.format not in ("json", "csv"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    if cfg.tol is not None and not cfg.tol > 0:
        raise ConfigError("tolerance must be positive")
    if "n_max" in p:
        if not 1 <= p["n_min"] <= p["n_max"]:
            raise ConfigError("need 1 <= n_min <= n_max")
        if p["n_max"] > MAX_N:
            raise ConfigError(f"n_max={p['n_max']} exceeds the cap {MAX_N}")
    if "N" in p and not 1 <= int(p["N"]) <= MAX_N:
        raise ConfigError(f"N must lie in 1..{MAX_N}")
    for key in ("samples", "k_samples", "n_circle", "n_units", "grid", "points_per_slice"):
        if key in p and int(p[key]) < 1:
            raise ConfigError(f"{key} must be positive")
    if cfg.command == "topology" and p["example"] not in ("ellipse", "ball", "custom"):
        raise ConfigError(f"unknown topology example {p['example']!r}")
    if cfg.command == "topology" and p["example"] == "custom" and not p["file"]:
        raise ConfigError("topology custom needs --file")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    runner = COMMANDS[cfg.command][0]
    error = None
    try:
        outcome = runner(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except INVARIANT_ERRORS as exc:
        error, code = exc, EXIT_INVARIANT
    except (NUMERIC_ERRORS + (SizeCap,)) as exc:
        error, code = exc, EXIT_NUMERIC
    if error is not None:
        info = {"type": type(error).__name__, "message": str(error)}
        if isinstance(error, NotAUnit):
            info["invariant"] = error.invariant
        if isinstance(error, NotFullSliceRank):
            info["level"] = error.level
        label = info.get("invariant", info["type"])
        print(f"{'invariant violation' if code == EXIT_INVARIANT else 'numerical failure'} [{label}]: {error}", file=sys.stderr)
        _emit(_dump({"config": cfg.to_json(), "error": info}), cfg.out)
        return code

    if cfg.format == "csv":
        _emit(outcome.csv(), cfg.out)
    else:
        _emit(_dump({"config": cfg.to_json(), **outcome.report}), cfg.out)
    status = "PASS" if outcome.passed else "FAIL"
    print(f"{cfg.command}: {status}", file=sys.stderr)
    return EXIT_OK if outcome.passed else EXIT_INVARIANT


if __name__ == "__main__":
    raise SystemExit(main())
