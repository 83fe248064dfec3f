"""Command-line harness: observable trajectories and convergence studies.

Runs one or more propagation methods over a shared time grid, records a
fixed set of observables per method per time, and writes CSV (default) or
JSON.  Output is deterministic byte-for-byte for a given config: fixed
float formatting, sorted config embedding, and a thread pool (if enabled
via LINDBLAD_JC_THREADS) that only parallelizes independent per-method
work before anything is written.

Exit codes: 0 success; 2 bad usage/config/parameters or missing files;
3 truncation failure (requested state does not fit the basis);
4 numerical failure (integrator diagnostics or non-finite results).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import enum
import json
import math
import os
import sys
from dataclasses import dataclass, fields

import numpy as np
from scipy.linalg import expm

from .errors import (
    ConfigError,
    DomainError,
    NumericalError,
    ParamError,
    ShapeError,
    StepError,
    TruncationError,
)
from .fock import annihilation, coherent_state, number
from .oracle import OracleConfig, OracleMethod, oracle_propagate
from .params import ModelParams
from .superop import BlockDensity, build_generator, devectorize_blocks, vectorize_blocks
from .zassenhaus import (
    DEFAULT_PAD,
    DEFAULT_STEP_BOUND,
    PropagatorOrder,
    example_solution,
    propagate,
)

SCHEMA_VERSION = 1
THREADS_ENV = "LINDBLAD_JC_THREADS"

ORACLE_EXPM = "oracle-expm"
ORACLE_RK4 = "oracle-rk4"
SPLIT_METHODS = ("diagonal-only", "split2", "split3")
CLOSED_FORM = "closed-form-example"
ALL_METHODS = (ORACLE_EXPM, ORACLE_RK4) + SPLIT_METHODS + (CLOSED_FORM,)

OBSERVABLE_NAMES = ("trace", "p0", "p1", "mean_n", "re_a", "im_a",
                    "tdist_oracle", "min_eig")


class InitialKind(enum.Enum):
    VACUUM_EXCITED = "vacuum-excited"
    COHERENT_DIAGONAL = "coherent-diagonal"
    CUSTOM_FILE = "custom-file"


@dataclass(frozen=True)
class ObservableRow:
    """One method's observables at one time."""
    trace: float
    p0: float
    p1: float
    mean_n: float
    re_a: float
    im_a: float
    tdist_oracle: float
    min_eig: float

    def values(self):
        return (self.trace, self.p0, self.p1, self.mean_n,
                self.re_a, self.im_a, self.tdist_oracle, self.min_eig)


@dataclass(frozen=True)
class RunConfig:
    omega0: float = 1.0
    Omega: float = 1.0
    mu: float = 0.4
    nu: float = 0.1
    dim: int = 24
    t_max: float = 2.0
    points: int = 41
    methods: tuple = (ORACLE_EXPM, "split2", "split3")
    initial: str = InitialKind.VACUUM_EXCITED.value
    alpha: complex = 1.0 + 0.0j
    initial_path: str | None = None
    out: str | None = None
    format: str = "csv"
    step_mode: str = "single-shot"   # or "stepping"
    max_step_scale: float = 0.1      # stepping mode: h <= scale / max rate
    rk4_dt: float = 1e-3
    pad: int = DEFAULT_PAD

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.step_mode not in ("single-shot", "stepping"):
            raise ConfigError(f"step_mode must be single-shot or stepping, "
                              f"got {self.step_mode!r}")
        try:
            InitialKind(self.initial)
        except ValueError:
            raise ConfigError(
                f"initial must be one of {[k.value for k in InitialKind]}, "
                f"got {self.initial!r}") from None
        if not isinstance(self.points, int) or self.points < 2:
            raise ConfigError(f"points must be an integer >= 2, got {self.points!r}")
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ConfigError(f"t_max must be positive and finite, got {self.t_max!r}")
        if not (self.max_step_scale > 0):
            raise ConfigError(f"max_step_scale must be positive, got {self.max_step_scale!r}")
        if not (self.rk4_dt > 0):
            raise ConfigError(f"rk4_dt must be positive, got {self.rk4_dt!r}")
        if not (isinstance(self.pad, int) and self.pad >= 0):
            raise ConfigError(f"pad must be a non-negative integer, got {self.pad!r}")
        bad = [m for m in self.methods if m not in ALL_METHODS]
        if bad or not self.methods:
            raise ConfigError(f"unknown methods {bad!r}; choose from {list(ALL_METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError(f"duplicate methods in {list(self.methods)!r}")
        if CLOSED_FORM in self.methods and self.initial != InitialKind.VACUUM_EXCITED.value:
            raise ConfigError(
                f"{CLOSED_FORM} is only defined for the {InitialKind.VACUUM_EXCITED.value} "
                f"initial state")
        if self.initial == InitialKind.CUSTOM_FILE.value and not self.initial_path:
            raise ConfigError("initial=custom-file requires initial_path")

    def model_params(self) -> ModelParams:
        return ModelParams(omega0=self.omega0, Omega=self.Omega,
                           mu=self.mu, nu=self.nu, dim=self.dim)

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, complex):
                v = [v.real, v.imag]
            elif isinstance(v, tuple):
                v = list(v)
            d[f.name] = v
        return d


def config_from_dict(data: dict) -> RunConfig:
    """Build a RunConfig from a plain dict (e.g. parsed JSON), rejecting
    unknown keys.  alpha may be a number, a string like "0.9+0.3j", or a
    [re, im] pair; methods may be a list or a comma-separated string."""
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}; known keys: {sorted(known)}")
    clean = dict(data)
    if "alpha" in clean:
        clean["alpha"] = _parse_complex(clean["alpha"])
    if "methods" in clean:
        clean["methods"] = _parse_methods(clean["methods"])
    if "points" in clean and isinstance(clean["points"], float) and clean["points"].is_integer():
        clean["points"] = int(clean["points"])
    for key in ("omega0", "Omega", "mu", "nu", "t_max", "max_step_scale", "rk4_dt"):
        if key in clean:
            try:
                clean[key] = float(clean[key])
            except (TypeError, ValueError):
                raise ConfigError(f"config key {key} must be a number, "
                                  f"got {clean[key]!r}") from None
    return RunConfig(**clean)


def _parse_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, complex):
        return v
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            raise ConfigError(f"cannot parse complex number from {v!r}") from None
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ConfigError(f"cannot parse complex number from {v!r}")


def _parse_methods(v) -> tuple:
    if isinstance(v, str):
        v = [m for m in v.split(",") if m]
    if not isinstance(v, (list, tuple)):
        raise ConfigError(f"methods must be a list or comma-separated string, got {v!r}")
    return tuple(str(m).strip() for m in v)


def _threads_from_env() -> int:
    raw = os.environ.get(THREADS_ENV, "1").strip()
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError(f"{THREADS_ENV} must be >= 0, got {n}")
    if n == 0:
        n = os.cpu_count() or 1
    return n


# ---------------------------------------------------------------------------
# initial states


def initial_state(cfg: RunConfig) -> BlockDensity:
    d = cfg.dim
    kind = InitialKind(cfg.initial)
    if kind is InitialKind.CUSTOM_FILE:
        return load_state_file(cfg.initial_path, d)
    z = np.zeros((d, d), dtype=complex)
    ket = coherent_state(cfg.alpha, d)
    coh = 0.5 * np.outer(ket, ket.conj())
    if kind is InitialKind.VACUUM_EXCITED:
        vac = np.zeros((d, d), dtype=complex)
        vac[0, 0] = 0.5
        return BlockDensity(vac, z.copy(), z.copy(), coh)
    return BlockDensity(coh.copy(), z.copy(), z.copy(), coh)


def load_state_file(path: str, dim: int) -> BlockDensity:
    """Read a block density matrix from JSON: {"dim": d, "blocks":
    {"rho00": [[[re, im], ...], ...], ...}} with all four blocks d x d."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"cannot parse state file {path}: {e}") from None
    if not isinstance(data, dict) or "dim" not in data or "blocks" not in data:
        raise ConfigError(f"state file {path} must contain 'dim' and 'blocks'")
    if data["dim"] != dim:
        raise ConfigError(f"state file dim {data['dim']} does not match configured "
                          f"dim {dim}")
    blocks = {}
    for key in ("rho00", "rho01", "rho10", "rho11"):
        if key not in data["blocks"]:
            raise ConfigError(f"state file {path} missing block {key}")
        try:
            arr = np.asarray(data["blocks"][key], dtype=float)
        except (TypeError, ValueError):
            raise ConfigError(f"block {key} in {path} is not numeric") from None
        if arr.shape != (dim, dim, 2):
            raise ConfigError(
                f"block {key} in {path} has shape {arr.shape}, expected "
                f"({dim}, {dim}, 2) nested [re, im] entries")
        blocks[key] = arr[..., 0] + 1j * arr[..., 1]
    return BlockDensity(blocks["rho00"], blocks["rho01"], blocks["rho10"], blocks["rho11"])


# ---------------------------------------------------------------------------
# observables


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(1/2) tr |rho - sigma| of the hermitized difference."""
    diff = rho - sigma
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


def observables(rho: BlockDensity, oracle_rho: BlockDensity) -> ObservableRow:
    osc = rho.rho00 + rho.rho11   # oscillator state, qubit traced out
    d = rho.dim
    a = annihilation(d)
    mean_a = complex(np.trace(osc @ a))
    full = rho.full()
    sym = 0.5 * (full + full.conj().T)
    return ObservableRow(
        trace=float(full.trace().real),
        p0=float(np.trace(rho.rho00).real),
        p1=float(np.trace(rho.rho11).real),
        mean_n=float(np.trace(osc @ number(d)).real),
        re_a=mean_a.real,
        im_a=mean_a.imag,
        tdist_oracle=trace_distance(full, oracle_rho.full()),
        min_eig=float(np.linalg.eigvalsh(sym).min()),
    )


# ---------------------------------------------------------------------------
# trajectory runners


def _oracle_trajectory(rho0: BlockDensity, ts: np.ndarray, p: ModelParams) -> list:
    """Exact states on a uniform grid via powers of one dense step matrix."""
    U = expm(float(ts[1] - ts[0]) * build_generator(p))
    states = [rho0]
    vec = vectorize_blocks(rho0)
    for _ in range(len(ts) - 1):
        vec = U @ vec
        states.append(devectorize_blocks(vec, p.dim))
    return states


def _method_trajectory(method: str, cfg: RunConfig, p: ModelParams,
                       rho0: BlockDensity, ts: np.ndarray,
                       oracle_states: list) -> list:
    if method == ORACLE_EXPM:
        return oracle_states
    if method == ORACLE_RK4:
        ocfg = OracleConfig(method=OracleMethod.RK4, dt=cfg.rk4_dt)
        out, cur = [rho0], rho0
        for i in range(1, len(ts)):
            cur = oracle_propagate(cur, float(ts[i] - ts[i - 1]), p, ocfg)
            out.append(cur)
        return out
    if method == CLOSED_FORM:
        return [example_solution(cfg.alpha, float(t), p) for t in ts]

    order = PropagatorOrder(method)
    if cfg.step_mode == "single-shot":
        # Evaluate the factored propagator directly at each grid time.  The
        # error grows with t * rate, so lift the single-step guard to the
        # largest grid time; this is the mode the closed forms describe.
        bound = max(DEFAULT_STEP_BOUND, cfg.t_max * p.rate * (1 + 1e-9))
        return [propagate(rho0, float(t), p, order, step_bound=bound, pad=cfg.pad)
                for t in ts]
    # stepping: compose short steps between grid points
    h_max = cfg.max_step_scale / p.rate if p.rate > 0 else float("inf")
    out, cur = [rho0], rho0
    for i in range(1, len(ts)):
        seg = float(ts[i] - ts[i - 1])
        n = max(1, int(math.ceil(seg / h_max - 1e-12))) if math.isfinite(h_max) else 1
        h = seg / n
        bound = max(DEFAULT_STEP_BOUND, cfg.max_step_scale * (1 + 1e-9))
        for _ in range(n):
            cur = propagate(cur, h, p, order, step_bound=bound, pad=cfg.pad)
        out.append(cur)
    return out


def run_trajectory(cfg: RunConfig):
    """Compute the full observable table.  Returns (column names, rows)."""
    p = cfg.model_params()
    rho0 = initial_state(cfg)
    ts = np.linspace(0.0, cfg.t_max, cfg.points)
    oracle_states = _oracle_trajectory(rho0, ts, p)

    threads = _threads_from_env()
    if threads > 1 and len(cfg.methods) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {m: pool.submit(_method_trajectory, m, cfg, p, rho0, ts,
                                      oracle_states)
                       for m in cfg.methods}
            trajectories = {m: f.result() for m, f in futures.items()}
    else:
        trajectories = {m: _method_trajectory(m, cfg, p, rho0, ts, oracle_states)
                        for m in cfg.methods}

    columns = ["t"]
    for m in cfg.methods:
        prefix = m.replace("-", "_")
        columns.extend(f"{prefix}_{name}" for name in OBSERVABLE_NAMES)
    rows = []
    for i, t in enumerate(ts):
        row = [float(t)]
        for m in cfg.methods:
            row.extend(observables(trajectories[m][i], oracle_states[i]).values())
        rows.append(row)
    return columns, rows


# ---------------------------------------------------------------------------
# convergence study


@dataclass(frozen=True)
class ConvergenceResult:
    h: tuple
    errors: dict           # method name -> tuple of trace distances
    slopes: dict           # method name -> float, or None when exact


def convergence_study(rho0: BlockDensity, p: ModelParams, h_list,
                      orders=(PropagatorOrder.SPLIT2, PropagatorOrder.SPLIT3),
                      pad: int = DEFAULT_PAD) -> ConvergenceResult:
    """Single-step error of each propagator versus step size.

    For each h the propagator is applied once and compared (trace distance)
    with the exact flow over the same h; the log-log slope estimates the
    local order (2 for split2, 3 for split3).  h_list must hold at least
    three positive values in geometric progression.  When all errors sit at
    rounding level (< 1e-12) the slope is meaningless and is reported as
    None ("exact"), e.g. for Omega = 0 where the splitting is exact.
    """
    h = tuple(float(x) for x in h_list)
    if len(h) < 3:
        raise ConfigError(f"h_list needs at least 3 values, got {len(h)}")
    if any(not (x > 0 and math.isfinite(x)) for x in h):
        raise ConfigError(f"h_list values must be positive and finite: {h}")
    ratios = [h[i + 1] / h[i] for i in range(len(h) - 1)]
    if any(abs(r - ratios[0]) > 1e-6 * abs(ratios[0]) for r in ratios) \
            or abs(ratios[0] - 1.0) < 1e-9:
        raise ConfigError(f"h_list must be a geometric progression with ratio != 1: {h}")

    bound = max(DEFAULT_STEP_BOUND, max(h) * p.rate * (1 + 1e-9))
    ocfg = OracleConfig()   # dense expm reference
    exact = {step: oracle_propagate(rho0, step, p, ocfg).full() for step in h}
    errors = {}
    slopes = {}
    for order in orders:
        errs = []
        for step in h:
            approx = propagate(rho0, step, p, order, step_bound=bound, pad=pad)
            errs.append(trace_distance(approx.full(), exact[step]))
        errors[order.value] = tuple(errs)
        if max(errs) < 1e-12:
            slopes[order.value] = None
        else:
            fit = np.polyfit(np.log(np.asarray(h)), np.log(np.asarray(errs)), 1)
            slopes[order.value] = float(fit[0])
    return ConvergenceResult(h=h, errors=errors, slopes=slopes)


# ---------------------------------------------------------------------------
# serialization


def _format_float(x: float) -> str:
    return f"{x:.16e}"


def render_csv(columns, rows, comments) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format_float(x) for x in row))
    return "\n".join(lines) + "\n"


def render_json(payload) -> str:
    return json.dumps(payload, sort_keys=True) + "\n"


def _write_output(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {out}", file=sys.stderr)


def emit_plotscript(csv_path: str, script_path: str) -> None:
    """Write a gnuplot script that plots mean occupation and trace distance
    to the oracle for every method present in csv_path (by column name)."""
    if not os.path.exists(csv_path):
        raise FileNotFoundError(f"CSV file not found: {csv_path}")
    header = None
    with open(csv_path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                header = line.strip()
                break
    if not header or "," not in header:
        raise ConfigError(f"{csv_path} has no CSV header row")
    columns = header.split(",")
    mean_cols = [c for c in columns if c.endswith("_mean_n")]
    dist_cols = [c for c in columns if c.endswith("_tdist_oracle")]
    if "t" not in columns or not mean_cols:
        raise ConfigError(f"{csv_path} does not look like a trajectory table")

    def series(cols, suffix):
        return ", \\\n    ".join(
            f"csvfile using 't':'{c}' with lines title '{c[:-len(suffix)].replace('_', '-')}'"
            for c in cols)

    lines = [
        "# gnuplot script (auto-generated); run: gnuplot <this file>",
        f"csvfile = '{csv_path}'",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set terminal pngcairo size 1100,800",
        f"set output '{os.path.splitext(script_path)[0]}.png'",
        "set multiplot layout 2,1",
        "set xlabel 't'",
        "set ylabel 'mean occupation'",
        "plot " + series(mean_cols, "_mean_n"),
        "set ylabel 'trace distance to oracle'",
        "set logscale y",
        "set format y '%.0e'",
        "plot " + series(dist_cols, "_tdist_oracle"),
        "unset multiplot",
    ]
    with open(script_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dampedjc",
        description="Damped Jaynes-Cummings trajectories: split-operator "
                    "propagators checked against brute-force integration.")
    ap.add_argument("--config", metavar="PATH", help="JSON config file; CLI flags override it")
    ap.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--method", action="append", metavar="NAME",
                    help=f"method to run (repeatable or comma-separated); "
                         f"choices: {', '.join(ALL_METHODS)}")
    ap.add_argument("--tmax", type=float, metavar="T")
    ap.add_argument("--points", type=int, metavar="N")
    ap.add_argument("--dim", type=int, metavar="D", help="Fock-space cutoff")
    ap.add_argument("--alpha", metavar="Z", help="coherent amplitude, e.g. 0.9+0.3j")
    ap.add_argument("--omega0", type=float, metavar="W")
    ap.add_argument("--Omega", type=float, metavar="W")
    ap.add_argument("--mu", type=float, metavar="R", help="decay rate (must exceed nu)")
    ap.add_argument("--nu", type=float, metavar="R", help="pump rate")
    ap.add_argument("--initial", choices=[k.value for k in InitialKind])
    ap.add_argument("--initial-file", metavar="PATH", dest="initial_path",
                    help="JSON state file for --initial custom-file")
    ap.add_argument("--step-mode", choices=("single-shot", "stepping"), dest="step_mode")
    ap.add_argument("--pad", type=int, metavar="N",
                    help="extra Fock levels for the split3 commutator factor")
    ap.add_argument("--rk4-dt", type=float, metavar="H", dest="rk4_dt")
    ap.add_argument("--study", choices=("convergence",))
    ap.add_argument("--h-list", metavar="H1,H2,...", dest="h_list",
                    help="step sizes for --study convergence (geometric, >= 3)")
    ap.add_argument("--plotscript", metavar="PATH",
                    help="also write a gnuplot script for the CSV given by --out")
    return ap


def _resolve_config(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"cannot parse config file {args.config}: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"config file {args.config} must hold a JSON object")
    overrides = {
        "out": args.out, "format": args.format, "t_max": args.tmax,
        "points": args.points, "dim": args.dim, "omega0": args.omega0,
        "Omega": args.Omega, "mu": args.mu, "nu": args.nu,
        "initial": args.initial, "initial_path": args.initial_path,
        "step_mode": args.step_mode, "pad": args.pad, "rk4_dt": args.rk4_dt,
    }
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    if args.method:
        overrides["methods"] = tuple(m for chunk in args.method
                                     for m in chunk.split(",") if m)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_dict(data)


def _run_study(cfg: RunConfig, h_list_arg: str | None) -> int:
    if not h_list_arg:
        raise ConfigError("--study convergence requires --h-list")
    try:
        h_list = [float(x) for x in h_list_arg.split(",") if x]
    except ValueError:
        raise ConfigError(f"cannot parse --h-list {h_list_arg!r}") from None
    p = cfg.model_params()
    rho0 = initial_state(cfg)
    result = convergence_study(rho0, p, h_list, pad=cfg.pad)

    names = [o for o in result.errors]
    comments = [f"schema_version={SCHEMA_VERSION}", "study=convergence",
                "config=" + json.dumps(cfg.to_dict(), sort_keys=True)]
    for name in names:
        s = result.slopes[name]
        comments.append(f"slope_{name.replace('-', '_')}="
                        + ("exact" if s is None else _format_float(s)))
    if cfg.format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "study": "convergence",
            "config": cfg.to_dict(),
            "h": list(result.h),
            "errors": {k: list(v) for k, v in result.errors.items()},
            "slopes": {k: ("exact" if v is None else v)
                       for k, v in result.slopes.items()},
        }
        _write_output(render_json(payload), cfg.out)
    else:
        columns = ["h"] + [f"{n.replace('-', '_')}_err" for n in names]
        rows = [[result.h[i]] + [result.errors[n][i] for n in names]
                for i in range(len(result.h))]
        _write_output(render_csv(columns, rows, comments), cfg.out)
    for name in names:
        s = result.slopes[name]
        print(f"{name}: slope " + ("exact" if s is None else f"{s:.3f}"),
              file=sys.stderr)
    return 0


def _run_trajectory(cfg: RunConfig, plotscript: str | None) -> int:
    if plotscript and (cfg.format != "csv" or cfg.out is None):
        raise ConfigError("--plotscript needs --out plus csv format")
    columns, rows = run_trajectory(cfg)
    if cfg.format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "config": cfg.to_dict(),
            "columns": columns,
            "rows": rows,
        }
        _write_output(render_json(payload), cfg.out)
    else:
        comments = [f"schema_version={SCHEMA_VERSION}",
                    "config=" + json.dumps(cfg.to_dict(), sort_keys=True)]
        _write_output(render_csv(columns, rows, comments), cfg.out)
    if plotscript:
        emit_plotscript(cfg.out, plotscript)
        print(f"wrote {plotscript}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.study == "convergence":
            return _run_study(cfg, args.h_list)
        return _run_trajectory(cfg, args.plotscript)
    except (ParamError, DomainError, ShapeError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TruncationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (NumericalError, StepError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
