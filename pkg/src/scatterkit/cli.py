"""Command-line frontend: machine-readable reports and figure datasets.

Exit codes: 0 success, 2 invalid input, 3 eigenvalue-count identity violated,
4 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import n2
from .bound_states import truncated_eigenvalues, truncation_oracle
from .errors import (
    BracketAtBoundary,
    IdentityViolation,
    InvalidParams,
    NonConvergent,
    PhaseJump,
    SingularAtEnergy,
    ThresholdEnergy,
    Unstable,
)
from .levinson import levinson_check
from .model import ModelParams, eigendata
from .scattering import s_fiber

log = logging.getLogger("scatterkit")

EXIT_OK, EXIT_INVALID, EXIT_IDENTITY, EXIT_NUMERIC = 0, 2, 3, 4
NUMERIC_ERRORS = (NonConvergent, PhaseJump, Unstable, BracketAtBoundary, SingularAtEnergy)
SIG_DIGITS = 15


@dataclass
class RunConfig:
    """Every option with its default; a config file and flags both fill this in."""

    n: int = 2
    theta: float = np.pi / 2
    v: str = "-1,0"
    lambdas: str = ""
    lambda_grid: str = ""
    L: int = 4000
    delta: float = 1e-3
    grid: int = 40
    top: bool = False
    v1_range: str = "-50,-0.05"
    v2_range: str = "-1.98,-0.02"
    theta_range: str = "0.01,3.13159265358979"
    oracle: bool = False
    format: str = ""
    jobs: int = 0
    out: str = ""

    def model(self) -> ModelParams:
        return ModelParams(self.n, self.theta, _floats(self.v))

    @property
    def workers(self) -> int:
        if self.jobs > 0:
            return self.jobs
        if hasattr(os, "sched_getaffinity"):
            return len(os.sched_getaffinity(0))
        return os.cpu_count() or 1


class UsageError(Exception):
    pass


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"expected comma-separated reals, got {text!r}") from exc


def _range(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise UsageError(f"expected 'lo,hi', got {text!r}")
    return vals


def fmt(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def _clean(obj):
    """Round floats to 15 significant digits so output is reproducible byte for byte."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def dump_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _pool_map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items))  # map keeps input order


# --- commands --------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> int:
    p = cfg.model()
    spec = eigendata(p)
    thr = spec.thresholds
    intervals = []
    for lo, hi in zip(thr[:-1], thr[1:]):
        mid = 0.5 * (lo + hi)
        intervals.append({"lo": lo, "hi": hi, "multiplicity": int(np.sum(np.abs(mid - spec.lambdas) < 2))})
    report = {
        "n": p.n,
        "theta": p.theta,
        "v": list(p.v),
        "lambdas": list(spec.lambdas),
        "sorted_lambdas": list(spec.sorted_lambdas),
        "thresholds": list(thr),
        "band": list(spec.band),
        "intervals": intervals,
    }
    _emit(cfg, dump_json(report))
    return EXIT_OK


def _lambda_list(cfg: RunConfig) -> list[float]:
    lams = list(_floats(cfg.lambdas))
    if cfg.lambda_grid:
        g = _floats(cfg.lambda_grid)
        if len(g) != 3 or g[2] < 1:
            raise UsageError("--lambda-grid expects lo,hi,num")
        lams += list(np.linspace(g[0], g[1], int(g[2])))
    if not lams:
        raise UsageError("smatrix needs --lambda or --lambda-grid")
    return lams


def _smatrix_row(args):
    p, lam = args
    try:
        f = s_fiber(p, lam)
    except ThresholdEnergy:
        return {"lambda": lam, "error": "threshold"}
    except SingularAtEnergy:
        return {"lambda": lam, "error": "singular"}
    row = {"lambda": lam, "open": [int(j) + 1 for j in f.channels.open], "error": ""}
    row["s_re"] = f.s.real.tolist()
    row["s_im"] = f.s.imag.tolist()
    det = np.linalg.det(f.s) if f.s.size else 1.0
    row["det_phase"] = float(np.angle(det))
    row["unitarity_defect"] = f.unitarity_defect()
    return row


def cmd_smatrix(cfg: RunConfig) -> int:
    p = cfg.model()
    lams = _lambda_list(cfg)
    rows = _pool_map(_smatrix_row, [(p, lam) for lam in lams], cfg.workers)
    if (cfg.format or "csv") == "json":
        _emit(cfg, dump_json(rows))
    else:
        # channels are 1-based in the output; absent entries stay blank
        labels = [(j, k) for j in range(1, p.n + 1) for k in range(1, p.n + 1)]
        header = ["lambda", "open_channels"]
        header += [f"s{j}{k}_{part}" for j, k in labels for part in ("re", "im")]
        header += ["det_phase", "unitarity_defect", "error"]
        out = []
        for r in rows:
            line = [r["lambda"], " ".join(map(str, r.get("open", [])))]
            pos = {c: i for i, c in enumerate(r.get("open", []))}
            for j, k in labels:
                if j in pos and k in pos:
                    line += [r["s_re"][pos[j]][pos[k]], r["s_im"][pos[j]][pos[k]]]
                else:
                    line += ["", ""]
            line += [r.get("det_phase", ""), r.get("unitarity_defect", ""), r["error"]]
            out.append(line)
        _emit(cfg, dump_csv(header, out))
    return EXIT_OK if any(not r["error"] for r in rows) else EXIT_INVALID


def cmd_levinson(cfg: RunConfig) -> int:
    p = cfg.model()
    try:
        report = levinson_check(p, oracle=True, L=cfg.L, delta=cfg.delta)
        code = EXIT_OK
    except IdentityViolation as exc:
        report, code = exc.report, EXIT_IDENTITY
    _emit(cfg, dump_json(report.to_dict()))
    return code


def _log_grid(lo: float, hi: float, num: int) -> np.ndarray:
    if lo * hi <= 0:
        raise UsageError("each coordinate range must stay on one side of zero")
    sign = np.sign(lo)
    a, b = sorted((abs(lo), abs(hi)))
    return np.sort(sign * np.geomspace(a, b, num))


def cmd_resonance_surface(cfg: RunConfig) -> int:
    if cfg.grid < 1:
        log.error("empty grid")
        return EXIT_INVALID
    r1, r2 = _range(cfg.v1_range), _range(cfg.v2_range)
    if cfg.top and cfg.v1_range == RunConfig.v1_range and cfg.v2_range == RunConfig.v2_range:
        # top resonances live in the mirror image of the default quadrant
        r1, r2 = (-r1[0], -r1[1]), (-r2[0], -r2[1])
    v1 = _log_grid(*r1, cfg.grid)
    v2 = _log_grid(*r2, cfg.grid)
    rows = n2.resonance_surface(v1, v2, top=cfg.top)
    _emit(cfg, dump_csv(["v1", "v2", "theta0"], [list(r) for r in rows]))
    return EXIT_OK


def _sweep_row(args):
    n, v, theta, L, delta, with_oracle = args
    p = ModelParams(n, theta, v)
    try:
        r = levinson_check(p, oracle=with_oracle, L=L, delta=delta, raise_on_failure=False)
    except (*NUMERIC_ERRORS, ThresholdEnergy) as exc:
        return [theta, "", "", "", "", "", "", type(exc).__name__]
    flag = "" if r.holds else "identity"
    orc = "" if r.oracle_count is None else r.oracle_count
    eigs = " ".join(fmt(x) for x in r.eigenvalues)
    w = r.winding
    return [theta, r.analytic_count, orc, eigs, w.predicted, w.var_total, w.plus_count, flag]


def cmd_sweep_theta(cfg: RunConfig) -> int:
    p = cfg.model()
    lo, hi = _range(cfg.theta_range)
    if cfg.grid < 1:
        raise UsageError("--grid must be positive")
    thetas = np.linspace(lo, hi, cfg.grid)
    jobs = [(p.n, p.v, float(t), cfg.L, cfg.delta, cfg.oracle) for t in thetas]
    for t in thetas:
        p.with_theta(t)  # validate every flux before spawning workers
    rows = _pool_map(_sweep_row, jobs, cfg.workers)
    header = ["theta", "count", "oracle_count", "eigenvalues", "predicted", "var_total", "plus_count", "flag"]
    _emit(cfg, dump_csv(header, rows))
    return EXIT_OK


def cmd_oracle(cfg: RunConfig) -> int:
    p = cfg.model()
    count = truncation_oracle(p, L=cfg.L, delta=cfg.delta)
    eigs = truncated_eigenvalues(p, 2 * cfg.L, cfg.delta)
    _emit(cfg, dump_json({"count": count, "eigenvalues": list(eigs), "L": cfg.L, "delta": cfg.delta}))
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "smatrix": cmd_smatrix,
    "levinson": cmd_levinson,
    "resonance-surface": cmd_resonance_surface,
    "sweep-theta": cmd_sweep_theta,
    "oracle": cmd_oracle,
}


# --- argument handling -----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scatterkit", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="flat JSON document whose keys mirror the flags")
    # defaults are None so that only explicitly given flags override the config file
    ap.add_argument("--n", type=int)
    ap.add_argument("--theta", type=float, help="flux in radians, inside (0, pi)")
    ap.add_argument("--v", help="site-0 potential, comma-separated")
    ap.add_argument("--lambda", dest="lambdas", help="energies, comma-separated")
    ap.add_argument("--lambda-grid", help="lo,hi,num")
    ap.add_argument("--L", type=int, help="lattice cutoff for the oracle")
    ap.add_argument("--delta", type=float, help="oracle exclusion window around the band")
    ap.add_argument("--grid", type=int, help="points per axis for sweeps")
    ap.add_argument("--top", action="store_const", const=True, help="band-top resonances")
    ap.add_argument("--v1-range", help="lo,hi for v1 (log-spaced)")
    ap.add_argument("--v2-range", help="lo,hi for v2 (log-spaced)")
    ap.add_argument("--theta-range", help="lo,hi for sweep-theta")
    ap.add_argument("--oracle", action="store_const", const=True, help="add the lattice count to sweeps")
    ap.add_argument("--format", choices=["csv", "json"])
    ap.add_argument("--jobs", type=int, help="worker processes for sweeps (default: all cores)")
    ap.add_argument("--out", help="output file (default: stdout)")
    return ap


_NUMERIC_LIST = re.compile(r"^-[\d.][\d.,eE+-]*$")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--v -1,0`` into ``--v=-1,0``; argparse would read ``-1,0`` as a flag."""
    out: list[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NUMERIC_LIST.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def load_config(path: str | None, overrides: dict) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    data = {}
    if path:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise UsageError("config document must be a flat JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        if "lambda" in data:
            data["lambdas"] = data.pop("lambda")
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None and k in known})
    for key in ("v", "lambdas"):
        if isinstance(data.get(key), (list, tuple)):
            data[key] = ",".join(str(x) for x in data[key])
    return RunConfig(**data)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("SCATTERKIT_LOG", "WARNING").upper(), format="%(levelname)s %(message)s")
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        cfg = load_config(args.config, vars(args))
        return COMMANDS[args.command](cfg)
    except (InvalidParams, UsageError, ThresholdEnergy) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (json.JSONDecodeError, OSError, TypeError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NUMERIC_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
