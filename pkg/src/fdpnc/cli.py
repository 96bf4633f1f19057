"""Command-line front end: ``fdpnc {theory,simulate,sweep,floor}``.

Every subcommand writes rows with the same column set (:data:`COLUMNS`), as
CSV (default) or JSON lines.  Unused columns are empty (CSV) or ``null``
(JSON).  Floats are written with ``repr`` so they re-parse bit-exactly.

SNR on the command line is ``1 / sigma2``, i.e. energy over noise variance for
unit energies, with one common noise variance at all three nodes.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import SystemParams, ValidationError, db_to_linear, linear_to_db, validate
from .sim import StopRule, run_campaign, scoreboard
from .theory import ConventionViolation, error_floor, regime_boundary, theory_point

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_STRICT = 2
EXIT_IO = 3

COLUMNS = (
    "snr_db", "sigma2", "energy_a", "energy_b", "energy_r", "kappa_a", "kappa_b", "kappa_r",
    "gamma_a", "gamma_b", "gamma_r", "theory_ber_relay", "theory_ber_end_a", "theory_ber_end_b",
    "floor_a", "regime", "sim_ber_relay", "sim_stderr_relay", "sim_ber_end_a", "sim_stderr_end_a",
    "sim_ber_end_b", "sim_stderr_end_b", "slots", "z_relay", "z_end_a", "z_end_b", "pass",
    "seed", "warnings",
)
# columns that identify a sweep point, used to check resumed output
KEY_COLUMNS = ("snr_db", "sigma2", "energy_a", "energy_b", "energy_r", "kappa_a", "kappa_b", "kappa_r", "seed")

AXES = ("snr_db", "kappa", "kappa_r", "kappa_a")


class InvalidSweepAxis(ValueError):
    pass


def kappa_from_suppression_db(suppression_db: float) -> float:
    """Amplitude coefficient whose power ``kappa**2`` is ``-suppression_db`` dB."""
    return float(np.sqrt(db_to_linear(-suppression_db)))


def sigma2_from_snr_db(snr_db: float) -> float:
    return float(1.0 / db_to_linear(snr_db))


def apply_axis(params: SystemParams, axis: str, value: float) -> SystemParams:
    if axis == "snr_db":
        s2 = sigma2_from_snr_db(value)
        return params.replace(noise_var_a=s2, noise_var_b=s2, noise_var_r=s2)
    if axis == "kappa":
        return params.replace(kappa_a=value, kappa_b=value, kappa_r=value)
    if axis == "kappa_r":
        return params.replace(kappa_r=value)
    if axis == "kappa_a":
        return params.replace(kappa_a=value)
    raise InvalidSweepAxis(f"unknown sweep axis {axis!r}; choose from {', '.join(AXES)}")


def frange(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic range, robust to float round-off at ``stop``."""
    if not step > 0:
        raise InvalidSweepAxis("sweep step must be > 0")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [start + k * step for k in range(n + 1)] if n >= 0 else []


@dataclass(frozen=True)
class SweepSpec:
    """A sweep along ``axis`` (innermost), optionally crossed with ``extra`` axes.

    ``snr_db`` records the SNR of ``fixed`` when it was given in dB, so that
    rows can echo it.
    """

    axis: str
    values: tuple[float, ...]
    fixed: SystemParams
    extra: tuple[tuple[str, tuple[float, ...]], ...] = ()
    snr_db: float | None = None

    def __post_init__(self):
        for name, vals in ((self.axis, self.values), *self.extra):
            if name not in AXES:
                raise InvalidSweepAxis(f"unknown sweep axis {name!r}; choose from {', '.join(AXES)}")
            if len(vals) == 0:
                raise InvalidSweepAxis(f"sweep over {name!r} has no values")

    def points(self):
        """Yield ``(params, snr_db)`` in order; the last-named extra axis varies slowest."""
        axes = [*reversed(self.extra), (self.axis, self.values)]
        for combo in itertools.product(*(vals for _, vals in axes)):
            p, snr = self.fixed, self.snr_db
            for (name, _), v in zip(axes, combo):
                p = apply_axis(p, name, v)
                if name == "snr_db":
                    snr = v
            yield p, snr

    def __len__(self):
        return math.prod(len(v) for _, v in ((self.axis, self.values), *self.extra))


@dataclass
class CurveRecord:
    """One output row.  Missing values are ``None``."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values.get(key)

    def as_row(self) -> dict:
        return {c: self.values.get(c) for c in COLUMNS}


def _snr_echo(params: SystemParams, snr_db):
    if snr_db is not None:
        return float(snr_db)
    if params.noise_var_r > 0:
        return float(linear_to_db(1.0 / params.noise_var_r))
    return None


def _param_columns(params: SystemParams, snr_db) -> dict:
    return {
        "snr_db": _snr_echo(params, snr_db),
        "sigma2": params.noise_var_r,
        "energy_a": params.energy_a, "energy_b": params.energy_b, "energy_r": params.energy_r,
        "kappa_a": params.kappa_a, "kappa_b": params.kappa_b, "kappa_r": params.kappa_r,
        "seed": params.seed,
    }


def theory_record(params: SystemParams, snr_db=None) -> CurveRecord:
    validate(params)
    tp = theory_point(params)
    row = _param_columns(params, snr_db)
    row.update(
        gamma_a=tp.gamma_a, gamma_b=tp.gamma_b, gamma_r=tp.gamma_r,
        theory_ber_relay=tp.ber_relay, theory_ber_end_a=tp.ber_end, theory_ber_end_b=tp.ber_end_b,
        floor_a=tp.floor, regime=tp.regime.value if tp.regime else None,
    )
    return CurveRecord(row)


def cmd_theory(sweep: SweepSpec) -> list[CurveRecord]:
    """Closed-form columns for every sweep point."""
    return [theory_record(p, snr) for p, snr in sweep.points()]


def cmd_simulate(params: SystemParams, stop: StopRule = StopRule(), workers: int = 1,
                 snr_db=None) -> CurveRecord:
    """Monte Carlo campaign at one point, scored against the closed forms."""
    rec = theory_record(params, snr_db)
    result = run_campaign(params, stop, workers)
    score = scoreboard(result, theory_point(params))
    rec.values.update(
        sim_ber_relay=result.ber_relay_hat, sim_stderr_relay=result.stderr_relay,
        sim_ber_end_a=result.ber_end_a_hat, sim_stderr_end_a=result.stderr_end_a,
        sim_ber_end_b=result.ber_end_b_hat, sim_stderr_end_b=result.stderr_end_b,
        slots=result.slots_run,
        z_relay=score.relay.z, z_end_a=score.end_a.z, z_end_b=score.end_b.z,
        **{"pass": score.passed},
        warnings=";".join(result.warnings) or None,
    )
    return rec


def _error_record(params: SystemParams, snr_db, exc: Exception) -> CurveRecord:
    row = _param_columns(params, snr_db)
    row["warnings"] = f"{type(exc).__name__}: {exc}"
    return CurveRecord(row)


def cmd_sweep(sweep: SweepSpec, stop: StopRule = StopRule(), workers: int = 1,
              skip: int = 0, parallel_points: bool = False):
    """Yield one simulated record per sweep point, in sweep order.

    The first ``skip`` points are not run (resuming).  A point whose parameters
    are invalid yields a row carrying the error in ``warnings``.
    """
    todo = list(itertools.islice(sweep.points(), skip, None))

    def one(point):
        params, snr = point
        try:
            return cmd_simulate(params, stop, workers, snr)
        except (ValidationError, ConventionViolation) as exc:
            return _error_record(params, snr, exc)

    if parallel_points:
        with ThreadPoolExecutor() as pool:
            yield from pool.map(one, todo)
    else:
        for point in todo:
            yield one(point)


def cmd_floor(kappas, base: SystemParams = SystemParams()) -> list[CurveRecord]:
    """Error floor per symmetric kappa, with the regime boundary in the noise columns.

    In these rows ``sigma2`` is the boundary noise variance ``2 kappa^2`` and
    ``snr_db`` the matching SNR (empty when kappa is 0).
    """
    if not base.is_unit_energy:
        raise ConventionViolation("floor table needs unit energies")
    if len(kappas) == 0:
        raise InvalidSweepAxis("floor grid has no kappa values")
    out = []
    for k in kappas:
        p = apply_axis(base, "kappa", k)
        boundary = regime_boundary(k)
        row = _param_columns(p, None)
        row.update(
            sigma2=boundary,
            snr_db=float(linear_to_db(1.0 / boundary)) if boundary > 0 else None,
            floor_a=error_floor(p, "A"),
            regime="si_limited",
        )
        out.append(CurveRecord(row))
    return out


# ----------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v)) if math.isfinite(v) else ""
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


class RecordWriter:
    def __init__(self, stream, fmt: str = "csv", header: bool = True):
        self.stream = stream
        self.fmt = fmt
        if fmt == "csv":
            self._csv = csv.writer(stream, lineterminator="\n")
            if header:
                self._csv.writerow(COLUMNS)

    def write(self, rec: CurveRecord):
        row = rec.as_row()
        if self.fmt == "csv":
            self._csv.writerow([_fmt(row[c]) for c in COLUMNS])
        else:
            self.stream.write(json.dumps({c: _json_value(row[c]) for c in COLUMNS}) + "\n")
        self.stream.flush()


def read_records(path, fmt: str = "csv") -> list[dict]:
    """Rows of a previous output file as ``{column: string-or-None}``."""
    with open(path, newline="") as f:
        if fmt == "csv":
            return [{k: (v or None) for k, v in row.items()} for row in csv.DictReader(f)]
        rows = []
        for line in f:
            if line.strip():
                rows.append({k: None if v is None else _fmt(v) for k, v in json.loads(line).items()})
        return rows


# ----------------------------------------------------------------------------
# argument handling

DEFAULTS = dict(
    snr_db=10.0, sigma2=None, sigma2_a=None, sigma2_b=None, sigma2_r=None,
    energy_a=1.0, energy_b=1.0, energy_r=1.0,
    kappa=0.0, kappa_a=None, kappa_b=None, kappa_r=None, si_suppression_db=None,
    seed=0, min_errors=200, max_slots=10**8, workers=1,
    format="csv", out=None, strict=False, skip_completed=False, parallel_points=False,
    axis=None, values=None, range=None, also=[],
)
# an explicit flag on the command line displaces its rival from the config file
RIVALS = {"snr_db": "sigma2", "sigma2": "snr_db", "kappa": "si_suppression_db", "si_suppression_db": "kappa"}


def _add_param_flags(p):
    g = p.add_argument_group("link parameters")
    snr = g.add_mutually_exclusive_group()
    snr.add_argument("--snr-db", type=float, help="common SNR 1/sigma2 in dB (default 10)")
    snr.add_argument("--sigma2", type=float, help="common noise variance, linear")
    g.add_argument("--sigma2-a", type=float, help="override noise variance at A")
    g.add_argument("--sigma2-b", type=float, help="override noise variance at B")
    g.add_argument("--sigma2-r", type=float, help="override noise variance at R")
    for node in "abr":
        g.add_argument(f"--energy-{node}", type=float, help=f"bit energy of node {node.upper()} (default 1)")
    kap = g.add_mutually_exclusive_group()
    kap.add_argument("--kappa", type=float, help="residual SI amplitude at every node (default 0)")
    kap.add_argument("--si-suppression-db", type=float,
                     help="SI suppression in dB at every node; kappa = 10**(-S/20)")
    for node in "abr":
        g.add_argument(f"--kappa-{node}", type=float, help=f"override kappa of node {node.upper()}")
    g.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--format", choices=("csv", "jsonl"), help="output format (default csv)")
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    p.add_argument("--config", metavar="JSON", help="JSON file of flag values; explicit flags win")


def _add_sim_flags(p):
    g = p.add_argument_group("simulation")
    g.add_argument("--min-errors", type=int, help="errors to collect per metric (default 200)")
    g.add_argument("--max-slots", type=int, help="hard cap on slots (default 1e8)")
    g.add_argument("--workers", type=int, help="threads per campaign (default 1)")
    g.add_argument("--strict", action="store_true", help="exit 2 if any 3-sigma check fails")


def _add_sweep_flags(p, required=False):
    g = p.add_argument_group("sweep")
    g.add_argument("--axis", help=f"swept parameter: {', '.join(AXES)}")
    vals = g.add_mutually_exclusive_group()
    vals.add_argument("--values", type=float, nargs="*", help="explicit axis values")
    vals.add_argument("--range", type=float, nargs=3, metavar=("START", "STOP", "STEP"),
                      help="inclusive arithmetic range")
    g.add_argument("--also", action="append", metavar="AXIS=V1,V2",
                   help="cross the sweep with another axis (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdpnc", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", argument_default=argparse.SUPPRESS,
                       help="closed-form BERs, optionally over a sweep")
    _add_param_flags(p)
    _add_sweep_flags(p)

    p = sub.add_parser("simulate", argument_default=argparse.SUPPRESS,
                       help="Monte Carlo at one point, scored against theory")
    _add_param_flags(p)
    _add_sim_flags(p)

    p = sub.add_parser("sweep", argument_default=argparse.SUPPRESS,
                       help="Monte Carlo plus theory over a sweep")
    _add_param_flags(p)
    _add_sim_flags(p)
    _add_sweep_flags(p)
    p.add_argument("--skip-completed", action="store_true",
                   help="append to --out, skipping points already written there")
    p.add_argument("--parallel-points", action="store_true", help="run sweep points concurrently")

    p = sub.add_parser("floor", argument_default=argparse.SUPPRESS,
                       help="error floor and regime boundary per kappa")
    _add_param_flags(p)
    vals = p.add_mutually_exclusive_group()
    vals.add_argument("--values", type=float, nargs="*", help="kappa grid")
    vals.add_argument("--range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    return parser


def resolve_options(ns: argparse.Namespace) -> dict:
    explicit = {k: v for k, v in vars(ns).items() if k not in ("config", "command")}
    config = {}
    if getattr(ns, "config", None):
        with open(ns.config) as f:
            config = {k.replace("-", "_"): v for k, v in json.load(f).items()}
        unknown = set(config) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown key(s) in config file: {sorted(unknown)}")
        for k in explicit:
            config.pop(RIVALS.get(k, ""), None)
    opts = {**DEFAULTS, **config, **explicit}
    if opts["sigma2"] is not None:
        opts["snr_db"] = None
    if opts["si_suppression_db"] is not None:
        opts["kappa"] = None
    return opts


def params_from_options(opts: dict) -> tuple[SystemParams, float | None]:
    """Build the fixed parameters; also return the SNR in dB when it was given that way."""
    snr_db = opts["snr_db"]
    sigma2 = opts["sigma2"] if snr_db is None else sigma2_from_snr_db(snr_db)
    if opts["si_suppression_db"] is not None:
        kappa = kappa_from_suppression_db(opts["si_suppression_db"])
    else:
        kappa = opts["kappa"]

    def pick(override, common):
        return common if override is None else override

    params = SystemParams(
        energy_a=opts["energy_a"], energy_b=opts["energy_b"], energy_r=opts["energy_r"],
        noise_var_a=pick(opts["sigma2_a"], sigma2),
        noise_var_b=pick(opts["sigma2_b"], sigma2),
        noise_var_r=pick(opts["sigma2_r"], sigma2),
        kappa_a=pick(opts["kappa_a"], kappa),
        kappa_b=pick(opts["kappa_b"], kappa),
        kappa_r=pick(opts["kappa_r"], kappa),
        seed=opts["seed"],
    )
    overridden = any(opts[k] is not None for k in ("sigma2_a", "sigma2_b", "sigma2_r"))
    return params, None if overridden else snr_db


def _axis_values(opts):
    if opts["range"] is not None:
        return tuple(frange(*opts["range"]))
    if opts["values"] is not None:
        return tuple(opts["values"])
    return None


def _parse_also(items):
    out = []
    for item in items or []:
        name, _, vals = item.partition("=")
        try:
            values = tuple(float(v) for v in vals.split(",") if v.strip())
        except ValueError as exc:
            raise InvalidSweepAxis(f"bad --also value list {item!r}") from exc
        out.append((name.strip(), values))
    return tuple(out)


def sweep_from_options(opts, params, snr_db, *, required) -> SweepSpec | None:
    values = _axis_values(opts)
    if opts["axis"] is None:
        if required or values is not None or opts["also"]:
            raise InvalidSweepAxis("--axis is required for a sweep")
        return None
    if values is None:
        raise InvalidSweepAxis("give the sweep values with --values or --range")
    return SweepSpec(opts["axis"], values, params, _parse_also(opts["also"]), snr_db)


def _open_out(opts, append=False):
    if opts["out"] is None:
        return sys.stdout, False
    return open(opts["out"], "a" if append else "w", newline=""), True


def _completed_rows(opts, sweep: SweepSpec) -> int:
    try:
        rows = read_records(opts["out"], opts["format"])
    except FileNotFoundError:
        return 0
    planned = list(itertools.islice(sweep.points(), len(rows)))
    if len(rows) > len(sweep):
        raise ValueError(f"{opts['out']} has more rows than the sweep has points")
    for i, (row, (p, snr)) in enumerate(zip(rows, planned)):
        expect = {k: _fmt(v) or None for k, v in _param_columns(p, snr).items()}
        if any(row.get(k) != expect[k] for k in KEY_COLUMNS):
            raise ValueError(f"row {i} of {opts['out']} does not match sweep point {i}")
    return len(rows)


def run(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cmd = ns.command
    stream = None
    close = False
    try:
        opts = resolve_options(ns)
        params, snr_db = params_from_options(opts)
        status = EXIT_OK

        if cmd == "floor":
            values = _axis_values(opts)
            if values is None:
                raise InvalidSweepAxis("give the kappa grid with --values or --range")
            records = cmd_floor(values, params)
            stream, close = _open_out(opts)
            w = RecordWriter(stream, opts["format"])
            for rec in records:
                w.write(rec)

        elif cmd == "theory":
            validate(params)
            sweep = sweep_from_options(opts, params, snr_db, required=False)
            records = cmd_theory(sweep) if sweep else [theory_record(params, snr_db)]
            stream, close = _open_out(opts)
            w = RecordWriter(stream, opts["format"])
            for rec in records:
                w.write(rec)

        elif cmd == "simulate":
            validate(params)
            stop = StopRule(opts["min_errors"], opts["max_slots"])
            rec = cmd_simulate(params, stop, opts["workers"], snr_db)
            stream, close = _open_out(opts)
            RecordWriter(stream, opts["format"]).write(rec)
            if opts["strict"] and not rec["pass"]:
                status = EXIT_STRICT

        elif cmd == "sweep":
            sweep = sweep_from_options(opts, params, snr_db, required=True)
            stop = StopRule(opts["min_errors"], opts["max_slots"])
            skip = 0
            if opts["skip_completed"]:
                if opts["out"] is None:
                    raise ValueError("--skip-completed needs --out")
                skip = _completed_rows(opts, sweep)
            stream, close = _open_out(opts, append=skip > 0)
            w = RecordWriter(stream, opts["format"], header=skip == 0)
            invalid = failed = False
            for rec in cmd_sweep(sweep, stop, opts["workers"], skip, opts["parallel_points"]):
                w.write(rec)
                if rec["pass"] is None:
                    invalid = True
                elif not rec["pass"]:
                    failed = True
            if invalid:
                status = EXIT_VALIDATION
            elif opts["strict"] and failed:
                status = EXIT_STRICT
        return status
    except OSError as exc:
        print(f"fdpnc: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, ConventionViolation, InvalidSweepAxis, ValueError, TypeError) as exc:
        print(f"fdpnc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    finally:
        if close:
            stream.close()


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
