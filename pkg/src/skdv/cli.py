"""Command-line entry point: ``skdv [--config PATH] [--seed N] [--out DIR] [--threads N]``.

Exit status is 0 on success, 1 when the configuration or a precondition is
invalid and 2 on a numerical failure (divergent iteration, blow-up guard).
Every run directory receives one ``manifest.json``; all other files depend
only on the configuration and the seed.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import logging
import os
import sys
from importlib import metadata
from pathlib import Path

import numpy as np

from .config import ConfigError, parse_config
from .exceptions import GridError, NumericalFailure, PreconditionError
from .grid import SpatialGrid, SpectralDatum, TimeGrid, mixed_norm
from .io import sha256_bytes, sha256_file, write_field, write_json, write_text
from .norms import x_lambda_norm, y_norm, z_norm
from .propagators import airy_flow, compute_F, schrodinger_flow, windowed
from .rescaling import choose_lambda, rescale_data
from .solver import picard_solve, reference_solve, sup_l2_distance

THREADS_ENV = "SKDV_THREADS"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

log = logging.getLogger("skdv")


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def gaussian_data(spatial, amplitude=1.0, u_freq=2, u_width=0.4, v_width=0.5, kind="gaussian"):
    """Gaussian packets centered in the period; u0 carries the carrier e^{i u_freq x}."""
    if kind == "zero":
        return SpectralDatum.zeros(spatial), SpectralDatum.zeros(spatial)
    x = spatial.x
    c = spatial.period / 2
    scale = spatial.period / (2 * np.pi)
    u = amplitude * np.exp(-(((x - c) / (u_width * scale)) ** 2)) * np.exp(1j * u_freq * x / scale)
    v = amplitude * np.exp(-(((x - c) / (v_width * scale)) ** 2))
    return SpectralDatum.from_physical(spatial, u), SpectralDatum.from_physical(spatial, v.astype(complex))


def _data_from(cfg):
    sg = SpatialGrid(cfg["grid.num_points"], cfg["grid.period"])
    return gaussian_data(sg, cfg["data.amplitude"], cfg["data.u_freq"], cfg["data.u_width"],
                         cfg["data.v_width"], cfg["data.kind"])


def _times(cfg):
    return TimeGrid(cfg["grid.t_min"], cfg["grid.t_max"], cfg["grid.num_steps"])


def _rescaled(cfg):
    u0, v0 = _data_from(cfg)
    lam = cfg.get("lambda")
    choice = None
    if lam is None:
        choice = choose_lambda(u0, v0, cfg["eps0"])
        lam = choice.lam
    r = rescale_data(u0, v0, lam)
    info = {"lambda": lam}
    if choice is not None:
        info.update(eps0=cfg["eps0"], u_norm=choice.u_norm, v_norm=choice.v_norm)
    return r, info


# commands -------------------------------------------------------------------

def cmd_solve(cfg, out):
    r, info = _rescaled(cfg)
    times = _times(cfg)
    trace = picard_solve(r.u0, r.v0, r.lam, cfg["solve.max_iters"], cfg["solve.tol"], times)
    report = {"rescaling": info, "trace": trace.to_dict()}
    files = []
    if cfg["solve.reference"]:
        ref_u, ref_v = reference_solve(r.u0, r.v0, r.lam, times)
        mask = np.abs(times.t) <= 1.0
        report["reference"] = {
            "u_distance": sup_l2_distance(trace.u, ref_u, mask),
            "v_distance": sup_l2_distance(trace.v, ref_v, mask),
            "window": [-1.0, 1.0],
        }
    files.append(write_json(out / "solve.json", report))
    if cfg["solve.dump_fields"] and trace.u is not None:
        files.append(write_field(out / "u.bin", trace.u))
        files.append(write_field(out / "v.bin", trace.v))
    if not trace.converged:
        raise NumericalFailure(trace.diagnostic or "Picard iteration did not converge")
    return files


def cmd_sweep(cfg, out):
    from .estimates.catalog import get_case
    from .estimates.sweep import DEFAULT_GRIDS, run_estimate_sweep

    files, summary = [], {}
    max_n = cfg.get("sweep.max_n")
    for cid in cfg["sweep.cases"]:
        case = get_case(cid)
        n_axes = None
        if max_n is not None:
            n_axes = {a: tuple(v for v in vals if not a.startswith("N") or v <= max_n)
                      for a, vals in DEFAULT_GRIDS[cid].items()}
            empty = [a for a, v in n_axes.items() if not v]
            if empty:
                raise PreconditionError(f"sweep.max_n leaves no values on axis {empty[0]} of {cid}")
        rep = run_estimate_sweep(case, cfg.get("sweep.lambdas"), n_axes, cfg["sweep.trials"], cfg["seed"],
                                 cfg.get("sweep.modes"), cfg.get("threads", 1), cfg["sweep.doubling"])
        files.append(write_json(out / f"sweep_{cid}.json", rep))
        files.append(write_text(out / f"sweep_{cid}.csv", rep.to_csv()))
        summary[cid] = {"passed": rep.passed, "global_max": rep.global_max, "slopes": rep.slopes}
    files.append(write_json(out / "sweep_summary.json", summary))
    return files


def cmd_probe(cfg, out):
    from .estimates.probe import sharpness_probe

    rep = sharpness_probe(cfg["probe.s1"], cfg["probe.s2"], cfg["probe.n_list"], cfg["probe.lambda"],
                          cfg["seed"], cfg["probe.amplitude"])
    rows = "N,R,config\n" + "".join(f"{n},{r!r},{c}\n" for n, r, c in zip(rep.N_list, rep.R, rep.config))
    return [write_json(out / "probe.json", rep), write_text(out / "probe.csv", rows)]


def cmd_f_term(cfg, out):
    r, info = _rescaled(cfg)
    times = _times(cfg)
    F = compute_F(r.u0, r.lam, times)
    report = {
        "rescaling": info,
        "sup_t_l2": mixed_norm(F, "time", np.inf, 2),
        "l2_space_time": mixed_norm(F, "time", 2, 2),
        "z_norm": z_norm(F, "lower").to_dict(),
    }
    return [write_json(out / "f_term.json", report), write_field(out / "F.bin", F)]


def cmd_norms(cfg, out):
    r, info = _rescaled(cfg)
    times = _times(cfg)
    u = windowed(schrodinger_flow(r.u0, r.lam, times))
    v = windowed(airy_flow(r.v0, times))
    report = {"rescaling": info, "norms": {}}
    for side in ("lower", "upper"):
        report["norms"][side] = {
            "X_lambda(eta S u0)": x_lambda_norm(u, r.lam, side).to_dict(),
            "Y(eta K v0)": y_norm(v, side).to_dict(),
            "Z(eta K v0)": z_norm(v, side).to_dict(),
        }
    return [write_json(out / "norms.json", report)]


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "probe": cmd_probe, "f-term": cmd_f_term,
            "norms": cmd_norms}


def _manifest(cfg, config_text, files, started, status, error=None):
    return {
        "artifact_version": _version(),
        "config": cfg.to_dict() if cfg is not None else None,
        "config_sha256": sha256_bytes(config_text.encode("utf-8")),
        "started": started,
        "finished": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "exit_status": status,
        "error": error,
        "outputs": {p.name: sha256_file(p) for p in sorted(files)},
    }


def run(cfg, config_text=""):
    """Execute a validated configuration; returns the exit status."""
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    files, status, error = [], EXIT_OK, None
    try:
        files = COMMANDS[cfg.command](cfg, out)
    except NumericalFailure as exc:
        status, error = EXIT_NUMERICAL, {"type": "NumericalFailure", "messages": [str(exc)]}
        files = sorted(p for p in out.iterdir() if p.name not in ("manifest.json", "error.json"))
    except (PreconditionError, GridError) as exc:
        status, error = EXIT_INVALID, {"type": type(exc).__name__, "messages": [str(exc)]}
    if error is not None:
        write_json(out / "error.json", error)
        print(f"error: {'; '.join(error['messages'])}", file=sys.stderr)
    write_json(out / "manifest.json", _manifest(cfg, config_text, files, started, status, error))
    return status


def _threads(flag):
    if flag is not None:
        return flag
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            v = int(env)
            if v >= 1:
                return v
        except ValueError:
            pass
        raise ConfigError([f"environment: {THREADS_ENV} must be a positive integer, got {env!r}"])
    return 1


def build_parser():
    p = argparse.ArgumentParser(prog="skdv", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, help="run configuration file (key = value)")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--out", help="output directory (overrides the configured one)")
    p.add_argument("--threads", type=int, help=f"worker processes (default: ${THREADS_ENV} or 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = parse_config(text)
        if args.seed is not None and args.seed < 0:
            raise ConfigError(["--seed must be >= 0"])
        if args.threads is not None and args.threads < 1:
            raise ConfigError(["--threads must be >= 1"])
        cfg = cfg.with_overrides(seed=args.seed, out=args.out)
        cfg.values["threads"] = _threads(args.threads) if cfg.get("threads") is None or args.threads else cfg["threads"]
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg, text)


if __name__ == "__main__":
    sys.exit(main())
