"""Run configuration: a flat ``key = value`` format with optional sections.

Example::

    command = solve
    seed = 7
    eps0 = 1e-3

    [grid]
    num_points = 256

Keys inside ``[section]`` are addressed as ``section.key``.  Blank lines and
lines starting with ``#`` or ``;`` are ignored.  Parsing collects every
error (unknown key, bad value, missing key) with its line number before
reporting; a missing key is reported on line 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exceptions import PreconditionError
from .grid import is_dyadic
from .rescaling import is_dyadic_reciprocal

COMMANDS = ("solve", "sweep", "probe", "f-term", "norms")


class ConfigError(PreconditionError):
    """All problems found in a configuration text, one per entry of ``errors``."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


# value parsers: raise ValueError with a readable message ----------------------

def _int(s):
    return int(s, 0)


def _nonneg_int(s):
    v = _int(s)
    if v < 0:
        raise ValueError("must be >= 0")
    return v


def _pos_int(s):
    v = _int(s)
    if v < 1:
        raise ValueError("must be >= 1")
    return v


def _pow2(s):
    v = _int(s)
    if not is_dyadic(v) or v < 8:
        raise ValueError("must be a power of two >= 8")
    return v


def _float(s):
    v = float(s)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _pos_float(s):
    v = _float(s)
    if not v > 0:
        raise ValueError("must be positive")
    return v


def _nonneg_float(s):
    v = _float(s)
    if v < 0:
        raise ValueError("must be >= 0")
    return v


def _lambda(s):
    v = _float(s)
    if not is_dyadic_reciprocal(v):
        raise ValueError("lambda must be a dyadic reciprocal")
    return v


def _bool(s):
    t = s.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("must be a boolean")


def _list(item):
    def parse(s):
        parts = [p.strip() for p in s.split(",") if p.strip()]
        if not parts:
            raise ValueError("must be a non-empty comma-separated list")
        return tuple(item(p) for p in parts)
    return parse


def _dyadic_int(s):
    v = _int(s)
    if not is_dyadic(v):
        raise ValueError(f"{v} is not a power of two")
    return v


def _choice(*options):
    def parse(s):
        v = s.strip()
        if v not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return v
    return parse


def _case_id(s):
    from .estimates.catalog import CATALOG

    v = s.strip()
    if v not in CATALOG:
        raise ValueError(f"unknown case {v!r}")
    return v


def _str(s):
    v = s.strip()
    if not v:
        raise ValueError("must not be empty")
    return v


# key -> (parser, default); a default of REQUIRED must be given
REQUIRED = object()
SCHEMA = {
    "command": (_choice(*COMMANDS), REQUIRED),
    "seed": (_nonneg_int, 0),
    "out": (_str, "run"),
    "threads": (_pos_int, None),
    "grid.num_points": (_pow2, 256),
    "grid.period": (_pos_float, 2 * math.pi),
    "grid.t_min": (_float, -2.0),
    "grid.t_max": (_float, 2.0),
    "grid.num_steps": (_pos_int, 512),
    "lambda": (_lambda, None),
    "eps0": (_pos_float, None),
    "data.kind": (_choice("gaussian", "zero"), "gaussian"),
    "data.amplitude": (_nonneg_float, 1.0),
    "data.u_freq": (_int, 2),
    "data.u_width": (_pos_float, 0.4),
    "data.v_width": (_pos_float, 0.5),
    "solve.max_iters": (_pos_int, 20),
    "solve.tol": (_pos_float, 1e-8),
    "solve.reference": (_bool, False),
    "solve.dump_fields": (_bool, False),
    "sweep.cases": (_list(_case_id), None),
    "sweep.trials": (_pos_int, 16),
    "sweep.lambdas": (_list(_lambda), None),
    "sweep.max_n": (_dyadic_int, None),
    "sweep.modes": (_pos_int, None),
    "sweep.doubling": (_bool, True),
    "probe.s1": (_float, None),
    "probe.s2": (_float, None),
    "probe.n_list": (_list(_dyadic_int), (4, 8, 16, 32, 64, 128)),
    "probe.lambda": (_pos_float, 1.0),
    "probe.amplitude": (_pos_float, 1.0),
}

# per-command keys that must be present (alternatives separated by "|")
COMMAND_REQUIRES = {
    "solve": ("lambda|eps0",),
    "sweep": ("sweep.cases",),
    "probe": ("probe.s1", "probe.s2"),
    "f-term": ("lambda",),
    "norms": ("lambda",),
}


@dataclass
class RunConfig:
    values: dict
    lines: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    @property
    def command(self):
        return self.values["command"]

    def with_overrides(self, **kw):
        vals = dict(self.values)
        for k, v in kw.items():
            if v is not None:
                vals[k] = v
        return RunConfig(vals, dict(self.lines))

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(self.values.items())}


def required_keys(command=None):
    keys = [k for k, (_, d) in SCHEMA.items() if d is REQUIRED]
    if command in COMMAND_REQUIRES:
        keys += list(COMMAND_REQUIRES[command])
    return keys


def parse_config(text):
    """Parse and validate; raises ``ConfigError`` listing every problem."""
    errors = []
    raw, lines = {}, {}
    seen = set()  # keys given, valid or not; an invalid value is not also "missing"
    section = ""
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("["):
            if not s.endswith("]") or not s[1:-1].strip():
                errors.append(f"line {no}: malformed section header {s!r}")
                continue
            section = s[1:-1].strip()
            continue
        if "=" not in s:
            errors.append(f"line {no}: expected key = value, got {s!r}")
            continue
        key, value = (p.strip() for p in s.split("=", 1))
        full = f"{section}.{key}" if section else key
        if full not in SCHEMA:
            errors.append(f"line {no}: unknown key {full!r}")
            continue
        if full in seen:
            errors.append(f"line {no}: duplicate key {full!r} (first on line {lines[full]})")
            continue
        parser, _ = SCHEMA[full]
        seen.add(full)
        lines[full] = no
        try:
            raw[full] = parser(value)
        except ValueError as exc:
            errors.append(f"line {no}: {full}: {exc}")
    values = {k: (raw[k] if k in raw else (None if d is REQUIRED else d)) for k, (_, d) in SCHEMA.items()}
    command = raw.get("command")
    for key in required_keys(command):
        if not any(alt in seen for alt in key.split("|")):
            errors.append(f"line 0: missing required key {' or '.join(key.split('|'))!r}")
    if values["grid.t_min"] >= values["grid.t_max"]:
        errors.append(f"line {lines.get('grid.t_max', 0)}: grid.t_max must exceed grid.t_min")
    elif values["grid.t_max"] - values["grid.t_min"] > 4:
        errors.append(f"line {lines.get('grid.t_max', 0)}: time window longer than 4")
    if errors:
        raise ConfigError(errors)
    return RunConfig(values, lines)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
