# utils/report.py
"""Machine-readable verification reports and the shared command plumbing.

A report is a list of named checks (measured vs expected within a tolerance)
plus free-form data. It serialises to deterministic JSON: keys are sorted and
the only run-dependent field is ``runtime_ms``.
"""
from dataclasses import dataclass, field
import json
import logging
import math
import os
import time
from pathlib import Path

import click
import numpy as np

from extensions import console
from models import DomainSpec, Stencil
from utils.domains import make_domain, parse_kind
from utils.errors import CartanHartogsError

log = logging.getLogger(__name__)

DEFAULT_SEED: int = int(os.getenv("CH_SEED", "7"))
DEFAULT_SAMPLES: int = int(os.getenv("CH_SAMPLES", "20000"))

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


# ---------------- JSON helpers ----------------
def json_safe(value):
    """Plain JSON types for numpy scalars/arrays, complex numbers and tuples."""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def within(measured: float, expected: float, tolerance: float, relative: bool) -> bool:
    """|measured − expected| <= tolerance, or <= tolerance·|expected| when relative."""
    if not (math.isfinite(measured) and math.isfinite(expected)):
        return False
    bound = tolerance * abs(expected) if relative and expected != 0 else tolerance
    return abs(measured - expected) <= bound


# ---------------- Report model ----------------
@dataclass
class Check:
    name: str
    measured: float
    expected: float
    tolerance: float
    relative: bool = False
    gated: bool = True
    passed: bool = False

    def to_dict(self):
        return {
            "name": self.name,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "relative": self.relative,
            "gated": self.gated,
            "pass": self.passed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Check":
        return cls(
            name=data["name"],
            measured=data["measured"],
            expected=data["expected"],
            tolerance=data["tolerance"],
            relative=data.get("relative", False),
            gated=data.get("gated", True),
            passed=data["pass"],
        )


@dataclass
class VerificationReport:
    command: str
    params: dict
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    seed: int | None = None
    runtime_ms: int = 0
    error: str | None = None
    # --tol overrides; not serialised
    tolerances: dict = field(default_factory=dict, repr=False, compare=False)

    def check(self, name: str, measured, expected, tolerance: float,
              relative: bool = False, gated: bool = True) -> Check:
        """Record a check; a ``--tol name=value`` override replaces the default tolerance."""
        tolerance = float(self.tolerances.get(name, tolerance))
        measured, expected = float(measured), float(expected)
        entry = Check(name, measured, expected, tolerance, relative, gated,
                      within(measured, expected, tolerance, relative))
        self.checks.append(entry)
        if not entry.passed:
            level = logging.ERROR if gated else logging.WARNING
            log.log(level, "check %s: measured %.10g, expected %.10g (tol %g%s)",
                    name, measured, expected, tolerance, " rel" if relative else "")
        return entry

    def add_data(self, key: str, value):
        self.data[key] = json_safe(value)

    @property
    def failing(self) -> list[str]:
        return [c.name for c in self.checks if c.gated and not c.passed]

    @property
    def ok(self) -> bool:
        return self.error is None and not self.failing

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.ok else EXIT_FAILED

    def to_dict(self):
        out = {
            "command": self.command,
            "params": json_safe(self.params),
            "checks": [c.to_dict() for c in self.checks],
            "data": self.data,
            "seed": self.seed,
            "runtime_ms": self.runtime_ms,
            "ok": self.ok,
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        return cls(
            command=data["command"],
            params=data["params"],
            checks=[Check.from_dict(c) for c in data.get("checks", [])],
            data=data.get("data", {}),
            seed=data.get("seed"),
            runtime_ms=data.get("runtime_ms", 0),
            error=data.get("error"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))


def emit(report: VerificationReport, out: str | None = None):
    """Write the report to ``out`` (or stdout) and name failing checks on stderr."""
    text = report.to_json()
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)
    if report.error is not None:
        console.print(f"[red]error:[/red] {report.error}")
    elif report.failing:
        console.print(f"[red]failed checks:[/red] {', '.join(report.failing)}")


# ---------------- Argument parsing ----------------
class DomainParam(click.ParamType):
    """``typeI:p,q`` etc. → DomainSpec; invalid kinds are usage errors (exit 2)."""
    name = "kind"

    def convert(self, value, param, ctx):
        if isinstance(value, DomainSpec):
            return value
        try:
            return make_domain(parse_kind(value))
        except CartanHartogsError as e:
            self.fail(f"invalid kind: {e}", param, ctx)


DOMAIN = DomainParam()


def parse_floats(text: str, param: str = "value") -> list[float]:
    try:
        return [float(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}", param_hint=param)


def parse_point(text: str, count: int, param: str = "--point") -> np.ndarray:
    """``count`` complex coordinates from ``re,re,…`` (real parts) or ``re,im,re,im,…``."""
    values = parse_floats(text, param)
    if len(values) == count:
        return np.asarray(values, dtype=complex)
    if len(values) == 2 * count:
        pairs = np.asarray(values).reshape(count, 2)
        return pairs[:, 0] + 1j * pairs[:, 1]
    raise click.BadParameter(
        f"expected {count} real parts or {2 * count} re,im values, got {len(values)}", param_hint=param
    )


def parse_tolerances(items) -> dict:
    """``NAME=VALUE`` pairs from repeated ``--tol`` flags."""
    out = {}
    for item in items or ():
        name, sep, value = item.rpartition("=")
        if not sep or not name:
            raise click.BadParameter(f"expected NAME=VALUE, got {item!r}", param_hint="--tol")
        try:
            tol = float(value)
        except ValueError:
            raise click.BadParameter(f"tolerance for {name} is not a number: {value!r}", param_hint="--tol")
        if not tol >= 0:
            raise click.BadParameter(f"tolerance for {name} must be >= 0", param_hint="--tol")
        out[name] = tol
    return out


def common_options(samples: int = DEFAULT_SAMPLES):
    """--seed, --samples, --fd-step, --richardson, --out and --tol for a command."""
    def decorator(f):
        options = [
            click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True, help="Sampler seed."),
            click.option("--samples", type=click.IntRange(min=1), default=samples, show_default=True,
                         help="Monte Carlo sample count."),
            click.option("--fd-step", type=float, default=None, help="Finite-difference step (default CH_FD_STEP)."),
            click.option("--richardson/--no-richardson", default=None, help="One Richardson level on/off."),
            click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                         help="Write the JSON report here instead of stdout."),
            click.option("--tol", multiple=True, metavar="NAME=VALUE", help="Override a check tolerance."),
        ]
        for option in reversed(options):
            f = option(f)
        return f
    return decorator


def quad_option(f):
    return click.option("--quad", type=click.Choice(["radial", "mc"]), default=None,
                        help="Quadrature: radial rule (ball bases) or Monte Carlo. Default radial on balls.")(f)


def resolve_quad(choice: str | None, spec: DomainSpec) -> str:
    """The quadrature kind for ``spec``; a radial rule on a non-ball base is a usage error."""
    if choice is None:
        return "radial" if spec.is_ball else "mc"
    if choice == "radial" and not spec.is_ball:
        raise click.BadParameter(f"radial rules need a ball base, got {spec.kind}", param_hint="--quad")
    return choice


def make_stencil(fd_step: float | None, richardson: bool | None) -> Stencil:
    stencil = Stencil()
    try:
        return Stencil(
            step=stencil.step if fd_step is None else fd_step,
            richardson=stencil.richardson if richardson is None else richardson,
        )
    except CartanHartogsError as e:
        raise click.BadParameter(str(e), param_hint="--fd-step")


def run_report(command: str, params: dict, body, *, seed: int | None = None,
               tol=(), out: str | None = None) -> VerificationReport:
    """Run ``body(report)``, turn toolkit errors into an error report, emit, exit."""
    report = VerificationReport(command=command, params=json_safe(params), seed=seed,
                                tolerances=parse_tolerances(tol))
    start = time.perf_counter()
    try:
        body(report)
    except CartanHartogsError as e:
        log.error("%s failed: %s", command, e)
        report.error = f"{type(e).__name__}: {e}"
    report.runtime_ms = int(round((time.perf_counter() - start) * 1000))
    emit(report, out)
    click.get_current_context().exit(report.exit_code)
    return report
