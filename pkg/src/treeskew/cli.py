"""Command line driver for batch experiments.

Subcommands::

    treeskew decay     per-word coefficient decay over shells (CSV)
    treeskew window    sup window defect over a ball vs certified bound (CSV)
    treeskew gram      Gram matrix of the Gaussian field on a ball (CSV)
    treeskew hs        projection-defect bench on random unitaries (CSV)
    treeskew selftest  run the in-process invariant suites

Configuration comes from flags, optionally layered over a ``--config``
file of ``key=value`` lines (same keys as the flags, underscores instead
of dashes; ``#`` starts a comment).  Flags override the file.  CSV goes
to ``--out`` or stdout; one-line summaries go to stderr so stdout stays
machine-readable.

Exit codes: 0 success, 1 selftest failure, 2 invalid configuration,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import math
import sys
from dataclasses import dataclass, fields, replace
from typing import Iterator, Optional, TextIO

import numpy as np

from . import hs as hs_bench
from .gaussian import gram_matrix
from .koopman import (
    MCBudget,
    SystemSpec,
    almost_invariant_sweep,
    decay_sweep,
    emit_csv,
)
from .profiles import ProfileVector
from .selftest import KNOWN_FAULTS, run_selftest
from .words import ball

EXIT_OK = 0
EXIT_TEST_FAILURE = 1
EXIT_CONFIG = 2
EXIT_IO = 3


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated parameters shared by the experiment subcommands."""

    system: str = "orientation"
    rank: int = 2
    p: float = 0.7
    profile: str = "gaussian"
    max_radius: int = 20
    shell_cap: int = 40
    window_sizes: tuple[int, ...] = (10, 100, 1000)
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    method: str = "auto"
    out: Optional[str] = None


def validate_config(config: ExperimentConfig) -> ExperimentConfig:
    if config.system not in ("orientation", "gaussian"):
        raise ConfigError(f"system must be 'orientation' or 'gaussian', got {config.system!r}")
    if config.rank < 2:
        raise ConfigError(f"rank must be >= 2, got {config.rank}")
    if not 0.0 < config.p < 1.0:
        raise ConfigError(f"p must lie strictly between 0 and 1, got {config.p}")
    parse_profile(config.profile)
    if not 0 <= config.max_radius <= 20:
        raise ConfigError(f"max_radius must lie in [0, 20], got {config.max_radius}")
    if config.shell_cap < 1:
        raise ConfigError(f"shell_cap must be >= 1, got {config.shell_cap}")
    if not config.window_sizes or any(n < 1 for n in config.window_sizes):
        raise ConfigError(f"window_sizes must be positive integers, got {config.window_sizes}")
    if config.samples < 1000:
        raise ConfigError(f"samples must be >= 1000, got {config.samples}")
    if config.seed < 0:
        raise ConfigError(f"seed must be >= 0, got {config.seed}")
    if config.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {config.workers}")
    if config.method not in ("auto", "exact", "mc"):
        raise ConfigError(f"method must be auto, exact or mc, got {config.method!r}")
    return config


def parse_profile(text: str) -> ProfileVector:
    """Parse a profile string: gaussian, cauchy, window:N, indicator:a,b."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "gaussian" and not arg:
            return ProfileVector.gaussian()
        if kind == "cauchy" and not arg:
            return ProfileVector.cauchy()
        if kind == "window":
            return ProfileVector.window(int(arg))
        if kind == "indicator":
            lo, _, hi = arg.partition(",")
            return ProfileVector.indicator(float(lo), float(hi))
    except ValueError as exc:
        raise ConfigError(f"profile {text!r}: {exc}") from exc
    raise ConfigError(
        f"profile must be gaussian, cauchy, window:N or indicator:a,b, got {text!r}"
    )


def _parse_window_sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"window_sizes {text!r}: {exc}") from exc


_FIELD_PARSERS = {
    "system": str,
    "rank": int,
    "p": float,
    "profile": str,
    "max_radius": int,
    "shell_cap": int,
    "window_sizes": _parse_window_sizes,
    "samples": int,
    "seed": int,
    "workers": int,
    "method": str,
    "out": str,
}


def serialize_config(config: ExperimentConfig) -> str:
    """Render a config as the key=value text the --config flag reads back."""
    lines = []
    for field in fields(ExperimentConfig):
        value = getattr(config, field.name)
        if value is None:
            continue
        if field.name == "window_sizes":
            value = ",".join(str(n) for n in value)
        lines.append(f"{field.name}={value}")
    return "\n".join(lines) + "\n"


def parse_config(text: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Apply key=value lines on top of ``base`` (defaults if omitted)."""
    config = base if base is not None else ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw!r}")
        if key not in _FIELD_PARSERS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        try:
            config = replace(config, **{key: _FIELD_PARSERS[key](value)})
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"config line {lineno}: {key}: {exc}") from exc
    return config


def _system_spec(config: ExperimentConfig) -> SystemSpec:
    if config.system == "orientation":
        return SystemSpec("orientation", p=config.p, rank=config.rank)
    return SystemSpec("gaussian", rank=config.rank)


@contextlib.contextmanager
def _open_out(out: Optional[str]) -> Iterator[TextIO]:
    if out is None:
        yield sys.stdout
    else:
        with open(out, "w", newline="") as fh:
            yield fh


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def cmd_decay(config: ExperimentConfig) -> int:
    validate_config(config)
    system = _system_spec(config)
    profile = parse_profile(config.profile)
    budget = MCBudget(config.samples, config.seed, config.workers)
    curve = decay_sweep(
        system,
        profile,
        config.max_radius,
        per_shell_cap=config.shell_cap,
        budget=budget,
        method=config.method,
    )
    with _open_out(config.out) as fh:
        emit_csv(curve, fh)
    rows = curve.rows()
    print(
        f"decay: {system.label()} {profile.label()} shells=1..{config.max_radius} "
        f"points={len(curve.points)} last_mean={rows[-1].mean:.6g}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_window(config: ExperimentConfig) -> int:
    validate_config(config)
    system = _system_spec(config)
    table = almost_invariant_sweep(system, config.max_radius, config.window_sizes)
    with _open_out(config.out) as fh:
        emit_csv(table, fh)
    worst = max((row.sup_defect for row in table.rows), default=0.0)
    print(
        f"window: {system.label()} ball_radius={config.max_radius} "
        f"n={','.join(str(r.n) for r in table.rows)} worst_defect={worst:.6g}",
        file=sys.stderr,
    )
    return EXIT_OK


_GRAM_RADIUS_LIMIT = 4


def cmd_gram(config: ExperimentConfig) -> int:
    validate_config(config)
    if config.max_radius > _GRAM_RADIUS_LIMIT:
        raise ConfigError(
            f"max_radius: gram emits a dense matrix, so the ball radius is "
            f"capped at {_GRAM_RADIUS_LIMIT}; got {config.max_radius}"
        )
    words = ball(config.max_radius, config.rank)
    system = gram_matrix(words)
    with _open_out(config.out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "j", "word_i", "word_j", "value"])
        for i, wi in enumerate(words):
            for j, wj in enumerate(words):
                writer.writerow([i, j, str(wi), str(wj), _fmt(system.gram[i, j])])
    print(
        f"gram: radius={config.max_radius} size={len(words)} "
        f"min_eig={system.min_eigenvalue():.6g} jitter={system.jitter:g} "
        f"reconstruction_error={system.reconstruction_error():.3g}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_hs(config: ExperimentConfig) -> int:
    validate_config(config)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    worst = 0.0
    with _open_out(config.out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trial", "dim", "defect", "formula", "residual"])
        for trial in range(config.samples):
            dim = 2 + trial % 15
            u = hs_bench.random_unitary(dim, rng)
            xi = hs_bench.random_unit_vector(dim, rng)
            defect = hs_bench.projection_defect(u, xi)
            formula = hs_bench.projection_defect_formula(u, xi)
            residual = abs(defect - formula)
            worst = max(worst, residual)
            writer.writerow(
                [trial, dim, _fmt(defect), _fmt(formula), _fmt(residual)]
            )
    print(
        f"hs: trials={config.samples} dims=2..16 max_residual={worst:.3g}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_selftest(verbosity: int = 1, inject_fault: Optional[str] = None) -> int:
    code = run_selftest(verbosity=verbosity, inject_fault=inject_fault)
    return EXIT_OK if code == 0 else EXIT_TEST_FAILURE


_COMMANDS = {
    "decay": cmd_decay,
    "window": cmd_window,
    "gram": cmd_gram,
    "hs": cmd_hs,
}

_COMMAND_DEFAULTS = {
    "decay": {},
    "window": {"max_radius": 4},
    "gram": {"max_radius": 3},
    "hs": {"samples": 1000},
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="key=value config file")
    parser.add_argument("--system", choices=["orientation", "gaussian"])
    parser.add_argument("--rank", type=int, metavar="K")
    parser.add_argument("--p", type=float, help="orientation bias toward the basepoint")
    parser.add_argument(
        "--profile", metavar="SPEC", help="gaussian | cauchy | window:N | indicator:a,b"
    )
    parser.add_argument(
        "--max-radius", type=int, metavar="R", help="shell or ball radius (<= 20)"
    )
    parser.add_argument(
        "--shell-cap", type=int, metavar="CAP", help="max words evaluated per shell"
    )
    parser.add_argument(
        "--n",
        dest="window_sizes",
        metavar="N1,N2,...",
        help="window half-widths for the window sweep",
    )
    parser.add_argument("--samples", type=int, metavar="N")
    parser.add_argument("--seed", type=int, metavar="SEED")
    parser.add_argument("--workers", type=int, metavar="W")
    parser.add_argument("--method", choices=["auto", "exact", "mc"])
    parser.add_argument("--out", metavar="FILE", help="CSV destination (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeskew",
        description="Coefficient-decay and almost-invariance experiments "
        "for skew products over free-group trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("decay", "coefficient decay over shells"),
        ("window", "window defect sweep over a ball"),
        ("gram", "Gram matrix of the Gaussian field on a ball"),
        ("hs", "projection-defect bench on random unitaries"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        _add_config_flags(cmd)
    st = sub.add_parser("selftest", help="run the invariant suites")
    st.add_argument("--verbosity", type=int, default=1, choices=[0, 1, 2])
    st.add_argument(
        "--fault",
        choices=list(KNOWN_FAULTS),
        help="inject a known fault; the run must then fail",
    )
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    config = replace(ExperimentConfig(), **_COMMAND_DEFAULTS[args.command])
    if args.config is not None:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise _IOFailure(f"config file {args.config!r}: {exc}") from exc
        config = parse_config(text, base=config)
    overrides = {}
    for field in fields(ExperimentConfig):
        value = getattr(args, field.name, None)
        if value is None:
            continue
        if field.name == "window_sizes" and isinstance(value, str):
            value = _parse_window_sizes(value)
        overrides[field.name] = value
    return replace(config, **overrides)


class _IOFailure(OSError):
    pass


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return cmd_selftest(args.verbosity, args.fault)
    try:
        config = _config_from_args(args)
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
