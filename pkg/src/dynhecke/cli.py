"""Batch verification front end.

Reads an optional flat ``key = value`` config file, applies command-line
overrides, runs the selected identity suites against one root datum, and
emits a JSON report.  The report body is deterministic for a fixed config
(wall-clock timing lives outside the body), residuals are serialized in
scientific notation with 17 significant digits, and the exit status is the
contract: 0 all identities pass, 1 at least one failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from .roots import build_root_datum
from .suites import SUITE_NAMES, SUITE_RUNNERS, Record, catalog_entries
from .theta import ThetaParams

SCHEMA = "dynhecke-report/1"

DEFAULT_H_VALUES = (0.2173 + 0.1409j, -0.1351 + 0.2114j)


class ConfigError(ValueError):
    """Invalid configuration; carries the offending field path."""

    def __init__(self, fieldname: str, message: str):
        self.fieldname = fieldname
        super().__init__(f"{fieldname}: {message}")


@dataclass
class RunConfig:
    cartan_label: str = "A2"
    isogeny_tag: str = "adjoint"
    tau: complex = 0.75j
    h_values: tuple[complex, ...] = DEFAULT_H_VALUES
    truncation: int = 64
    tol: float | None = None
    seeds: tuple[int, ...] = (0, 1, 2)
    samples_per_identity: int = 20
    suites: tuple[str, ...] = SUITE_NAMES
    negative_control: bool = False

    def validate(self) -> None:
        if complex(self.tau).imag <= 0:
            raise ConfigError("tau", f"Im(tau) must be positive, got {self.tau}")
        if self.truncation < 1:
            raise ConfigError("truncation", "must be >= 1")
        if self.tol is not None and self.tol <= 0:
            raise ConfigError("tol", "must be positive")
        if not self.seeds:
            raise ConfigError("seeds", "need at least one seed")
        if self.samples_per_identity < 1:
            raise ConfigError("samples", "need at least one sample per identity")
        if not self.suites:
            raise ConfigError("suites", "need at least one suite")
        for s in self.suites:
            if s not in SUITE_NAMES:
                raise ConfigError("suites", f"unknown suite {s!r}; valid: {SUITE_NAMES}")
        if not self.h_values:
            raise ConfigError("h", "need at least one hbar value")
        try:
            build_root_datum(self.cartan_label, self.isogeny_tag)
        except ValueError as exc:
            raise ConfigError("type", str(exc)) from exc

    def echo(self) -> dict:
        return {
            "cartan_label": self.cartan_label,
            "isogeny_tag": self.isogeny_tag,
            "tau": str(complex(self.tau)),
            "h_values": [str(complex(h)) for h in self.h_values],
            "truncation": self.truncation,
            "tol": self.tol,
            "seeds": list(self.seeds),
            "samples_per_identity": self.samples_per_identity,
            "suites": list(self.suites),
            "negative_control": self.negative_control,
        }


@dataclass
class SuiteReport:
    config: RunConfig
    records: list[Record] = field(default_factory=list)
    wall_clock_seconds: float = 0.0

    @property
    def overall_pass(self) -> bool:
        return all(r.passed for r in self.records)

    def body(self) -> dict:
        return {
            "config": self.config.echo(),
            "overall_pass": self.overall_pass,
            "records": [
                {
                    "name": r.name,
                    "anchor": r.anchor,
                    "max_residual": _sci(r.max_residual),
                    "threshold": _sci(r.threshold),
                    "pass": r.passed,
                    **({"witness": r.witness} if r.witness else {}),
                    **({"error": r.error} if r.error else {}),
                }
                for r in sorted(self.records, key=lambda r: r.name)
            ],
        }

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA,
            "body": self.body(),
            "wall_clock_seconds": round(self.wall_clock_seconds, 3),
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def _sci(x: float) -> str:
    return f"{x:.16e}"


def run(config: RunConfig) -> SuiteReport:
    """Execute the selected suites; one crash is isolated to one record."""
    config.validate()
    params = ThetaParams(tau=complex(config.tau), truncation=config.truncation)
    rd = build_root_datum(config.cartan_label, config.isogeny_tag)
    report = SuiteReport(config)
    start = time.perf_counter()
    for suite in config.suites:
        runner = SUITE_RUNNERS[suite]
        try:
            report.records.extend(runner(config, params, rd))
        except Exception as exc:  # noqa: BLE001 - crash isolation is the contract
            report.records.append(
                Record(
                    f"{suite}:crashed",
                    "",
                    float("inf"),
                    0.0,
                    False,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    report.wall_clock_seconds = time.perf_counter() - start
    return report


def list_identities() -> str:
    """The identity catalog: one stable line per verifiable identity."""
    lines = [f"{e.name:28s} [{e.suite}] threshold {e.threshold:g} :: {e.anchor}" for e in catalog_entries()]
    return "\n".join(lines)


def parse_complex(text: str, fieldname: str = "value") -> complex:
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise ConfigError(fieldname, f"cannot parse complex number from {text!r}") from exc


def load_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}", f"expected key = value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _config_from_sources(file_values: dict[str, str], args: argparse.Namespace) -> RunConfig:
    config = RunConfig()

    def pick(key: str, flag_value):
        if flag_value is not None:
            return flag_value
        return file_values.get(key)

    label = pick("type", args.type)
    if label is not None:
        config.cartan_label = label
    isogeny = pick("isogeny", getattr(args, "isogeny", None))
    if isogeny is not None:
        config.isogeny_tag = isogeny
    tau = pick("tau", args.tau)
    if tau is not None:
        config.tau = parse_complex(tau, "tau")
    h = pick("h", args.h)
    if h is not None:
        config.h_values = tuple(parse_complex(part, "h") for part in str(h).split(",") if part.strip())
    seeds = pick("seeds", args.seeds)
    if seeds is not None:
        try:
            config.seeds = tuple(int(s) for s in str(seeds).split(",") if s.strip())
        except ValueError as exc:
            raise ConfigError("seeds", f"expected comma-separated integers, got {seeds!r}") from exc
    samples = pick("samples", args.samples)
    if samples is not None:
        try:
            config.samples_per_identity = int(samples)
        except ValueError as exc:
            raise ConfigError("samples", f"expected an integer, got {samples!r}") from exc
    truncation = pick("truncation", args.truncation)
    if truncation is not None:
        try:
            config.truncation = int(truncation)
        except ValueError as exc:
            raise ConfigError("truncation", f"expected an integer, got {truncation!r}") from exc
    tol = pick("tol", args.tol)
    if tol is not None:
        try:
            config.tol = float(tol)
        except ValueError as exc:
            raise ConfigError("tol", f"expected a float, got {tol!r}") from exc
    suites = pick("suites", args.suites)
    if suites is not None:
        config.suites = tuple(s.strip() for s in str(suites).split(",") if s.strip())
    negative = file_values.get("negative_control")
    if negative is not None:
        low = negative.lower()
        if low not in _TRUE | _FALSE:
            raise ConfigError("negative_control", f"expected a boolean, got {negative!r}")
        config.negative_control = low in _TRUE
    if args.negative_control:
        config.negative_control = True
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynhecke",
        description="Run numeric identity suites for the dynamical elliptic operator algebra.",
    )
    parser.add_argument("config", nargs="?", help="flat key = value config file")
    parser.add_argument("--type", help="Cartan type label (A1, A1xA1, A2, A3, B2, C2, G2)")
    parser.add_argument("--isogeny", help="adjoint or simply_connected")
    parser.add_argument("--tau", help="modular parameter, e.g. 0.75j")
    parser.add_argument("--h", help="comma-separated hbar values, e.g. 0.21+0.14j,-0.13+0.21j")
    parser.add_argument("--suites", help=f"comma-separated subset of {','.join(SUITE_NAMES)}")
    parser.add_argument("--seeds", help="comma-separated integer seeds")
    parser.add_argument("--samples", help="sample points per identity")
    parser.add_argument("--truncation", help="theta product truncation")
    parser.add_argument("--tol", help="override identity tolerance")
    parser.add_argument("--negative-control", action="store_true", help="corrupt a generator; the run must fail")
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument("--list", action="store_true", help="print the identity catalog and exit")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list:
        print(list_identities())
        return 0
    try:
        file_values = load_config_file(args.config) if args.config else {}
        config = _config_from_sources(file_values, args)
        config.validate()
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    report = run(config)
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if report.overall_pass else 1


if __name__ == "__main__":
    sys.exit(main())
