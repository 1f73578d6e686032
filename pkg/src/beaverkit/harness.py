"""Scenario-driven verification of machines against arithmetic oracles.

A scenario pins a machine (composed, or one section standalone), an
entry state, an initial tape, budgets, and exactly one expectation.
Scenario files hold one stanza per scenario::

    scenario <name>
    machine <manifestFile> | <manifestFile>#<sectionLabel> | <tableFile>
    entry <state>                      # optional, default: machine start
    tape blank | unary <ints...> | window <startCell> <symbols...>
    head abs <n> | block <i> left|right|after     # optional, default abs 0
    limit steps=<n> [cells=<n>]                   # optional
    expect oracle <name> <args...>
    expect snapshot <a>..<b> <symbols...>
    expect halted [state] | nothalt
    expect transfer <state>[@<k>] [values <ints...>]

``transfer S@k`` stops at the k-th entry into S; entering an undefined
or external name (a standalone section's NM exit) counts as reaching it.
Report lines are ``PASS|FAIL <name> steps=<n> [observed=.. expected=..]``.
"""

from __future__ import annotations

import concurrent.futures
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import oracles
from .engine import HALTED, WATCH, RunLimits, RunOutcome, run
from .machine import HALT, NEXT_MACHINE, Machine
from .tape import Configuration, Tape
from .compose import compose, load_manifest
from .tables import build_machine, load_table


@dataclass(frozen=True)
class OracleExpect:
    name: str
    args: tuple[int, ...]


@dataclass(frozen=True)
class SnapshotExpect:
    start: int
    stop: int
    symbols: tuple[int, ...]


@dataclass(frozen=True)
class OutcomeExpect:
    kind: str  # "halted" or "nothalt"
    state: str | None = None


@dataclass(frozen=True)
class TransferExpect:
    state: str
    values: tuple[int, ...] | None = None
    occurrence: int = 1


Expectation = OracleExpect | SnapshotExpect | OutcomeExpect | TransferExpect


@dataclass
class Scenario:
    name: str
    machine_ref: str
    entry: str | None = None
    tape_blocks: tuple[int, ...] | None = None
    tape_window: tuple[int, tuple[int, ...]] | None = None
    head: tuple = ("abs", 0)
    limits: RunLimits = field(default_factory=RunLimits)
    expect: Expectation = OutcomeExpect("nothalt")

    def build_tape(self) -> Tape:
        if self.tape_blocks is not None:
            layout = oracles.UnaryLayout(blocks=self.tape_blocks, head_block=None)
            tape = oracles.encode_tape(layout)
        elif self.tape_window is not None:
            start, symbols = self.tape_window
            tape = Tape.from_symbols(list(symbols), start_cell=start)
        else:
            tape = Tape()
        kind = self.head[0]
        if kind == "abs":
            tape.head = self.head[1]
        elif kind == "block":
            if self.tape_blocks is None:
                raise ValueError(f"{self.name}: head block rule needs a unary tape")
            layout = oracles.UnaryLayout(
                blocks=self.tape_blocks, head_block=self.head[1], head_edge=self.head[2]
            )
            tape.head = layout.head_position()
        else:
            raise ValueError(f"{self.name}: unknown head rule {self.head!r}")
        return tape


@dataclass
class Report:
    name: str
    passed: bool
    steps: int
    wall_ms: float
    observed: str = ""
    expected: str = ""

    def line(self, deterministic: bool = False) -> str:
        status = "PASS" if self.passed else "FAIL"
        s = f"{status} {self.name} steps={self.steps}"
        if not deterministic:
            s += f" wall_ms={self.wall_ms:.1f}"
        if not self.passed:
            s += f" observed={self.observed} expected={self.expected}"
        return s


def _reached(outcome: RunOutcome, state: str) -> bool:
    if outcome.kind == WATCH and outcome.watched_state == state:
        return True
    return outcome.kind == HALTED and outcome.halting_state == state


def _is_true_halt(outcome: RunOutcome) -> bool:
    """Halted somewhere other than a section's NM exit."""
    return outcome.kind == HALTED and outcome.halting_state != NEXT_MACHINE


def _kf_states(machine: Machine, alias: dict | None = None) -> tuple[str, ...]:
    names = {s for s in machine.states if s == "Kf" or s.endswith(".Kf")}
    if alias:
        names.update(v for k, v in alias.items() if k == "Kf" or k.endswith(".Kf"))
    return tuple(sorted(names))


def execute_scenario(
    scenario: Scenario,
    machine: Machine,
    *,
    profile: set | None = None,
    alias: dict | None = None,
) -> RunOutcome:
    """Run a scenario's machine exactly as its expectation demands.

    Transfer expectations stop at the k-th entry into the named state;
    the square-check oracle watches the factorial-return states; all
    other expectations run to halt or budget.  `alias` translates entry
    and watch state names (used when judging merged machines).
    """
    alias = alias or {}
    entry = scenario.entry or machine.start
    entry = alias.get(entry, entry)
    config = Configuration(entry, scenario.build_tape())
    exp = scenario.expect
    if isinstance(exp, TransferExpect):
        watch_state = alias.get(exp.state, exp.state)
        outcome = None
        for _ in range(exp.occurrence):
            outcome = run(
                machine, config, scenario.limits, watch=(watch_state,), profile=profile
            )
            config = outcome.config
            if outcome.kind != WATCH:
                break
        return outcome
    if isinstance(exp, OracleExpect) and exp.name == "brocard":
        kf = _kf_states(machine, alias)
        return run(machine, config, scenario.limits, watch=kf, profile=profile)
    return run(machine, config, scenario.limits, profile=profile)


def run_scenario(scenario: Scenario, resolver) -> Report:
    t0 = time.perf_counter()
    machine = resolver(scenario.machine_ref)
    exp = scenario.expect

    def report(passed, outcome, observed="", expected=""):
        return Report(
            scenario.name,
            passed,
            outcome.steps,
            (time.perf_counter() - t0) * 1000.0,
            observed,
            expected,
        )

    outcome = execute_scenario(scenario, machine)
    if isinstance(exp, TransferExpect):
        hit = _reached(outcome, exp.state)
        if not hit:
            return report(False, outcome, observed=f"{outcome.kind}:{outcome.config.state}",
                          expected=f"transfer:{exp.state}")
        if exp.values is None:
            return report(True, outcome)
        got = outcome.config.tape.blocks()
        return report(tuple(got) == tuple(exp.values), outcome,
                      observed=str(got), expected=str(list(exp.values)))

    if isinstance(exp, OracleExpect):
        return _judge_oracle(scenario, outcome, exp, report)

    if isinstance(exp, SnapshotExpect):
        got = outcome.config.tape.snapshot(exp.start, exp.stop)
        return report(got == exp.symbols, outcome,
                      observed=" ".join(map(str, got)),
                      expected=" ".join(map(str, exp.symbols)))
    if isinstance(exp, OutcomeExpect):
        if exp.kind == "halted":
            ok = _is_true_halt(outcome) and (exp.state is None or outcome.halting_state == exp.state)
            return report(ok, outcome, observed=f"{outcome.kind}:{outcome.config.state}",
                          expected="halted" + (f":{exp.state}" if exp.state else ""))
        ok = outcome.kind != HALTED
        return report(ok, outcome, observed=outcome.kind, expected="nothalt")
    raise TypeError(f"unknown expectation {exp!r}")


def _judge_oracle(scenario, outcome, exp, report):
    name, args = exp.name, exp.args
    if name in ("square", "factorial_plus_one", "fermat"):
        (x,) = args
        want = {
            "square": [x * x + 1],
            "factorial_plus_one": [oracles.factorial_plus_one(x)],
            "fermat": [oracles.fermat_number(x)],
        }[name]
        got = outcome.config.tape.blocks()
        return report(outcome.kind == HALTED and got == want, outcome,
                      observed=f"{outcome.kind}:{got}", expected=f"halted:{want}")
    if name == "prime":
        (n,) = args
        if oracles.is_prime(n):
            ok = _is_true_halt(outcome)
            return report(ok, outcome, observed=f"{outcome.kind}:{outcome.config.state}",
                          expected="halted (prime)")
        got = outcome.config.tape.blocks()
        ok = outcome.kind == HALTED and outcome.halting_state == NEXT_MACHINE and got == [n - 1]
        return report(ok, outcome, observed=f"{outcome.kind}:{outcome.config.state}:{got}",
                      expected=f"transfer:{NEXT_MACHINE}:[{n - 1}]")
    if name == "brocard":
        (m,) = args
        square, _ = oracles.is_perfect_square(m)
        if square:
            ok = outcome.kind == HALTED and outcome.halting_state == HALT
            return report(ok, outcome, observed=f"{outcome.kind}:{outcome.config.state}",
                          expected="halted (square)")
        got = outcome.config.tape.blocks()
        ok = outcome.kind == WATCH and got == [m - 1]
        return report(ok, outcome, observed=f"{outcome.kind}:{got}",
                      expected=f"transfer:Kf:[{m - 1}]")
    raise ValueError(f"unknown oracle {name!r}")


def run_suite(scenarios, resolver, jobs: int = 1):
    """All reports in scenario order plus a summary dict."""
    if jobs <= 1:
        reports = [run_scenario(s, resolver) for s in scenarios]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda s: run_scenario(s, resolver), scenarios))
    passed = sum(1 for r in reports if r.passed)
    summary = {
        "total": len(reports),
        "passed": passed,
        "failed": len(reports) - passed,
        "reports": [
            {"name": r.name, "passed": r.passed, "steps": r.steps} for r in reports
        ],
    }
    return reports, summary


def diff_tape(observed: Tape, expected: tuple[int, ...], window_start: int) -> int | None:
    """First cell where the window diverges from `expected`, else None."""
    for i, want in enumerate(expected):
        if observed.read(window_start + i) != want:
            return window_start + i
    return None


def _strip_comment(raw: str) -> str:
    """Drop a trailing comment; '#' only opens one at the line start or
    after whitespace, so section refs like path.manifest#label survive."""
    if raw.lstrip().startswith("#"):
        return ""
    for i, ch in enumerate(raw):
        if ch == "#" and i > 0 and raw[i - 1] in " \t":
            return raw[:i]
    return raw


def parse_scenarios(text: str) -> list[Scenario]:
    out: list[Scenario] = []
    current: Scenario | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        if key == "scenario":
            current = Scenario(name=parts[1], machine_ref="")
            out.append(current)
            continue
        if current is None:
            raise ValueError(f"line {lineno}: directive before any scenario")
        if key == "machine":
            current.machine_ref = parts[1]
        elif key == "entry":
            current.entry = parts[1]
        elif key == "tape":
            if parts[1] == "blank":
                pass
            elif parts[1] == "unary":
                current.tape_blocks = tuple(int(x) for x in parts[2:])
            elif parts[1] == "window":
                current.tape_window = (int(parts[2]), tuple(int(x) for x in parts[3:]))
            else:
                raise ValueError(f"line {lineno}: unknown tape kind {parts[1]!r}")
        elif key == "head":
            if parts[1] == "abs":
                current.head = ("abs", int(parts[2]))
            elif parts[1] == "block":
                current.head = ("block", int(parts[2]), parts[3])
            else:
                raise ValueError(f"line {lineno}: unknown head rule {parts[1]!r}")
        elif key == "limit":
            kw = {}
            for tok in parts[1:]:
                k, _, v = tok.partition("=")
                if k == "steps":
                    kw["max_steps"] = int(v)
                elif k == "cells":
                    kw["max_support_cells"] = int(v)
                else:
                    raise ValueError(f"line {lineno}: unknown limit {k!r}")
            current.limits = RunLimits(**kw)
        elif key == "expect":
            current.expect = _parse_expect(parts[1:], lineno)
        else:
            raise ValueError(f"line {lineno}: unknown directive {key!r}")
    for s in out:
        if not s.machine_ref:
            raise ValueError(f"scenario {s.name!r} names no machine")
    return out


def _parse_expect(parts: list[str], lineno: int) -> Expectation:
    kind = parts[0]
    if kind == "oracle":
        return OracleExpect(parts[1], tuple(int(x) for x in parts[2:]))
    if kind == "snapshot":
        a, _, b = parts[1].partition("..")
        return SnapshotExpect(int(a), int(b), tuple(int(x) for x in parts[2:]))
    if kind == "halted":
        return OutcomeExpect("halted", parts[1] if len(parts) > 1 else None)
    if kind == "nothalt":
        return OutcomeExpect("nothalt")
    if kind == "transfer":
        state, _, occ = parts[1].partition("@")
        values = None
        if len(parts) > 2:
            if parts[2] != "values":
                raise ValueError(f"line {lineno}: expected 'values' after transfer state")
            values = tuple(int(x) for x in parts[3:])
        return TransferExpect(state, values, int(occ) if occ else 1)
    raise ValueError(f"line {lineno}: unknown expectation {kind!r}")


def load_scenarios(path) -> list[Scenario]:
    return parse_scenarios(Path(path).read_text())


class MachineResolver:
    """Caches machines built from manifest/table references.

    ``X.manifest`` composes the manifest; ``X.manifest#label`` builds
    that section standalone (overlay applied, NM left unresolved);
    ``X.tbl`` builds a bare table.  Paths resolve against `base_dir`.
    """

    def __init__(self, base_dir):
        self.base = Path(base_dir)
        self._cache: dict[str, Machine] = {}

    def __call__(self, ref: str) -> Machine:
        m = self._cache.get(ref)
        if m is None:
            m = self._build(ref)
            self._cache[ref] = m
        return m

    def _build(self, ref: str) -> Machine:
        path, _, label = ref.partition("#")
        full = self.base / path
        if label:
            manifest = load_manifest(full)
            for sec in manifest.sections:
                if sec.label == label:
                    from .tables import apply_overlay

                    table = apply_overlay(sec.table, sec.overlay) if sec.overlay else sec.table
                    return build_machine(table, start=sec.start or table.declared_start)
            raise ValueError(f"manifest {path} has no section {label!r}")
        if full.suffix == ".manifest":
            return compose(load_manifest(full)).machine
        return build_machine(load_table(full))


def write_summary(summary: dict, path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2) + "\n")
