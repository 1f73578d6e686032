"""Executable documentation of the published tables' defects.

These tests pin down what the tables do *as printed*, so the shipped
overlays and the corrected reference table are justified by observable
behavior, not by editorial judgment.  If an upstream correction ever
lands, these start failing and the workarounds can be retired.
"""

from beaverkit.engine import HALTED, MEMORY_LIMIT, STEP_LIMIT, WATCH, RunLimits, run
from beaverkit.oracles import is_prime
from beaverkit.tables import build_machine, load_table
from beaverkit.tape import Configuration, Tape


def test_published_brocard_halts_after_three_steps(brocard_asprinted):
    """The rename-only overlay builds, but the init chain's fourth state
    is defined only for read 1 (its read/write fields are transposed in
    print), so a blank tape kills the machine at step 3."""
    out = run(brocard_asprinted.machine, limits=RunLimits(max_steps=100))
    assert out.kind == HALTED and out.steps == 3
    assert out.halting_state == "b.Qf2"
    # ... which means the five-step tape picture is unreachable as printed
    assert out.config.tape.snapshot(-5, 1) != (0, 1, 1, 0, 1, 1)


def test_init_table_stalls_without_the_overlay(data_dir):
    """State 31's printed self-loop writes 1s leftward forever instead of
    handing off to state 34; the run exhausts any budget or memory cap
    without ever reaching the NM exit."""
    machine = build_machine(load_table(data_dir / "fermat_t1.tbl"))
    out = run(machine, limits=RunLimits(max_steps=10**6, max_support_cells=10**4))
    assert out.kind in (STEP_LIMIT, MEMORY_LIMIT)
    assert out.halting_state != "NM"


def test_primality_entry_at_state_0_inverts_verdicts(fermat_t3):
    """Entering at state 0 prepends a sentinel 1 to the input block, so
    the section effectively tests n+1: 5 'transfers' and 6 'halts'.
    This is why the shipped start state is 1, the drawn initial node."""
    def outcome_for(n, entry):
        tape = Tape.from_blocks([n])
        return run(fermat_t3, Configuration(entry, tape), RunLimits(max_steps=10**6))

    wrong = outcome_for(5, "0")
    assert wrong.halting_state == "NM"  # 5 is prime, yet it transfers (6 = 5+1 is composite)
    wrong = outcome_for(6, "0")
    assert wrong.halting_state != "NM"  # 6 is composite, yet it halts (7 is prime)
    right = outcome_for(5, "1")
    assert right.halting_state != "NM" and is_prime(5)


def test_composed_handoff_drifts_by_one(fermat_composed):
    """The squarer's NM exit leaves the head on the second cell of its
    output block, one cell right of where the primality section's entry
    expects it.  Verdicts stay correct for the value just computed, but
    the composite continuation hands back value-2 instead of value-1,
    so later iterations drift off the square-one-less-add-one sequence."""
    m = fermat_composed.machine
    # through the composed loop: 8 -> 65 (composite) -> back with 63
    out = run(m, Configuration("t2.0", Tape.from_blocks([8])),
              RunLimits(max_steps=10**7), watch=("t3.1",))
    assert out.kind == WATCH and out.config.tape.blocks() == [65]
    out = run(m, out.config, RunLimits(max_steps=10**7), watch=("t2.0",))
    assert out.kind == WATCH and out.config.tape.blocks() == [63]
    # entering the section with the head on the leftmost 1 gives 64
    out = run(m, Configuration("t3.1", Tape.from_blocks([65])),
              RunLimits(max_steps=10**7), watch=("t2.0",))
    assert out.kind == WATCH and out.config.tape.blocks() == [64]
    # the prime side of the composed loop still halts at the accepting node
    out = run(m, Configuration("t2.0", Tape.from_blocks([4])), RunLimits(max_steps=10**7))
    assert out.kind == HALTED and out.halting_state == "t3.25"


def test_published_brocard_factorial_drifts_without_the_ss_fix(data_dir):
    """With the init chain and As repaired but the Ss exit keeping its
    printed write (a 1, preserving the +1 both return paths should drop),
    the factorial bases accumulate one extra unit per stage: 7 is still
    exact, but the next stage sees base 7 instead of 6 and produces 29
    where 4!+1 = 25 belongs."""
    from beaverkit.tables import RawTable, TableRow

    raw = load_table(data_dir / "brocard.tbl")
    rows = {i: r.to_line() for i, r in enumerate(raw.rows)}
    assert rows[80] == "Qf|1|0|L|Es" and rows[74] == "As|0|1|R|As"
    fixed_rows = list(raw.rows)
    fixed_rows[74] = TableRow("As", 1, 1, 1, "As")
    fixed_rows[75] = TableRow("Ss", 1, 1, -1, "Kf")  # printed write kept
    fixed_rows[78] = TableRow("Jf", 0, 1, -1, "Pf2")
    fixed_rows[79] = TableRow("Pf2", 0, 0, -1, "Qf2")
    fixed_rows[80] = TableRow("Qf2", 0, 1, -1, "Es")
    half_fixed = RawTable("half", fixed_rows, "Df")
    machine = build_machine(half_fixed)
    config = Configuration("Df")
    seen = []
    for _ in range(2):
        out = run(machine, config, RunLimits(max_steps=10**5), watch=("Mf",))
        assert out.kind == WATCH
        seen.append(out.config.tape.blocks())
        config = out.config
    assert seen[0] == [3, 2, 4]       # 2 + 4 + 1 = 7 = 3!+1, still exact
    assert seen[1] == [4, 7, 21]      # base 7 carried the +1: 29, not 25
