"""Command-line front door: run programs, inspect denotations, compare maps.

Exit codes: 0 success (and true verdicts), 1 language error, 2 semantic,
numeric or false-verdict outcome, 3 I/O error.  Structured output is a
single JSON document per invocation with complex numbers encoded as
[re, im] pairs; identical invocations produce byte-identical output.
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from .core import DensityState, Signature, unit_state
from .corpus import (
    TruthTable,
    balanced_tables,
    bit_reversal_permutation,
    constant_tables,
    dft_matrix,
    gen_deutsch,
    gen_deutsch_jozsa,
    gen_qft,
    qft_context,
    toffoli_matrix,
)
from .errors import LanguageError, QaltError, SemanticError
from .kraus import (
    alternate,
    apply,
    apply_full,
    ext_equal,
    lowner_leq,
    make_kraus,
    to_choi,
    zero_kraus,
)
from .semantics import denote, measure_stats, outcome_probability, run
from .syntax import Context, parse

SCHEMA = "qalt-output/1"


# ---------------------------------------------------------------------------
# Encoding helpers
# ---------------------------------------------------------------------------

def _encode_matrix(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _decode_matrix(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data])


def _encode_state(state: DensityState) -> dict:
    return {
        "signature": list(state.signature.blocks),
        "blocks": [_encode_matrix(b) for b in state.blocks],
        "trace": state.trace(),
    }


def _decode_state(data) -> DensityState:
    sig = Signature(tuple(data["signature"]))
    blocks = tuple(_decode_matrix(b) for b in data["blocks"])
    return DensityState(sig, blocks)


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.10g}{z.imag:+.10g}i"


def _matrix_lines(m, indent: str = "  ") -> list[str]:
    return [indent + "  ".join(_fmt_complex(z) for z in row) for row in np.asarray(m)]


def _emit(doc: dict, fmt: str, text_lines: list[str]):
    if fmt == "structured":
        click.echo(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            click.echo(line)


def _load_source(path: str) -> str:
    # 8-bit text; the tokenizer rejects non-ASCII outside comments
    with open(path, "r", encoding="latin-1") as fh:
        return fh.read()


def _parse_ctx(spec: str | None) -> Context:
    if not spec:
        return Context.empty()
    return Context.from_spec(spec)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    try:
        fn()
    except LanguageError as exc:
        _fail(1, str(exc))
    except (SemanticError, QaltError, ValueError) as exc:
        _fail(2, str(exc))
    except OSError as exc:
        _fail(3, str(exc))


_FMT = click.option("--format", "fmt", type=click.Choice(["text", "structured"]),
                    default="text", show_default=True, help="Output format.")
_TOL = click.option("--tol", type=float, default=None, envvar="QALT_TOL",
                    help="Numeric tolerance (default 1e-9, env QALT_TOL).")
_CTX = click.option("--ctx", "ctx_spec", default=None,
                    help="Initial context, e.g. 'q0:qbit,q1:qbit'.")


def _tolerance(tol: float | None) -> float:
    return 1e-9 if tol is None else tol


@click.group()
def main():
    """Quantum alternation semantics toolkit."""


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

@main.command("run")
@click.argument("source", type=click.Path())
@click.option("--init", "init_path", type=click.Path(), default=None,
              help="Initial density state (JSON).")
@click.option("--stats", "stats_name", default=None,
              help="Also report outcome probabilities for this qubit.")
@_CTX
@_TOL
@_FMT
def cmd_run(source, init_path, stats_name, ctx_spec, tol, fmt):
    """Evaluate a program and print its final density state."""
    def go():
        tolerance = _tolerance(tol)
        ctx = _parse_ctx(ctx_spec)
        program = parse(_load_source(source))
        initial = None
        if init_path is not None:
            with open(init_path, "r", encoding="ascii") as fh:
                initial = _decode_state(json.load(fh))
        if initial is None:
            if ctx.entries:
                raise ValueError(
                    "an initial state is required for a nonempty context")
            initial = unit_state()
        d = denote(program, ctx)
        state = apply(d.kraus, initial, tolerance)
        result = {"state": _encode_state(state)}
        lines = [f"final state on signature {state.signature.blocks}:"]
        for i, block in enumerate(state.blocks):
            lines.append(f"block {i}:")
            lines.extend(_matrix_lines(block))
        lines.append(f"trace: {state.trace():.10g}")
        if stats_name is not None:
            p0, p1 = measure_stats(state, stats_name, d.output_ctx)
            result["stats"] = {"qubit": stats_name, "p0": p0, "p1": p1}
            lines.append(f"Pr[{stats_name}=0] = {p0:.10g}")
            lines.append(f"Pr[{stats_name}=1] = {p1:.10g}")
        doc = {"schema": SCHEMA, "command": ["run", source],
               "tolerance": tolerance, "result": result}
        _emit(doc, fmt, lines)
    _guarded(go)


# ---------------------------------------------------------------------------
# denote
# ---------------------------------------------------------------------------

@main.command("denote")
@click.argument("source", type=click.Path())
@click.option("--choi", is_flag=True, help="Also print the Choi family.")
@_CTX
@_TOL
@_FMT
def cmd_denote(source, choi, ctx_spec, tol, fmt):
    """Print the canonical Kraus operator list of a program."""
    def go():
        tolerance = _tolerance(tol)
        ctx = _parse_ctx(ctx_spec)
        d = denote(parse(_load_source(source)), ctx)
        result = {
            "input_signature": list(d.kraus.input_sig.blocks),
            "output_signature": list(d.kraus.output_sig.blocks),
            "operators": [_encode_matrix(op) for op in d.kraus.ops],
        }
        lines = [
            f"kraus set: {d.kraus.input_sig.blocks} -> "
            f"{d.kraus.output_sig.blocks}, {len(d.kraus)} operator(s)"
        ]
        for i, op in enumerate(d.kraus.ops):
            lines.append(f"operator {i}:")
            lines.extend(_matrix_lines(op))
        if choi:
            family = to_choi(d.kraus)
            result["choi"] = [_encode_matrix(c) for c in family.members]
            for i, member in enumerate(family.members):
                lines.append(f"choi member {i}:")
                lines.extend(_matrix_lines(member))
        doc = {"schema": SCHEMA, "command": ["denote", source],
               "tolerance": tolerance, "result": result}
        _emit(doc, fmt, lines)
    _guarded(go)


# ---------------------------------------------------------------------------
# equiv / order
# ---------------------------------------------------------------------------

def _comparison(kind, source_a, source_b, ctx_spec, tol, fmt):
    tolerance = _tolerance(tol)
    ctx = _parse_ctx(ctx_spec)
    da = denote(parse(_load_source(source_a)), ctx)
    db = denote(parse(_load_source(source_b)), ctx)
    if kind == "equiv":
        verdict = ext_equal(da.kraus, db.kraus, tolerance)
        label = "extensionally equal"
    else:
        verdict = lowner_leq(da.kraus, db.kraus, tolerance)
        label = "below in the Loewner order"
    doc = {"schema": SCHEMA, "command": [kind, source_a, source_b],
           "tolerance": tolerance, "result": {"verdict": bool(verdict)}}
    _emit(doc, fmt, [f"{label}: {verdict}"])
    if not verdict:
        sys.exit(2)


@main.command("equiv")
@click.argument("source_a", type=click.Path())
@click.argument("source_b", type=click.Path())
@_CTX
@_TOL
@_FMT
def cmd_equiv(source_a, source_b, ctx_spec, tol, fmt):
    """Test whether two programs denote the same superoperator."""
    _guarded(lambda: _comparison("equiv", source_a, source_b, ctx_spec, tol, fmt))


@main.command("order")
@click.argument("source_a", type=click.Path())
@click.argument("source_b", type=click.Path())
@_CTX
@_TOL
@_FMT
def cmd_order(source_a, source_b, ctx_spec, tol, fmt):
    """Test whether the first program is below the second (Loewner order)."""
    _guarded(lambda: _comparison("order", source_a, source_b, ctx_spec, tol, fmt))


# ---------------------------------------------------------------------------
# demo
# ---------------------------------------------------------------------------

TOFFOLI_SOURCE = """\
if q0 then { skip } else {
  if q1 then { skip } else { q2 *= X }
}
"""


def _demo_deutsch(tolerance, table_bits=None):
    rows = []
    lines = ["deutsch: Pr[q0=0] per truth table"]
    choices = [table_bits] if table_bits else ["00", "01", "10", "11"]
    for table in [TruthTable.from_bits(b) for b in choices]:
        program = gen_deutsch(table)
        d = denote(program)
        state = run(program)
        p0, _ = measure_stats(state, "q0", d.output_ctx)
        bits = "".join(str(v) for v in table.values)
        rows.append({"f": bits, "constant": table.is_constant, "p0": p0})
        lines.append(f"  f={bits} constant={table.is_constant} p0={p0:.10g}")
    return {"deutsch": rows}, lines


def _demo_dj(tolerance, table_bits=None):
    if table_bits:
        tables = [TruthTable.from_bits(table_bits)]
        n = tables[0].n
    else:
        n = 3
        tables = constant_tables(n) + balanced_tables(n)[::11]
    rows = []
    lines = [f"deutsch-jozsa (n={n}): Pr[all controls 0] per truth table"]
    for table in tables:
        program = gen_deutsch_jozsa(table)
        d = denote(program)
        state = run(program)
        assignment = {f"q0_{i}": 0 for i in range(table.n)}
        p = outcome_probability(state, d.output_ctx, assignment)
        bits = "".join(str(v) for v in table.values)
        rows.append({"f": bits, "constant": table.is_constant, "p_zeros": p})
        lines.append(f"  f={bits} constant={table.is_constant} p={p:.10g}")
    return {"deutsch_jozsa": rows}, lines


def _demo_qft(tolerance):
    rows = []
    lines = ["qft: max deviation from the bit-reversed DFT matrix"]
    for n in range(1, 5):
        d = denote(gen_qft(n), qft_context(n))
        u = d.kraus.ops[0]
        ref = bit_reversal_permutation(n) @ dft_matrix(n)
        dev = float(np.abs(u - ref).max())
        rows.append({"n": n, "max_deviation": dev})
        lines.append(f"  n={n} deviation={dev:.3e}")
    return {"qft": rows}, lines


def _demo_toffoli(tolerance):
    d = denote(parse(TOFFOLI_SOURCE),
               Context.of(("q0", "qbit"), ("q1", "qbit"), ("q2", "qbit")))
    dev = float(np.abs(d.kraus.ops[0] - toffoli_matrix()).max())
    exact = dev <= 1e-12
    lines = [f"toffoli: exact match = {exact} (max deviation {dev:.3e})"]
    return {"toffoli": {"exact": exact, "max_deviation": dev}}, lines


def _demo_nonmonotone(tolerance):
    sig = Signature((1,))
    s = make_kraus(sig, sig, [np.eye(1)])
    t = make_kraus(sig, sig, [np.eye(1)])
    empty = zero_kraus(sig, sig)
    below_zero = lowner_leq(empty, t, tolerance)
    below_self = lowner_leq(s, s, tolerance)
    left = alternate(s, empty)
    right = alternate(s, t)
    monotone = lowner_leq(left, right, tolerance)
    plus = DensityState(Signature((2,)), (np.full((2, 2), 0.5),))
    diff = apply_full(right, plus.full()) - apply_full(left, plus.full())
    witness = float(np.linalg.eigvalsh((diff + diff.conj().T) / 2).min())
    lines = [
        "nonmonotone: alternation versus the Loewner order",
        f"  0 below T: {below_zero}",
        f"  S below S: {below_self}",
        f"  (S alt 0) below (S alt T): {monotone}",
        f"  witness eigenvalue on |+><+|: {witness:.10f}"
        f"  (reference (1-sqrt(5))/4 = {(1 - math.sqrt(5)) / 4:.10f})",
    ]
    return {"nonmonotone": {
        "zero_below_t": below_zero,
        "s_below_s": below_self,
        "alternation_monotone": monotone,
        "witness_eigenvalue": witness,
    }}, lines


def _demo_phase(tolerance):
    sig_branch = Context.of(("q1", "qbit"))
    skip_d = denote("skip", sig_branch)
    phase_d = denote("q1 *= Phase(pi / 4)", sig_branch)
    branches_equal = ext_equal(skip_d.kraus, phase_d.kraus, tolerance)
    ctx = Context.of(("q0", "qbit"), ("q1", "qbit"))
    alt_skip = denote("if q0 then { skip } else { skip }", ctx)
    alt_phase = denote("if q0 then { skip } else { q1 *= Phase(pi / 4) }", ctx)
    alternations_equal = ext_equal(alt_skip.kraus, alt_phase.kraus, tolerance)
    ca, cb = to_choi(alt_skip.kraus), to_choi(alt_phase.kraus)
    distance = max(float(np.abs(a - b).max())
                   for a, b in zip(ca.members, cb.members))
    lines = [
        "phase: global phase is invisible until it is alternated",
        f"  branches extensionally equal: {branches_equal}",
        f"  alternations extensionally equal: {alternations_equal}",
        f"  witness Choi distance: {distance:.10f}",
    ]
    return {"phase": {
        "branches_equal": branches_equal,
        "alternations_equal": alternations_equal,
        "witness_distance": distance,
    }}, lines


_DEMOS = {
    "deutsch": _demo_deutsch,
    "dj": _demo_dj,
    "qft": _demo_qft,
    "toffoli": _demo_toffoli,
    "nonmonotone": _demo_nonmonotone,
    "phase": _demo_phase,
}


@main.command("demo")
@click.argument("name", type=click.Choice(sorted(_DEMOS)))
@click.option("--f", "table_bits", default=None,
              help="Truth table as a bitstring (deutsch/dj only), "
                   "e.g. 0110 for n=2.")
@_TOL
@_FMT
def cmd_demo(name, table_bits, tol, fmt):
    """Reproduce one of the built-in demonstrations."""
    def go():
        tolerance = _tolerance(tol)
        if table_bits is not None:
            if name not in ("deutsch", "dj"):
                raise ValueError("--f applies only to the deutsch and dj demos")
            if any(c not in "01" for c in table_bits):
                raise ValueError(f"not a bitstring: {table_bits!r}")
            result, lines = _DEMOS[name](tolerance, table_bits)
        else:
            result, lines = _DEMOS[name](tolerance)
        doc = {"schema": SCHEMA, "command": ["demo", name],
               "tolerance": tolerance, "result": result}
        _emit(doc, fmt, lines)
    _guarded(go)


if __name__ == "__main__":
    main()
