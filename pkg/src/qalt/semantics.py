"""Denotational semantics: programs to Kraus sets, plus a direct evaluator.

The variable-to-factor layout lives entirely in this module: qubits occupy
tensor factors in allocation order (first allocated = leading factor), bits
select signature blocks in allocation order (first allocated = most
significant).  Every permutation needed to make a statement's qubit the
leading factor is derived from the two functions
:func:`leading_order` / :func:`leading_permutation` below and nowhere else.

``denote`` interprets an elaborated program as one composed Kraus set.
``eval_direct`` is an independent cross-checking oracle: it updates the
density matrix statement by statement with tensor-contraction arithmetic and
never composes program-level Kraus sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import syntax as ast
from .check import elaborate, typecheck
from .core import (
    DEFAULT_TOL,
    DensityState,
    Matrix,
    NAMED_GATES,
    Signature,
    dim,
    dsum,
    embed_gate,
    injection,
    phase_gate,
    rk_gate,
    split_blocks,
    unit_state,
)
from .errors import (
    KindError,
    NonBlockDiagonalResult,
    SignatureMismatch,
    UnknownName,
)
from .kraus import (
    KrausSet,
    alternate,
    alternate_case,
    apply,
    branch_sum,
    compose,
    identity_kraus,
    make_kraus,
)
from .syntax import BIT, QBIT, Context

# ---------------------------------------------------------------------------
# Layout maps
# ---------------------------------------------------------------------------


def signature_of(ctx: Context) -> Signature:
    """State-space shape of a context: 2^#bits blocks of dimension 2^#qubits."""
    m = len(ctx.qubits())
    k = len(ctx.bits())
    return Signature((2 ** m,) * (2 ** k))


def _insert_bit(x: int, width: int, pos: int, v: int) -> int:
    """Insert bit ``v`` at ``pos`` of a value that will have ``width`` bits."""
    high = x >> (width - 1 - pos)
    low = x & ((1 << (width - 1 - pos)) - 1)
    return (high << (width - pos)) | (v << (width - 1 - pos)) | low


def _get_bit(x: int, width: int, pos: int) -> int:
    return (x >> (width - 1 - pos)) & 1


def leading_order(ctx: Context, controls: list[str]) -> np.ndarray:
    """Index map from the context layout to the controls-leading layout.

    Entry ``g`` is the basis index, in the layout where the listed control
    qubits are the leading factors (in listed order, followed by the other
    qubits in context order), of context-layout basis vector ``g``.  Blocks
    are untouched.
    """
    qubits = ctx.qubits()
    m = len(qubits)
    k = len(ctx.bits())
    cpos = [qubits.index(c) for c in controls]
    rest = [i for i in range(m) if i not in cpos]
    d_block = 2 ** m
    d = 2 ** k * d_block
    out = np.zeros(d, dtype=np.intp)
    for g in range(d):
        blk, x = divmod(g, d_block)
        y = 0
        for i in cpos + rest:
            y = (y << 1) | _get_bit(x, m, i)
        out[g] = blk * d_block + y
    return out


def leading_permutation(ctx: Context, controls: list[str]) -> Matrix:
    """The layout map of :func:`leading_order` as a permutation matrix."""
    order = leading_order(ctx, controls)
    p = np.zeros((order.size, order.size), dtype=complex)
    p[order, np.arange(order.size)] = 1.0
    return p


# ---------------------------------------------------------------------------
# Primitive operators in the context layout
# ---------------------------------------------------------------------------

def _gate_matrix(gate) -> Matrix:
    if isinstance(gate, ast.NamedGate):
        return np.array(NAMED_GATES[gate.name])
    if isinstance(gate, ast.RkGate):
        return rk_gate(gate.k.value)
    if isinstance(gate, ast.PhaseGate):
        return phase_gate(gate.theta.value)
    if isinstance(gate, ast.MatrixGate):
        return np.array(gate.entries, dtype=complex)
    raise TypeError(f"gate not elaborated: {gate!r}")


def _apply_gate_matrix(ctx: Context, names: list[str], u: Matrix) -> Matrix:
    qubits = ctx.qubits()
    positions = [qubits.index(n) for n in names]
    embedded = embed_gate(u, positions, len(qubits))
    return np.kron(np.eye(2 ** len(ctx.bits()), dtype=complex), embedded)


def _new_qbit_matrix(ctx: Context) -> Matrix:
    """Allocation isometry appending a |0> qubit as the trailing factor."""
    m = len(ctx.qubits())
    d = dim(signature_of(ctx))
    g = np.arange(d)
    new_idx = (g >> m << (m + 1)) + ((g & ((1 << m) - 1)) << 1)
    v = np.zeros((2 * d, d), dtype=complex)
    v[new_idx, g] = 1.0
    return v


def _new_bit_matrix(ctx: Context) -> Matrix:
    """Allocation isometry tagging the state with a fresh 0-valued bit."""
    m = len(ctx.qubits())
    d = dim(signature_of(ctx))
    g = np.arange(d)
    new_idx = (g >> m << (m + 1)) + (g & ((1 << m) - 1))
    v = np.zeros((2 * d, d), dtype=complex)
    v[new_idx, g] = 1.0
    return v


def _discard_qbit_matrices(ctx: Context, name: str) -> list[Matrix]:
    qubits = ctx.qubits()
    m = len(qubits)
    p = qubits.index(name)
    d = dim(signature_of(ctx))
    d_out = d // 2
    ops = []
    for v in (0, 1):
        sel = np.zeros((d_out, d), dtype=complex)
        for g_out in range(d_out):
            blk, y = divmod(g_out, 2 ** (m - 1))
            x = _insert_bit(y, m, p, v)
            sel[g_out, blk * 2 ** m + x] = 1.0
        ops.append(sel)
    return ops


def _discard_bit_matrices(ctx: Context, name: str) -> list[Matrix]:
    bits = ctx.bits()
    k = len(bits)
    j = bits.index(name)
    m = len(ctx.qubits())
    d = dim(signature_of(ctx))
    d_out = d // 2
    ops = []
    for v in (0, 1):
        sel = np.zeros((d_out, d), dtype=complex)
        for g_out in range(d_out):
            blk, x = divmod(g_out, 2 ** m)
            sel[g_out, _insert_bit(blk, k, j, v) * 2 ** m + x] = 1.0
        ops.append(sel)
    return ops


def _measure_matrices(ctx: Context, name: str) -> list[Matrix]:
    """Measurement into a fresh leading branch tag: {inj_v . Pi_v}."""
    qubits = ctx.qubits()
    m = len(qubits)
    p = qubits.index(name)
    sig = signature_of(ctx)
    d = dim(sig)
    ops = []
    for v in (0, 1):
        proj = np.zeros((d, d), dtype=complex)
        for g in range(d):
            if _get_bit(g % 2 ** m, m, p) == v:
                proj[g, g] = 1.0
        ops.append(injection(v, sig) @ proj)
    return ops


def measure_kraus(ctx: Context, name: str) -> KrausSet:
    """The bare measurement morphism sig -> sig (+) sig for qubit ``name``."""
    sig = signature_of(ctx)
    return make_kraus(sig, dsum(sig, sig), _measure_matrices(ctx, name))


def merge_kraus(sig: Signature) -> KrausSet:
    """The branch-forgetting morphism sig (+) sig -> sig: {inj0', inj1'}."""
    return make_kraus(dsum(sig, sig), sig,
                      [injection(0, sig).conj().T, injection(1, sig).conj().T])


# ---------------------------------------------------------------------------
# Denotation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Denotation:
    """A program fragment together with its Kraus set and typing contexts."""

    source: object
    kraus: KrausSet
    input_ctx: Context
    output_ctx: Context

    def __post_init__(self):
        if (self.kraus.input_sig != signature_of(self.input_ctx)
                or self.kraus.output_sig != signature_of(self.output_ctx)):
            raise SignatureMismatch(
                "Kraus signatures do not match the typing contexts")


def _denote_block(block: list, ctx: Context) -> tuple[KrausSet, Context]:
    kset = identity_kraus(signature_of(ctx))
    for stmt in block:
        step, ctx = _denote_stmt(stmt, ctx)
        kset = compose(step, kset)
    return kset, ctx


def _denote_stmt(stmt, ctx: Context) -> tuple[KrausSet, Context]:
    sig = signature_of(ctx)
    if isinstance(stmt, ast.Skip):
        return identity_kraus(sig), ctx
    if isinstance(stmt, ast.NewQbit):
        out = ctx.add(stmt.name.base, QBIT)
        op = _new_qbit_matrix(ctx)
        return make_kraus(sig, signature_of(out), [op]), out
    if isinstance(stmt, ast.NewBit):
        out = ctx.add(stmt.name.base, BIT)
        op = _new_bit_matrix(ctx)
        return make_kraus(sig, signature_of(out), [op]), out
    if isinstance(stmt, ast.ApplyGate):
        names = [t.base for t in stmt.targets]
        op = _apply_gate_matrix(ctx, names, _gate_matrix(stmt.gate))
        return make_kraus(sig, sig, [op]), ctx
    if isinstance(stmt, ast.Discard):
        name = stmt.name.base
        if ctx.kind_of(name) == QBIT:
            ops = _discard_qbit_matrices(ctx, name)
        else:
            ops = _discard_bit_matrices(ctx, name)
        out = ctx.remove(name)
        return make_kraus(sig, signature_of(out), ops), out
    if isinstance(stmt, ast.MeasureThenElse):
        then_k, out_ctx = _denote_block(stmt.then_block, ctx)
        else_k, _ = _denote_block(stmt.else_block, ctx)
        measure = measure_kraus(ctx, stmt.control.base)
        summed = branch_sum(then_k, else_k)
        merged = merge_kraus(then_k.output_sig)
        return compose(merged, compose(summed, measure)), out_ctx
    if isinstance(stmt, ast.QIf):
        name = stmt.control.base
        pos = ctx.index_of(name)
        inner = ctx.remove(name)
        then_k, inner_out = _denote_block(stmt.then_block, inner)
        else_k, _ = _denote_block(stmt.else_block, inner)
        alt = alternate(then_k, else_k)
        out_ctx = inner_out.insert(min(pos, len(inner_out.entries)), name, QBIT)
        p_in = leading_permutation(ctx, [name])
        p_out = leading_permutation(out_ctx, [name])
        enter = make_kraus(sig, alt.input_sig, [p_in])
        leave = make_kraus(alt.output_sig, signature_of(out_ctx), [p_out.conj().T])
        return compose(leave, compose(alt, enter)), out_ctx
    if isinstance(stmt, ast.QCase):
        names = [c.base for c in stmt.controls]
        positions = [ctx.index_of(n) for n in names]
        inner = ctx
        for name in names:
            inner = inner.remove(name)
        branches = []
        inner_out = None
        for arm in sorted(stmt.arms, key=lambda a: a.label):
            bk, inner_out = _denote_block(arm.block, inner)
            branches.append(bk)
        alt = alternate_case(branches, len(names))
        out_ctx = inner_out
        for pos, name in sorted(zip(positions, names)):
            out_ctx = out_ctx.insert(min(pos, len(out_ctx.entries)), name, QBIT)
        p_in = leading_permutation(ctx, names)
        p_out = leading_permutation(out_ctx, names)
        enter = make_kraus(sig, alt.input_sig, [p_in])
        leave = make_kraus(alt.output_sig, signature_of(out_ctx), [p_out.conj().T])
        return compose(leave, compose(alt, enter)), out_ctx
    raise TypeError(f"statement not elaborated: {stmt!r}")


def _prepare(program, ctx: Context) -> ast.Program:
    if isinstance(program, str):
        program = ast.parse(program)
    elif not isinstance(program, ast.Program):
        program = ast.Program([program])
    typed = typecheck(program, ctx)
    return typecheck(elaborate(typed), ctx)


def denote(program, ctx: Context | None = None) -> Denotation:
    """Denotation of a program (source text, AST or single statement).

    The program is typechecked from ``ctx`` and elaborated first; statements
    compose right-to-left onto the identity, so the empty program denotes
    {I} on the signature of ``ctx``.
    """
    ctx = ctx if ctx is not None else Context.empty()
    core = _prepare(program, ctx)
    kset, out_ctx = _denote_block(core.body, ctx)
    return Denotation(program, kset, ctx, out_ctx)


def run(program, initial: DensityState | None = None,
        ctx: Context | None = None, tol: float = DEFAULT_TOL) -> DensityState:
    """Final density state of a program via its composed Kraus set."""
    ctx = ctx if ctx is not None else Context.empty()
    if initial is None:
        if ctx.entries:
            raise ValueError("an initial state is required for a nonempty context")
        initial = unit_state()
    d = denote(program, ctx)
    return apply(d.kraus, initial, tol)


def measure_stats(rho: DensityState, name: str, ctx: Context) -> tuple[float, float]:
    """Outcome probabilities (p0, p1) of measuring qubit ``name`` in ``rho``."""
    if not ctx.has(name):
        raise UnknownName(f"name '{name}' is not in scope")
    if ctx.kind_of(name) != QBIT:
        raise KindError(f"'{name}' has kind bit, expected qbit")
    if rho.signature != signature_of(ctx):
        raise SignatureMismatch("state does not match the context layout")
    qubits = ctx.qubits()
    m = len(qubits)
    p = qubits.index(name)
    probs = [0.0, 0.0]
    for block in rho.blocks:
        diag = np.diag(block).real
        for x, value in enumerate(diag):
            probs[_get_bit(x, m, p)] += float(value)
    return probs[0], probs[1]


def outcome_probability(rho: DensityState, ctx: Context,
                        assignment: dict) -> float:
    """Joint probability of reading the given qubit values simultaneously."""
    if rho.signature != signature_of(ctx):
        raise SignatureMismatch("state does not match the context layout")
    qubits = ctx.qubits()
    m = len(qubits)
    wanted = {}
    for name, value in assignment.items():
        if not ctx.has(name):
            raise UnknownName(f"name '{name}' is not in scope")
        if ctx.kind_of(name) != QBIT:
            raise KindError(f"'{name}' has kind bit, expected qbit")
        wanted[qubits.index(name)] = int(value)
    total = 0.0
    for block in rho.blocks:
        diag = np.diag(block).real
        for x, value in enumerate(diag):
            if all(_get_bit(x, m, p) == v for p, v in wanted.items()):
                total += float(value)
    return total


# ---------------------------------------------------------------------------
# Direct evaluator (cross-checking oracle)
# ---------------------------------------------------------------------------

_DIRECT_ZERO = 1e-12


def _conjugate_full(rho: Matrix, u: Matrix, positions: list[int],
                    m: int, nblocks: int) -> Matrix:
    """rho -> U rho U' with U on the given qubit axes, via tensor contraction."""
    t = len(positions)
    shape = (nblocks,) + (2,) * m
    naxes = m + 1
    pos = [p + 1 for p in positions]
    tens = rho.reshape(shape + shape)
    u_t = u.reshape((2,) * (2 * t))
    cur = np.tensordot(u_t, tens, axes=(list(range(t, 2 * t)), pos))
    cur = np.moveaxis(cur, range(t), pos)
    cols = [naxes + p for p in pos]
    cur = np.tensordot(cur, u_t.conj(), axes=(cols, list(range(t, 2 * t))))
    cur = np.moveaxis(cur, range(2 * naxes - t, 2 * naxes), cols)
    d = nblocks * 2 ** m
    return cur.reshape(d, d)


def _embed_direct(u: Matrix, positions: list[int], m: int) -> Matrix:
    """Axis-permutation embedding of a gate, independent of embed_gate."""
    t = len(positions)
    rest = [i for i in range(m) if i not in positions]
    big = np.kron(u, np.eye(2 ** (m - t), dtype=complex))
    order = list(positions) + rest
    perm = [order.index(i) for i in range(m)]
    tens = big.reshape((2,) * (2 * m))
    tens = tens.transpose(perm + [m + a for a in perm])
    return tens.reshape(2 ** m, 2 ** m)


def _coalesce_direct(mats: list[Matrix]) -> list[Matrix]:
    mats = [m for m in mats if np.abs(m).max() > _DIRECT_ZERO]
    while True:
        reps: list[Matrix] = []
        counts: list[int] = []
        for m in mats:
            for i, r in enumerate(reps):
                if r.shape == m.shape and np.abs(r - m).max() <= _DIRECT_ZERO:
                    counts[i] += 1
                    break
            else:
                reps.append(m)
                counts.append(1)
        merged = [r * np.sqrt(c) if c > 1 else r for r, c in zip(reps, counts)]
        if len(merged) == len(mats):
            return merged
        mats = merged


def _lead_indices(inner_ctx: Context, r: int, values: int) -> np.ndarray:
    """Lead-layout indices of the inner space under control value ``values``.

    ``inner_ctx`` is the context without the controls; the returned array
    maps inner-layout basis index g to the index of (controls = values, g)
    in the controls-leading layout.
    """
    m_inner = len(inner_ctx.qubits())
    d_block = 2 ** m_inner
    d_inner = dim(signature_of(inner_ctx))
    g = np.arange(d_inner)
    blk = g // d_block
    y = g % d_block
    return blk * (2 ** r * d_block) + values * d_block + y


def _controlled_elements_direct(branch_elems: list[list[Matrix]],
                                inner_in: Context, inner_out: Context,
                                r: int) -> list[Matrix]:
    """Alternation elements over a 2^r-way control, built by index placement."""
    populated = [(k, elems) for k, elems in enumerate(branch_elems) if elems]
    d_in = 2 ** r * dim(signature_of(inner_in))
    d_out = 2 ** r * dim(signature_of(inner_out))
    out = []
    for combo in itertools.product(*[elems for _, elems in populated]):
        mat = np.zeros((d_out, d_in), dtype=complex)
        for idx, (k, _) in enumerate(populated):
            norm = 1.0
            for other, (_, elems) in enumerate(populated):
                if other != idx:
                    norm *= len(elems)
            rows = _lead_indices(inner_out, r, k)
            cols = _lead_indices(inner_in, r, k)
            mat[np.ix_(rows, cols)] = combo[idx] / np.sqrt(norm)
        out.append(mat)
    return out


def _stmt_direct_kraus(stmt) -> list[Matrix]:
    """Raw Kraus elements of one statement, in the context layout."""
    ctx, out_ctx = stmt.ctx_in, stmt.ctx_out
    m = len(ctx.qubits())
    nblocks = 2 ** len(ctx.bits())
    if isinstance(stmt, ast.Skip):
        return [np.eye(nblocks * 2 ** m, dtype=complex)]
    if isinstance(stmt, ast.ApplyGate):
        qubits = ctx.qubits()
        positions = [qubits.index(t.base) for t in stmt.targets]
        emb = _embed_direct(_gate_matrix(stmt.gate), positions, m)
        return [np.kron(np.eye(nblocks, dtype=complex), emb)]
    if isinstance(stmt, ast.NewQbit):
        return [_new_qbit_matrix(ctx)]
    if isinstance(stmt, ast.NewBit):
        return [_new_bit_matrix(ctx)]
    if isinstance(stmt, ast.Discard):
        if ctx.kind_of(stmt.name.base) == QBIT:
            return _discard_qbit_matrices(ctx, stmt.name.base)
        return _discard_bit_matrices(ctx, stmt.name.base)
    if isinstance(stmt, ast.MeasureThenElse):
        p = ctx.qubits().index(stmt.control.base)
        d = nblocks * 2 ** m
        projs = []
        for v in (0, 1):
            diag = np.array([1.0 if _get_bit(g % 2 ** m, m, p) == v else 0.0
                             for g in range(d)])
            projs.append(np.diag(diag).astype(complex))
        out = []
        for elems, proj in ((_block_direct_kraus(stmt.then_block), projs[0]),
                            (_block_direct_kraus(stmt.else_block), projs[1])):
            out.extend(e @ proj for e in elems)
        return out
    if isinstance(stmt, (ast.QIf, ast.QCase)):
        if isinstance(stmt, ast.QIf):
            names = [stmt.control.base]
            blocks = [stmt.then_block, stmt.else_block]
        else:
            names = [c.base for c in stmt.controls]
            blocks = [arm.block for arm in sorted(stmt.arms, key=lambda a: a.label)]
        r = len(names)
        branch_elems = [_coalesce_direct(_block_direct_kraus(b)) for b in blocks]
        inner_in = blocks[0][0].ctx_in
        inner_out = blocks[0][-1].ctx_out
        lead = _controlled_elements_direct(branch_elems, inner_in, inner_out, r)
        order_in = leading_order(ctx, names)
        order_out = leading_order(out_ctx, names)
        return [k[np.ix_(order_out, order_in)] for k in lead]
    raise TypeError(f"statement not elaborated: {stmt!r}")


def _block_direct_kraus(block: list) -> list[Matrix]:
    elems = None
    for stmt in block:
        step = _stmt_direct_kraus(stmt)
        if elems is None:
            elems = step
        else:
            elems = [b @ a for b in step for a in elems]
    return elems if elems is not None else []


def _direct_step(stmt, rho: Matrix) -> Matrix:
    ctx = stmt.ctx_in
    m = len(ctx.qubits())
    nblocks = 2 ** len(ctx.bits())
    if isinstance(stmt, ast.Skip):
        return rho
    if isinstance(stmt, ast.ApplyGate):
        qubits = ctx.qubits()
        positions = [qubits.index(t.base) for t in stmt.targets]
        return _conjugate_full(rho, _gate_matrix(stmt.gate), positions, m, nblocks)
    if isinstance(stmt, ast.MeasureThenElse):
        p = ctx.qubits().index(stmt.control.base)
        d = rho.shape[0]
        total = None
        for v, block in ((0, stmt.then_block), (1, stmt.else_block)):
            keep = np.array([g for g in range(d)
                             if _get_bit(g % 2 ** m, m, p) == v])
            projected = np.zeros_like(rho)
            projected[np.ix_(keep, keep)] = rho[np.ix_(keep, keep)]
            for inner in block:
                projected = _direct_step(inner, projected)
            total = projected if total is None else total + projected
        return total
    if isinstance(stmt, (ast.NewQbit, ast.NewBit, ast.Discard, ast.QIf, ast.QCase)):
        out = None
        for e in _stmt_direct_kraus(stmt):
            term = e @ rho @ e.conj().T
            out = term if out is None else out + term
        if out is None:
            d_out = dim(signature_of(stmt.ctx_out))
            out = np.zeros((d_out, d_out), dtype=complex)
        return out
    raise TypeError(f"statement not elaborated: {stmt!r}")


def eval_direct(program, initial: DensityState | None = None,
                ctx: Context | None = None,
                tol: float = DEFAULT_TOL) -> DensityState:
    """Independent evaluator: direct density-matrix updates per statement.

    Agrees with :func:`run` on every well-formed program; used to cross-check
    the composed Kraus semantics.
    """
    ctx = ctx if ctx is not None else Context.empty()
    if initial is None:
        if ctx.entries:
            raise ValueError("an initial state is required for a nonempty context")
        initial = unit_state()
    if initial.signature != signature_of(ctx):
        raise SignatureMismatch("initial state does not match the context")
    core = _prepare(program, ctx)
    rho = np.array(initial.full())
    for stmt in core.body:
        rho = _direct_step(stmt, rho)
    out_sig = signature_of(core.ctx_out)
    blocks = split_blocks(rho, out_sig)
    residual = 0.0
    if len(blocks) > 1:
        from .core import block_diag
        residual = float(np.abs(rho - block_diag(blocks)).max())
    if residual > tol:
        raise NonBlockDiagonalResult(
            f"off-block mass {residual:.3e} exceeds tolerance {tol:.1e}")
    return DensityState(out_sig, tuple(blocks))
