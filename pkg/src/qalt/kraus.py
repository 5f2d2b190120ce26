"""Kraus decompositions as canonical finite operator sets.

A :class:`KrausSet` is a finite set of operators E between two signature
spaces with sum E'E <= I.  Construction canonicalizes: zero operators are
dropped, l equal occurrences coalesce into sqrt(l) * E, and the survivors are
stored in a deterministic order.  On top of that this module provides
composition, the quantum alternation of two (or 2^n) sets, direct-sum
branching, the induced superoperator action on density states, per-block Choi
matrices, extensional equality and the Loewner order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL,
    DensityState,
    Matrix,
    Signature,
    as_matrix,
    block_diag,
    block_offsets,
    dim,
    dsum,
    freeze,
    injection,
    is_psd,
    qbit_kron_order,
    qbit_tensor,
    split_blocks,
)
from .errors import (
    BranchCountMismatch,
    DimensionMismatch,
    NonBlockDiagonalResult,
    SignatureMismatch,
    TraceConditionViolated,
)

#: Entrywise tolerance at which two operators count as equal occurrences.
COALESCE_TOL = 1e-12


@dataclass(frozen=True)
class KrausSet:
    """Canonical Kraus decomposition between two signature spaces.

    ``ops`` is a tuple of frozen matrices, each dim(output) x dim(input),
    sorted by a deterministic key.  The empty tuple is the zero superoperator.
    Use :func:`make_kraus` to construct one from raw operators.
    """

    input_sig: Signature
    output_sig: Signature
    ops: tuple[Matrix, ...]

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def op_shape(self) -> tuple[int, int]:
        return (dim(self.output_sig), dim(self.input_sig))

    def completeness_sum(self) -> Matrix:
        """Sum of E'E over the set (zero matrix for the empty set)."""
        d = dim(self.input_sig)
        total = np.zeros((d, d), dtype=complex)
        for e in self.ops:
            total += e.conj().T @ e
        return total


def _canonical_key(m: Matrix):
    r = np.round(m, 12) + 0.0  # normalize -0.0
    flat = np.stack([r.real, r.imag], axis=-1).reshape(-1)
    exact = np.stack([m.real, m.imag], axis=-1).reshape(-1)
    return (m.shape, tuple(flat), tuple(exact))


def _coalesce(ops: list[Matrix]) -> list[Matrix]:
    """Drop zero operators and fold l equal occurrences into sqrt(l) * E."""
    current = [m for m in ops if np.abs(m).max() > COALESCE_TOL]
    while True:
        groups: list[list] = []  # [representative, count]
        for m in current:
            for g in groups:
                if g[0].shape == m.shape and np.abs(g[0] - m).max() <= COALESCE_TOL:
                    g[1] += 1
                    break
            else:
                groups.append([m, 1])
        merged = [g[0] * math.sqrt(g[1]) if g[1] > 1 else g[0] for g in groups]
        if len(merged) == len(current):
            return merged
        # scaling may have created new collisions; fold again
        current = merged


def make_kraus(input_sig: Signature, output_sig: Signature, raw_ops,
               tol: float = DEFAULT_TOL) -> KrausSet:
    """Canonicalize a multiset of operators into a valid Kraus set.

    Raises :class:`DimensionMismatch` if an operator has the wrong shape and
    :class:`TraceConditionViolated` if the coalesced set has sum E'E > I
    beyond ``tol``.
    """
    shape = (dim(output_sig), dim(input_sig))
    ops = []
    for raw in raw_ops:
        m = as_matrix(raw)
        if m.shape != shape:
            raise DimensionMismatch(
                f"operator of shape {m.shape} does not map "
                f"{input_sig.blocks} into {output_sig.blocks}")
        ops.append(m)
    ops = _coalesce(ops)
    ops.sort(key=_canonical_key)
    total = np.zeros((shape[1], shape[1]), dtype=complex)
    for e in ops:
        total += e.conj().T @ e
    if not is_psd(np.eye(shape[1]) - total, tol):
        raise TraceConditionViolated(
            "sum of E'E exceeds the identity; not trace-nonincreasing")
    return KrausSet(input_sig, output_sig, tuple(freeze(m) for m in ops))


def identity_kraus(sig: Signature) -> KrausSet:
    return make_kraus(sig, sig, [np.eye(dim(sig), dtype=complex)])


def zero_kraus(input_sig: Signature, output_sig: Signature) -> KrausSet:
    return KrausSet(input_sig, output_sig, ())


def compose(s: KrausSet, t: KrausSet, tol: float = DEFAULT_TOL) -> KrausSet:
    """Composition ``s after t``: canonicalized products {E F}."""
    if t.output_sig != s.input_sig:
        raise DimensionMismatch(
            f"cannot compose: inner output {t.output_sig.blocks} "
            f"!= outer input {s.input_sig.blocks}")
    products = [e @ f for e in s.ops for f in t.ops]
    return make_kraus(t.input_sig, s.output_sig, products, tol)


# ---------------------------------------------------------------------------
# Quantum alternation
# ---------------------------------------------------------------------------

def _controlled_embed(pieces, r: int, input_sig: Signature,
                      output_sig: Signature) -> Matrix:
    """Sum of |k><k| (x) E_k in the block layout of qbit^r (x) sig.

    ``pieces`` maps control index k to an operator from the input space to
    the output space.
    """
    count = 2 ** r
    din, dout = dim(input_sig), dim(output_sig)
    kron = np.zeros((count * dout, count * din), dtype=complex)
    for k, e in pieces.items():
        kron[k * dout:(k + 1) * dout, k * din:(k + 1) * din] = e
    order_out = qbit_kron_order(r, output_sig)
    order_in = qbit_kron_order(r, input_sig)
    return kron[np.ix_(order_out, order_in)]


def alternation_elements(s: KrausSet, t: KrausSet) -> list[Matrix]:
    """The element multiset of the alternation, before canonicalization.

    One operator Pi_0 (x) E/sqrt(|t|) + Pi_1 (x) F/sqrt(|s|) for each pair
    (E, F).  When one side is empty the surviving branch keeps its operators
    unscaled under its own projection; both empty yields the empty list.
    """
    if s.input_sig != t.input_sig or s.output_sig != t.output_sig:
        raise SignatureMismatch(
            f"alternation branches must share signatures: "
            f"{s.input_sig.blocks}->{s.output_sig.blocks} vs "
            f"{t.input_sig.blocks}->{t.output_sig.blocks}")
    sig_in, sig_out = s.input_sig, s.output_sig
    out = []
    if s.ops and t.ops:
        ns, nt = math.sqrt(len(s.ops)), math.sqrt(len(t.ops))
        for e, f in itertools.product(s.ops, t.ops):
            out.append(_controlled_embed({0: e / nt, 1: f / ns}, 1, sig_in, sig_out))
    elif s.ops:
        for e in s.ops:
            out.append(_controlled_embed({0: e}, 1, sig_in, sig_out))
    elif t.ops:
        for f in t.ops:
            out.append(_controlled_embed({1: f}, 1, sig_in, sig_out))
    return out


def alternate(s: KrausSet, t: KrausSet, tol: float = DEFAULT_TOL) -> KrausSet:
    """Quantum alternation of two sets under a fresh leading control qubit.

    For singleton unitary branches this is the controlled operator
    Pi_0 (x) U_0 + Pi_1 (x) U_1; in general it superposes every pair of
    branch operators without measuring the control.
    """
    elements = alternation_elements(s, t)
    return make_kraus(qbit_tensor(s.input_sig), qbit_tensor(t.output_sig),
                      elements, tol)


def alternate_case(branches, n: int, tol: float = DEFAULT_TOL) -> KrausSet:
    """Alternation over a 2^n-way control register.

    Elements are sums over control values k of Pi_k (x) E_k, one for every
    tuple of branch operators, each E_k scaled by the square root of the
    product of the other branches' sizes.  Empty branches drop out exactly as
    in the binary case.
    """
    branches = list(branches)
    if len(branches) != 2 ** n:
        raise BranchCountMismatch(
            f"expected {2 ** n} branches for {n} control qubit(s), "
            f"got {len(branches)}")
    sig_in, sig_out = branches[0].input_sig, branches[0].output_sig
    for b in branches:
        if b.input_sig != sig_in or b.output_sig != sig_out:
            raise SignatureMismatch("case branches must share signatures")
    qsig_in, qsig_out = sig_in, sig_out
    for _ in range(n):
        qsig_in = qbit_tensor(qsig_in)
        qsig_out = qbit_tensor(qsig_out)
    populated = [(k, b) for k, b in enumerate(branches) if b.ops]
    elements = []
    for combo in itertools.product(*[b.ops for _, b in populated]):
        pieces = {}
        for pos, (k, _) in enumerate(populated):
            norm = 1.0
            for other, (_, b) in enumerate(populated):
                if other != pos:
                    norm *= len(b.ops)
            pieces[k] = combo[pos] / math.sqrt(norm)
        elements.append(_controlled_embed(pieces, n, sig_in, sig_out))
    return make_kraus(qsig_in, qsig_out, elements, tol)


def branch_sum(s: KrausSet, t: KrausSet, tol: float = DEFAULT_TOL) -> KrausSet:
    """Direct sum of two sets acting on tagged states (r0, r1) -> (S r0, T r1)."""
    if s.input_sig != t.input_sig or s.output_sig != t.output_sig:
        raise SignatureMismatch("branch_sum needs equal signatures on both sides")
    sig, tau = s.input_sig, s.output_sig
    inj0_in, inj1_in = injection(0, sig), injection(1, sig)
    inj0_out, inj1_out = injection(0, tau), injection(1, tau)
    ops = [inj0_out @ e @ inj0_in.conj().T for e in s.ops]
    ops += [inj1_out @ f @ inj1_in.conj().T for f in t.ops]
    return make_kraus(dsum(sig, sig), dsum(tau, tau), ops, tol)


# ---------------------------------------------------------------------------
# Superoperator action
# ---------------------------------------------------------------------------

def apply_full(s: KrausSet, full_state: Matrix) -> Matrix:
    """Raw linear action sum E rho E' on a full-space matrix, unvalidated."""
    rho = as_matrix(full_state)
    d_out = dim(s.output_sig)
    out = np.zeros((d_out, d_out), dtype=complex)
    for e in s.ops:
        out += e @ rho @ e.conj().T
    return out


def apply(s: KrausSet, rho: DensityState, tol: float = DEFAULT_TOL) -> DensityState:
    """Apply the superoperator to a density state.

    Raises :class:`NonBlockDiagonalResult` if the full-space result carries
    more than ``tol`` of coherence outside the output signature's blocks;
    such leakage means the set is not a morphism between the block spaces.
    """
    if rho.signature != s.input_sig:
        raise SignatureMismatch(
            f"state on {rho.signature.blocks} fed to map expecting "
            f"{s.input_sig.blocks}")
    full = apply_full(s, rho.full())
    blocks = split_blocks(full, s.output_sig)
    residual = np.abs(full - block_diag(blocks)).max() if len(blocks) > 1 else 0.0
    if residual > tol:
        raise NonBlockDiagonalResult(
            f"off-block mass {residual:.3e} exceeds tolerance {tol:.1e}")
    return DensityState(s.output_sig, tuple(blocks))


# ---------------------------------------------------------------------------
# Choi family, extensional equality, Loewner order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChoiFamily:
    """One Choi matrix per input block: the canonical form of the action.

    Member i encodes the completely positive map restricted to inputs
    supported on block i, including any off-block output components, so two
    Kraus sets have equal families exactly when they act identically on all
    block-diagonal states.
    """

    input_sig: Signature
    output_sig: Signature
    members: tuple[Matrix, ...]


def to_choi(s: KrausSet) -> ChoiFamily:
    """Per-input-block Choi matrices: sum of vec(E J_i) outer products."""
    d_in = dim(s.input_sig)
    d_out = dim(s.output_sig)
    members = []
    for off, n in zip(block_offsets(s.input_sig), s.input_sig.blocks):
        emb = np.zeros((d_in, n), dtype=complex)
        emb[off:off + n, :] = np.eye(n)
        member = np.zeros((d_out * n, d_out * n), dtype=complex)
        for e in s.ops:
            v = (e @ emb).reshape(-1, 1)  # row-major stacking
            member += v @ v.conj().T
        members.append(freeze(member))
    return ChoiFamily(s.input_sig, s.output_sig, tuple(members))


def _check_same_type(s: KrausSet, t: KrausSet):
    if s.input_sig != t.input_sig or s.output_sig != t.output_sig:
        raise SignatureMismatch(
            f"cannot compare maps of different type: "
            f"{s.input_sig.blocks}->{s.output_sig.blocks} vs "
            f"{t.input_sig.blocks}->{t.output_sig.blocks}")


def ext_equal(s: KrausSet, t: KrausSet, tol: float = DEFAULT_TOL) -> bool:
    """Extensional equality: do the two sets denote the same superoperator?"""
    _check_same_type(s, t)
    cs, ct = to_choi(s), to_choi(t)
    return all(np.abs(a - b).max() <= tol for a, b in zip(cs.members, ct.members))


def lowner_leq(s: KrausSet, t: KrausSet, tol: float = DEFAULT_TOL) -> bool:
    """Loewner order: True iff t - s is completely positive on block states."""
    _check_same_type(s, t)
    cs, ct = to_choi(s), to_choi(t)
    return all(is_psd(b - a, tol) for a, b in zip(cs.members, ct.members))


def is_reversible(s: KrausSet, tol: float = 1e-10) -> bool:
    """True iff the set is a single unitary operator."""
    if s.input_sig != s.output_sig:
        raise SignatureMismatch("reversibility needs equal input and output")
    if len(s.ops) != 1:
        return False
    u = s.ops[0]
    eye = np.eye(u.shape[0])
    return (np.abs(u.conj().T @ u - eye).max() <= tol
            and np.abs(u @ u.conj().T - eye).max() <= tol)
