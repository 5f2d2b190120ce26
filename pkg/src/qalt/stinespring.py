"""Stinespring representations of Kraus sets.

A representation is a pair (ancilla dimension, V) with V mapping the output
space into input (x) ancilla and T(rho) = V' (rho (x) I_A) V.  The ancilla
basis is indexed by the canonical operator ordering of the originating Kraus
set, so constructions here are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL,
    Matrix,
    Signature,
    as_matrix,
    basis_elements,
    block_diag,
    dim,
    freeze,
    is_psd,
    qbit_tensor,
)
from .errors import (
    DimensionMismatch,
    EmptySetError,
    SignatureMismatch,
    TraceConditionViolated,
)
from .kraus import KrausSet, alternation_elements, apply_full, make_kraus


@dataclass(frozen=True)
class StinespringRep:
    """Dilation data: V maps the output space into input (x) ancilla.

    Rows of ``v`` are indexed (input basis) * ancilla_dim + (ancilla basis);
    columns by the output basis.  The represented channel must be
    trace-nonincreasing, i.e. the ancilla partial trace of VV' is at most the
    identity (equivalently, the read-off operators satisfy sum E'E <= I).
    """

    ancilla_dim: int
    v: Matrix
    input_sig: Signature
    output_sig: Signature

    def __post_init__(self):
        v = freeze(as_matrix(self.v))
        expected = (dim(self.input_sig) * self.ancilla_dim, dim(self.output_sig))
        if v.shape != expected:
            raise DimensionMismatch(
                f"dilation operator of shape {v.shape}, expected {expected}")
        d_in = dim(self.input_sig)
        gram = (v @ v.conj().T).reshape(
            d_in, self.ancilla_dim, d_in, self.ancilla_dim)
        traced = np.einsum("iaja->ij", gram)
        if not is_psd(np.eye(d_in) - traced, DEFAULT_TOL):
            raise TraceConditionViolated("dilation is not trace-nonincreasing")
        object.__setattr__(self, "v", v)


def to_stinespring(s: KrausSet) -> StinespringRep:
    """Dilate a nonempty Kraus set: V psi = sum_E E' psi (x) |E>."""
    if not s.ops:
        raise EmptySetError("the zero map has no canonical dilation here")
    a = len(s.ops)
    v = np.zeros((dim(s.input_sig) * a, dim(s.output_sig)), dtype=complex)
    for k, e in enumerate(s.ops):
        unit = np.zeros((a, 1), dtype=complex)
        unit[k, 0] = 1.0
        v += np.kron(e.conj().T, unit)
    return StinespringRep(a, v, s.input_sig, s.output_sig)


def from_stinespring(rep: StinespringRep) -> KrausSet:
    """Read the Kraus operators back off the ancilla components of V."""
    ops = []
    for k in range(rep.ancilla_dim):
        e_dag = rep.v[k::rep.ancilla_dim, :]  # (I (x) <k|) V
        ops.append(e_dag.conj().T)
    return make_kraus(rep.input_sig, rep.output_sig, ops)


def verify_stinespring(s: KrausSet, rep: StinespringRep,
                       tol: float = DEFAULT_TOL) -> bool:
    """Check V' (rho (x) I_A) V = sum E rho E' on a spanning set of inputs."""
    if rep.input_sig != s.input_sig or rep.output_sig != s.output_sig:
        raise DimensionMismatch(
            "representation and Kraus set act on different spaces")
    eye_a = np.eye(rep.ancilla_dim, dtype=complex)
    for blocks in basis_elements(s.input_sig):
        rho = block_diag(blocks)
        lhs = rep.v.conj().T @ np.kron(rho, eye_a) @ rep.v
        rhs = apply_full(s, rho)
        if np.abs(lhs - rhs).max() > tol:
            return False
    return True


def alternation_stinespring(s: KrausSet, t: KrausSet) -> StinespringRep:
    """Dilation of the alternation with environment A' (x) A.

    The ancilla is the tensor product of the branch environments with the
    second branch's factor leading: composite index |F> (x) |E|  ->
    index(F) * |s| + index(E).
    """
    if not s.ops or not t.ops:
        raise EmptySetError("alternation dilation needs two nonempty branches")
    if s.input_sig != t.input_sig or s.output_sig != t.output_sig:
        raise SignatureMismatch("alternation branches must share signatures")
    elements = alternation_elements(s, t)  # ordered E-major: (e, f) pairs
    a = len(s.ops) * len(t.ops)
    in_sig = qbit_tensor(s.input_sig)
    out_sig = qbit_tensor(s.output_sig)
    v = np.zeros((dim(in_sig) * a, dim(out_sig)), dtype=complex)
    for pos, alt in enumerate(elements):
        e_idx, f_idx = divmod(pos, len(t.ops))
        unit = np.zeros((a, 1), dtype=complex)
        unit[f_idx * len(s.ops) + e_idx, 0] = 1.0
        v += np.kron(alt.conj().T, unit)
    return StinespringRep(a, v, in_sig, out_sig)
