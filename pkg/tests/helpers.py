"""Shared random generators and brute-force oracles for the test suite."""

import numpy as np

from qalt import DensityState, dim, make_kraus


def rand_unitary(rng, d):
    """Haar-ish unitary from the QR decomposition of a complex Gaussian."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q @ np.diag(np.diag(r) / np.abs(np.diag(r)))


def rand_kraus(rng, sig_in, sig_out=None, size=2, scale=1.0):
    """Random valid Kraus set with sum E'E = scale**2 * I (scale <= 1).

    When the signatures have matching block counts the operators are drawn
    block-diagonal, so the set is a genuine morphism between the block
    spaces (it maps block-diagonal states to block-diagonal states).
    """
    sig_out = sig_out if sig_out is not None else sig_in
    d_in, d_out = dim(sig_in), dim(sig_out)

    def draw():
        if len(sig_in.blocks) == len(sig_out.blocks):
            parts = [rng.normal(size=(mo, mi)) + 1j * rng.normal(size=(mo, mi))
                     for mo, mi in zip(sig_out.blocks, sig_in.blocks)]
            out = np.zeros((d_out, d_in), dtype=complex)
            ro = ci = 0
            for part in parts:
                out[ro:ro + part.shape[0], ci:ci + part.shape[1]] = part
                ro += part.shape[0]
                ci += part.shape[1]
            return out
        return rng.normal(size=(d_out, d_in)) + 1j * rng.normal(size=(d_out, d_in))

    ops = [draw() for _ in range(size)]
    total = sum(e.conj().T @ e for e in ops)
    w, v = np.linalg.eigh(total)
    inv_sqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    return make_kraus(sig_in, sig_out, [scale * e @ inv_sqrt for e in ops])


def rand_density(rng, sig, trace=1.0):
    """Random density state with the given total trace."""
    blocks = []
    weights = rng.random(len(sig.blocks)) + 0.05
    weights = trace * weights / weights.sum()
    for n, w in zip(sig.blocks, weights):
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        m = g @ g.conj().T
        blocks.append(w * m / np.trace(m).real)
    return DensityState(sig, tuple(blocks))


def psd_brute_force(m, tol):
    """Independent positivity check: hermitize, full eigendecomposition."""
    m = np.asarray(m, dtype=complex)
    if np.abs(m - m.conj().T).max() > tol:
        return False
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    # reconstruct as a sanity check that the decomposition is faithful
    assert np.abs(v @ np.diag(w) @ v.conj().T - (m + m.conj().T) / 2).max() < 1e-10
    return bool(w.min() >= -tol)


def superop_matrix(kset):
    """Full-space superoperator matrix via row-major vectorization."""
    d_in = dim(kset.input_sig)
    d_out = dim(kset.output_sig)
    out = np.zeros((d_out * d_out, d_in * d_in), dtype=complex)
    for e in kset.ops:
        out += np.kron(np.asarray(e), np.asarray(e).conj())
    return out
