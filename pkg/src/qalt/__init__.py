"""qalt: quantum alternation semantics toolkit.

A small quantum programming language with a quantum `if`/`case` construct,
its Kraus-decomposition denotational semantics, and the operator machinery
(Choi forms, the Loewner order, Stinespring dilations) needed to study where
that semantics succeeds and where it breaks down.
"""

from .core import (
    DEFAULT_TOL,
    DensityState,
    Signature,
    adjoint,
    basis_elements,
    dim,
    dsum,
    embed_gate,
    injection,
    is_psd,
    qbit_tensor,
    tensor,
    tensor_sig,
    unit_state,
)
from .kraus import (
    ChoiFamily,
    KrausSet,
    alternate,
    alternate_case,
    apply,
    apply_full,
    branch_sum,
    compose,
    ext_equal,
    identity_kraus,
    is_reversible,
    lowner_leq,
    make_kraus,
    to_choi,
    zero_kraus,
)
from .stinespring import (
    StinespringRep,
    alternation_stinespring,
    from_stinespring,
    to_stinespring,
    verify_stinespring,
)
from .syntax import Context, parse, pretty
from .check import elaborate, lint_closed_system, typecheck
from .semantics import (
    Denotation,
    denote,
    eval_direct,
    leading_permutation,
    measure_kraus,
    measure_stats,
    merge_kraus,
    outcome_probability,
    run,
    signature_of,
)
from .corpus import (
    TruthTable,
    balanced_tables,
    bit_reversal_permutation,
    cnot_matrix,
    constant_tables,
    dft_matrix,
    gen_deutsch,
    gen_deutsch_jozsa,
    gen_grover_oracle,
    gen_qft,
    oracle_context,
    qft_context,
    toffoli_matrix,
)

__all__ = [
    "DEFAULT_TOL",
    "DensityState",
    "Signature",
    "adjoint",
    "basis_elements",
    "dim",
    "dsum",
    "embed_gate",
    "injection",
    "is_psd",
    "qbit_tensor",
    "tensor",
    "tensor_sig",
    "unit_state",
    "ChoiFamily",
    "KrausSet",
    "alternate",
    "alternate_case",
    "apply",
    "apply_full",
    "branch_sum",
    "compose",
    "ext_equal",
    "identity_kraus",
    "is_reversible",
    "lowner_leq",
    "make_kraus",
    "to_choi",
    "zero_kraus",
    "StinespringRep",
    "alternation_stinespring",
    "from_stinespring",
    "to_stinespring",
    "verify_stinespring",
    "Context",
    "parse",
    "pretty",
    "elaborate",
    "lint_closed_system",
    "typecheck",
    "Denotation",
    "denote",
    "eval_direct",
    "leading_permutation",
    "measure_kraus",
    "measure_stats",
    "merge_kraus",
    "outcome_probability",
    "run",
    "signature_of",
    "TruthTable",
    "balanced_tables",
    "bit_reversal_permutation",
    "cnot_matrix",
    "constant_tables",
    "dft_matrix",
    "gen_deutsch",
    "gen_deutsch_jozsa",
    "gen_grover_oracle",
    "gen_qft",
    "oracle_context",
    "qft_context",
    "toffoli_matrix",
]

__version__ = "0.1.0"
