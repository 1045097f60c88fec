"""Kernel selection: compiled extension if built, pure Python otherwise.

Set MUCHECK_PURE=1 to force the pure-Python kernels (used by the benchmark
and by the compiled-vs-pure equivalence test).
"""

import os

if os.environ.get("MUCHECK_PURE") == "1":
    from mucheck import _kernel_py as impl
else:
    try:
        from mucheck import _kernel as impl  # type: ignore[attr-defined]
    except ImportError:
        from mucheck import _kernel_py as impl

COMPILED = impl.COMPILED
suffix_cmp = impl.suffix_cmp
row_leq = impl.row_leq
row_eq = impl.row_eq
zero_prefix = impl.zero_prefix
max_rows = impl.max_rows
min_rows = impl.min_rows
eval_prime_mask = impl.eval_prime_mask
