"""Quadrature transform kernel, compiled when available.

The hot loop of the whole package is

    out[i, k] = sum_j f[i, j] * gt[k, j]

with real f (wavefunction products over quadrature nodes) and complex gt
(Simpson weights folded with the Fourier/moment factors, transposed to make
the inner sum contiguous). The Cython extension runs this loop with an
explicit ascending-j sum and optional OpenMP over rows; the pure-numpy
fallback is a BLAS matmul. Both are deterministic run to run; the compiled
path is additionally bitwise identical between serial and parallel execution
because each output element is an independent ascending sum.
"""

import numpy as np

try:
    from wignerflow._ckernel import transform as _compiled_transform

    HAVE_COMPILED = True
except ImportError:  # pure-Python install, or extension build skipped
    _compiled_transform = None
    HAVE_COMPILED = False


def fallback_transform(f, gt, num_threads=1):
    """Pure-numpy reference path: a single matmul."""
    return f @ gt.T


def transform(f, gt, num_threads=1, backend=None):
    """Apply the quadrature transform.

    Parameters
    ----------
    f : (n_x, n_y) float64, C-contiguous
    gt : (n_p, n_y) complex128, C-contiguous
    num_threads : rows are distributed over this many threads (compiled path)
    backend : None for the default, or "compiled" / "fallback" to force one
    """
    if backend is None:
        backend = "compiled" if HAVE_COMPILED else "fallback"
    if backend == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel requested but not built")
        return _compiled_transform(
            np.ascontiguousarray(f), np.ascontiguousarray(gt), num_threads
        )
    if backend == "fallback":
        return fallback_transform(f, gt)
    raise ValueError(f"unknown backend {backend!r}")


def backend_name():
    return "compiled" if HAVE_COMPILED else "fallback"
