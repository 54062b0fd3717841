"""Dense Hermitian eigendecomposition.

Householder tridiagonalization followed by implicit-shift QL. The kernel
comes in two interchangeable builds: a compiled Cython module
(``_kernels``) and a pure numpy one (``_pure``). The compiled build is
used when it imports; set ``CAVITYBERRY_BACKEND=python`` to force the
fallback.
"""
import os
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import reverse_cuthill_mckee

from ..errors import ConvergenceFailure, NonHermitianInput
from ..settings import DEFAULT_SETTINGS
from . import _pure

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None

_KERNELS = {"python": _pure}
if _kernels is not None:
    _KERNELS["compiled"] = _kernels

if os.environ.get("CAVITYBERRY_BACKEND", "").lower() == "python" or _kernels is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"

# relative window inside which two component magnitudes count as tied
_PIVOT_TIE = 1e-10


def available_backends():
    return sorted(_KERNELS)


def _kernel(backend):
    name = BACKEND if backend is None else backend
    try:
        return _KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}") from None


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues; ``vectors[:, j]`` pairs with ``values[j]``."""

    values: np.ndarray
    vectors: np.ndarray


def bandwidth_order(h):
    """Reverse Cuthill-McKee permutation of the nonzero pattern of ``h``.

    For chain-like Hamiltonians (JC excitation blocks, Rabi parity chains)
    the permuted matrix is tridiagonal, which lets the Householder stage
    skip every column.
    """
    pattern = csr_matrix(np.abs(np.asarray(h)) > 0.0)
    return np.asarray(reverse_cuthill_mckee(pattern, symmetric_mode=True), dtype=np.intp)


def apply_phase_convention(vectors):
    """Rotate each column so its largest-magnitude entry is real positive.

    Ties (within a relative 1e-10) go to the lowest index. Works in place
    and returns the array.
    """
    mags = np.abs(vectors)
    top = mags.max(axis=0)
    idx = np.argmax(mags >= top * (1.0 - _PIVOT_TIE), axis=0)
    cols = np.arange(vectors.shape[1])
    piv = vectors[idx, cols]
    scale = np.ones_like(piv)
    nz = top > 0.0
    scale[nz] = piv[nz].conj() / np.abs(piv[nz])
    vectors *= scale
    vectors[idx, cols] = np.abs(piv)
    return vectors


def hermitian_eig(h, settings=DEFAULT_SETTINGS, *, perm=None, backend=None):
    """Full eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    h : (n, n) array_like
        Hermitian to ``settings.hermitian_tol`` (max-entry norm).
    settings : NumericSettings
    perm : sequence of int, optional
        Basis permutation applied before the kernel (see
        ``bandwidth_order``); results are returned in the original basis.
    backend : {"compiled", "python"}, optional
        Kernel override; defaults to the module-level ``BACKEND``.

    Returns
    -------
    EigenDecomposition

    Raises
    ------
    NonHermitianInput
        If ``h`` is not square, has non-finite entries, or deviates from
        its adjoint by more than the tolerance.
    ConvergenceFailure
        If QL hits its iteration cap or the residual/orthonormality
        checks fail afterwards.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        raise NonHermitianInput(f"expected a non-empty square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise NonHermitianInput("matrix has non-finite entries")
    dev = np.max(np.abs(h - h.conj().T))
    if dev > settings.hermitian_tol:
        raise NonHermitianInput(f"max |H - H^dagger| = {dev:.3e} exceeds {settings.hermitian_tol:.1e}")
    herm = 0.5 * (h + h.conj().T)
    # exact power-of-two scaling to a unit max entry keeps the Householder
    # scalars (~ |h|^2) clear of underflow and overflow; ldexp never forms
    # the (possibly unrepresentable) scale factor itself
    amax = float(np.max(np.abs(herm)))
    shift = -int(np.frexp(amax)[1]) if amax > 0.0 else 0
    if shift:
        herm = np.ldexp(herm.real, shift) + 1j * np.ldexp(herm.imag, shift)
    work = herm
    if perm is not None:
        perm = np.asarray(perm, dtype=np.intp)
        work = herm[np.ix_(perm, perm)]

    w, vt, info = _kernel(backend).tridiagonal_eigh(work, settings.max_iter)
    if info:
        raise ConvergenceFailure(f"QL did not converge for eigenvalue {info - 1} "
                                 f"within {settings.max_iter} iterations")
    order = np.argsort(w, kind="stable")
    scaled = np.ascontiguousarray(w[order])
    vecs = vt[order].T
    if perm is not None:
        unperm = np.empty_like(vecs)
        unperm[perm, :] = vecs
        vecs = unperm
    vecs = apply_phase_convention(np.array(vecs, order="C"))

    # verify in scaled units so subnormal inputs cannot fake a failure
    res = np.linalg.norm(herm @ vecs - vecs * scaled, axis=0).max()
    if res > settings.residual_tol * np.linalg.norm(herm):
        raise ConvergenceFailure(f"eigen-residual {res:.3e} exceeds tolerance")
    ortho = np.max(np.abs(vecs.conj().T @ vecs - np.eye(len(scaled))))
    if ortho > settings.orthonormal_tol:
        raise ConvergenceFailure(f"eigenvectors not orthonormal ({ortho:.3e})")
    values = np.ldexp(scaled, -shift) if shift else scaled
    return EigenDecomposition(values, vecs)


def ground_state(h, settings=DEFAULT_SETTINGS, **kwargs):
    """Lowest eigenpair ``(value, vector)`` under the solver's phase convention."""
    dec = hermitian_eig(h, settings, **kwargs)
    return dec.values[0], dec.vectors[:, 0]
