"""Truncated boson operators, two-level operators and their tensor products.

Conventions used by every module in the package:

* Fock space is truncated to ``|0>, ..., |N-1>``.
* The atomic basis is ordered ``(|1>, |2>)`` with ``|1>`` the ground state,
  so ``sigma_z = diag(-1, +1)`` and ``sigma_plus = |2><1|``.
* Composite states are field-major: ``|n> (x) |s>`` sits at index ``2n + s``.
* Quadratures are ``x = (a + a^dag)/sqrt2`` and ``p = i(a^dag - a)/sqrt2`` so
  that ``[x, p] = i`` away from the truncation edge.
"""
import numpy as np

SQRT2 = np.sqrt(2.0)


def _check_dim(n_max):
    n_max = int(n_max)
    if n_max < 2:
        raise ValueError(f"truncation dimension must be >= 2, got {n_max}")
    return n_max


def annihilation(n_max):
    """Lowering operator with ``<n-1|a|n> = sqrt(n)``."""
    n_max = _check_dim(n_max)
    return np.diag(np.sqrt(np.arange(1, n_max, dtype=float)), k=1).astype(np.complex128)


def creation(n_max):
    return annihilation(n_max).conj().T.copy()


def number(n_max):
    n_max = _check_dim(n_max)
    return np.diag(np.arange(n_max, dtype=float)).astype(np.complex128)


def quadrature_x(n_max):
    a = annihilation(n_max)
    return (a + a.conj().T) / SQRT2


def quadrature_p(n_max):
    a = annihilation(n_max)
    return 1j * (a.conj().T - a) / SQRT2


def identity(dim):
    return np.eye(int(dim), dtype=np.complex128)


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    # fixed by sigma_x sigma_y = i sigma_z in the (|1>, |2>) ordering
    "y": np.array([[0, 1j], [-1j, 0]], dtype=np.complex128),
    "z": np.array([[-1, 0], [0, 1]], dtype=np.complex128),
}


def pauli(axis):
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"axis must be 'x', 'y' or 'z', got {axis!r}") from None


def sigma_plus():
    """Raising operator ``|2><1| = (sigma_x + i sigma_y)/2``."""
    return np.array([[0, 0], [1, 0]], dtype=np.complex128)


def sigma_minus():
    return np.array([[0, 1], [0, 0]], dtype=np.complex128)


def kron(a, b):
    """Tensor product; the first factor is the slow (outer) index."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    (ra, ca), (rb, cb) = a.shape, b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def field_op(op):
    """Lift a field operator to the composite space (``op (x) I_2``)."""
    return kron(op, identity(2))


def spin_op(op, n_max):
    """Lift a 2x2 atomic operator to the composite space (``I_N (x) op``)."""
    return kron(identity(n_max), op)


def fock_index(dim):
    """Photon number of every composite basis index."""
    return np.arange(int(dim)) // 2
