"""Jaynes-Cummings, Rabi and Lambda-atom Hamiltonians.

The JC model lives in the interaction picture (no free-field term); the
Rabi model keeps ``omega (n + 1/2)``. Phase-rotated variants are the
images under ``U(phi) = exp(-i phi n) (x) I_2``.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import fock_algebra as fa

TWO_PI = 2.0 * np.pi


def reduce_angle(phi):
    """Map an angle into ``[0, 2pi)``."""
    return float(np.mod(float(phi), TWO_PI))


@dataclass(frozen=True)
class JCParams:
    omega: float
    nu: float
    g: float

    def __post_init__(self):
        if self.g < 0:
            raise ValueError(f"coupling g must be >= 0, got {self.g}")

    @property
    def delta(self):
        return self.nu - self.omega

    @classmethod
    def from_detuning(cls, delta, g, omega=1.0):
        return cls(omega=omega, nu=omega + delta, g=g)


@dataclass(frozen=True)
class RabiParams:
    omega: float
    nu: float
    g: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"mode frequency omega must be > 0, got {self.omega}")
        if self.g < 0:
            raise ValueError(f"coupling g must be >= 0, got {self.g}")


@dataclass(frozen=True)
class LambdaParams:
    """Three-level atom; ``chi`` stands for the drive phase ``theta t + phi``."""

    E1: float
    E2: float
    E3: float
    kappa: float
    g: float
    chi: float = 0.0
    omega: float = 1.0

    @property
    def delta(self):
        return self.E3 - self.E1


def build_jc(params, n_max):
    """``(Delta/2) sigma_z + g sqrt2 (a^dag sigma_- + sigma_+ a)``."""
    return build_jc_rotated(params, 0.0, n_max)


def build_jc_rotated(params, phi, n_max):
    """JC Hamiltonian with the field phase-shifted by ``phi``.

    Couplings ``g sqrt2 (a^dag e^{-i phi} sigma_- + sigma_+ a e^{i phi})``;
    entries are filled directly rather than through dense tensor products.
    """
    n_max = fa._check_dim(n_max)
    phi = reduce_angle(phi)
    h = np.zeros((2 * n_max, 2 * n_max), dtype=np.complex128)
    idx = np.arange(2 * n_max)
    h[idx, idx] = np.where(idx % 2, 0.5, -0.5) * params.delta
    n = np.arange(n_max - 1)
    amp = params.g * fa.SQRT2 * np.sqrt(n + 1.0)
    # <n+1, 1| a^dag sigma_- |n, 2>
    h[2 * n + 2, 2 * n + 1] = amp * np.exp(-1j * phi)
    h[2 * n + 1, 2 * n + 2] = amp * np.exp(1j * phi)
    return h


def build_rabi(params, n_max):
    """``omega (n + 1/2) + (nu/2) sigma_z + 2g x sigma_x``; real symmetric."""
    return build_rabi_rotated(params, 0.0, n_max)


def build_rabi_rotated(params, phi, n_max):
    """Rabi Hamiltonian with coupling ``2g (cos phi x - sin phi p) sigma_x``.

    The rotated quadrature has matrix elements
    ``<n|cos phi x - sin phi p|n+1> = e^{i phi} sqrt(n+1)/sqrt2``.
    """
    n_max = fa._check_dim(n_max)
    phi = reduce_angle(phi)
    h = np.zeros((2 * n_max, 2 * n_max), dtype=np.complex128)
    idx = np.arange(2 * n_max)
    h[idx, idx] = params.omega * (idx // 2 + 0.5) + np.where(idx % 2, 0.5, -0.5) * params.nu
    n = np.arange(n_max - 1)
    amp = 2.0 * params.g * np.sqrt(n + 1.0) / fa.SQRT2
    up = amp * (np.exp(1j * phi) if phi != 0.0 else 1.0)
    for s in (0, 1):
        rows, cols = 2 * n + s, 2 * n + 2 + (1 - s)
        h[rows, cols] = up
        h[cols, rows] = np.conj(up)
    return h


def phase_rotation_operator(phi, n_max):
    """``exp(-i phi n) (x) I_2``."""
    phi = reduce_angle(phi)
    n = np.arange(fa._check_dim(n_max))
    return fa.kron(np.diag(np.exp(-1j * phi * n)), fa.identity(2))


def parity_operator(n_max):
    """``(-1)^n (x) sigma_z``, conserved by the Rabi model."""
    n = np.arange(fa._check_dim(n_max))
    return fa.kron(np.diag((-1.0) ** n), fa.pauli("z"))


def excitation_operator(n_max):
    """``n (x) I + I (x) (sigma_z + 1)/2``, conserved by the JC model."""
    up = 0.5 * (fa.pauli("z") + fa.identity(2))
    return fa.field_op(fa.number(n_max)) + fa.spin_op(up, n_max)


class EffectiveField(NamedTuple):
    bx: object
    by: object
    bz: object
    offset: object  # scalar part (harmonic energy for Rabi), zero for JC

    @property
    def vector(self):
        return np.array([self.bx, self.by, self.bz], dtype=float)


def effective_field(model, x, p, phi, params):
    """Semiclassical spin Hamiltonian ``B . sigma + offset`` at ``(x, p)``.

    Accepts scalars or broadcastable arrays for ``x``, ``p`` and ``phi``.

    ``jc``: the RWA coupling read as ``g (x sigma_x + p sigma_y)``, with the
    field amplitude ``(x - i p)/sqrt2`` rotated to ``(x - i p) e^{i phi}/sqrt2``.
    This (x, p) plane is the mirror image (p -> -p) of the operator
    quadratures in ``fock_algebra``.

    ``rabi``: ``B = (2g (cos phi x - sin phi p), 0, nu/2)`` plus the harmonic
    offset ``omega (x^2 + p^2)/2``. ``B_y`` is identically zero.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    if model == "jc":
        xr = c * x + s * p
        pr = -s * x + c * p
        zero = np.zeros(np.broadcast(xr, pr).shape)
        return EffectiveField(params.g * xr, params.g * pr,
                              0.5 * params.delta + zero, zero)
    if model == "rabi":
        xr = c * x - s * p
        shape = np.broadcast(xr, p).shape
        return EffectiveField(2.0 * params.g * xr + np.zeros(shape), np.zeros(shape),
                              0.5 * params.nu + np.zeros(shape),
                              params.omega * 0.5 * (x * x + p * p) + np.zeros(shape))
    raise ValueError(f"model must be 'jc' or 'rabi', got {model!r}")


def spin_matrix(field):
    """2x2 matrix ``B . sigma`` in the package's atomic ordering."""
    return (field.bx * fa.pauli("x") + field.by * fa.pauli("y")
            + field.bz * fa.pauli("z"))


def build_lambda_potential_matrix(params, x):
    """Real symmetric 3x3 interaction in the bare atomic basis.

    Diagonal ``(E1, E2, E3)``; the classical drive couples 1<->3 with
    ``kappa cos(chi)`` and the cavity couples 2<->3 with ``2 g x``.
    """
    v13 = params.kappa * np.cos(params.chi)
    v23 = 2.0 * params.g * float(x)
    return np.array([[params.E1, 0.0, v13],
                     [0.0, params.E2, v23],
                     [v13, v23, params.E3]], dtype=float)
