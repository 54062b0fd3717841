"""Geometric phases of eigenstate families transported around the phase loop.

The loop phase is evaluated as a discrete Wilson loop,
``gamma = -arg prod_k <psi_k|psi_{k+1}>`` with ``psi_K = psi_0``, which does
not depend on the per-point phase the eigensolver happens to return.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import re

import numpy as np

from .eigensolve import bandwidth_order, hermitian_eig
from .errors import (BandTrackingAmbiguity, DegenerateBand, DegenerateParameters,
                     TruncationLeak, ZeroOverlap)
from .fock_algebra import fock_index
from .hamiltonians import build_jc_rotated, build_rabi_rotated
from .settings import DEFAULT_SETTINGS

TWO_PI = 2.0 * np.pi

ROTATED_BUILDERS = {"jc": build_jc_rotated, "rabi": build_rabi_rotated}


def principal_value(angle):
    """Reduce to ``(-pi, pi]``."""
    r = np.mod(angle, TWO_PI)
    return np.where(r > np.pi, r - TWO_PI, r) if np.ndim(r) else float(r - TWO_PI if r > np.pi else r)


def mod2pi_distance(a, b):
    """Distance between two angles on the circle, in ``[0, pi]``."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI)
    out = np.minimum(d, TWO_PI - d)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class LoopSpec:
    """Uniform closed loop ``phi_k = 2 pi k / steps``."""

    steps: int

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 8:
            raise ValueError(f"loop needs an integer number of steps >= 8, got {self.steps}")

    @property
    def angles(self):
        return TWO_PI * np.arange(self.steps) / self.steps


@dataclass(frozen=True)
class JCBand:
    """Dressed JC band: excitation index ``n`` and branch ``+1``/``-1``.

    ``(n, +)`` is the upper eigenstate of the block spanned by
    ``|n>|2>`` and ``|n+1>|1>``.
    """

    n: int
    branch: int

    def __post_init__(self):
        if self.n < 0 or self.branch not in (1, -1):
            raise ValueError(f"invalid JC band ({self.n}, {self.branch})")

    def __str__(self):
        return f"{self.n}{'+' if self.branch > 0 else '-'}"


def parse_band(text):
    """``"ground"`` -> 0, ``"3"`` -> ordinal 3, ``"0+"`` -> ``JCBand(0, +1)``."""
    text = str(text).strip()
    if text == "ground":
        return 0
    if text.isdigit():
        return int(text)
    m = re.fullmatch(r"(\d+)([+-])", text)
    if m:
        return JCBand(int(m.group(1)), 1 if m.group(2) == "+" else -1)
    raise ValueError(f"cannot parse band selector {text!r}")


def _branch_sign(branch):
    if branch in (1, "+", "plus"):
        return 1.0
    if branch in (-1, "-", "minus"):
        return -1.0
    raise ValueError(f"branch must be +1/-1, got {branch!r}")


def _top_occupation(states, n_trunc, levels):
    if n_trunc is None:
        return 0.0
    top = fock_index(states.shape[-1]) >= n_trunc - levels
    return float(np.max(np.sum(np.abs(states[..., top]) ** 2, axis=-1)))


@dataclass
class StateFamily:
    """Normalized states along a closed loop, one tracked band.

    Construction validates normalization and that every consecutive
    overlap modulus (including the closing one) stays above
    ``overlap_floor``.
    """

    states: np.ndarray
    band_label: object = None
    angles: np.ndarray = None
    energies: np.ndarray = None
    n_trunc: int = None
    overlap_floor: float = DEFAULT_SETTINGS.overlap_floor
    min_tracking_overlap: float = field(init=False)

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=np.complex128)
        if self.states.ndim != 2 or len(self.states) < 2:
            raise ValueError("a family needs at least two states of equal dimension")
        norms = np.linalg.norm(self.states, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise ValueError("family states must be normalized to 1e-12")
        mods = np.abs(_overlaps(self.states))
        self.min_tracking_overlap = float(mods.min())
        if self.min_tracking_overlap < self.overlap_floor:
            k = int(np.argmin(mods))
            phi = None if self.angles is None else float(self.angles[k])
            raise BandTrackingAmbiguity(
                f"overlap between steps {k} and {(k + 1) % len(mods)} is {mods[k]:.3g} "
                f"< {self.overlap_floor}", phi=phi)

    def __len__(self):
        return len(self.states)

    def reversed(self):
        ang = None if self.angles is None else self.angles[::-1].copy()
        en = None if self.energies is None else self.energies[::-1].copy()
        return StateFamily(self.states[::-1].copy(), self.band_label, ang, en,
                           self.n_trunc, self.overlap_floor)


@dataclass(frozen=True)
class BerryPhaseResult:
    gamma: float              # principal value in (-pi, pi]
    raw_sum: float            # sum of -arg(overlap) over the loop
    steps: int
    n_trunc: int
    min_overlap: float
    overlap_moduli: np.ndarray
    top_level_occupation: float


def _overlaps(states):
    return np.einsum("kd,kd->k", states.conj(), np.roll(states, -1, axis=0))


def wilson_loop_phase(family, settings=DEFAULT_SETTINGS):
    """Discrete Berry phase of a closed family."""
    ov = _overlaps(family.states)
    mods = np.abs(ov)
    k = int(np.argmin(mods))
    if mods[k] < settings.zero_overlap:
        phi = None if family.angles is None else float(family.angles[k])
        raise ZeroOverlap(f"overlap {mods[k]:.3e} at step {k}", phi=phi)
    raw = float(-np.sum(np.angle(ov)))
    return BerryPhaseResult(
        gamma=principal_value(raw),
        raw_sum=raw,
        steps=len(family),
        n_trunc=family.n_trunc,
        min_overlap=float(mods.min()),
        overlap_moduli=mods,
        top_level_occupation=_top_occupation(family.states, family.n_trunc,
                                             settings.leak_levels),
    )


def _jc_sector(dim, n):
    """Composite indices of ``|n>|2>`` and ``|n+1>|1>``."""
    if 2 * (n + 1) >= dim:
        raise ValueError(f"JC band n={n} needs at least {n + 2} Fock levels")
    return np.array([2 * n + 1, 2 * (n + 1)])


def eigenstate_family(builder, params, n_max, loop, band, settings=DEFAULT_SETTINGS,
                      *, reorder=True, workers=None):
    """Track one eigenstate of ``builder(params, phi, n_max)`` around the loop.

    Parameters
    ----------
    builder : callable
        Rotated-Hamiltonian constructor, e.g. ``build_rabi_rotated``.
    band : int or JCBand
        Eigenvalue ordinal at ``phi = 0`` (0 is the ground state), or a JC
        excitation label, in which case only the conserved 2x2 sector is
        diagonalized.
    reorder : bool
        Diagonalize in a bandwidth-minimizing basis order. This changes
        only speed, never the returned states beyond rounding.
    workers : int, optional
        Thread count for the per-angle diagonalizations. The result does not
        depend on it.

    Raises
    ------
    DegenerateBand, BandTrackingAmbiguity, TruncationLeak
        With ``phi`` set to the offending loop angle.
    """
    angles = loop.angles
    h0 = np.asarray(builder(params, angles[0], n_max))
    dim = h0.shape[0]
    if isinstance(band, JCBand):
        sector = _jc_sector(dim, band.n)
        rest = np.setdiff1d(np.arange(dim), sector)
        leak = np.max(np.abs(h0[np.ix_(sector, rest)])) if len(rest) else 0.0
        if leak > 1e-12 * max(1.0, np.max(np.abs(h0))):
            raise ValueError("builder does not conserve the JC excitation number")
        start = 1 if band.branch > 0 else 0
        perm = None
    else:
        sector = None
        start = int(band)
        if not 0 <= start < dim:
            raise ValueError(f"band ordinal {start} out of range for dimension {dim}")
        perm = bandwidth_order(h0) if reorder else None

    def decompose(phi):
        h = h0 if phi == angles[0] else np.asarray(builder(params, phi, n_max))
        if sector is not None:
            h = h[np.ix_(sector, sector)]
        return hermitian_eig(h, settings, perm=perm)

    def embed(vec):
        if sector is None:
            return vec
        full = np.zeros(dim, dtype=np.complex128)
        full[sector] = vec
        return full

    states = np.empty((loop.steps, dim), dtype=np.complex128)
    energies = np.empty(loop.steps)
    prev = None
    first = None
    for k, dec in enumerate(_map_decompositions(decompose, angles, workers)):
        phi = float(angles[k])
        if prev is None:
            j = start
            first = dec
        else:
            j = _pick_by_overlap(dec, prev, settings, phi)
        _check_gap(dec.values, j, settings, phi)
        prev = dec.vectors[:, j]
        states[k] = embed(prev)
        energies[k] = dec.values[j]
        occ = _top_occupation(states[k], n_max, settings.leak_levels)
        if occ > settings.leak_threshold:
            raise TruncationLeak(f"top {settings.leak_levels} Fock levels hold {occ:.3e} "
                                 f"at phi={phi:.17g}", phi=phi)
    if _pick_by_overlap(first, prev, settings, float(angles[0])) != start:
        raise BandTrackingAmbiguity("tracked band does not close onto its starting state",
                                    phi=float(angles[0]))
    return StateFamily(states, band_label=band, angles=angles, energies=energies,
                       n_trunc=n_max, overlap_floor=settings.overlap_floor)


def _map_decompositions(decompose, angles, workers, chunk=64):
    if not workers or workers <= 1:
        for phi in angles:
            yield decompose(phi)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for lo in range(0, len(angles), chunk):
            yield from pool.map(decompose, angles[lo:lo + chunk])


def _pick_by_overlap(dec, prev, settings, phi):
    ov = np.abs(dec.vectors.conj().T @ prev)
    if len(ov) > 1:
        top2 = np.partition(ov, -2)[-2:]
        if top2[1] - top2[0] < settings.ambiguity_margin:
            raise BandTrackingAmbiguity(
                f"top overlaps {top2[1]:.4f} and {top2[0]:.4f} too close at phi={phi:.17g}",
                phi=phi)
    return int(np.argmax(ov))


def _check_gap(values, j, settings, phi):
    if len(values) < 2:
        return
    floor = settings.gap_floor_rel * (values[-1] - values[0])
    gaps = []
    if j > 0:
        gaps.append(values[j] - values[j - 1])
    if j < len(values) - 1:
        gaps.append(values[j + 1] - values[j])
    if min(gaps) <= floor:
        raise DegenerateBand(f"band gap {min(gaps):.3e} <= {floor:.3e} at phi={phi:.17g}",
                             phi=phi)


def number_expectation_phase(state):
    """``2 pi <n>`` (principal value) for a composite state.

    For a family generated as ``exp(-i phi n) |psi_0>`` this equals the
    continuum Berry phase of the loop.
    """
    state = np.asarray(state, dtype=np.complex128)
    n_mean = float(np.sum(np.abs(state) ** 2 * fock_index(state.shape[-1])))
    return principal_value(TWO_PI * n_mean)


def jc_analytic_phase(delta, g, n, branch):
    """Exact JC loop phase of band ``(n, branch)``, principal value."""
    if delta == 0 and g == 0:
        raise DegenerateParameters("JC phase undefined for delta = g = 0")
    if n < 0:
        raise ValueError("excitation index must be >= 0")
    root = np.sqrt(0.25 * delta * delta + 2.0 * g * g * (n + 1))
    return principal_value(_branch_sign(branch) * np.pi * (1.0 - 0.5 * delta / root))


def ci_encircle_phase(delta, g, R, branch):
    """Phase for encircling the JC conical intersection at radius ``R``.

    Returned as the closed-form value (range ``[-2pi, 2pi]``), not reduced.
    """
    if R < 0:
        raise ValueError("radius must be >= 0")
    root = np.sqrt(0.25 * delta * delta + g * g * R * R)
    if root == 0:
        raise DegenerateParameters("conical-intersection phase undefined at delta = 0, gR = 0")
    return float(_branch_sign(branch) * np.pi * (1.0 - 0.5 * delta / root))


def jt_encircle_phase(nu, g, R, branch):
    """E x e Jahn-Teller phase at radius ``R``, principal value."""
    if R < 0:
        raise ValueError("radius must be >= 0")
    root = np.sqrt(nu * nu + 4.0 * g * g * R * R)
    if root == 0:
        raise DegenerateParameters("Jahn-Teller phase undefined at nu = 0, gR = 0")
    return principal_value(_branch_sign(branch) * np.pi * (1.0 - nu / root))


def loop_phase(model, params, band, n_max, steps, settings=DEFAULT_SETTINGS, **kwargs):
    """Wilson-loop phase of one band of a phase-rotated model.

    Returns ``(BerryPhaseResult, StateFamily)``.
    """
    family = eigenstate_family(ROTATED_BUILDERS[model], params, n_max, LoopSpec(steps),
                               band, settings, **kwargs)
    return wilson_loop_phase(family, settings), family
