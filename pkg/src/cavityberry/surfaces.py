"""Born-Oppenheimer energy surfaces over the (x, p) plane.

The spin (or three-level) part is diagonalized with ``x`` and ``p`` taken as
numbers. The minimum-gap locus of a pair of sheets is then classified as an
isolated conical point, a seam line, or no degeneracy at all.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .berry import LoopSpec, StateFamily, wilson_loop_phase
from .eigensolve import hermitian_eig
from .errors import EmptyGrid, UndefinedMixingAngle
from .hamiltonians import RabiParams, effective_field, spin_matrix

SHEET_ORDER = ("E_minus", "E_0", "E_plus")

_RAYS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class Grid:
    """Uniform grid; node ``(i, j)`` sits at ``(x_min + i dx, p_min + j dp)``."""

    x_min: float
    x_max: float
    nx: int
    p_min: float
    p_max: float
    np: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.p_min < self.p_max):
            raise ValueError("grid bounds must satisfy min < max")
        if int(self.nx) != self.nx or int(self.np) != self.np or self.nx < 2 or self.np < 2:
            raise ValueError("grid needs at least 2 nodes per axis")

    @classmethod
    def parse(cls, spec):
        """Parse ``"xmin:xmax:nx,pmin:pmax:np"``."""
        try:
            xs, ps = spec.split(",")
            x0, x1, nx = xs.split(":")
            p0, p1, npts = ps.split(":")
            return cls(float(x0), float(x1), int(nx), float(p0), float(p1), int(npts))
        except ValueError as exc:
            raise ValueError(f"bad grid spec {spec!r}: {exc}") from None

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dp(self):
        return (self.p_max - self.p_min) / (self.np - 1)

    @property
    def x(self):
        return self.x_min + np.arange(self.nx) * self.dx

    @property
    def p(self):
        return self.p_min + np.arange(self.np) * self.dp

    def mesh(self):
        """``(X, P)`` arrays of shape ``(nx, np)``."""
        return np.meshgrid(self.x, self.p, indexing="ij")


@dataclass
class SurfaceGrid:
    grid: Grid
    sheets: dict

    def __post_init__(self):
        shape = (self.grid.nx, self.grid.np)
        for name, arr in self.sheets.items():
            if np.shape(arr) != shape:
                raise ValueError(f"sheet {name} has shape {np.shape(arr)}, expected {shape}")
        present = [self.sheets[n] for n in SHEET_ORDER if n in self.sheets]
        for lo, hi in zip(present, present[1:]):
            if np.any(lo > hi):
                raise ValueError("sheets violate the ordering E_minus <= E_0 <= E_plus")

    @property
    def names(self):
        return [n for n in SHEET_ORDER if n in self.sheets]

    def rows(self):
        """Row-major ``(x, p, sheet...)`` table, columns in ``names`` order."""
        X, P = self.grid.mesh()
        cols = [X.ravel(), P.ravel()] + [self.sheets[n].ravel() for n in self.names]
        return np.column_stack(cols)


def jc_surfaces(delta, g, grid):
    X, P = grid.mesh()
    root = np.sqrt(0.25 * delta * delta + g * g * (X * X + P * P))
    return SurfaceGrid(grid, {"E_minus": -root, "E_plus": root})


def rabi_surfaces(omega, nu, g, grid):
    X, P = grid.mesh()
    harmonic = omega * (0.5 * P * P + 0.5 * X * X)
    root = np.sqrt(0.25 * nu * nu + 4.0 * g * g * X * X)
    return SurfaceGrid(grid, {"E_minus": harmonic - root, "E_plus": harmonic + root})


def lambda_surfaces(params, grid, chi=None):
    """Three adiabatic sheets of the Lambda atom with ``E1 = E2``.

    ``E_pm = omega (x^2 + p^2)/2 + (delta pm sqrt(delta^2 + G^2))/2`` and
    ``E_0 = omega (x^2 + p^2)/2`` with
    ``G^2 = kappa^2 cos^2 chi + 4 g^2 x^2``. The ordering
    ``E_minus <= E_0 <= E_plus`` holds for either sign of ``delta``.
    """
    if params.E1 != params.E2:
        raise ValueError("Lambda surfaces require E1 == E2")
    chi = params.chi if chi is None else chi
    X, P = grid.mesh()
    harmonic = params.omega * (0.5 * P * P + 0.5 * X * X)
    delta = params.delta
    G2 = (params.kappa * np.cos(chi)) ** 2 + 4.0 * params.g ** 2 * X * X
    root = np.sqrt(delta * delta + G2)
    return SurfaceGrid(grid, {
        "E_minus": harmonic + 0.5 * (delta - root),
        "E_0": harmonic.copy(),
        "E_plus": harmonic + 0.5 * (delta + root),
    })


@dataclass
class DegeneracyReport:
    min_gap: float
    argmin_nodes: list
    classification: str            # "point", "line" or "none"
    gap_scaling_exponent: float    # nan when no ray has a rising gap
    pair: tuple = ("E_minus", "E_plus")
    tol: float = 0.0
    argmin_geometry: str = "irregular"   # geometry of the argmin set alone
    centroid: tuple = (0.0, 0.0)
    line_direction: str = None     # axis the seam runs along ("x" or "p")
    line_position: float = None    # mean coordinate across the seam
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        alpha = self.gap_scaling_exponent
        return {
            "pair": list(self.pair),
            "tol": self.tol,
            "min_gap": self.min_gap,
            "classification": self.classification,
            "argmin_geometry": self.argmin_geometry,
            "argmin_nodes": [list(map(int, n)) for n in self.argmin_nodes],
            "centroid": list(self.centroid),
            "gap_scaling_exponent": None if not np.isfinite(alpha) else alpha,
            "line_direction": self.line_direction,
            "line_position": self.line_position,
        }


def _argmin_geometry(mask):
    nx, np_ = mask.shape
    labels, count = ndimage.label(mask, structure=np.ones((3, 3)))
    ii, jj = np.nonzero(mask)
    if count == 1 and len(ii) <= 4:
        return "point", None
    if len(np.unique(jj)) >= 0.8 * np_:
        return "line", "p"
    if len(np.unique(ii)) >= 0.8 * nx:
        return "line", "x"
    return "irregular", None


def _ray_exponent(gap, grid, ci, cj):
    """Median slope of log(gap - gap_center) vs log(distance) over 8 rays."""
    base = gap[ci, cj]
    slopes = []
    for di, dj in _RAYS:
        r, v = [], []
        s = 1
        while 0 <= ci + s * di < grid.nx and 0 <= cj + s * dj < grid.np:
            excess = gap[ci + s * di, cj + s * dj] - base
            if excess > 0:
                r.append(np.hypot(s * di * grid.dx, s * dj * grid.dp))
                v.append(excess)
            s += 1
        if len(r) >= 2:
            slopes.append(np.polyfit(np.log(r), np.log(v), 1)[0])
    return float(np.median(slopes)) if slopes else float("nan")


def detect_degeneracy(surface, pair=("E_minus", "E_plus"), tol=None):
    """Locate and classify the minimum-gap locus of two sheets.

    The argmin set holds every node with ``gap <= min_gap + tol``; ``tol``
    defaults to ``1e-9`` times the spectral range of the pair. The sheets
    are degenerate when ``min_gap <= tol``; a degenerate argmin set that is
    one connected cluster of at most 4 nodes is a ``point``, one that
    covers at least 80% of an axis is a ``line``.
    """
    lo, hi = (np.asarray(surface.sheets[name], dtype=float) for name in pair)
    if lo.size == 0:
        raise EmptyGrid("surface has no nodes")
    gap = hi - lo
    if tol is None:
        tol = 1e-9 * float(max(hi.max(), lo.max()) - min(hi.min(), lo.min()))
    if not tol > 0:
        raise ValueError("tol must be > 0")
    grid = surface.grid
    min_gap = float(gap.min())
    mask = gap <= min_gap + tol
    geometry, direction = _argmin_geometry(mask)
    ii, jj = np.nonzero(mask)
    cx = float(np.mean(grid.x_min + ii * grid.dx))
    cp = float(np.mean(grid.p_min + jj * grid.dp))
    ci = int(np.clip(round((cx - grid.x_min) / grid.dx), 0, grid.nx - 1))
    cj = int(np.clip(round((cp - grid.p_min) / grid.dp), 0, grid.np - 1))
    alpha = _ray_exponent(gap, grid, ci, cj)

    degenerate = min_gap <= tol
    classification = geometry if degenerate and geometry in ("point", "line") else "none"
    position = None
    if direction == "p":
        position = cx
    elif direction == "x":
        position = cp
    return DegeneracyReport(
        min_gap=min_gap,
        argmin_nodes=list(zip(ii.tolist(), jj.tolist())),
        classification=classification,
        gap_scaling_exponent=alpha,
        pair=tuple(pair),
        tol=float(tol),
        argmin_geometry=geometry,
        centroid=(cx, cp),
        line_direction=direction,
        line_position=position,
    )


def is_conical(report, lo=0.9, hi=1.1):
    return report.classification == "point" and lo <= report.gap_scaling_exponent <= hi


def bo_spin_eigenstates_rabi(x, p, phi, nu, g=0.5):
    """Real adiabatic spin states of the semiclassical Rabi Hamiltonian.

    The mixing angle satisfies ``tan theta = 4 g (cos phi x - sin phi p)/nu``,
    which is ``2 (cos phi x - sin phi p)/nu`` at the default ``g = 1/2``.
    ``theta`` is taken in ``(-pi/2, pi/2)`` for ``nu > 0`` and in
    ``(pi/2, 3pi/2)`` for ``nu < 0`` so it varies continuously in ``x``.

    Returns ``(theta, v_plus, v_minus)``; the vectors are real and given in
    the ``(|1>, |2>)`` ordering: ``v_plus = cos(theta/2)|2> + sin(theta/2)|1>``
    and ``v_minus = sin(theta/2)|2> - cos(theta/2)|1>``.
    """
    b = effective_field("rabi", x, p, phi, RabiParams(omega=1.0, nu=nu, g=g))
    bx, bz = float(b.bx), float(b.bz)
    if bx == 0.0 and bz == 0.0:
        raise UndefinedMixingAngle("mixing angle undefined for nu = 0 on the x_phi = 0 line")
    theta = float(np.arctan2(bx, bz))
    if bz < 0 and theta < 0:
        theta += 2.0 * np.pi
    c, s = np.cos(0.5 * theta), np.sin(0.5 * theta)
    return theta, np.array([s, c]), np.array([-c, s])


@dataclass(frozen=True)
class ConnectionResult:
    increments: np.ndarray   # -arg <Theta_k|Theta_{k+1}> per step
    total: float
    overlaps: np.ndarray


def real_gauge_connection(R, loop, nu, branch, g=0.5):
    """Discrete connection of the real-gauge Rabi spin states around the loop.

    The field point is held at ``(x, p) = (R, 0)`` while the external phase
    runs over ``loop``, so the coupling argument is ``R cos phi_k``. All
    overlaps are real, so every increment is exactly zero.
    """
    if nu == 0:
        raise UndefinedMixingAngle("real-gauge states need nu != 0")
    pick = 1 if branch in (1, "+") else 2
    vecs = np.array([bo_spin_eigenstates_rabi(R, 0.0, phi, nu, g)[pick] for phi in loop.angles])
    ov = np.einsum("kd,kd->k", vecs, np.roll(vecs, -1, axis=0))
    inc = -np.angle(ov)
    return ConnectionResult(increments=inc, total=float(np.sum(inc)), overlaps=ov)


def jc_spin_family(R, loop, delta, g, branch):
    """Spin eigenstates of the semiclassical JC field around radius ``R``.

    Uses ``effective_field("jc", R, 0, phi)``; the field rotates about z.
    """
    from .hamiltonians import JCParams

    params = JCParams.from_detuning(delta, g)
    j = 1 if branch in (1, "+") else 0
    states = []
    for phi in loop.angles:
        dec = hermitian_eig(spin_matrix(effective_field("jc", R, 0.0, phi, params)))
        if dec.values[1] - dec.values[0] <= 0.0:
            raise UndefinedMixingAngle("spin levels degenerate on the loop")
        states.append(dec.vectors[:, j])
    return StateFamily(np.array(states), band_label=("jc-spin", branch), angles=loop.angles)


def jc_spin_loop_phase(R, loop, delta, g, branch):
    """Wilson-loop phase of the semiclassical JC spin family."""
    return wilson_loop_phase(jc_spin_family(R, loop, delta, g, branch))
