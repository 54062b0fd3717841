import numpy as np
import pytest

from cavityberry.berry import LoopSpec, ci_encircle_phase, mod2pi_distance
from cavityberry.errors import EmptyGrid, UndefinedMixingAngle
from cavityberry.hamiltonians import (
    JCParams, LambdaParams, RabiParams, build_lambda_potential_matrix, effective_field,
    spin_matrix,
)
from cavityberry.surfaces import (
    Grid, SurfaceGrid, bo_spin_eigenstates_rabi, detect_degeneracy, is_conical,
    jc_spin_loop_phase, jc_surfaces, lambda_surfaces, rabi_surfaces, real_gauge_connection,
)

GRID = Grid.parse("-2:2:41,-1.5:1.5:31")


def test_grid_parse_exact():
    g = Grid.parse("-2:2:101,-0.1:0.3:5")
    assert (g.x_min, g.x_max, g.nx, g.p_min, g.p_max, g.np) == (-2.0, 2.0, 101, -0.1, 0.3, 5)
    assert g.x[0] == -2.0 and g.x[50] == 0.0 and g.x[-1] == 2.0
    X, P = g.mesh()
    assert X.shape == (101, 5) and P[0, 1] == g.p[1]


@pytest.mark.parametrize("spec", ["", "1:2:3", "2:1:5,0:1:5", "0:1:1,0:1:5", "0:1:x,0:1:5",
                                  "0,1:5,0:1:5", "0:1:5.5,0:1:5"])
def test_grid_parse_rejects(spec):
    with pytest.raises(ValueError):
        Grid.parse(spec)


def test_jc_sheets_match_spin_diagonalization(rng):
    params = JCParams.from_detuning(0.7, 0.9)
    surf = jc_surfaces(params.delta, params.g, GRID)
    X, P = GRID.mesh()
    for i, j in rng.integers(0, [GRID.nx, GRID.np], size=(20, 2)):
        e = np.linalg.eigvalsh(spin_matrix(effective_field("jc", X[i, j], P[i, j], 0.0, params)))
        assert np.allclose(e, [surf.sheets["E_minus"][i, j], surf.sheets["E_plus"][i, j]],
                           atol=1e-13)


def test_rabi_sheets_match_spin_diagonalization(rng):
    params = RabiParams(1.2, 0.6, 0.8)
    surf = rabi_surfaces(params.omega, params.nu, params.g, GRID)
    X, P = GRID.mesh()
    for i, j in rng.integers(0, [GRID.nx, GRID.np], size=(20, 2)):
        f = effective_field("rabi", X[i, j], P[i, j], 0.0, params)
        e = np.linalg.eigvalsh(spin_matrix(f)) + f.offset
        assert np.allclose(e, [surf.sheets["E_minus"][i, j], surf.sheets["E_plus"][i, j]],
                           atol=1e-13)


@pytest.mark.parametrize("delta", [1.5, 0.0, -0.7])
def test_lambda_sheets_are_halved_coupling_eigenvalues(delta):
    p = LambdaParams(E1=0.0, E2=0.0, E3=delta, kappa=0.9, g=0.6, chi=0.4, omega=1.3)
    surf = lambda_surfaces(p, GRID)
    X, P = GRID.mesh()
    half = LambdaParams(0.0, 0.0, delta, p.kappa / 2, p.g / 2, p.chi)
    for i in range(0, GRID.nx, 7):
        for j in range(0, GRID.np, 6):
            e = np.linalg.eigvalsh(build_lambda_potential_matrix(half, X[i, j]))
            e += p.omega * (X[i, j] ** 2 + P[i, j] ** 2) / 2
            got = [surf.sheets[k][i, j] for k in surf.names]
            assert np.allclose(got, e, atol=1e-12)
    assert surf.names == ["E_minus", "E_0", "E_plus"]


def test_lambda_requires_equal_lower_levels():
    with pytest.raises(ValueError):
        lambda_surfaces(LambdaParams(0.0, 0.1, 1.0, 1.0, 1.0), GRID)


def test_surface_grid_validation():
    with pytest.raises(ValueError):
        SurfaceGrid(GRID, {"E_minus": np.zeros((2, 2))})
    with pytest.raises(ValueError):
        SurfaceGrid(GRID, {"E_minus": np.ones((41, 31)), "E_plus": np.zeros((41, 31))})


def test_rows_are_row_major():
    surf = jc_surfaces(0.0, 1.0, Grid.parse("0:1:3,0:2:2"))
    rows = surf.rows()
    assert rows.shape == (6, 4)
    assert np.allclose(rows[:3, :2], [[0, 0], [0, 2], [0.5, 0]])


def test_jc_conical_point_detection():
    rep = detect_degeneracy(jc_surfaces(0.0, 1.0, Grid.parse("-2:2:101,-2:2:101")))
    assert rep.classification == "point"
    assert rep.argmin_nodes == [(50, 50)]
    assert rep.min_gap == 0.0
    assert is_conical(rep)
    assert np.allclose(rep.centroid, [0.0, 0.0])


def test_jc_gapped_is_none():
    rep = detect_degeneracy(jc_surfaces(0.5, 1.0, Grid.parse("-2:2:101,-2:2:101")))
    assert rep.classification == "none"
    assert rep.min_gap == pytest.approx(0.5)
    assert rep.argmin_geometry == "point"


def test_rabi_seam_line():
    rep = detect_degeneracy(rabi_surfaces(1.0, 0.0, 1.0, Grid.parse("-2:2:101,-2:2:101")))
    assert rep.classification == "line"
    assert rep.line_direction == "p" and rep.line_position == pytest.approx(0.0, abs=1e-15)
    assert len(rep.argmin_nodes) == 101


def test_quadratic_touching_has_exponent_two():
    g = Grid.parse("-1:1:51,-1:1:51")
    X, P = g.mesh()
    r2 = X ** 2 + P ** 2
    rep = detect_degeneracy(SurfaceGrid(g, {"E_minus": -r2, "E_plus": r2}))
    assert rep.classification == "point"
    assert rep.gap_scaling_exponent == pytest.approx(2.0, abs=1e-9)
    assert not is_conical(rep)


def test_detect_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        detect_degeneracy(jc_surfaces(0.0, 1.0, GRID), tol=0.0)
    assert issubclass(EmptyGrid, ValueError)


def test_report_to_dict_round_trip():
    d = detect_degeneracy(jc_surfaces(0.3, 1.0, GRID)).to_dict()
    assert d["classification"] == "none"
    assert set(d) >= {"min_gap", "argmin_nodes", "classification", "gap_scaling_exponent"}


@pytest.mark.parametrize("nu", [1.0, -0.8, 0.3])
@pytest.mark.parametrize("phi", [0.0, 1.1, 2.9])
def test_bo_spin_eigenstates(nu, phi):
    params = RabiParams(1.0, nu, 0.5)
    x, p = 0.7, -0.4
    theta, vp, vm = bo_spin_eigenstates_rabi(x, p, phi, nu)
    h = spin_matrix(effective_field("rabi", x, p, phi, params))
    lam = np.sqrt(nu ** 2 / 4 + (np.cos(phi) * x - np.sin(phi) * p) ** 2)
    assert np.allclose(h @ vp, lam * vp)
    assert np.allclose(h @ vm, -lam * vm)
    assert np.isrealobj(vp) and np.isrealobj(vm)
    assert np.tan(theta) == pytest.approx(2 * (np.cos(phi) * x - np.sin(phi) * p) / nu)


def test_bo_mixing_angle_continuous_for_negative_nu():
    thetas = [bo_spin_eigenstates_rabi(x, 0.0, 0.0, -1.0)[0] for x in np.linspace(-2, 2, 41)]
    assert np.all(np.abs(np.diff(thetas)) < 0.3)
    assert np.all((np.array(thetas) > np.pi / 2) & (np.array(thetas) < 3 * np.pi / 2))


def test_undefined_mixing_angle():
    with pytest.raises(UndefinedMixingAngle):
        bo_spin_eigenstates_rabi(0.0, 0.0, 0.0, 0.0)
    with pytest.raises(UndefinedMixingAngle):
        real_gauge_connection(1.0, LoopSpec(16), 0.0, 1)


def test_real_gauge_increments_vanish():
    res = real_gauge_connection(1.5, LoopSpec(64), 0.7, 1)
    assert np.all(res.increments == 0.0)
    assert res.total == 0.0


@pytest.mark.parametrize("delta", [2.0, 0.0, -1.0])
@pytest.mark.parametrize("branch", [1, -1])
def test_jc_spin_loop_matches_cone_formula(delta, branch):
    res = jc_spin_loop_phase(1.5, LoopSpec(2048), delta, 0.8, branch)
    assert mod2pi_distance(res.gamma, ci_encircle_phase(delta, 0.8, 1.5, branch)) < 1e-5
