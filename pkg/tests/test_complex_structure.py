import numpy as np
import pytest

from conftest import random_pd_metric
from starsplit import catalog
from starsplit.complex_structure import (InvariantComplexManifold, IntegrationWarning,
                                         PullbackMap, adjoint_del, adjoint_delbar,
                                         l2_pairing, laplacian_delbar, pullback,
                                         pullback_metric, structure_compatibility,
                                         is_structure_compatible)
from starsplit.errors import InputError, UnboundParameterError
from starsplit.forms import Form, approx_equal, basis_masks
from starsplit.metric import (HermitianMetric, hodge_star, lefschetz_lambda,
                              omega_form, omega_power)
from starsplit.operators import random_form


def ii(n, j, k=None):
    return Form.monomial(n, (j,), (j if k is None else k,), 1j)


def stokes_violating_manifold():
    """d^2 = 0 holds but a top-degree exact coefficient survives."""
    return InvariantComplexManifold(
        "nonunimodular", 3, {2: {"(2,0)": [(1, 2, "1")], "(1,1)": []}})


def corrupted_manifold():
    """d(d phi_3) = -phi1 ^ phi2 ^ phi3 != 0."""
    return InvariantComplexManifold(
        "corrupt", 3, {3: {"(2,0)": [(1, 2, "1")], "(1,1)": []},
                       2: {"(2,0)": [(2, 3, "1")], "(1,1)": []}})


# ----------------------------------------------------------------------
# the differential on the catalog models
# ----------------------------------------------------------------------
def test_torus_differential_vanishes(rng):
    M, g, _ = catalog.get("torus_3")
    u = random_form(rng, 3, 1, 1) + random_form(rng, 3, 2, 1)
    assert M.d(u).is_zero()


def test_iwasawa_displays():
    M, g, _ = catalog.get("iwasawa3")
    w = omega_form(g)
    dbar_w = M.delbar(w)
    # delbar omega = i gamma ^ alphabar ^ betabar
    expected = Form.monomial(3, (3,), (1, 2), 1j)
    assert approx_equal(dbar_w, expected, 1e-14)
    ddbar = 1j * M.del_(dbar_w)
    assert approx_equal(ddbar, ii(3, 1).wedge(ii(3, 2)), 1e-14)


def test_nakamura_display():
    M, g, _ = catalog.get("nakamura")
    ddbar = 1j * M.del_(M.delbar(omega_form(g)))
    expected = ii(3, 1).wedge(ii(3, 2)) + ii(3, 1).wedge(ii(3, 3))
    assert approx_equal(ddbar, expected, 1e-14)


def test_calabi_eckmann_dbar_omega_display():
    # dbar omega = (i/2)(t-1) i phi1 phibar1 ^ phibar3 + (i/2)(t+1) phi2 phibar2 ^ phibar3
    t = 0.1 + 0.2j
    M, g, _ = catalog.get("calabi_eckmann", {"t": t})
    dbar_w = M.delbar(omega_form(g))
    expected = (Form.monomial(3, (1,), (1,), 1j).wedge(Form.monomial(3, (), (3,), 0.5j * (t - 1)))
                + Form.monomial(3, (2,), (2,), 0.5j * (t + 1)).wedge(Form.monomial(3, (), (3,))))
    assert approx_equal(dbar_w, expected, 1e-14)


def test_calabi_eckmann_structure_component():
    t = 0.3 + 0.2j
    M, g, _ = catalog.get("calabi_eckmann", {"t": t})
    dphi3 = M.d(Form.monomial(3, (3,), ()))
    comp = dphi3.bidegree_component(1, 1)
    expected = Form.monomial(3, (1,), (1,), 1j * (t - 1)) + Form.monomial(3, (2,), (2,), t + 1)
    assert approx_equal(comp, expected, 1e-14)
    assert dphi3.bidegree_component(2, 0).is_zero()


def test_d_equals_del_plus_delbar(rng):
    for name, params in [("iwasawa5", None), ("calabi_eckmann", {"t": 0.1 + 0.2j})]:
        M, g, _ = catalog.get(name, params)
        n = M.dim
        u = random_form(rng, n, 1, 1) + random_form(rng, n, 2, 1)
        assert approx_equal(M.d(u), M.del_(u) + M.delbar(u), 1e-12)


def test_del_delbar_square_and_anticommute(rng):
    for name, params in [("iwasawa3", None), ("nakamura", None),
                         ("calabi_eckmann", {"t": 0.1 + 0.2j})]:
        M, _, _ = catalog.get(name, params)
        n = M.dim
        for _ in range(4):
            p, q = rng.integers(0, n, 2)
            u = random_form(rng, n, int(p), int(q))
            assert M.del_(M.del_(u)).max_abs() < 1e-12
            assert M.delbar(M.delbar(u)).max_abs() < 1e-12
            assert (M.del_(M.delbar(u)) + M.delbar(M.del_(u))).max_abs() < 1e-12


def test_conjugate_intertwines_del_delbar(rng):
    M, _, _ = catalog.get("calabi_eckmann", {"t": 0.2 - 0.1j})
    u = random_form(rng, 3, 1, 1) + random_form(rng, 3, 0, 2)
    assert approx_equal(M.del_(u).conjugate(), M.delbar(u.conjugate()), 1e-12)


# ----------------------------------------------------------------------
# validity residuals
# ----------------------------------------------------------------------
def test_integrability_residuals():
    M, _, _ = catalog.get("iwasawa3")
    assert M.check_integrability() == 0.0
    assert M.check_stokes() == 0.0
    M, _, _ = catalog.get("calabi_eckmann", {"t": 0.1 + 0.2j})
    assert M.check_integrability() < 1e-12
    assert M.check_stokes() < 1e-12


def test_corrupted_structure_flagged():
    M = corrupted_manifold()
    assert M.check_integrability() > 0.5
    with pytest.raises(InputError, match="d"):
        M.validate()


def test_stokes_violation_flagged():
    M = stokes_violating_manifold()
    assert M.check_integrability() < 1e-15
    assert M.check_stokes() > 0.5
    with pytest.raises(InputError):
        M.validate()


# ----------------------------------------------------------------------
# integration
# ----------------------------------------------------------------------
def test_integrate_unit_volume():
    M, g, _ = catalog.get("iwasawa3")
    assert M.integrate(omega_power(g, 3)) == pytest.approx(1.0)


def test_integrate_exact_forms_vanish(rng):
    M, _, _ = catalog.get("iwasawa5")
    n = M.dim
    beta = random_form(rng, n, n, n - 1) + random_form(rng, n, n - 1, n)
    assert abs(M.integrate(M.d(beta))) < 1e-13


def test_integrate_warns_on_low_degree():
    M, g, _ = catalog.get("iwasawa3")
    with pytest.warns(IntegrationWarning):
        M.integrate(omega_form(g))


# ----------------------------------------------------------------------
# adjoints
# ----------------------------------------------------------------------
def test_adjoint_vanishes_on_torus(rng):
    M, g, _ = catalog.get("torus_3")
    u = random_form(rng, 3, 2, 1)
    assert adjoint_del(M, g, u).is_zero(1e-14)
    assert adjoint_delbar(M, g, u).is_zero(1e-14)


def test_balanced_adjoint_relation():
    # balanced: dbar* omega = 0 and Lambda(del omega) = 0
    M, g, _ = catalog.get("iwasawa3")
    w = omega_form(g)
    assert adjoint_delbar(M, g, w).max_abs() < 1e-13
    assert lefschetz_lambda(g, M.del_(w)).max_abs() < 1e-13


def test_global_adjointness(rng):
    for name, params in [("iwasawa3", None), ("calabi_eckmann", {"t": 0.15 + 0.1j})]:
        M, _, _ = catalog.get(name, params)
        n = M.dim
        g = random_pd_metric(n, rng)
        for _ in range(4):
            p, q = int(rng.integers(0, n)), int(rng.integers(0, n))
            u = random_form(rng, n, p, q)
            v = random_form(rng, n, p + 1, q)
            lhs = l2_pairing(M, g, M.del_(u), v)
            rhs = l2_pairing(M, g, u, adjoint_del(M, g, v))
            assert abs(lhs - rhs) < 1e-10
            v2 = random_form(rng, n, p, q + 1)
            lhs = l2_pairing(M, g, M.delbar(u), v2)
            rhs = l2_pairing(M, g, u, adjoint_delbar(M, g, v2))
            assert abs(lhs - rhs) < 1e-10


def test_laplacian_kernel_characterisation(rng):
    # Lap''(u) = 0 iff dbar u = 0 and dbar* u = 0 on invariant forms
    M, g, _ = catalog.get("iwasawa3")
    n = 3
    seen_harmonic = 0
    for key in basis_masks(n, 1, 1):
        u = Form(n, {key: 1.0})
        lap = laplacian_delbar(M, g, u)
        in_kernel = lap.max_abs() < 1e-12
        both = (M.delbar(u).max_abs() < 1e-12
                and adjoint_delbar(M, g, u).max_abs() < 1e-12)
        assert in_kernel == both
        seen_harmonic += in_kernel
    assert seen_harmonic > 0


# ----------------------------------------------------------------------
# pullbacks
# ----------------------------------------------------------------------
def test_pullback_identity(rng):
    M, _, _ = catalog.get("iwasawa3")
    u = random_form(rng, 3, 2, 1)
    assert approx_equal(pullback(M, PullbackMap.identity(3), u), u, 1e-14)


def test_pullback_is_algebra_homomorphism(rng):
    M, _, _ = catalog.get("iwasawa3")
    A = PullbackMap(np.array([[1, 2j, 0], [0.5, 1, 0], [0, 1j, 2]]))
    a = random_form(rng, 3, 1, 0)
    b = random_form(rng, 3, 1, 1)
    assert approx_equal(pullback(M, A, a.wedge(b)),
                        pullback(M, A, a).wedge(pullback(M, A, b)), 1e-11)


def test_iwasawa_isometry_commutes_with_d(rng):
    M, g, _ = catalog.get("iwasawa3")
    u = np.exp(1j * 0.7)
    v = np.exp(-1j * 1.3)
    phi = catalog.isometry_factory("iwasawa3")(u, v)
    assert structure_compatibility(M, phi) < 1e-14
    w = omega_form(g)
    assert approx_equal(pullback(M, phi, w), w, 1e-13)
    # commutation with d on a random form
    x = random_form(rng, 3, 1, 1)
    assert approx_equal(pullback(M, phi, M.d(x)), M.d(pullback(M, phi, x)), 1e-12)


def test_non_compatible_pullback_detected():
    M, _, _ = catalog.get("iwasawa3")
    phi = PullbackMap.diagonal([1.0, 2.0, 3.0])
    assert not is_structure_compatible(M, phi)


def test_isometry_star_commutation(rng):
    # phi* gamma = gamma implies star_gamma phi* = phi* star_gamma
    M, g, _ = catalog.get("iwasawa3")
    phi = catalog.isometry_factory("iwasawa3")(np.exp(0.4j), np.exp(-0.9j))
    assert np.abs(pullback_metric(M, phi, g).H - g.H).max() < 1e-13
    for (p, q) in [(1, 1), (2, 1), (2, 2)]:
        v = random_form(rng, 3, p, q)
        lhs = hodge_star(g, pullback(M, phi, v))
        rhs = pullback(M, phi, hodge_star(g, v))
        assert (lhs - rhs).max_abs() < 1e-11


def test_pullback_rejects_singular():
    with pytest.raises(InputError):
        PullbackMap(np.zeros((3, 3)))


def test_pullback_metric_formula():
    M, g, _ = catalog.get("iwasawa3")
    phi = PullbackMap.diagonal([2.0, 1.0, 1.0])
    gt = pullback_metric(M, phi, g)
    assert np.allclose(np.diag(gt.H).real, [4.0, 1.0, 1.0])


# ----------------------------------------------------------------------
# serialization and parameters
# ----------------------------------------------------------------------
def test_manifold_json_round_trip(rng):
    M, _, _ = catalog.get("calabi_eckmann", {"t": 0.1 + 0.2j})
    M2 = InvariantComplexManifold.from_json_dict(M.to_json_dict())
    assert M2.dim == M.dim and M2.name == M.name
    for k in range(1, 4):
        gen = Form.monomial(3, (k,), ())
        assert approx_equal(M.d(gen), M2.d(gen), 1e-15)
    assert M.to_json_dict() == M2.to_json_dict()


def test_manifold_file_errors(tmp_path):
    with pytest.raises(InputError):
        InvariantComplexManifold.from_json_file(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        InvariantComplexManifold.from_json_file(str(bad))


def test_unbound_parameter_raises():
    M = InvariantComplexManifold(
        "param", 3, {3: {"(2,0)": [(1, 2, "sigma")], "(1,1)": []}})
    with pytest.raises(UnboundParameterError):
        M.check_integrability()
    bound = M.bind(sigma=-1)
    assert bound.check_integrability() == 0.0
    with pytest.raises(UnboundParameterError):
        M.bind(nonexistent=1.0)


def test_structure_format_rejects_bad_entries():
    with pytest.raises(InputError):
        InvariantComplexManifold("bad", 3, {3: {"(2,0)": [(2, 1, "1")], "(1,1)": []}})
    with pytest.raises(InputError):
        InvariantComplexManifold("bad", 3, {3: {"(2,0)": [(1, 9, "1")], "(1,1)": []}})


def test_pullback_metric_matches_pulled_back_form(rng):
    # omega of the pulled-back metric equals the pullback of omega
    M, g, _ = catalog.get("iwasawa3")
    phi = PullbackMap(np.array([[1, 0.5j, 0], [0, 2.0, 0.1], [0.3, 0, 1.5]]))
    lhs = omega_form(pullback_metric(M, phi, g))
    rhs = pullback(M, phi, omega_form(g))
    assert approx_equal(lhs, rhs, 1e-12)
