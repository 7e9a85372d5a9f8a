"""Smoke tests for the uccert python module.

The heavy verification lives in the C++ test suites; these checks confirm
that the bindings expose the core operations faithfully end to end.
"""

import math

import pytest

import uccert


def test_version_string():
    assert isinstance(uccert.__version__, str)
    assert uccert.__version__.count(".") == 2


def test_entropy_values():
    assert uccert.binary_entropy(0.5) == 1.0
    assert uccert.binary_entropy(0.0) == 0.0
    assert abs(uccert.binary_entropy(0.25) - 0.8112781244591328) < 1e-15
    assert abs(uccert.binary_entropy_deriv(0.25) - math.log2(3.0)) < 1e-14
    with pytest.raises(ValueError):
        uccert.binary_entropy(1.5)


def test_entropy_gain_threshold():
    u = uccert.golden_threshold()
    assert abs((1.0 - u) ** 2 - u) < 1e-15
    assert abs(uccert.iid_entropy_gain(u) - 1.0) < 1e-12


def test_constants_table():
    table = uccert.solve_constants()
    assert abs(table["c_star"]["value"] - 0.3823455) < 5e-7
    assert abs(table["c_prime"]["value"] - 0.382709087918741) < 1e-9
    assert abs(table["beta_star"]["value"] - 0.100052559862974) < 1e-9
    for name, entry in table.items():
        assert entry["residual"] <= 1e-12, name
        assert entry["defining_equation_text"]


def test_kernel_round_trip_and_values():
    for name in ("iid", "maxent", "ciid-aopt", "ciid-xxbar"):
        spec = uccert.KernelSpec.from_name(name)
        assert spec.name == name
    iid = uccert.KernelSpec.iid()
    assert abs(uccert.kernel_value_x(iid, 0.7, 0.7) - 0.49) < 1e-15
    maxent = uccert.KernelSpec.max_entropy()
    assert abs(uccert.kernel_value(maxent, 0.2, 0.2) - 0.6) < 1e-15
    with pytest.raises(ValueError):
        uccert.KernelSpec.from_name("banana")


def test_joint_table_is_a_distribution():
    table = uccert.joint_table(uccert.KernelSpec.ciid_xxbar(), 0.3, 0.6)
    values = [table["p00"], table["p01"], table["p10"], table["p11"]]
    assert all(v >= 0.0 for v in values)
    assert abs(sum(values) - 1.0) < 1e-12


def test_grid_psd_small():
    grid = uccert.GridSpec.from_separation_string("0.05", [0, 1, 2])
    matrix = uccert.build_grid_matrix(uccert.KernelSpec.ciid_xxbar(), grid)
    assert matrix.shape == (21, 21)
    result = uccert.project_and_min_eig(matrix, grid)
    assert result["certified"]
    assert result["min_eig"] >= -1e-10
    report = uccert.verify_grid_psd(uccert.KernelSpec.iid(),
                                    uccert.GridSpec.from_separation_string("0.05", [0, 1]))
    assert report["certified"]


def test_series_psd_and_closed_forms():
    report = uccert.verify_series_psd(10, start=2, exact=True)
    assert report["certified"]
    assert report["engine"] == "exact"
    comparison = uccert.compare_closed_forms(8)
    assert comparison["log_half_agrees"]
    from fractions import Fraction
    assert uccert.coeff_closed_form("log-half", 1, 1) == Fraction(1, 4)


def test_conjectured_optimizer_scores_one():
    table = uccert.solve_constants()
    c_prime = table["c_prime"]["value"]
    beta_star = table["beta_star"]["value"]
    theta = uccert.conjectured_theta(c_prime, 0.0)
    assert len(theta) == 9
    for beta in (0.0, beta_star, 1.0):
        assert abs(uccert.objective(theta, beta) - 1.0) <= 1e-10


def test_certify_small_run():
    report = uccert.certify(0.3827, beta=0.1, starts=20, seed=3)
    assert report["certified"]
    assert report["min_ratio"] >= 1.0 - 1e-6
    assert report["n_converged"] >= 10
    assert len(report["starts"]) == 20
    again = uccert.certify(0.3827, beta=0.1, starts=20, seed=3)
    assert again == report


def test_maxcorr_scan():
    scan = uccert.scan_negativity(201)
    assert scan["pass"]
    assert scan["max_lhs_on_open_interval"] < 0.0
    assert scan["derivative_at_zero_plus"] < 0.0
    assert abs(uccert.maxcorr_gap(0.0)) <= 1e-10


def test_simulation_is_seeded():
    spec = uccert.KernelSpec.ciid_threshold()
    first = uccert.simulate_protocol(spec, 0.4, 0.6, 20000, seed=42)
    second = uccert.simulate_protocol(spec, 0.4, 0.6, 20000, seed=42)
    assert first == second
    exact = uccert.joint_table(spec, 0.4, 0.6)
    assert abs(first["p00"] - exact["p00"]) < 0.02


def test_measure_validation():
    mu = uccert.DiscreteMeasure([0.2, 0.8], [0.5, 0.5])
    assert len(mu) == 2
    assert abs(uccert.mean(mu) - 0.5) < 1e-15
    with pytest.raises(ValueError):
        uccert.DiscreteMeasure([0.2, 0.8], [0.6, 0.6])  # weights sum to 1.2
    with pytest.raises(ValueError):
        uccert.DiscreteMeasure([1.5], [1.0])  # atom outside [0,1]
