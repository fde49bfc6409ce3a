import numpy as np
import pytest
from hypothesis import given, strategies as st

from covpovm.errors import IllConditionedError, NormalizationError
from covpovm.groups import GroupSpec
from covpovm.povm import basis_fiducial, build_povm, extract_multiplier, random_fiducial
from covpovm.tomography import (
    ProbabilityTable,
    check_density_matrix,
    error_metrics,
    forward_probabilities,
    kernel_transform,
    loglog_slope,
    project_simplex,
    project_to_states,
    random_density_matrix,
    reconstruct,
    sample_outcomes,
    stage_one,
)
from covpovm.weyl import phase_points, weyl_operator, weyl_transform

from test_povm import COMPLEX_Z2


def setup(factors, seed):
    spec = GroupSpec(factors)
    povm = build_povm(spec, random_fiducial(spec, seed))
    return spec, povm, extract_multiplier(povm)


def test_forward_examples():
    spec = GroupSpec((3,))
    povm = build_povm(spec, random_fiducial(spec, 1))
    table = forward_probabilities(povm, np.eye(3) / 3)
    assert np.allclose(table.values, 1 / 3, atol=1e-15)

    z2 = GroupSpec((2,))
    table = forward_probabilities(build_povm(z2, basis_fiducial(z2)), np.diag([1.0, 0.0]))
    # order (a, g): (0,0), (0,1), (1,0), (1,1)
    assert np.array_equal(table.values, [1, 0, 1, 0])


def test_forward_matches_inner_products(rng):
    spec, povm, _ = setup((2, 3), 4)
    rho = random_density_matrix(6, rng=rng)
    table = forward_probabilities(povm, rho)
    for p in phase_points(spec):
        v = weyl_operator(p) @ povm.fiducial
        assert abs(table.values[p.index] - np.vdot(v, rho @ v).real) < 1e-14
    assert table.values.min() >= 0
    assert abs(table.total() - 1) < 1e-10
    with pytest.raises(ValueError):
        forward_probabilities(povm, np.eye(4) / 4)


def test_sampling_single_shot_and_errors():
    spec, povm, _ = setup((4,), 2)
    exact = forward_probabilities(povm, np.eye(4) / 4)
    one = sample_outcomes(exact, 1, 123)
    assert np.count_nonzero(one.values) == 1 and one.values.max() == 4
    assert one.kind == "empirical" and one.shots == 1
    for bad in (0, -5):
        with pytest.raises(ValueError):
            sample_outcomes(exact, bad, 0)


def test_sampling_regression():
    spec = GroupSpec((2,))
    povm = build_povm(spec, np.array([np.cos(np.pi / 8), np.sin(np.pi / 8)]))
    exact = forward_probabilities(povm, np.diag([1.0, 0.0]))
    a = sample_outcomes(exact, 1000, 42)
    b = sample_outcomes(exact, 1000, 42)
    assert a.values.tobytes() == b.values.tobytes()
    assert np.array_equal(np.rint(a.values * 1000 / 2).astype(int), [427, 76, 428, 69])
    assert abs(a.total() - 1) < 1e-15


def test_sampling_frequencies_converge():
    spec, povm, _ = setup((3,), 5)
    exact = forward_probabilities(povm, random_density_matrix(3, rng=0))
    emp = sample_outcomes(exact, 400_000, 9)
    # per-cell std of frequency*d is d*sqrt(q(1-q)/N) <= 3 * 0.5/632
    assert np.max(np.abs(emp.values - exact.values)) < 6 * 3 * 0.5 / np.sqrt(400_000)


def test_reconstruct_examples(rng):
    z2 = GroupSpec((2,))
    povm = build_povm(z2, COMPLEX_Z2)
    table = extract_multiplier(povm)
    rho = np.diag([1.0, 0.0]).astype(complex)
    res = reconstruct(povm, forward_probabilities(povm, rho), table)
    assert np.linalg.norm(res.rho_hat - rho) < 1e-12

    spec, povm, table = setup((5,), 11)
    res = reconstruct(povm, forward_probabilities(povm, np.eye(5) / 5), table)
    assert np.max(np.abs(res.rho_hat - np.eye(5) / 5)) < 1e-12

    spec, povm, table = setup((8,), 12)
    rho = random_density_matrix(8, rng=rng)
    res = reconstruct(povm, forward_probabilities(povm, rho), table)
    assert np.linalg.norm(res.rho_hat - rho) < 1e-10
    assert res.condition_indicator == table.min_modulus


def test_reconstruct_refuses_degenerate_fiducial():
    z2 = GroupSpec((2,))
    povm = build_povm(z2, basis_fiducial(z2))
    table = extract_multiplier(povm)
    with pytest.raises(IllConditionedError) as info:
        reconstruct(povm, forward_probabilities(povm, np.eye(2) / 2), table)
    assert info.value.worst_point.g.coords == (1,)
    assert info.value.min_modulus == 0


def test_statement_kernel_variant_fails(rng):
    # swapping the conjugation, chi(g') conj(chi'(g)), does not invert the measurement
    spec, povm, table = setup((5,), 3)
    rho = random_density_matrix(5, rng=rng)
    exact = forward_probabilities(povm, rho)
    d = 5
    x = spec.character_table
    prob = exact.values.reshape(d, d)
    swapped = np.array(
        [sum(x[a, g2] * np.conj(x[a2, g]) * prob[a2, g2] for a2 in range(d) for g2 in range(d)) / d
         for a in range(d) for g in range(d)]
    )
    from covpovm.weyl import weyl_inverse_transform

    wrong = weyl_inverse_transform(swapped / table.values, spec)
    right = weyl_inverse_transform(kernel_transform(exact) / table.values, spec)
    assert np.linalg.norm(right - rho) < 1e-12
    assert np.linalg.norm(wrong - rho) > 1e-2


@given(st.sampled_from([(2,), (3,), (4,), (2, 2), (6,), (2, 3), (9,), (2, 2, 2)]), st.integers(0, 2**31), st.data())
def test_round_trip_property(factors, seed, data):
    spec, povm, table = setup(factors, seed)
    d = spec.order
    rank = data.draw(st.integers(1, d))
    rho = random_density_matrix(d, rank, rng=seed + 1)
    exact = forward_probabilities(povm, rho)
    assert np.max(np.abs(stage_one(exact, table) - weyl_transform(rho, spec))) < 1e-10
    res = reconstruct(povm, exact, table)
    assert np.linalg.norm(res.rho_hat - rho) < 1e-10


def test_empirical_reconstruction_is_hermitian_and_projectable():
    spec, povm, table = setup((4,), 8)
    rho = random_density_matrix(4, 1, rng=3)
    emp = sample_outcomes(forward_probabilities(povm, rho), 200, 5)
    res = reconstruct(povm, emp, table)
    assert np.max(np.abs(res.rho_hat - res.rho_hat.conj().T)) == 0
    assert abs(np.trace(res.rho_hat) - 1) < 1e-12
    proj = reconstruct(povm, emp, table, project=True)
    check_density_matrix(proj.rho_hat, 4, atol=1e-10)


def test_projection_is_frobenius_nonexpansive():
    always = 0
    for seed in range(60):
        spec, povm, table = setup((3,), seed)
        rho = random_density_matrix(3, 1 + seed % 3, rng=seed)
        emp = sample_outcomes(forward_probabilities(povm, rho), 100 + 37 * seed, seed)
        raw = reconstruct(povm, emp, table).rho_hat
        before = error_metrics(rho, raw)["frobenius"]
        after = error_metrics(rho, project_to_states(raw))["frobenius"]
        assert after <= before + 1e-12
        always += 1
    assert always == 60


def test_projection_can_increase_trace_distance():
    # trace distance is not the projection's metric; pinned counterexample
    spec = GroupSpec((3,))
    rng = np.random.default_rng(85)
    povm = build_povm(spec, random_fiducial(spec, rng))
    table = extract_multiplier(povm)
    rank = int(rng.integers(1, 4))
    rho = random_density_matrix(3, rank=rank, rng=rng)
    shots = int(rng.choice([30, 100, 1000]))
    emp = sample_outcomes(forward_probabilities(povm, rho), shots, 85)
    raw = reconstruct(povm, emp, table).rho_hat
    before, after = error_metrics(rho, raw), error_metrics(rho, project_to_states(raw))
    assert after["frobenius"] < before["frobenius"]
    assert after["trace_distance"] > before["trace_distance"]


def test_project_simplex():
    assert np.allclose(project_simplex(np.array([0.5, 0.5])), [0.5, 0.5])
    assert np.allclose(project_simplex(np.array([2.0, 0.0, -1.0])), [1, 0, 0])
    out = project_simplex(np.array([0.6, 0.6, -0.1]))
    assert np.allclose(out, [0.5, 0.5, 0]) and abs(out.sum() - 1) < 1e-15


def test_error_metrics_examples(rng):
    e0, e1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert error_metrics(e0, e0) == {"frobenius": 0.0, "trace_distance": 0.0}
    m = error_metrics(e0, e1)
    assert m["trace_distance"] == pytest.approx(1, abs=1e-15)
    assert m["frobenius"] == pytest.approx(np.sqrt(2), abs=1e-15)
    a, b = random_density_matrix(5, rng=rng), random_density_matrix(5, rng=rng)
    vals = np.linalg.eigh(a - b)[0]
    m = error_metrics(a, b)
    assert abs(m["trace_distance"] - 0.5 * np.abs(vals).sum()) < 1e-12
    assert abs(m["frobenius"] - np.sqrt(np.sum(vals**2))) < 1e-12
    with pytest.raises(ValueError):
        error_metrics(np.eye(2), np.eye(3))


def test_density_matrix_checks():
    check_density_matrix(np.eye(3) / 3)
    for bad in (np.eye(3), np.array([[0.5, 1j], [0, 0.5]]), np.diag([1.5, -0.5])):
        with pytest.raises(NormalizationError):
            check_density_matrix(bad)
    rho = random_density_matrix(4, 2, rng=1)
    check_density_matrix(rho)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 2


def test_loglog_slope_exact():
    shots = np.array([1e3, 1e4, 1e5])
    assert loglog_slope(shots, 3 * shots**-0.5) == pytest.approx(-0.5, abs=1e-12)


def test_probability_table_serializes():
    spec, povm, _ = setup((2,), 0)
    d = forward_probabilities(povm, np.eye(2) / 2).to_dict()
    assert d["kind"] == "exact" and d["group"] == [2] and len(d["values"]) == 4
    assert isinstance(ProbabilityTable(spec, np.ones(4)).total(), float)
