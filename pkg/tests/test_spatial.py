import numpy as np
import pytest

from elastoinv.data import GridField, ReceiverArray
from elastoinv.errors import ConfigurationError, DomainError
from elastoinv.forward import synthesize_frequency_data_2d, synthesize_scalar_frequency_data_2d
from elastoinv.medium import fundamental_solution, make_medium
from elastoinv.signals import paper_pulse
from elastoinv.sources import reference_fields
from elastoinv.spatial import (
    KINDS,
    LandweberConfig,
    LinearOperator,
    adjoint_apply,
    apply,
    build_operator,
    estimate_norm,
    landweber_march,
    operator_data,
    relative_l2_error,
)

MEDIUM = make_medium(2.0, 1.0, 1.0)
REC = ReceiverArray.circle(16, 2.0)
GRID = GridField.centered(12, 1.0, 2, 1, 1.0)


def one_by_one(value, kind="p-real"):
    grid = GridField([0.0, 0.0], [1.0, 1.0], np.zeros((1, 1, 1)))
    return LinearOperator(kind, 1.0, np.array([[value]]), grid, np.ones((1, 1), bool), ReceiverArray([[2.0, 0.0]]))


def test_single_entry_operator():
    grid = GridField([0.0, 0.0], [0.1, 0.1], np.zeros((1, 1, 1)))
    rec = ReceiverArray([[2.0, 0.0]])
    op = build_operator("p-real", MEDIUM, 3.0, grid, rec)
    ref = 0.01 * fundamental_solution(2, 1.5, [2.0, 0.0]).real / 4.0
    assert op.shape == (1, 1) and op.matrix[0, 0] == pytest.approx(ref, rel=1e-14)
    op = build_operator("s-imag", MEDIUM, 10.0, grid, rec)
    assert op.matrix[0, 0] == pytest.approx(0.01 * fundamental_solution(2, 10.0, [2.0, 0.0]).imag, rel=1e-14)


def test_apply_matches_synthesis(rng):
    f, fp, _ = reference_fields(20, 1.0, 1.0)
    om = 4.0
    gh = complex(paper_pulse().spectrum([om])[0])
    full = synthesize_frequency_data_2d(MEDIUM, f, paper_pulse(), [om], REC).values[:, :, 0].ravel() / gh
    scal = synthesize_scalar_frequency_data_2d(MEDIUM, fp, "p", paper_pulse(), [om], REC).values[:, 0, 0] / gh
    for part, take in (("real", np.real), ("imag", np.imag)):
        vf = GridField(f.origin, f.spacing, f.values, 1.0)
        op = build_operator(f"full-{part}", MEDIUM, om, vf.with_values(np.zeros((1, 20, 20)), 1.0), REC)
        np.testing.assert_allclose(apply(op, vf), take(full), rtol=0, atol=1e-12 * np.abs(full).max())
        op = build_operator(f"p-{part}", MEDIUM, om, fp, REC)
        np.testing.assert_allclose(apply(op, fp), take(scal), rtol=0, atol=1e-12 * np.abs(scal).max())


def test_operator_data_divides_by_pulse():
    f, _, _ = reference_fields(20, 1.0, 1.0)
    sweep = synthesize_frequency_data_2d(MEDIUM, f, paper_pulse(), [2.0, 3.0], REC)
    op = build_operator("full-imag", MEDIUM, 3.0, GridField.centered(20, 1.0, 2, 1, 1.0), REC)
    np.testing.assert_allclose(operator_data(op, sweep, paper_pulse()), apply(op, f.with_values(f.values, 1.0)), rtol=1e-10, atol=1e-14)
    with pytest.raises(ConfigurationError):
        operator_data(op, np.zeros((3, 2)))


def test_apply_zero_and_linear(rng):
    op = build_operator("full-real", MEDIUM, 2.0, GRID, REC)
    assert np.all(apply(op, op.zero_field()) == 0)
    a, b = rng.normal(size=op.shape[1]), rng.normal(size=op.shape[1])
    lhs = apply(op, op.to_field(2 * a - b))
    np.testing.assert_allclose(lhs, 2 * apply(op, op.to_field(a)) - apply(op, op.to_field(b)), atol=1e-14)


@pytest.mark.parametrize("kind", KINDS)
def test_adjoint_identity(kind, rng):
    op = build_operator(kind, MEDIUM, 5.0, GRID, REC)
    assert np.all(adjoint_apply(op, np.zeros(op.shape[0])).values == 0)
    for _ in range(100):
        S = op.to_field(rng.normal(size=op.shape[1]))
        r = rng.normal(size=op.shape[0])
        lhs = apply(op, S) @ r
        rhs = S.cell_weight * np.sum(S.values * adjoint_apply(op, r).values)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), np.linalg.norm(apply(op, S)) * np.linalg.norm(r))


def test_single_entry_adjoint():
    op = one_by_one(3.0)
    assert adjoint_apply(op, np.array([2.0])).values[0, 0, 0] == 6.0


def test_shape_checks():
    op = build_operator("p-real", MEDIUM, 2.0, GRID, REC)
    with pytest.raises(ConfigurationError):
        adjoint_apply(op, np.zeros(3))
    with pytest.raises(ConfigurationError):
        apply(op, GridField.centered(10, 1.0, 2, 1, 1.0))
    with pytest.raises(ConfigurationError):
        build_operator("q-real", MEDIUM, 2.0, GRID, REC)
    with pytest.raises(DomainError):
        build_operator("p-real", MEDIUM, 2.0, GridField.centered(4, 1.0, 3, 1), REC)


def test_norm_estimate_against_svd():
    op = build_operator("full-real", MEDIUM, 6.0, GRID, REC)
    sigma = np.linalg.svd(op.matrix, compute_uv=False)[0] / np.sqrt(op.cell_weight)
    est = estimate_norm(op)
    assert est <= sigma * (1 + 1e-12) and est == pytest.approx(sigma, rel=1e-3)


def test_scalar_landweber_step():
    res = landweber_march([one_by_one(2.0)], [np.array([4.0])], LandweberConfig(L=1, epsilon=0.1))
    assert res.field.values[0, 0, 0] == pytest.approx(0.8)


def test_zero_data_is_fixed_point():
    ops = [build_operator("p-real", MEDIUM, w, GRID, REC) for w in (1.0, 2.0)]
    res = landweber_march(ops, [np.zeros(16)] * 2, LandweberConfig(L=3))
    assert np.all(res.field.values == 0) and all(r.residual == 0 for r in res.trace)
    moved = landweber_march(ops, [np.ones(16), np.zeros(16)], LandweberConfig(L=3))
    assert np.any(moved.field.values != 0)


def test_zero_iterations_return_initial(rng):
    ops = [build_operator("s-imag", MEDIUM, 3.0, GRID, REC)]
    init = ops[0].to_field(rng.normal(size=ops[0].shape[1]))
    res = landweber_march(ops, [np.ones(16)], LandweberConfig(L=0, initial=init))
    np.testing.assert_array_equal(res.field.values, init.values)


def _reference_problem(kind="p-real", freqs=(1.0, 2.0, 3.0, 4.0)):
    grid = GridField.centered(24, 1.5, 2, 1, 1.5)
    _, fp, _ = reference_fields(24, 1.5, 1.5)
    ops = [build_operator(kind, MEDIUM, w, grid, REC) for w in freqs]
    return ops, [apply(op, fp) for op in ops], fp


def test_march_is_monotone_deterministic_and_improves():
    ops, data, truth = _reference_problem()
    a = landweber_march(ops, data, LandweberConfig(L=10), truth)
    b = landweber_march(ops, data, LandweberConfig(L=10), truth)
    assert a.monotone() and not a.warnings
    assert a.trace == b.trace
    assert a.trace[-1].error < a.trace[0].error == 1.0
    assert len(a.trace) == 4 * 11
    assert a.epsilon == pytest.approx(1 / a.sigma.max() ** 2)


def test_large_step_warns():
    ops, data, _ = _reference_problem(freqs=(2.0,))
    sigma = estimate_norm(ops[0])
    res = landweber_march(ops, data, LandweberConfig(L=2, epsilon=2.5 / sigma**2))
    assert res.warnings and "diverge" in res.warnings[0]


def test_march_input_checks():
    ops, data, _ = _reference_problem(freqs=(2.0, 1.0))
    with pytest.raises(ConfigurationError):
        landweber_march(ops, data)
    with pytest.raises(ConfigurationError):
        landweber_march(ops[:1], data)
    with pytest.raises(ConfigurationError):
        LandweberConfig(L=-1)
    with pytest.raises(ConfigurationError):
        LandweberConfig(epsilon=0.0)


def test_relative_error(rng):
    a = GridField.centered(8, 1.0)
    t = a.with_values(rng.normal(size=(1, 8, 8)))
    r = a.with_values(rng.normal(size=(1, 8, 8)))
    assert relative_l2_error(t, t) == 0.0
    assert relative_l2_error(t.with_values(2 * t.values), t) == pytest.approx(1.0)
    direct = np.sqrt(np.sum((r.values - t.values) ** 2) / np.sum(t.values**2))
    assert relative_l2_error(r, t) == pytest.approx(direct, rel=1e-14)
    value, relative = relative_l2_error(r, a, with_flag=True)
    assert not relative and value == pytest.approx(np.sqrt(a.cell_weight * np.sum(r.values**2)))
    with pytest.raises(ConfigurationError):
        relative_l2_error(r, GridField.centered(6, 1.0))
