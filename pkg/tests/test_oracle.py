import numpy as np
import pytest

from dampedjc import (
    BlockDensity,
    DomainError,
    ModelParams,
    OracleConfig,
    OracleMethod,
    ShapeError,
    StepError,
    build_generator,
    coherent_state,
    converged_expm,
    diagnostics,
    master_rhs,
    oracle_propagate,
    restrict_superop,
    trace_distance,
    vacuum_solution,
    vectorize_blocks,
)

P = ModelParams(omega0=1.0, Omega=1.0, mu=0.2, nu=0.1, dim=10)


def example_state(alpha, d):
    ket = coherent_state(alpha, d)
    z = np.zeros((d, d), dtype=complex)
    vac = z.copy()
    vac[0, 0] = 0.5
    return BlockDensity(vac, z.copy(), z.copy(), 0.5 * np.outer(ket, ket.conj()))


def test_master_rhs_matches_generator():
    # the componentwise equations and the assembled superoperator are two
    # independent writings of the same generator
    rng = np.random.default_rng(31)
    for _ in range(20):
        d = int(rng.integers(2, 9))
        p = ModelParams(omega0=rng.uniform(0, 2), Omega=rng.uniform(0, 2),
                        nu=(nu := rng.uniform(0, 1)), mu=nu + rng.uniform(0.05, 1),
                        dim=d)
        rho = BlockDensity(*(rng.standard_normal((d, d))
                             + 1j * rng.standard_normal((d, d)) for _ in range(4)))
        got = vectorize_blocks(master_rhs(rho, p))
        want = build_generator(p) @ vectorize_blocks(rho)
        assert np.abs(got - want).max() < 1e-12


def test_master_rhs_trace_free_on_interior():
    rng = np.random.default_rng(32)
    rho = BlockDensity(*(rng.standard_normal((10, 10))
                         + 1j * rng.standard_normal((10, 10)) for _ in range(4)))
    for i in range(2):
        for j in range(2):
            rho.block(i, j)[9, :] = 0
            rho.block(i, j)[:, 9] = 0
    out = master_rhs(rho, P)
    assert abs(out.trace()) < 1e-12


def test_master_rhs_dim_mismatch():
    with pytest.raises(ShapeError):
        master_rhs(BlockDensity.zero(8), P)


def test_rhs_reduces_to_diagonal_flow_without_coupling():
    # Omega = 0, state concentrated in rho00: rho00 evolves like the
    # closed-form vacuum solution, weighted
    p = ModelParams(omega0=1.0, Omega=0.0, mu=0.3, nu=0.1, dim=12)
    rho0 = BlockDensity.zero(12)
    rho0.rho00[0, 0] = 1.0
    out = oracle_propagate(rho0, 0.9, p)
    want = vacuum_solution(0.9, p)
    assert np.abs(out.rho00 - want).max() < 1e-9
    assert np.abs(out.rho11).max() < 1e-12


def test_oracle_methods_agree():
    p = P.with_dim(14)
    rho0 = example_state(0.5, p.dim)
    e = oracle_propagate(rho0, 1.0, p)
    r = oracle_propagate(rho0, 1.0, p, OracleConfig(method=OracleMethod.RK4, dt=1e-3))
    assert trace_distance(e.full(), r.full()) < 1e-10


def test_rk4_order_four():
    rho0 = example_state(0.4, 12)
    p = P.with_dim(12)
    exact = oracle_propagate(rho0, 0.5, p).full()
    errs = []
    for dt in (0.05, 0.025, 0.0125):
        out = oracle_propagate(rho0, 0.5, p, OracleConfig(method=OracleMethod.RK4, dt=dt))
        errs.append(trace_distance(out.full(), exact))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(12 < r < 22 for r in ratios), (errs, ratios)   # ~2^4


def test_oracle_output_is_physical():
    p = P.with_dim(16)
    rho0 = example_state(0.4, p.dim)
    out = oracle_propagate(rho0, 1.0, p)
    rep = diagnostics(out)
    assert rep.trace_deviation < 1e-12
    assert rep.hermiticity_defect < 1e-12
    assert rep.min_eigenvalue > -1e-12
    assert rep.guard_occupation < 1e-8


def test_oracle_validation_and_failure():
    rho0 = example_state(0.5, P.dim)
    with pytest.raises(DomainError):
        oracle_propagate(rho0, -1.0, P)
    with pytest.raises(ShapeError):
        oracle_propagate(example_state(0.2, 6), 0.5, P)
    with pytest.raises(DomainError):
        OracleConfig(dt=0.0)
    # coarse RK4 on a fast-phase problem goes unstable -> consistency checks trip
    stiff = ModelParams(omega0=15.0, Omega=1.0, mu=0.5, nu=0.1, dim=P.dim)
    with pytest.raises(StepError):
        oracle_propagate(example_state(0.5, P.dim), 2.0, stiff,
                         OracleConfig(method=OracleMethod.RK4, dt=0.2))


def test_diagnostics_flags_bad_states():
    d = 6
    rho = BlockDensity.zero(d)
    rho.rho00[0, 0] = 0.7      # trace 0.7, not 1
    rho.rho01[0, 1] = 0.5      # rho10 stays 0: not hermitian
    rep = diagnostics(rho)
    assert rep.trace_deviation == pytest.approx(0.3)
    assert rep.hermiticity_defect == pytest.approx(0.5)
    rho2 = BlockDensity.zero(d)
    rho2.rho00[1, 1] = -0.2
    assert diagnostics(rho2).min_eigenvalue == pytest.approx(-0.2)


def test_converged_expm_stable_in_pad():
    # growing the enlarged cutoff moves the compressed matrix less and less;
    # what remains lives in the edge rows, so a low-occupation state never
    # sees it
    p = P.with_dim(8)
    a = converged_expm(0.6, p, pad=4)
    b = converged_expm(0.6, p, pad=8)
    c = converged_expm(0.6, p, pad=12)
    d_ab = np.abs(a - b).max()
    d_bc = np.abs(b - c).max()
    assert d_bc < d_ab / 10
    assert d_bc < 1e-9
    v = vectorize_blocks(example_state(0.2, 8))
    assert np.abs((b - c) @ v).max() < 1e-12


def test_converged_expm_differs_from_plain_at_edge():
    # plain expm of the truncated generator and the compressed enlarged-cutoff
    # flow differ by O(1) matrix elements near the cutoff; acting on a state
    # that stays far away from the edge, both give the same answer
    from scipy.linalg import expm
    p = P.with_dim(8)
    plain = expm(0.6 * build_generator(p))
    conv = converged_expm(0.6, p, pad=8)
    assert np.abs(plain - conv).max() > 1e-4
    v = vectorize_blocks(example_state(0.2, 8))
    assert np.abs((plain - conv) @ v).max() < 1e-7
