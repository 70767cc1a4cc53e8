"""Propagators and trajectories: closed-form oracle, blocking, diagnostics."""
import numpy as np
import pytest

from djcsim.errors import ConfigurationError, ContractViolationError, CutoffTooSmallError
from djcsim.hamiltonian import ModelParams, build, excitation_operator
from djcsim.evolve import (
    LEAK_HARD,
    LEAK_WARN,
    TimeGrid,
    analytic_propagator,
    propagator,
    trajectory,
)
from djcsim.qops import CompositeSpace, Operator, annihilation, embed
from djcsim.states import AtomSpec, FieldSpec, PreparedState, assemble_initial

BELL = AtomSpec("bell", theta=np.pi / 4)
VACUUM = FieldSpec("scs", nbar_c=0.0, nbar_s=0.0)
SCS = FieldSpec("scs", nbar_c=0.5, nbar_s=0.1)
GL = FieldSpec("gl", nbar_c=0.5, nbar_th=0.1)


def _tail_state(space: CompositeSpace, tail_weight: float) -> PreparedState:
    """Pure state with the given population on a top-two-level basis state."""
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.flat_index(1, 1, 0, 0)] = np.sqrt(1.0 - tail_weight)
    psi[space.flat_index(1, 1, space.cutoff - 1, 0)] = np.sqrt(tail_weight)
    rho = Operator(np.outer(psi, psi.conj()), space.dims)
    return PreparedState(rho=rho, purity_hint=True, truncation_loss=0.0, ket=psi)


def test_time_grid_validation():
    grid = TimeGrid(2.0, 5)
    assert grid.times[0] == 0.0
    assert grid.times[-1] == 2.0
    assert len(grid.times) == 5
    with pytest.raises(ConfigurationError):
        TimeGrid(0.0, 10)
    with pytest.raises(ConfigurationError):
        TimeGrid(-1.0, 10)
    with pytest.raises(ConfigurationError):
        TimeGrid(5.0, 1)


def test_propagator_identity_at_t0():
    space = CompositeSpace(4)
    h = build(ModelParams(), space)
    u = propagator(h, 0.0).data
    assert np.abs(u - np.eye(space.dim)).max() < 1e-14


def test_propagator_single_cavity_rotation():
    # |e,g,0,0> only mixes with |g,g,1,0>: entries cos(gt) and -i sin(gt)
    space = CompositeSpace(4)
    g, t = 0.9, 1.3
    u = propagator(build(ModelParams(g=g), space), t).data
    src = space.flat_index(0, 1, 0, 0)
    dst = space.flat_index(1, 1, 1, 0)
    assert u[src, src] == pytest.approx(np.cos(g * t), abs=1e-12)
    assert u[dst, src] == pytest.approx(-1j * np.sin(g * t), abs=1e-12)
    assert abs(u[dst, src]) ** 2 == pytest.approx(np.sin(g * t) ** 2, abs=1e-12)
    # vacuum with both atoms in |g> is stationary
    idle = space.flat_index(1, 1, 0, 0)
    assert u[idle, idle] == pytest.approx(1.0, abs=1e-12)


def test_propagator_is_unitary():
    space = CompositeSpace(5)
    h = build(ModelParams(variant="ising", jz=0.4), space)
    u = propagator(h, 2.7).data
    assert np.abs(u @ u.conj().T - np.eye(space.dim)).max() < 1e-10


def test_propagator_group_property():
    space = CompositeSpace(5)
    h = build(ModelParams(), space)
    u_sum = propagator(h, 1.8).data
    u_two = propagator(h, 0.7).data @ propagator(h, 1.1).data
    assert np.abs(u_sum - u_two).max() < 1e-8


def test_analytic_propagator_identity_at_t0():
    space = CompositeSpace(6)
    u = analytic_propagator(space, 1.0, 0.0).data
    assert np.array_equal(u, np.eye(space.dim))


@pytest.mark.parametrize("t", [0.5, 1.0, 5.0, 20.0])
def test_analytic_matches_numeric_propagator(t):
    # the module's central cross-check, run at the production cutoff
    space = CompositeSpace(16)
    u_num = propagator(build(ModelParams(), space), t).data
    u_ana = analytic_propagator(space, 1.0, t).data
    top = space.cutoff - 1
    ia, ib, na, nb = np.meshgrid(
        np.arange(2), np.arange(2), np.arange(space.cutoff), np.arange(space.cutoff),
        indexing="ij",
    )
    keep = ((na < top) & (nb < top)).reshape(-1)
    diff = np.abs(u_num - u_ana)[np.ix_(keep, keep)]
    assert diff.max() < 1e-8


def test_analytic_propagator_is_unitary():
    space = CompositeSpace(8)
    u = analytic_propagator(space, 0.8, 3.1).data
    assert np.abs(u @ u.conj().T - np.eye(space.dim)).max() < 1e-12


def test_zero_generator_freezes_the_state():
    space = CompositeSpace(4)
    st = assemble_initial(BELL, VACUUM, VACUUM, space)
    h0 = Operator(np.zeros((space.dim, space.dim)), space.dims)
    traj = trajectory(st, h0, TimeGrid(4.0, 5))
    for k in range(5):
        assert np.abs(traj.state_at(k).data - st.rho.data).max() < 1e-14


def test_trajectory_purity_is_preserved():
    space = CompositeSpace(16)
    st = assemble_initial(BELL, SCS, SCS, space)
    traj = trajectory(st, build(ModelParams(), space), TimeGrid(25.0, 6))
    for k in range(6):
        rho = traj.state_at(k).data
        assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-8)


def test_trajectory_spectrum_is_conserved():
    space = CompositeSpace(12)
    st = assemble_initial(AtomSpec("werner", lam=0.75), GL, GL, space)
    traj = trajectory(st, build(ModelParams(), space), TimeGrid(20.0, 5))
    w0 = np.sort(np.linalg.eigvalsh(traj.state_at(0).data))
    for k in range(1, 5):
        wk = np.sort(np.linalg.eigvalsh(traj.state_at(k).data))
        assert np.abs(wk - w0).max() < 1e-8
        assert wk[0] > -1e-8


def test_blocked_engine_matches_dense_sandwich():
    # mixed state, conserving generator: the sector-blocked route must
    # reproduce U rho U+ computed with the dense propagator
    space = CompositeSpace(8)
    field = FieldSpec("gl", nbar_c=0.2, nbar_th=0.05)
    st = assemble_initial(AtomSpec("werner", lam=0.6), field, field, space)
    h = build(ModelParams(variant="ising", jz=0.4), space)
    traj = trajectory(st, h, TimeGrid(3.0, 4))
    for k in range(4):
        u = propagator(h, float(traj.times[k])).data
        dense = u @ st.rho.data @ u.conj().T
        assert np.abs(traj.state_at(k).data - dense).max() < 1e-12


def test_nonconserving_generator_falls_back_to_dense():
    # a drive term breaks excitation conservation; evolution must still be exact
    space = CompositeSpace(6)
    st = assemble_initial(AtomSpec("bell", theta=0.6), VACUUM, VACUUM, space)
    drive = embed(annihilation(6), 2, space)
    h = build(ModelParams(), space) + 0.2 * (drive + drive.dag())
    traj = trajectory(st, h, TimeGrid(1.0, 4))
    for k in range(4):
        u = propagator(h, float(traj.times[k])).data
        dense = u @ st.rho.data @ u.conj().T
        assert np.abs(traj.state_at(k).data - dense).max() < 1e-12


def test_pure_fast_path_matches_mixed_path():
    space = CompositeSpace(6)
    st = assemble_initial(BELL, VACUUM, VACUUM, space)
    assert st.purity_hint and st.ket is not None
    as_mixed = PreparedState(rho=st.rho, purity_hint=False,
                             truncation_loss=st.truncation_loss, ket=None)
    h = build(ModelParams(), space)
    grid = TimeGrid(6.0, 7)
    traj_ket = trajectory(st, h, grid)
    traj_rho = trajectory(as_mixed, h, grid)
    assert traj_ket.pure and not traj_rho.pure
    for k in range(7):
        assert np.abs(traj_ket.state_at(k).data - traj_rho.state_at(k).data).max() < 1e-12


@pytest.mark.parametrize("params", [
    ModelParams(),
    ModelParams(variant="ising", jz=0.5),
    ModelParams(variant="detuned", delta=2.0),
    ModelParams(variant="kerr", kerr_k=0.5),
])
def test_excitation_expectation_constant(params):
    space = CompositeSpace(12)
    st = assemble_initial(BELL, SCS, SCS, space)
    n_exc = excitation_operator(space).data
    traj = trajectory(st, build(params, space), TimeGrid(10.0, 6))
    expect = []
    for k in range(6):
        psi = traj.ket_at(k)
        expect.append(np.vdot(psi, n_exc @ psi).real)
    assert np.abs(np.diff(expect)).max() < 1e-8


def test_leakage_between_warn_and_hard_sets_flag():
    space = CompositeSpace(6)
    st = _tail_state(space, tail_weight=1e-5)
    h0 = Operator(np.zeros((space.dim, space.dim)), space.dims)
    traj = trajectory(st, h0, TimeGrid(1.0, 3))
    assert LEAK_WARN < 1e-5 < LEAK_HARD
    assert traj.leak_warning
    assert traj.leakage[0] == pytest.approx(1e-5, rel=1e-6)


def test_leakage_beyond_hard_threshold_aborts():
    space = CompositeSpace(6)
    st = _tail_state(space, tail_weight=2e-3)
    h0 = Operator(np.zeros((space.dim, space.dim)), space.dims)
    with pytest.raises(CutoffTooSmallError, match="cutoff"):
        trajectory(st, h0, TimeGrid(1.0, 3))


def test_leakage_grows_past_hard_threshold_mid_run():
    # a cutoff too small for the dynamics fails once population climbs the ladder
    space = CompositeSpace(8)
    st = assemble_initial(BELL, SCS, SCS, space)
    traj = trajectory(st, build(ModelParams(), space), TimeGrid(5.0, 6))
    with pytest.raises(CutoffTooSmallError):
        for k in range(6):
            traj.state_at(k)


def test_trace_deviation_is_rejected():
    space = CompositeSpace(4)
    st = assemble_initial(AtomSpec("werner", lam=0.5), VACUUM, VACUUM, space)
    bad = PreparedState(
        rho=Operator((1.0 + 1e-6) * st.rho.data, space.dims),
        purity_hint=False, truncation_loss=0.0, ket=None,
    )
    h0 = Operator(np.zeros((space.dim, space.dim)), space.dims)
    with pytest.raises(ContractViolationError, match="trace"):
        trajectory(bad, h0, TimeGrid(1.0, 3))


def test_trajectory_dims_must_match():
    st = assemble_initial(BELL, VACUUM, VACUUM, CompositeSpace(4))
    h = build(ModelParams(), CompositeSpace(5))
    with pytest.raises(ConfigurationError):
        trajectory(st, h, TimeGrid(1.0, 3))


def test_trajectory_requires_four_factor_layout():
    space = CompositeSpace(4)
    st = assemble_initial(BELL, VACUUM, VACUUM, space)
    flat_rho = Operator(st.rho.data, (4, 16))
    flat_h = Operator(np.zeros((64, 64)), (4, 16))
    bad = PreparedState(rho=flat_rho, purity_hint=False, truncation_loss=0.0, ket=None)
    with pytest.raises(ConfigurationError):
        trajectory(bad, flat_h, TimeGrid(1.0, 3))


def test_lazy_states_sequence_protocol():
    space = CompositeSpace(4)
    st = assemble_initial(BELL, VACUUM, VACUUM, space)
    h = build(ModelParams(), space)
    traj = trajectory(st, h, TimeGrid(2.0, 5))
    states = traj.states
    assert len(states) == 5
    assert np.abs(states[-1].data - traj.state_at(4).data).max() == 0.0
    assert len(states[1:3]) == 2
    with pytest.raises(IndexError):
        states[5]


def test_diagnostics_fill_in_as_points_are_visited():
    space = CompositeSpace(4)
    st = assemble_initial(BELL, VACUUM, VACUUM, space)
    traj = trajectory(st, build(ModelParams(), space), TimeGrid(2.0, 5))
    assert not np.isnan(traj.trace_err[0])    # t=0 recorded eagerly
    assert np.isnan(traj.trace_err[3])
    traj.state_at(3)
    assert not np.isnan(traj.trace_err[3])
    assert traj.trace_err[3] < 1e-9
    assert traj.leakage[3] < 1e-10            # vacuum fields never climb that high
