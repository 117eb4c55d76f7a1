import numpy as np
import pytest

from dcfkit import delay
from dcfkit.chain import (
    AbsorbingChain,
    ChainError,
    NonAbsorbingChainError,
    SimulationAbortError,
    SingularChainError,
    expected_absorption_time,
    simulate_absorption,
)
from dcfkit.timing import BackoffPolicy, load_profile

PROFILE = load_profile("g_legacy")
POLICY = BackoffPolicy(max_stage=6)


def _single_state(p_abs, sojourn):
    return AbsorbingChain(np.array([[1 - p_abs, p_abs]]), np.array([sojourn]))


def test_direct_absorption():
    assert expected_absorption_time(_single_state(1.0, 2.5)) == 2.5


def test_geometric_self_loop():
    chain = _single_state(0.6, 2.0)
    assert expected_absorption_time(chain) == pytest.approx(2.0 / 0.6, rel=1e-12)


def test_staged_ladder_matches_weighted_sum():
    # three retry stages with distinct sojourns; the exact solve must equal
    # s1 + q*s2 + (q^2/p)*s3 for forward prob q = 1 - p and a final self-loop
    p, s = 0.7, [1.0, 2.0, 4.0]
    q = 1 - p
    trans = np.array(
        [
            [0.0, q, 0.0, p],
            [0.0, 0.0, q, p],
            [0.0, 0.0, q, p],
        ]
    )
    chain = AbsorbingChain(trans, np.array(s))
    expected = s[0] + q * s[1] + (q**2 / p) * s[2]
    assert expected_absorption_time(chain) == pytest.approx(expected, rel=1e-9)


def test_invariant_under_state_permutation():
    rng = np.random.default_rng(42)
    link = delay.LinkReliability(0.3, 0.1)
    chain = delay.build_mode_chain("unicast_frag", PROFILE, POLICY, link, 3)
    n = chain.n_transient
    perm = rng.permutation(n)
    inv = np.argsort(perm)
    trans = np.zeros_like(chain.transition)
    trans[:, :n] = chain.transition[np.ix_(perm, perm)]
    trans[:, n] = chain.transition[perm, n]
    permuted = AbsorbingChain(
        trans, chain.sojourn[perm], start_state=int(inv[chain.start_state])
    )
    assert expected_absorption_time(permuted) == pytest.approx(
        expected_absorption_time(chain), rel=1e-12
    )


def test_sojourn_scaling_scales_result():
    link = delay.LinkReliability(0.4, 0.0)
    chain = delay.build_mode_chain("broadcast", PROFILE, POLICY, link, 4)
    scaled = AbsorbingChain(chain.transition, chain.sojourn * 7.0, chain.start_state)
    assert expected_absorption_time(scaled) == pytest.approx(
        7.0 * expected_absorption_time(chain), rel=1e-12
    )


def test_non_absorbing_chain_rejected():
    trans = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])  # 0 <-> 1, no absorption
    with pytest.raises(NonAbsorbingChainError):
        AbsorbingChain(trans, np.array([1.0, 1.0]))


def test_singular_solve_when_absorption_unreachable():
    trans = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    chain = AbsorbingChain(trans, np.array([1.0, 1.0]), allow_non_absorbing=True)
    with pytest.raises(SingularChainError):
        expected_absorption_time(chain)


def test_validation_errors():
    with pytest.raises(ChainError):
        AbsorbingChain(np.array([[0.4, 0.4]]), np.array([1.0]))  # row sum 0.8
    with pytest.raises(ChainError):
        AbsorbingChain(np.array([[-0.1, 1.1]]), np.array([1.0]))
    with pytest.raises(ChainError):
        AbsorbingChain(np.array([[0.0, 1.0]]), np.array([-1.0]))
    with pytest.raises(ChainError):
        AbsorbingChain(np.array([[0.0, 1.0]]), np.array([1.0]), start_state=3)
    with pytest.raises(ChainError):
        AbsorbingChain(np.ones((2, 2)) / 2, np.array([1.0, 1.0]))  # bad shape


def test_chain_arrays_read_only():
    chain = _single_state(1.0, 1.0)
    with pytest.raises(ValueError):
        chain.sojourn[0] = 5.0


def test_simulate_deterministic_chain_has_zero_error():
    result = simulate_absorption(_single_state(1.0, 3.25), trials=1000, seed=9)
    assert result.mean == 3.25
    assert result.std_err == 0.0


def test_simulate_geometric_within_three_sigma():
    chain = _single_state(0.5, 1.0)  # mean 2.0
    result = simulate_absorption(chain, trials=100_000, seed=1)
    assert abs(result.mean - 2.0) <= 3 * result.std_err


def test_simulate_matches_exact_solution():
    link = delay.LinkReliability(0.3, 0.0)
    chain = delay.build_mode_chain("broadcast", PROFILE, POLICY, link, 5)
    exact = expected_absorption_time(chain)
    result = simulate_absorption(chain, trials=100_000, seed=2)
    assert abs(result.mean - exact) <= 3 * result.std_err


def test_simulate_reproducible_per_seed():
    chain = _single_state(0.3, 1.5)
    a = simulate_absorption(chain, trials=20_000, seed=7)
    b = simulate_absorption(chain, trials=20_000, seed=7)
    c = simulate_absorption(chain, trials=20_000, seed=8)
    assert a == b
    assert a.mean != c.mean


def test_simulate_rejects_bad_trials():
    with pytest.raises(ValueError):
        simulate_absorption(_single_state(1.0, 1.0), trials=0, seed=1)


def test_simulate_aborts_on_pathological_chain():
    chain = _single_state(1e-9, 1.0)
    with pytest.raises(SimulationAbortError):
        simulate_absorption(chain, trials=16, seed=1, max_steps=100)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_mode_chains_simulation_consistency(seed):
    # representative chains from every builder, three seeds each
    cases = [
        ("unicast", 0.3, 0.1, 2),
        ("unicast_frag", 0.5, 0.0, 3),
        ("broadcast", 0.5, 0.0, 5),
        ("broadcast_ack", 0.3, 0.1, 5),
        ("nc_broadcast", 0.3, 0.1, 4),
    ]
    for mode, p_e, p_ack, n in cases:
        link = delay.LinkReliability(p_e, p_ack)
        chain = delay.build_mode_chain(mode, PROFILE, POLICY, link, n)
        exact = expected_absorption_time(chain)
        result = simulate_absorption(chain, trials=100_000, seed=seed)
        assert abs(result.mean - exact) <= 3 * result.std_err, (mode, seed)
