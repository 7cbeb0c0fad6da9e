import csv
import io
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circulant_robustness.adversary import AdversarySpec, Constant, PerEdgeDistinct, Ramp
from circulant_robustness.graph import make_k_circulant
from circulant_robustness.simulation import (
    NonFiniteStateError,
    PlacementError,
    simulate,
    trajectory_csv_text,
    write_plot_csv,
    write_sends_csv,
)
from circulant_robustness.wmsr import WeightScheme

D1 = make_k_circulant(15, 6)
D2 = make_k_circulant(15, 9)


def test_equal_initial_states_converge_immediately():
    result = simulate(make_k_circulant(6, 2), init=[2.5] * 6, horizon=5)
    assert result.converged_at == 0
    assert result.consensus_value == 2.5
    assert result.spread_series == [0.0] * 6


def test_recorded_steps_follow_filter_and_weights():
    adversary = AdversarySpec({0, 6}, 1, signal=Ramp(3.0))
    result = simulate(D1, adversary, f_filter=1, horizon=20, seed=4, record=True)
    states = result.states()
    scheme = WeightScheme.for_in_degree(6)
    assert len(result.log) == 20 * 13
    for rec in result.log:
        own = states[rec.t, rec.agent]
        assert [j for j, _ in rec.received] == list(D1.in_neighbors(rec.agent))
        assert math.isclose(rec.weight * (len(rec.retained) + 1), 1.0)
        assert rec.weight >= scheme.alpha
        expected = rec.weight * (own + sum(v for _, v in rec.retained))
        assert rec.new_value == pytest.approx(expected, abs=1e-12)
        assert rec.new_value == states[rec.t + 1, rec.agent]


def test_malicious_agents_follow_their_signal():
    adversary = AdversarySpec({0, 6}, 1, signal=Constant(99.0))
    result = simulate(D1, adversary, f_filter=1, horizon=10)
    for a in (0, 6):
        assert set(result.trajectories[a].values) == {99.0}
        assert result.trajectories[a].role == "malicious"
    assert result.trajectories[1].sends is None


def test_byzantine_sends_are_what_neighbors_receive():
    adversary = AdversarySpec({0, 6}, 1, model="byzantine", signal=PerEdgeDistinct(seed=2))
    result = simulate(D1, adversary, f_filter=1, horizon=15, record=True)
    sends = {a: result.trajectories[a].sends for a in (0, 6)}
    assert all(len(s) == 15 for s in sends.values())
    for rec in result.log:
        for j, v in rec.received:
            if j in sends:
                assert v == sends[j][rec.t][rec.agent]
    assert result.safe


def test_same_seed_same_result():
    adversary = AdversarySpec({0, 6, 12}, 2)
    a = simulate(D2, adversary, f_filter=2, seed=11)
    b = simulate(D2, adversary, f_filter=2, seed=11)
    assert trajectory_csv_text(a) == trajectory_csv_text(b)
    c = simulate(D2, adversary, f_filter=2, seed=12)
    assert trajectory_csv_text(a) != trajectory_csv_text(c)


def test_reference_runs_converge_safely():
    for g, members, f in ((D1, {0, 6}, 1), (D2, {0, 6, 12}, 2)):
        result = simulate(g, AdversarySpec(members, f), f_filter=f, seed=3)
        assert result.converged and result.converged_at <= 500
        assert result.safe
        lo, hi = result.safety_interval
        assert lo <= result.consensus_value <= hi


def test_invalid_placement_raises():
    with pytest.raises(PlacementError) as exc:
        simulate(D1, AdversarySpec({0, 1}, 1), f_filter=1)
    assert 2 in exc.value.violations


def test_non_finite_inputs_raise():
    with pytest.raises(NonFiniteStateError):
        simulate(D1, init=[math.inf] + [0.0] * 14)
    adversary = AdversarySpec({0}, 1, signal=Constant(math.nan))
    with pytest.raises(NonFiniteStateError) as exc:
        simulate(D1, adversary, f_filter=1)
    assert exc.value.agent == 0


@pytest.mark.parametrize("kwargs", [{"horizon": 0}, {"tol": 0.0}, {"init": [0.0, 1.0]}])
def test_argument_validation(kwargs):
    with pytest.raises(ValueError):
        simulate(D1, **kwargs)


@settings(max_examples=25, deadline=None)
@given(
    st.integers(3, 10).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))),
    st.integers(0, 2**16),
)
def test_spread_never_grows_without_adversaries(nk, seed):
    n, k = nk
    result = simulate(make_k_circulant(n, k), horizon=30, seed=seed)
    spreads = result.spread_series
    assert all(b <= a + 1e-12 for a, b in zip(spreads, spreads[1:]))
    assert result.safe


def test_trajectory_csv_format():
    adversary = AdversarySpec({0}, 1, signal=Constant(1 / 3))
    result = simulate(make_k_circulant(5, 3), adversary, f_filter=1, horizon=3, seed=1)
    rows = list(csv.reader(io.StringIO(trajectory_csv_text(result))))
    assert rows[0] == ["t", "agent", "role", "value"]
    assert len(rows) == 1 + 4 * 5
    assert rows[1] == ["0", "0", "malicious", "0.33333333333333331"]
    for t, agent, _, value in rows[1:]:
        assert float(value) == result.trajectories[int(agent)].values[int(t)]


def test_plot_and_sends_csv():
    adversary = AdversarySpec({2}, 1, model="byzantine", signal=PerEdgeDistinct(seed=0))
    result = simulate(make_k_circulant(5, 3), adversary, f_filter=1, horizon=2)
    buf = io.StringIO()
    write_plot_csv(result, buf)
    header = buf.getvalue().splitlines()[0]
    assert header == "t,agent0_normal,agent1_normal,agent2_byzantine,agent3_normal,agent4_normal"
    buf = io.StringIO()
    write_sends_csv(result, buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == ["t", "src", "dst", "value"]
    assert [r[:3] for r in rows[1:]] == [[str(t), "2", str(d)] for t in range(2) for d in (0, 3, 4)]
    assert len({r[3] for r in rows[1:]}) == 6
