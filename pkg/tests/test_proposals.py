import numpy as np
import pytest
from scipy import stats

from fin_inverse.core.errors import FieldError
from fin_inverse.core.grid import constant_field, make_mesh
from fin_inverse.core.proposals import (
    ProposalConfig,
    ProposalKind,
    ProposalMove,
    RngStream,
    apply_move,
    derive_seed,
    draw_move,
    propose,
    propose_gridwise,
    propose_pointwise,
    propose_uniform,
)
from fin_inverse.core.trials import tilted_plane

DRAWS = 100_000


def test_uniform_shifts_every_entry(mesh10):
    k = tilted_plane(mesh10, 20)
    out = propose_uniform(k, ProposalConfig(), RngStream(1))
    diff = out.values - k.values
    assert np.allclose(diff, diff[0, 0], atol=1e-15)
    assert abs(diff[0, 0]) <= 0.005


def test_pointwise_changes_one_entry(mesh10):
    k = constant_field(mesh10, 1.0)
    out = propose_pointwise(k, ProposalConfig(), RngStream(2))
    assert np.count_nonzero(out.values != k.values) == 1


def test_gridwise_changes_one_cell(mesh10):
    k = constant_field(mesh10, 1.0)
    out = propose_gridwise(k, ProposalConfig(), RngStream(3))
    changed = out.values != k.values
    assert np.count_nonzero(changed) == 4
    deltas = (out.values - k.values)[changed]
    assert np.all(deltas == deltas[0])


@pytest.mark.parametrize("kind", list(ProposalKind))
def test_zero_bound_leaves_field_unchanged(mesh10, kind):
    k = tilted_plane(mesh10, 20)
    _, out = propose(k, ProposalConfig(omega_bound=0.0, kernel=kind), RngStream(4))
    assert out.same_values(k)


@pytest.mark.parametrize("kind", list(ProposalKind))
def test_proposals_do_not_mutate_input(mesh10, kind):
    k = tilted_plane(mesh10, 20)
    before = k.values.copy()
    propose(k, ProposalConfig(kernel=kind), RngStream(5))
    assert np.array_equal(k.values, before)


@pytest.mark.parametrize("kind", list(ProposalKind))
def test_kernels_are_symmetric(mesh10, kind):
    rng = RngStream(6)
    k = tilted_plane(mesh10, 20)
    cfg = ProposalConfig(kernel=kind)
    for _ in range(50):
        move, forward = propose(k, cfg, rng)
        back = move.reverse()
        assert back.selection_probability(mesh10) == move.selection_probability(mesh10)
        assert abs(back.omega) == abs(move.omega)
        assert np.allclose(apply_move(forward, back).values, k.values, atol=1e-14)


def test_omega_moments():
    rng = RngStream(7)
    bound = 0.005
    cfg = ProposalConfig(omega_bound=bound)
    mesh = make_mesh(4, 4)
    omegas = np.array([draw_move(mesh, cfg, rng).omega for _ in range(DRAWS)])
    assert np.all(np.abs(omegas) <= bound)
    sd_mean = bound / np.sqrt(3 * DRAWS)
    assert abs(omegas.mean()) < 3 * sd_mean
    # Var of U(-b, b) is b^2/3; Var of the sample variance is (b^4/5 - b^4/9)/N
    var, expected = omegas.var(), bound**2 / 3
    assert abs(var - expected) < 3 * np.sqrt((bound**4 / 5 - bound**4 / 9) / DRAWS)


def test_pointwise_sites_are_uniform(mesh10):
    rng = RngStream(8)
    cfg = ProposalConfig(kernel=ProposalKind.POINTWISE)
    counts = np.zeros(mesh10.shape, dtype=int)
    for _ in range(DRAWS):
        i, j = draw_move(mesh10, cfg, rng).site
        counts[j - 1, i - 1] += 1
    assert stats.chisquare(counts.ravel()).pvalue > 1e-3


def test_gridwise_cell_multiplicity(mesh10):
    multiplicity = np.zeros(mesh10.shape, dtype=int)
    for i in range(1, mesh10.m):
        for j in range(1, mesh10.n):
            multiplicity += ProposalMove(ProposalKind.GRIDWISE, 0.0, (i, j)).touched(mesh10)
    assert multiplicity[0, 0] == multiplicity[-1, -1] == 1
    assert multiplicity[0, 4] == multiplicity[4, 0] == 2
    assert multiplicity[4, 4] == 4


def test_gridwise_update_frequencies_follow_1_2_4(mesh10):
    rng = RngStream(9)
    cfg = ProposalConfig(kernel=ProposalKind.GRIDWISE)
    counts = np.zeros(mesh10.shape, dtype=int)
    for _ in range(DRAWS):
        counts += draw_move(mesh10, cfg, rng).touched(mesh10)
    cell_masks = [
        ProposalMove(ProposalKind.GRIDWISE, 0.0, (i, j)).touched(mesh10)
        for i in range(1, mesh10.m)
        for j in range(1, mesh10.n)
    ]
    edge = np.zeros(mesh10.shape, dtype=bool)
    edge[[0, -1], :] = True
    edge[:, [0, -1]] = True
    corners = np.zeros(mesh10.shape, dtype=bool)
    corners[[0, 0, -1, -1], [0, -1, 0, -1]] = True
    groups = {1: corners, 2: edge & ~corners, 4: ~edge}
    per_node = {}
    for mult, mask in groups.items():
        # hits on the group per draw, one value per cell
        hits = np.array([np.count_nonzero(c & mask) for c in cell_masks], dtype=float)
        expected = DRAWS * hits.mean()
        sd = np.sqrt(DRAWS * hits.var())
        assert abs(counts[mask].sum() - expected) < 3 * sd
        per_node[mult] = counts[mask].mean()
    assert per_node[2] / per_node[1] == pytest.approx(2.0, rel=0.1)
    assert per_node[4] / per_node[1] == pytest.approx(4.0, rel=0.1)


def test_rng_is_reproducible_and_serialisable():
    a, b = RngStream(42), RngStream(42)
    assert [a.uniform() for _ in range(5)] == [b.uniform() for _ in range(5)]
    restored = RngStream.from_bytes(a.to_bytes())
    assert restored == a
    assert restored.uniform() == a.uniform()


def test_derive_seed_is_deterministic_and_distinct():
    seeds = [derive_seed(123, i) for i in range(100)]
    assert seeds == [derive_seed(123, i) for i in range(100)]
    assert len(set(seeds)) == 100
    assert all(0 <= s < 2**64 for s in seeds)


def test_proposal_config_validation():
    with pytest.raises(FieldError):
        ProposalConfig(omega_bound=-0.1)
    with pytest.raises(FieldError):
        ProposalConfig(kappa_min=0.0)
    assert ProposalConfig(kernel="gridwise").kernel is ProposalKind.GRIDWISE
