import numpy as np
import pytest

from mixedtraces.errors import ChainNotFound
from mixedtraces.reflection import build_reflection, verify_reflection
from mixedtraces.whitney import chain_sweep, decompose_domain, touching_chain


@pytest.fixture(scope="module")
def classes(unit_square):
    return decompose_domain(unit_square, max_level=6)


@pytest.fixture(scope="module")
def rmap(classes):
    return build_reflection(classes, size_band=8)


def test_every_exterior_cube_is_considered(classes, rmap):
    paired = rmap.partner >= 0
    assert not np.any(paired & ~classes.w_e)
    assert len(rmap) + len(rmap.unpaired) == int(classes.w_e.sum())
    assert len(rmap) > 0


def test_partners_are_interior_and_comparable(classes, rmap):
    q = rmap.paired
    s = rmap.partner[q]
    assert np.all(classes.w_i[s])
    ratio = classes.dec_gamma.side[s] / classes.dec_omega.side[q]
    assert np.all((ratio >= 1 / 8) & (ratio <= 8))
    assert rmap.diag["C_size"] <= 8


def test_pairing_is_deterministic(classes, rmap):
    again = build_reflection(classes, size_band=8)
    assert np.array_equal(again.partner, rmap.partner)


def test_independent_constants_match(rmap):
    diagnostics = verify_reflection(rmap, replay_samples=64)
    assert diagnostics.matches({k: rmap.diag[k] for k in ("C_size", "C_dist", "M", "C_neighbor")}, tol=1e-12)
    assert sum(diagnostics.multiplicity_histogram.values()) > 0
    assert diagnostics.long_distance_constant > 0
    assert diagnostics.exterior_layer_violations == 0


def test_frame_lists_pairs(rmap):
    frame = rmap.to_frame()
    assert len(frame) == len(rmap)
    assert (frame["distance"] >= 0).all()


def test_narrow_size_band_is_rejected(classes):
    with pytest.raises(ValueError):
        build_reflection(classes, size_band=2)


def test_full_dirichlet_has_empty_map(full_dirichlet):
    rmap = build_reflection(decompose_domain(full_dirichlet, max_level=5))
    assert len(rmap) == 0
    assert len(rmap.to_frame()) == 0


def test_chain_of_a_cube_to_itself(classes, rmap):
    q = int(rmap.paired[0])
    chain = touching_chain(q, q, classes, rmap)
    assert chain.cubes == [int(rmap.partner[q])]
    assert chain.comparable
    assert chain.within_bound
    assert not touching_chain(q, q, classes, rmap, bound=0).within_bound


def test_chain_needs_a_partner(classes, rmap):
    unpaired = int(np.flatnonzero(rmap.partner < 0)[0])
    with pytest.raises(ChainNotFound):
        touching_chain(unpaired, unpaired, classes, rmap)


def test_touching_pairs_all_have_comparable_chains(half_plane):
    classes = decompose_domain(half_plane, max_level=7)
    rmap = build_reflection(classes)
    sweep = chain_sweep(classes, rmap, limit=100_000)
    touching = sweep.chains[sweep.chains["case"] == "touching"]
    assert len(touching) > 0
    assert touching["found"].all()
    assert touching["comparable"].all()
    assert sweep.max_length >= 1


def test_chain_sweep_covers_the_boundary_layer(classes, rmap):
    sweep = chain_sweep(classes, rmap, limit=100_000)
    summary = sweep.summary().set_index("case")
    assert summary.loc["boundary-layer", "checked"] > 0
    assert summary.loc["touching", "missing"] == 0
    assert summary.loc["touching", "incomparable"] == 0
    layer = sweep.chains[(sweep.chains["case"] == "boundary-layer") & sweep.chains["found"]]
    for row in layer.itertuples():
        chain = touching_chain(None, row.Q, classes, rmap)
        assert chain.cubes[0] == int(rmap.partner[row.Q])
        assert chain.length == row.length
        sides = np.asarray(chain.sides)
        assert np.all((sides[1:] / sides[:-1] >= 0.25) & (sides[1:] / sides[:-1] <= 4))
    replay = sweep.as_replay()
    assert replay.violations == sweep.missing + sweep.incomparable
    assert replay.constant == sweep.max_length


def test_chain_bound_is_reported_not_enforced(classes, rmap):
    sweep = chain_sweep(classes, rmap, limit=32, bound=1)
    assert sweep.bound == 1
    assert sweep.over_bound == int((sweep.chains["length"] > 1).sum())
    assert sweep.as_replay().details["over_bound"] == sweep.over_bound
    assert sweep.checked <= 64
