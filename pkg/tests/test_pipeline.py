import numpy as np
import pytest

from spade_declip.clipping import InconsistentClippingError, clip, detect_mask, in_gamma
from spade_declip.frames import FrameSpec
from spade_declip.metrics import delta_sdr, delta_sdr_clipped
from spade_declip.pipeline import (
    block_problems, declip, declip_fixed_iterations, declip_iteration_grid,
)
from spade_declip.signals import note_sequence
from spade_declip.solvers import SpadeConfig, Termination, Variant


@pytest.fixture(scope="module")
def two_tone():
    t = np.arange(8000) / 16000
    x = 0.8 * np.sin(2 * np.pi * 440 * t + 0.3) + 0.5 * np.sin(2 * np.pi * 1130 * t + 1.1)
    return x / np.max(np.abs(x))


def test_unclipped_passthrough(two_tone):
    spec = FrameSpec()
    rep = declip(two_tone, 1.5, spec, SpadeConfig())
    np.testing.assert_array_equal(rep.restored, two_tone)
    assert rep.skipped_blocks == rep.total_blocks
    assert rep.per_block == []


def test_inconsistent_input_raises(two_tone):
    with pytest.raises(InconsistentClippingError):
        declip(two_tone, 0.4, FrameSpec(), SpadeConfig())


def test_block_problems_constraints(two_tone):
    theta = 0.4
    spec = FrameSpec(redundancy=2)
    y = clip(two_tone, theta)
    w = spec.window_values
    for p in block_problems(y, theta, spec):
        assert np.all(p.codes[w == 0] == 0)
        # windowed original lies in the block's feasible set
        xs = np.zeros(spec.win_len)
        lo, hi = max(p.start, 0), min(p.start + spec.win_len, len(y))
        xs[lo - p.start : hi - p.start] = two_tone[lo:hi]
        assert in_gamma(w * xs, p.codes, p.y_block, p.thresholds)


@pytest.mark.parametrize("variant", list(Variant))
def test_declip_restores_two_tone(two_tone, variant):
    theta = 0.4
    y = clip(two_tone, theta)
    rep = declip(y, theta, FrameSpec(redundancy=2), SpadeConfig(variant))
    assert rep.restored.shape == y.shape
    mask = detect_mask(y, theta)
    np.testing.assert_array_equal(rep.restored[mask.reliable], y[mask.reliable])
    assert len(rep.per_block) + rep.skipped_blocks == rep.total_blocks
    assert all(r.terminated_by is Termination.EPSILON for r in rep.per_block)
    assert delta_sdr(two_tone, y, rep.restored) > 3.0


def test_unitary_pipeline_equivalence(two_tone):
    theta = 0.4
    y = clip(two_tone, theta)
    outs = [declip(y, theta, FrameSpec(redundancy=1), SpadeConfig(v)).restored for v in Variant]
    for o in outs[1:]:
        assert np.linalg.norm(o - outs[0]) <= 1e-8 * np.linalg.norm(outs[0])


def test_delta_sdr_whole_vs_clipped_only(two_tone):
    theta = 0.5
    y = clip(two_tone, theta)
    rep = declip(y, theta, FrameSpec(redundancy=2), SpadeConfig(Variant.SSPADE_DP))
    clipped = ~detect_mask(y, theta).reliable
    whole = delta_sdr(two_tone, y, rep.restored)
    local = delta_sdr_clipped(two_tone, y, rep.restored, clipped)
    assert abs(whole - local) <= 1e-9


def test_fixed_iterations(two_tone):
    theta = 0.3
    y = clip(two_tone, theta)
    spec = FrameSpec(redundancy=2)
    rep = declip_fixed_iterations(y, theta, spec, SpadeConfig(), 1)
    assert all(r.iterations == 1 for r in rep.per_block)
    problems = [p for p in block_problems(y, theta, spec) if p.has_clipped]
    for p, r in zip(problems, rep.per_block):
        assert in_gamma(r.restored, p.codes, p.y_block, p.thresholds)
    with pytest.raises(ValueError):
        declip_fixed_iterations(y, theta, spec, SpadeConfig(), 0)


def test_iteration_grid_matches_separate_runs(two_tone):
    theta = 0.3
    y = clip(two_tone[:3000], theta)
    spec = FrameSpec(redundancy=2)
    cfg = SpadeConfig(Variant.ASPADE)
    snaps = declip_iteration_grid(y, theta, spec, cfg, [3, 10])
    for n in (3, 10):
        np.testing.assert_array_equal(
            snaps[n], declip_fixed_iterations(y, theta, spec, cfg, n).restored
        )


def test_parallel_blocks_deterministic():
    x = note_sequence(1.0, rng=3)
    theta = 0.3
    y = clip(x, theta)
    spec = FrameSpec(redundancy=2)
    a = declip(y, theta, spec, SpadeConfig(Variant.SSPADE_DP)).restored
    b = declip(y, theta, spec, SpadeConfig(Variant.SSPADE_DP), n_jobs=3).restored
    np.testing.assert_array_equal(a, b)


def test_short_signal():
    x = np.array([0.1, 0.9, -0.95, 0.2, 0.05])
    theta = 0.5
    y = clip(x, theta)
    rep = declip(y, theta, FrameSpec(), SpadeConfig())
    assert rep.restored.shape == (5,)
    assert rep.restored[1] >= theta and rep.restored[2] <= -theta
