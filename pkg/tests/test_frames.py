import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spade_declip.frames import (
    CountingFrame, DFTFrame, DimensionError, FrameSpec, SymmetryError, analysis,
    full_to_half, half_to_full, is_conjugate_symmetric, n_blocks, overlap_add, segment,
    synthesis,
)


def dft_matrix(p):
    """Unitary DFT matrix built entry by entry."""
    m = np.arange(p)
    return np.exp(-2j * np.pi * np.outer(m, m) / p) / np.sqrt(p)


def analysis_oracle(x, p):
    xp = np.zeros(p)
    xp[: len(x)] = x
    return dft_matrix(p) @ xp


def synthesis_oracle(z, n):
    p = len(z)
    return (dft_matrix(p).conj().T @ z)[:n]


def random_symmetric(rng, p):
    return np.fft.fft(rng.standard_normal(p), norm="ortho")


def test_frame_spec_defaults():
    spec = FrameSpec()
    assert (spec.win_len, spec.hop, spec.redundancy, spec.window) == (1024, 256, 1, "hann")
    assert spec.n_coeffs == 1024
    assert FrameSpec(redundancy=4).n_coeffs == 4096


@pytest.mark.parametrize("kwargs", [
    dict(hop=300), dict(hop=2048), dict(redundancy=0), dict(window="kaiser"),
    dict(win_len=1024, hop=1024),  # hann is not COLA without overlap
])
def test_frame_spec_rejects_invalid(kwargs):
    with pytest.raises(ValueError):
        FrameSpec(**kwargs)


def test_hann_cola_constant():
    spec = FrameSpec()
    w = spec.window_values
    assert w[0] == 0.0
    cola = w.reshape(-1, spec.hop).sum(axis=0)
    np.testing.assert_allclose(cola, 2.0, atol=1e-14)


def test_impulse_has_flat_spectrum():
    spec = FrameSpec(win_len=4, hop=2, redundancy=2)
    z = analysis([1.0, 0, 0, 0], spec)
    np.testing.assert_allclose(np.abs(z), 1 / np.sqrt(8), atol=1e-15)


def test_zero_block():
    spec = FrameSpec(win_len=4, hop=2, redundancy=2)
    assert not np.any(analysis(np.zeros(4), spec))
    assert not np.any(synthesis(np.zeros(8), spec))


def test_constant_block_unitary():
    spec = FrameSpec(win_len=4, hop=2, redundancy=1)
    z = analysis(np.ones(4), spec)
    np.testing.assert_allclose(z, analysis_oracle(np.ones(4), 4), atol=1e-14)
    np.testing.assert_allclose(z, [2, 0, 0, 0], atol=1e-14)


def test_single_conjugate_pair_is_cosine():
    spec = FrameSpec(win_len=4, hop=2, redundancy=2)
    z = np.zeros(8, complex)
    z[1] = 1.0
    z[7] = 1.0
    x = synthesis(z, spec)
    np.testing.assert_allclose(x, synthesis_oracle(z, 4).real, atol=1e-14)
    np.testing.assert_allclose(x, 2 / np.sqrt(8) * np.cos(2 * np.pi * np.arange(4) / 8), atol=1e-14)


@pytest.mark.parametrize("red", [1, 2, 4])
def test_against_matrix_oracle(red):
    rng = np.random.default_rng(red)
    spec = FrameSpec(win_len=16, hop=4, redundancy=red)
    x = rng.standard_normal(16)
    np.testing.assert_allclose(analysis(x, spec), analysis_oracle(x, 16 * red), atol=1e-12)
    z = random_symmetric(rng, 16 * red)
    np.testing.assert_allclose(synthesis(z, spec), synthesis_oracle(z, 16).real, atol=1e-12)


@pytest.mark.parametrize("red", [1, 2, 4])
def test_tight_frame_identities(red):
    rng = np.random.default_rng(10 + red)
    spec = FrameSpec(win_len=64, hop=16, redundancy=red)
    for _ in range(50):
        x = rng.standard_normal(64)
        z = analysis(x, spec)
        assert abs(np.linalg.norm(z) - np.linalg.norm(x)) <= 1e-10 * np.linalg.norm(x)
        assert np.linalg.norm(synthesis(z, spec) - x) <= 1e-10 * np.linalg.norm(x)
        assert is_conjugate_symmetric(z)
        w = random_symmetric(rng, spec.n_coeffs)
        lhs = np.vdot(z, w).real
        rhs = np.dot(x, synthesis(w, spec))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_unitary_case_inverts_both_ways():
    rng = np.random.default_rng(3)
    spec = FrameSpec(win_len=32, hop=8, redundancy=1)
    z = random_symmetric(rng, 32)
    np.testing.assert_allclose(analysis(synthesis(z, spec), spec), z, atol=1e-12)


def test_dimension_errors():
    spec = FrameSpec(win_len=8, hop=4, redundancy=2)
    with pytest.raises(DimensionError):
        analysis(np.zeros(7), spec)
    with pytest.raises(DimensionError):
        synthesis(np.zeros(8), spec)


def test_synthesis_rejects_asymmetric():
    spec = FrameSpec(win_len=4, hop=2, redundancy=2)
    z = np.zeros(8, complex)
    z[1] = 1.0
    with pytest.raises(SymmetryError):
        synthesis(z, spec)


@pytest.mark.parametrize("p", [7, 8])
def test_half_full_round_trip(p):
    z = random_symmetric(np.random.default_rng(p), p)
    np.testing.assert_allclose(half_to_full(full_to_half(z), p), z, atol=1e-15)


@pytest.mark.parametrize("red", [1, 2, 4])
def test_dft_frame_matches_full_operators(red):
    rng = np.random.default_rng(red)
    spec = FrameSpec(win_len=32, hop=8, redundancy=red)
    f = DFTFrame(spec)
    x = rng.standard_normal(32)
    zh = f.analysis(x)
    np.testing.assert_allclose(half_to_full(zh, spec.n_coeffs), analysis(x, spec), atol=1e-13)
    assert f.norm(zh) == pytest.approx(np.linalg.norm(analysis(x, spec)), rel=1e-13)
    w = random_symmetric(rng, spec.n_coeffs)
    np.testing.assert_allclose(f.synthesis(full_to_half(w)), synthesis(w, spec), atol=1e-13)
    assert f.inner(zh, full_to_half(w)) == pytest.approx(np.vdot(analysis(x, spec), w).real)


def test_counting_frame():
    spec = FrameSpec(win_len=8, hop=4, redundancy=2)
    f = CountingFrame(spec)
    f.synthesis(f.analysis(np.ones(8)))
    f.analysis(np.ones(8))
    assert (f.n_analysis, f.n_synthesis) == (2, 1)


def test_segment_block_count_and_coverage():
    spec = FrameSpec()
    x = np.ones(1024)
    blocks, starts = segment(x, spec)
    pad = spec.win_len - spec.hop
    assert len(blocks) == 1 + -(-(1024 + 2 * pad - 1024) // 256) == 7
    np.testing.assert_array_equal(starts, np.arange(7) * 256 - pad)
    cover = np.zeros(1024, int)
    for s in starts:
        lo, hi = max(s, 0), min(s + 1024, 1024)
        cover[lo:hi] += 1
    assert np.all(cover == 4)


def test_segment_short_signal():
    spec = FrameSpec()
    x = np.arange(1, 11, dtype=float)
    blocks, starts = segment(x, spec)
    assert len(blocks) == n_blocks(10, spec) == 4
    for b, s in zip(blocks, starts):
        outside = np.ones(1024, bool)
        lo, hi = max(-s, 0), min(10 - s, 1024)
        outside[lo:hi] = False
        assert not np.any(b[outside])


def test_segment_rectangular_is_raw_slices():
    spec = FrameSpec(win_len=8, hop=4, window="rect")
    x = np.arange(20, dtype=float)
    blocks, starts = segment(x, spec)
    for b, s in zip(blocks, starts):
        expect = np.array([x[i] if 0 <= i < 20 else 0.0 for i in range(s, s + 8)])
        np.testing.assert_array_equal(b, expect)


def test_overlap_add_single_rect_block():
    spec = FrameSpec(win_len=8, hop=8, window="rect")
    x = np.arange(8, dtype=float)
    blocks, starts = segment(x, spec)
    assert len(blocks) == 1
    np.testing.assert_array_equal(overlap_add(blocks, starts, spec, 8), x)


def test_overlap_add_two_half_overlapping_hann_blocks():
    # hann at 50% overlap: w[n] + w[n + N/2] == 1, so a constant survives in the overlap
    spec = FrameSpec(win_len=8, hop=4)
    c = 0.7
    w = spec.window_values
    blocks = np.stack([c * w, c * w])
    starts = np.array([-4, 0])
    out = overlap_add(blocks, starts, spec, 4)
    np.testing.assert_allclose(w[4:] + w[:4], 1.0, atol=1e-15)
    np.testing.assert_allclose(out, c, atol=1e-15)


def test_overlap_add_guard_reports(caplog):
    spec = FrameSpec(win_len=8, hop=4)
    blocks = np.zeros((1, 8))
    with caplog.at_level(logging.WARNING):
        out = overlap_add(blocks, np.array([0]), spec, 12)
    assert np.all(out == 0)
    assert "no window coverage" in caplog.text


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 5000), seed=st.integers(0, 2**16))
def test_segment_ola_round_trip(n, seed):
    spec = FrameSpec()
    x = np.random.default_rng(seed).standard_normal(n)
    blocks, starts = segment(x, spec)
    np.testing.assert_allclose(overlap_add(blocks, starts, spec, n), x, atol=1e-10, rtol=0)
