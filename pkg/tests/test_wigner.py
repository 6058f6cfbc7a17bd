import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from mubw.finite_field import field_for_order, trace
from mubw.phase_space import INFINITY, Line, enumerate_striations
from mubw.wigner import (
    WignerError,
    WignerFunction,
    check_hermitian,
    from_wigner,
    hs_inner,
    kernel_A,
    kernel_stack,
    line_indicator,
    line_sum,
    moyal_point,
    moyal_product,
    operator_from_json,
    operator_to_json,
    striation_sums,
    to_wigner,
)


def naive_kernel(q, p, f):
    # entry-by-entry from the definition, with scalar field elements
    d = f.d
    A = np.zeros((d, d), dtype=complex)
    two_q = f.element(2) * f.element(q)
    for j, k in itertools.product(f.elements(), repeat=2):
        if j == two_q - k:
            A[j.index, k.index] = np.exp(2j * np.pi * trace((j - k) * f.element(p)) / f.r)
    return A


def test_kernel_d3_origin(F3):
    A = kernel_A(0, 0, F3)
    expected = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    assert np.allclose(A, expected)


@pytest.mark.parametrize("d,qp", [(7, (3, 5)), (9, (4, 7)), (27, (11, 20))])
def test_kernel_matches_definition(d, qp):
    f = field_for_order(d)
    assert np.allclose(kernel_A(*qp, f), naive_kernel(*qp, f), atol=1e-12)


def test_kernel_d7_examples(F7):
    A12, A34 = kernel_A(1, 2, F7), kernel_A(3, 4, F7)
    assert abs(np.trace(A12 @ A34)) < 1e-12
    assert np.trace(A12 @ A12) == pytest.approx(7)


@pytest.mark.parametrize("d", [3, 5, 7, 9, 11])
def test_kernel_orthonormal_exhaustive(d):
    f = field_for_order(d)
    K = kernel_stack(f).reshape(d * d, d, d)
    G = np.einsum("ajk,bkj->ab", K, K)
    assert np.abs(G - d * np.eye(d * d)).max() < 1e-10
    assert np.abs(np.trace(K, axis1=1, axis2=2) - 1).max() < 1e-12
    assert np.abs(K - K.conj().transpose(0, 2, 1)).max() < 1e-12
    assert np.abs(K.sum(axis=0) - d * np.eye(d)).max() < 1e-10


def test_to_wigner_identity(F7):
    W = to_wigner(np.eye(7) / 7, F7)
    assert np.allclose(W.values, 1 / 49, atol=1e-15)
    assert np.allclose(from_wigner(WignerFunction(F7, np.full((7, 7), 1 / 49))), np.eye(7) / 7)


def test_to_wigner_of_kernel_is_delta(F27):
    W = to_wigner(kernel_A(5, 13, F27), F27)
    expected = np.zeros((27, 27))
    expected[5, 13] = 1
    assert np.abs(W.values - expected).max() < 1e-12


@pytest.mark.parametrize("d", [3, 7, 9, 27])
def test_to_wigner_matches_trace_definition(d, rng):
    f = field_for_order(d)
    R = random_hermitian(d, rng)
    W = to_wigner(R, f)
    for q, p in [(0, 0), (1, 2), (d - 1, d // 2)]:
        assert W(q, p) == pytest.approx(np.trace(R @ kernel_A(q, p, f)).real / d, abs=1e-12)
    assert W.total() == pytest.approx(np.trace(R).real)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([3, 7, 9, 11, 27]), st.integers(0, 2**32 - 1))
def test_round_trip_property(d, seed):
    f = field_for_order(d)
    R = random_hermitian(d, np.random.default_rng(seed))
    W = to_wigner(R, f)
    assert np.abs(from_wigner(W) - R).max() < 1e-12
    assert np.abs(to_wigner(from_wigner(W), f).values - W.values).max() < 1e-12


def test_non_hermitian_rejected(F7, rng):
    X = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
    with pytest.raises(WignerError):
        to_wigner(X, F7)
    with pytest.raises(WignerError):
        check_hermitian(np.ones((2, 3)))
    with pytest.raises(WignerError):
        to_wigner(np.eye(3), F7)


def test_wigner_function_validation(F3):
    with pytest.raises(WignerError):
        WignerFunction(F3, np.zeros((3, 4)))
    with pytest.raises(WignerError):
        WignerFunction(F3, np.full((3, 3), 1j))
    W = WignerFunction(F3, np.full((3, 3), 1 / 9) + 1e-14j)
    assert W.values.dtype == float


def test_hs_inner_matches_trace(F7, rng):
    R, S = random_hermitian(7, rng), random_hermitian(7, rng)
    got = hs_inner(to_wigner(R, F7), to_wigner(S, F7))
    assert got == pytest.approx(np.trace(R @ S).real, abs=1e-10)


def test_line_states(F7):
    e = F7.element
    lam = Line(e(2), e(3))
    par = Line(e(2), e(5))
    cross = Line(INFINITY, e(1))
    W = line_indicator(lam)
    rho = from_wigner(W)
    assert np.allclose(np.linalg.eigvalsh(rho), [0] * 6 + [1], atol=1e-12)
    assert hs_inner(W, W) == pytest.approx(1)
    assert abs(hs_inner(W, line_indicator(par))) < 1e-12
    assert hs_inner(W, line_indicator(cross)) == pytest.approx(1 / 7)
    assert line_sum(W, lam) == pytest.approx(1)
    assert abs(line_sum(W, par)) < 1e-12
    assert line_sum(W, cross) == pytest.approx(1 / 7)


def test_line_sum_equals_projector_overlap(F7, rng):
    R = random_hermitian(7, rng)
    R = R @ R
    R /= np.trace(R).real
    W = to_wigner(R, F7)
    for s in enumerate_striations(F7):
        sums = striation_sums(W, s.slope)
        assert sums.sum() == pytest.approx(1)
        for line in s.lines[:2]:
            proj = from_wigner(line_indicator(line))
            assert line_sum(W, line) == pytest.approx(np.trace(R @ proj).real, abs=1e-12)


def test_striation_sums_complex(F7):
    vals = np.arange(49).reshape(7, 7) * (1 + 2j)
    out = striation_sums(vals, INFINITY, F7)
    assert np.allclose(out, vals.sum(axis=1))


@pytest.mark.parametrize("d", [3, 7])
def test_moyal_matches_matrix_route(d, rng):
    f = field_for_order(d)
    R, S = random_hermitian(d, rng), random_hermitian(d, rng)
    WR, WS = to_wigner(R, f), to_wigner(S, f)
    got = moyal_product(WR, WS)
    got = got.values if isinstance(got, WignerFunction) else got
    # W of a non-Hermitian product, from the trace definition
    K = kernel_stack(f)
    expected = np.einsum("jk,qpkj->qp", R @ S, K) / d
    assert np.abs(got - expected).max() < 1e-10


def test_moyal_identity_and_idempotent_line(F7, rng):
    WR = to_wigner(random_hermitian(7, rng), F7)
    WI = WignerFunction(F7, np.full((7, 7), 1 / 7))  # operator I
    out = moyal_product(WR, WI)
    assert np.abs(out.values - WR.values).max() < 1e-12
    W = line_indicator(Line(F7.element(3), F7.element(1)))
    assert np.abs(moyal_product(W, W).values - W.values).max() < 1e-12


def test_moyal_caps(F27):
    W = WignerFunction(F27, np.full((27, 27), 1 / 729))
    with pytest.raises(WignerError):
        moyal_product(W, W)
    assert moyal_point(W, W, 0, 0) == pytest.approx(1 / 729 / 27, abs=1e-14)
    with pytest.raises(WignerError):
        moyal_point(W, W, 0, 0, max_d=11)


def test_serialization_round_trips(F7, rng):
    W = to_wigner(random_hermitian(7, rng), F7)
    text = W.to_csv()
    assert text.splitlines()[0] == "q," + ",".join(f"p{j}" for j in range(7))
    assert "\r" not in text and text.endswith("\n")
    assert np.array_equal(WignerFunction.from_csv(F7, text).values, W.values)
    back = WignerFunction.from_json(json.loads(json.dumps(W.to_json())))
    assert np.array_equal(back.values, W.values) and back.field == F7
    R = random_hermitian(7, rng)
    assert np.array_equal(operator_from_json(json.loads(json.dumps(operator_to_json(R)))), R)
