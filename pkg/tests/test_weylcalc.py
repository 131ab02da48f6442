import itertools

import numpy as np
import pytest

from weyleth.weylcalc import (
    OperatorWord,
    PhasePolynomial,
    classical_limit,
    evaluate,
    poisson_bracket,
    star_product,
    weyl_order_decompose,
    weyl_quantize_1d,
    weyl_symbol,
    word_matrix,
)

P, Q = PhasePolynomial.p(1, 1), PhasePolynomial.q(1, 1)
HB = PhasePolynomial.hbar(1)
ONE = PhasePolynomial.constant(1.0, 1)


def block_rel_err(a, b, k=16):
    a, b = a[:k, :k], b[:k, :k]
    return np.abs(a - b).max() / max(np.abs(b).max(), 1e-300)


def test_q_star_p():
    assert star_product(Q, P) == Q * P + 0.5j * HB


def test_p_star_q():
    assert star_product(P, Q) == Q * P - 0.5j * HB


def test_star_identity():
    f = Q * Q * P + 3 * P
    assert star_product(f, ONE) == f
    assert star_product(ONE, f) == f


@pytest.mark.parametrize("left,right", [(Q, P), (P, Q), (Q * P, Q * Q), (P * P, Q * Q * Q)])
def test_star_matches_matrix_product(left, right):
    n = 40
    lhs = weyl_quantize_1d(left, n) @ weyl_quantize_1d(right, n)
    rhs = weyl_quantize_1d(star_product(left, right), n)
    assert block_rel_err(lhs, rhs, 12) < 1e-10


def test_symbol_of_q():
    assert weyl_symbol(OperatorWord.parse("q")) == Q


def test_symbol_qpqp_from_matrix_oracle():
    # q p q p = (qp)(qp); the oscillator-basis matrix fixes the symbol
    word = OperatorWord.parse("q p q p")
    sym = weyl_symbol(word)
    assert block_rel_err(weyl_quantize_1d(sym, 64), word_matrix(word, 64)) < 1e-10
    assert sym.isclose(Q * Q * P * P + 1j * HB * Q * P)


def test_observable_symbol_number_operator():
    # b^dag b / Omega with b = sqrt(Omega/2)(q + i p); hbar = 1/Omega
    omega = 7
    hbar = 1.0 / omega
    sym = 0.5 * (weyl_symbol(OperatorWord.parse("q q")) + weyl_symbol(OperatorWord.parse("p p"))
                 + 1j * weyl_symbol(OperatorWord.parse("q p")) - 1j * weyl_symbol(OperatorWord.parse("p q")))
    expect = 0.5 * (P * P + Q * Q) - 0.5 * HB
    assert sym.isclose(expect)
    val = evaluate(sym, [1.0, 1.0], hbar)
    assert val == pytest.approx(1.0 - hbar / 2)


def test_decompose_examples():
    dq2 = weyl_order_decompose(OperatorWord.parse("q^2"))
    assert len(dq2) == 1 and dq2[0][0] == 0 and dq2[0][1] == Q * Q
    dpq = weyl_order_decompose(OperatorWord.parse("p q"))
    assert [k for k, _ in dpq] == [0, 1]
    assert dpq[0][1] == Q * P
    assert dpq[1][1] == PhasePolynomial.constant(-0.5j, 1)


def test_classical_limit():
    f = Q * Q * P * P + 0.75j * HB * Q * P + HB * HB * (1 / 8)
    cl, m = classical_limit(f)
    assert cl == Q * Q * P * P and m == 1
    assert classical_limit(Q) == (Q, None)
    cl, m = classical_limit(0.5 * (P * P + Q * Q) - 0.5 * HB)
    assert cl == 0.5 * (P * P + Q * Q) and m == 1


def test_evaluate_examples():
    f = Q * P + 0.5j * HB
    assert evaluate(f, [2.0, 3.0], 0.1) == pytest.approx(6 + 0.05j)
    assert evaluate(PhasePolynomial.zero(1), [[1.0, 2.0], [3.0, 4.0]]).tolist() == [0, 0]
    p1, q1 = PhasePolynomial.p(1, 2), PhasePolynomial.q(1, 2)
    o = 0.5 * (p1 * p1 + q1 * q1) - 0.5 * PhasePolynomial.hbar(2)
    assert evaluate(o, [1.0, 0.0, 1.0, 0.0], 0.02).real == pytest.approx(0.99)


def test_evaluate_rejects_wrong_width():
    with pytest.raises(ValueError):
        evaluate(Q, [1.0, 2.0, 3.0])


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        star_product(Q, PhasePolynomial.q(1, 2))


def test_parse_errors_and_modes():
    with pytest.raises(ValueError):
        OperatorWord.parse("q x")
    with pytest.raises(ValueError):
        OperatorWord.parse("q3", dim=2)
    w = OperatorWord.parse("q1^2 p2 q1")
    assert w.dim == 2 and len(w.factors) == 3


def _all_words(max_len):
    for n in range(1, max_len + 1):
        for letters in itertools.product("qp", repeat=n):
            yield " ".join(letters)


@pytest.mark.parametrize("text", list(_all_words(4)))
def test_matrix_oracle_words(text):
    word = OperatorWord.parse(text)
    sym = weyl_symbol(word)
    assert block_rel_err(weyl_quantize_1d(sym, 64), word_matrix(word, 64)) < 1e-8


@pytest.mark.parametrize("text", ["q p q", "p q^2 p", "q p p q", "p q p"])
def test_hermitian_word_symbol_parity(text):
    word = OperatorWord.parse(text)
    assert word.is_self_adjoint()
    for (a, b, k), c in weyl_symbol(word).terms.items():
        if k % 2 == 0:
            assert abs(c.imag) < 1e-14
        else:
            assert abs(c.real) < 1e-14


def test_text_roundtrip():
    f = Q * Q * P + 0.25j * HB * P - 3.0
    assert PhasePolynomial.from_text(f.to_text()) == f


def test_poisson_slice_of_commutator():
    f, g = Q * Q * P, P * P + Q
    comm = star_product(f, g) - star_product(g, f)
    assert comm.hbar_slice(1).isclose(1j * poisson_bracket(f, g))
