import math

import numpy as np
import pytest
from scipy import integrate, optimize
from scipy.special import roots_legendre

from weyleth.jfunc import (
    JTilde,
    RegionUnbounded,
    momentum_box_closed_form,
    pq_box_closed_form,
    evaluate_region,
    fourier_monomial,
    j_analytic,
    j_unbounded,
    j_value,
    jtilde_values,
    mean_width,
    monomial_table,
    pair_gaussian_fourier,
    region_radius,
    region_width,
    widths_along,
)
from weyleth.weylcalc import PhasePolynomial

P1 = PhasePolynomial.p(1, 1)
Q1 = PhasePolynomial.q(1, 1)


def quad_fourier(n, L, k):
    re = integrate.quad(lambda x: x ** n * math.cos(k * x), -L, L, limit=400, epsabs=1e-14, epsrel=1e-13)[0]
    im = integrate.quad(lambda x: -(x ** n) * math.sin(k * x), -L, L, limit=400, epsabs=1e-14, epsrel=1e-13)[0]
    return re + 1j * im


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("n", range(0, 9))
@pytest.mark.parametrize("L,k", [(1.0, 0.0), (1.0, 1e-3), (0.7, 2.5), (2.0, 7.0), (1.5, 40.0), (0.1, 300.0)])
def test_fourier_monomial_vs_quadrature(n, L, k):
    got = complex(fourier_monomial(n, L, k))
    ref = quad_fourier(n, L, k)
    assert abs(got - ref) <= 1e-9 * max(abs(ref), L ** (n + 1) * 1e-3)


def test_monomial_table_shapes():
    L = np.array([1.0, 2.0])
    k = np.array([[0.5], [3.0]])
    tab = monomial_table(4, L, k)
    assert tab.shape == (5, 2, 2)
    assert monomial_table(3, 1.0, 0.0)[0] == pytest.approx(2.0)


def gl_jtilde(o, point, X, box, n=120):
    """Direct tensor Gauss-Legendre quadrature of the J~ definition (one mode)."""
    (p, q), (X1, X2) = point, X
    lp = 2 * min(box[0][1] - p, p - box[0][0])
    lq = 2 * min(box[1][1] - q, q - box[1][0])
    x, w = roots_legendre(n)
    pt, wp = lp * x, lp * w
    qt, wq = lq * x, lq * w
    PT, QT = np.meshgrid(pt, qt, indexing="ij")
    plus = np.stack([p + PT / 2, q - QT / 2], -1)
    minus = np.stack([p - PT / 2, q + QT / 2], -1)
    f = o(plus) * o(minus) * np.exp(-1j * QT * X1) * np.exp(-1j * PT * X2)
    return complex(wp @ f @ wq)


@pytest.mark.parametrize("o", [P1, Q1, P1 * Q1, P1 * P1 + 0.3 * Q1 * Q1 * Q1, PhasePolynomial.constant(2.0, 1)])
def test_box_evaluator_vs_direct_quadrature(o):
    rng = np.random.default_rng(0)
    box = [[-1.0, 1.0], [-0.5, 1.5]]
    for _ in range(5):
        pt = rng.uniform([-0.8, -0.3], [0.8, 1.3])
        X = rng.uniform(-6, 6, size=2)
        ref = gl_jtilde(o, pt, X, box)
        got = float(jtilde_values(o, pt, X, np.array(box)))
        assert abs(ref.imag) < 1e-10 * max(1, abs(ref.real))
        assert got == pytest.approx(ref.real, rel=1e-9, abs=1e-11)


def test_momentum_box_closed_form_100_points():
    rng = np.random.default_rng(1)
    hbar = 0.01
    worst = 0.0
    for _ in range(100):
        p, q = rng.uniform(-0.9, 0.9, 2)
        pp, qp = rng.uniform(0.002, 0.05, 2) * rng.choice([-1, 1], 2)
        jt = JTilde.on_cube(P1, [p, q])
        exact = float(j_value(jt, pp, qp, hbar))
        ref = float(momentum_box_closed_form(p, q, pp, qp, hbar))
        worst = max(worst, abs(exact - ref) / abs(ref))
    assert worst < 1e-8


def test_momentum_box_spot_value():
    jt = JTilde.on_cube(P1, [0.0, 0.0])
    exact = float(j_value(jt, 0.01, 0.02, 0.01))
    assert exact == pytest.approx(float(momentum_box_closed_form(0.0, 0.0, 0.01, 0.02, 0.01)), rel=1e-8)
    # at p = 0 the product O(+)O(-) = -pt^2/4 is non-positive, so J is negative near the origin
    near = float(momentum_box_closed_form(0.0, 0.0, 0.001, 0.001, 0.01))
    assert near < 0
    assert near == pytest.approx(float(j_value(jt, 0.001, 0.001, 0.01)), rel=1e-8)
    assert abs(near) > 10 * abs(float(momentum_box_closed_form(0.0, 0.0, 0.05, 0.05, 0.01)))
    # away from p = 0 the central value is positive
    assert float(momentum_box_closed_form(0.8, 0.0, 0.001, 0.001, 0.01)) > 0


@pytest.mark.parametrize("dim", [1, 2])
def test_pq_box_closed_form(dim):
    o = sum((PhasePolynomial.p(m, dim) * PhasePolynomial.q(m, dim) for m in range(1, dim + 1)),
            PhasePolynomial.zero(dim))
    rng = np.random.default_rng(2)
    hbar = 0.05
    for _ in range(20):
        pt = rng.uniform(-0.9, 0.9, 2 * dim)
        pp = rng.uniform(0.01, 0.2, dim) * rng.choice([-1, 1], dim)
        qp = rng.uniform(0.01, 0.2, dim) * rng.choice([-1, 1], dim)
        jt = JTilde.on_cube(o, pt)
        exact = float(j_value(jt, pp, qp, hbar))
        ref = float(pq_box_closed_form(pt, pp, qp, hbar))
        assert exact == pytest.approx(ref, rel=1e-8, abs=1e-10 * (2 * np.pi * hbar) ** -dim)


def test_constant_symbol_at_zero():
    c = 1.7
    for dim in (1, 2):
        jt = JTilde.on_cube(PhasePolynomial.constant(c, dim), np.zeros(2 * dim))
        V = 2.0 ** (2 * dim)
        assert float(jt(np.zeros(2 * dim))) == pytest.approx(c * c * V * V)


def test_evenness():
    rng = np.random.default_rng(3)
    o = PhasePolynomial.p(1, 2) * PhasePolynomial.q(2, 2) + PhasePolynomial.q(1, 2) * PhasePolynomial.q(1, 2)
    jt = JTilde.on_cube(o, rng.uniform(-0.5, 0.5, 4))
    X = rng.normal(size=(50, 4)) * 5
    np.testing.assert_allclose(jt(X), jt(-X), rtol=1e-10, atol=1e-12)


def test_unbounded_domain_requires_distribution():
    jt = JTilde(P1, [0.1, 0.2])
    with pytest.raises(ValueError):
        jt(np.zeros(2))
    with pytest.raises(ValueError):
        JTilde(P1 + 0.5j * PhasePolynomial.hbar(1), [0, 0])


def test_q1_unbounded_pairing_three_routes():
    hbar, sigma, q = 0.1, 0.3, 0.7
    for dim in (1, 2):
        point = np.zeros(2 * dim)
        point[dim] = q
        formula = (2 * np.pi * hbar) ** dim * (q * q + hbar ** 2 / 4 * (-1 / sigma ** 2))
        dist = j_unbounded(PhasePolynomial.q(1, dim), point, hbar).pair_gaussian(sigma)
        fourier = pair_gaussian_fourier(PhasePolynomial.q(1, dim), point, hbar, sigma)
        assert dist == pytest.approx(formula, rel=1e-12)
        assert fourier == pytest.approx(formula, rel=1e-12)
    assert j_analytic("q1_unbounded", [0.0, q], hbar).pair_gaussian(sigma) == pytest.approx(
        2 * np.pi * hbar * (q * q - hbar ** 2 / (4 * sigma ** 2)))


def test_hbar_scaling_of_pairings():
    # a bounded symbol: J-pairing / hbar^d is hbar-independent as hbar -> 0
    box = np.array([[-1.0, 1.0], [-1.0, 1.0]])
    vals = [pair_gaussian_fourier(Q1, [0.2, 0.3], h, 1.0, box) / h for h in (0.1, 0.05, 0.025)]
    assert max(vals) / min(vals) - 1 < 0.05


def test_subsystem_factorization():
    # A-only symbol p_1 in two modes; mode B unbounded -> (2 pi hbar) delta_B J_A
    hbar, sigma = 0.05, 0.04
    point = np.array([0.2, 0.0, -0.1, 0.0])
    box = np.array([[-1, 1], [-np.inf, np.inf], [-1, 1], [-np.inf, np.inf]], float)
    full = pair_gaussian_fourier(PhasePolynomial.p(1, 2), point, hbar, sigma, box)
    reduced = j_analytic("p1_box", point, hbar, dim=2)
    reduced_pair = reduced.pair_gaussian(sigma, n_grid=1600, span=9)
    assert reduced_pair == pytest.approx(full, rel=1e-6)


def test_p1_box_classical_limit_monotone():
    p, q, sigma = 0.6, 0.1, 0.2
    devs = []
    for hbar in (0.1, 0.03, 0.01):
        pair = pair_gaussian_fourier(P1, [p, q], hbar, sigma, np.array([[-1, 1], [-1, 1.0]]))
        real_space = j_analytic("p1_box", [p, q], hbar).pair_gaussian(sigma, n_grid=2400, span=8)
        assert real_space == pytest.approx(pair, rel=1e-4)
        devs.append(abs(pair / (2 * np.pi * hbar * p * p) - 1))
    assert devs[0] > devs[1] > devs[2]


def test_width_along_q_axis_matches_closed_form_root():
    eps = 0.5
    jt = JTilde.on_cube(P1, [0.8, 0.0])
    hbar = 1.0
    f = lambda t: float(momentum_box_closed_form(0.8, 0.0, 1e-9, t, hbar))  # noqa: E731
    f0 = float(jt(np.zeros(2))) / (2 * np.pi)
    ts = np.linspace(1e-6, 20, 20001)
    vals = np.array([f(t) for t in ts])
    last = np.nonzero(vals >= eps * f0)[0][-1]
    root = optimize.brentq(lambda t: f(t) - eps * f0, ts[last], ts[last + 1], xtol=1e-14)
    width = region_width(jt, [0.0, 1.0], eps)
    assert width == pytest.approx(2 * root, rel=1e-3)


class GaussStub:
    """Radially symmetric J~ stand-in."""

    dim = 1

    def __call__(self, X):
        X = np.asarray(X, float)
        return np.exp(-0.5 * np.sum(X * X, axis=-1))

    def peak(self):
        return 1.0, np.zeros(2)

    def support_scale(self):
        return 1.0


def test_symmetric_stub_widths():
    stub = GaussStub()
    w = widths_along(stub, [[1, 0], [0, 1], [1, 1], [-2, 1]], 0.5)
    expected = 2 * math.sqrt(2 * math.log(2))
    np.testing.assert_allclose(w, expected, rtol=1e-3)
    assert w.max() / w.min() - 1 < 0.01
    m, se = mean_width(stub, 0.5, 64)
    assert abs(m - w[0]) <= max(2 * se, 1e-3 * m)
    tiny = widths_along(stub, [[1, 0]], 0.9999)[0]
    assert tiny < 0.05


def test_region_errors():
    stub = GaussStub()
    with pytest.raises(ValueError):
        region_radius(stub, [[1, 0]], eps=1.0)
    with pytest.raises(RegionUnbounded):
        region_radius(stub, [[1, 0]], eps=1e-30, t_max=3.0)
    with pytest.raises(ValueError):
        evaluate_region(stub, n_directions=8)


def test_mean_width_seed_behaviour():
    o = PhasePolynomial.p(1, 1) * PhasePolynomial.p(1, 1) + PhasePolynomial.q(1, 1)
    jt = JTilde.on_cube(o, [0.3, -0.2])
    a = mean_width(jt, 0.5, 64, seed=5)
    b = mean_width(jt, 0.5, 64, seed=5)
    assert a == b
    c = mean_width(jt, 0.5, 128, seed=6)
    assert abs(a[0] - c[0]) <= 2 * math.hypot(a[1], c[1])


def test_peak_moves_off_origin_when_central_value_negative():
    jt = JTilde.on_cube(P1, [0.0, 0.0])
    assert float(jt(np.zeros(2))) < 0
    val, x = jt.peak()
    assert val > 0 and np.linalg.norm(x) > 0
    assert val >= float(jt(x)) - 1e-12


def test_peak_at_origin_for_p1():
    jt = JTilde.on_cube(P1, [0.8, 0.1])
    val, x = jt.peak()
    np.testing.assert_allclose(x, 0.0)
    assert val == pytest.approx(float(jt(np.zeros(2))))


# high-precision reference for the series/closed-form switch region, where
# cancellation in the closed form is worst
@pytest.mark.parametrize("n", [0, 1, 2, 5, 8])
@pytest.mark.parametrize("kL", [1e-4, 0.3, 1.0, 2.5, 7.0, 40.0])
def test_fourier_monomial_vs_mpmath(n, kL):
    import mpmath as mp

    mp.mp.dps = 40
    L = 0.7
    k = kL / L
    ref = mp.quad(lambda x: x**n * mp.exp(-1j * k * x), [-L, 0, L])
    got = complex(fourier_monomial(n, L, k))
    assert abs(got - complex(ref)) <= 1e-12 * max(abs(complex(ref)), L ** (n + 1) / (n + 1) * 1e-3)
