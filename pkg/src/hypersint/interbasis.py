"""Expansion of horicyclic eigenstates over equidistant ones at fixed energy.

On level N the two bases are related by

    Psi^(hc)_{n1 n2}(x, y) = sum_m  W[(n1,n2),(n,m)] Psi^(eq)_{n m}(a, b),

with n1 + n2 = n + m = N and the coordinate bridge x = e^b tanh a,
y = e^b / cosh a.  Both bases are taken orthonormal in L^2 of the invariant
measure on the half-chart a > 0 (see potential1), so W is a real orthogonal
(N+1) x (N+1) matrix.

Three independent computations are provided:

* ``w_quadrature`` -- the large-b reduction of the overlap to a
  one-dimensional integral over a, evaluated numerically (ground truth);
* ``w_3f2``        -- the same integral summed in closed form via the
  Beta-integral, yielding a terminating 3F2 at unit argument;
* ``w_hahn``       -- the 3F2 re-expressed through a Hahn polynomial.

``variant="printed"`` switches every method to a verbatim transcription of
the published formulas.  The printed chain is internally consistent (its own
integral/3F2/Hahn forms agree once the integral is read over (0, inf)) but
is *not* orthogonal and does not reproduce the pointwise expansion: its
integrand carries cosh^{1-2mu-2m} where the orthogonality projection gives
cosh^{-1-2mu-2m}, and the prefactor differs by level-dependent factors.
The canonical variant is the one all invariants are stated for; the printed
variant exists so the discrepancy can be measured and reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import potential1 as p1m
from . import specfun as sf
from .errors import OutOfDomainError
from .potential1 import P1Params, P1State

__all__ = [
    "InterbasisMatrix",
    "orthogonality_defect",
    "verify_expansion",
    "w_3f2",
    "w_hahn",
    "w_quadrature",
]

SQRT2 = math.sqrt(2.0)


def _lg(x: float) -> float:
    return sf.log_gamma(x).real


@dataclass(frozen=True)
class InterbasisMatrix:
    """Level-N change of basis; rows (n1, n2), columns (n, m)."""

    N: int
    method: str
    variant: str
    entries: np.ndarray
    rows: tuple
    cols: tuple

    def __post_init__(self):
        if self.entries.shape != (len(self.rows), len(self.cols)):
            raise OutOfDomainError("entry shape does not match the index sets")


def orthogonality_defect(w: InterbasisMatrix) -> float:
    """max |W^T W - I|."""
    g = w.entries.T @ w.entries
    return float(np.max(np.abs(g - np.eye(g.shape[0]))))


def _indices(p: P1Params, N: int):
    rows = tuple(p1m.level_states_horicyclic(p, N))
    cols = tuple(p1m.level_states_equidistant(p, N))
    if len(cols) != N + 1:
        raise OutOfDomainError(
            f"level N = {N} does not carry the full N+1 equidistant states")
    return rows, cols


def _log_k0(p: P1Params, N: int, n: int, m: int, n1: int, n2: int,
            mu: float, nu: float) -> float:
    """log of the positive projection constant multiplying the a-integral.

    K0 = (m! mu / nu) chat C1 C2 / (C_m n1! n2!) with chat the canonical
    horicyclic scale and C1, C2, C_m the closed-form 1D normalizations.
    """
    d = p.d
    sb = SQRT2 * p.beta
    log_chat = 0.5 * (math.log(2.0) + math.log(nu) - math.log(sb))
    log_c1 = 0.5 * (_lg(n1 + 1.0) + 0.5 * math.log(sb) - _lg(n1 + d + 1.0))
    log_c2 = 0.5 * (math.log(2.0) + _lg(n2 + 1.0) + 0.5 * math.log(sb)
                    - _lg(n2 + nu + 1.0))
    log_cm = 0.5 * (math.log(2.0 * mu) + _lg(m + 1.0) - _lg(m + mu + 1.0))
    return (_lg(m + 1.0) + math.log(mu) - math.log(nu) + log_chat
            + log_c1 + log_c2 - log_cm - _lg(n1 + 1.0) - _lg(n2 + 1.0))


def _log_an(p: P1Params, n: int, mu: float, nu: float) -> float:
    d = p.d
    return 0.5 * (math.log(2.0 * nu) + _lg(mu - n) + _lg(n + 1.0)
                  - _lg(mu - d - n) - _lg(1.0 + n + d))


def _a_integral(p: P1Params, n: int, mu: float, cosh_pow: float,
                sinh_pow: float, tol: float = 1e-13) -> float:
    """int_0^inf sinh^sinh_pow cosh^cosh_pow P_n^{(d,-mu)}(cosh 2a) da.

    Substitution u = tanh a followed by u = sin(phi) (which turns the
    (1-u^2)^{half-integer} endpoint branch into an analytic factor), then
    Gauss-Legendre on (0, pi/2) with node doubling until two successive
    levels agree.
    """
    d = p.d

    def integrand(phi):
        sp, cp = np.sin(phi), np.cos(phi)
        arg = (1.0 + sp * sp) / (cp * cp)  # cosh 2a
        poly = np.real(sf.jacobi(n, d, -mu, arg))
        logmag = (sinh_pow * np.log(sp)
                  - (sinh_pow + cosh_pow + 1.0) * np.log(cp))
        return np.exp(logmag) * poly

    prev = None
    half = math.pi / 4.0
    for n_nodes in (48, 96, 192, 384, 768):
        x, w = sf.gauss_legendre_nodes(n_nodes)
        phi = half * (x + 1.0)
        val = half * float(np.sum(w * integrand(phi)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
    return val


def w_quadrature(p: P1Params, N: int, variant: str = "canonical") -> InterbasisMatrix:
    """Interbasis matrix from the one-dimensional overlap integral.

    canonical: orthogonality projection of the large-b limit, with the
    canonical normalizations; entry = (-1)^n K0 A_n J where

        J = int_0^inf sinh^{1+2d+2n1} cosh^{-1-2mu-2m} P_n^{(d,-mu)}(cosh 2a) da.

    printed: verbatim published prefactor and the integrand with
    cosh^{1-2mu-2m}, integral read over (0, inf).
    """
    rows, cols = _indices(p, N)
    nu = p1m.p1_nu(p, N)
    d = p.d
    ent = np.zeros((N + 1, N + 1))
    for i, (n1, n2) in enumerate(rows):
        for j, (n, m) in enumerate(cols):
            mu = p1m.p1_mu(p, m)
            if variant == "canonical":
                val = _a_integral(p, n, mu, -(1.0 + 2.0 * mu + 2.0 * m),
                                  1.0 + 2.0 * d + 2.0 * n1)
                logk = _log_k0(p, N, n, m, n1, n2, mu, nu) + _log_an(p, n, mu, nu)
                ent[i, j] = (-1.0) ** n * math.exp(logk) * val
            elif variant == "printed":
                val = _a_integral(p, n, mu, 1.0 - 2.0 * mu - 2.0 * m,
                                  1.0 + 2.0 * d + 2.0 * n1)
                logk = 0.5 * (
                    _lg(m + 1.0) + _lg(n + 1.0) + math.log(SQRT2 * p.beta)
                    + math.log(mu - d - 2.0 * n - 1.0) + _lg(mu + m + 1.0)
                    + _lg(mu - n) - _lg(n1 + 1.0) - _lg(n2 + 1.0) - math.log(mu)
                    - _lg(n1 + d + 1.0) - _lg(n2 + d + 1.0) - _lg(n + d + 1.0)
                    - _lg(mu - d - n))
                ent[i, j] = (-1.0) ** n * math.exp(logk) * val
            else:
                raise OutOfDomainError(f"unknown variant {variant!r}")
    return InterbasisMatrix(N, "quadrature", variant, ent, rows, cols)


def _signed_pochhammer_log(a: float, n: int) -> tuple[float, float]:
    """(sign, log|.|) of the rising factorial (a)_n for real a."""
    sign = 1.0
    logmag = 0.0
    for k in range(n):
        v = a + k
        if v == 0.0:
            return 0.0, -math.inf
        sign *= math.copysign(1.0, v)
        logmag += math.log(abs(v))
    return sign, logmag


def w_3f2(p: P1Params, N: int, variant: str = "canonical") -> InterbasisMatrix:
    """Closed form of the overlap: terminating 3F2 at unit argument.

    canonical: Beta-integral summation of the canonical a-integral,

        W = K0 A_n ((1-mu)_n / n!) (1/2)
            Gamma(1+d+n1) Gamma(mu+m-d-n1) / Gamma(1+mu+m)
            3F2(-n, n+d-mu+1, -mu-m; 1-mu, 1+d+n1-mu-m; 1).

    printed: the published display (whose lower/upper parameters and Gamma
    arguments sit one unit away from the canonical ones).
    """
    rows, cols = _indices(p, N)
    nu = p1m.p1_nu(p, N)
    d = p.d
    ent = np.zeros((N + 1, N + 1))
    for i, (n1, n2) in enumerate(rows):
        for j, (n, m) in enumerate(cols):
            mu = p1m.p1_mu(p, m)
            if variant == "canonical":
                f32 = sf.hyp3f2_unit(n, n + d - mu + 1.0, -mu - m,
                                     1.0 - mu, 1.0 + d + n1 - mu - m).real
                sgn, logp = _signed_pochhammer_log(1.0 - mu, n)
                logmag = (_log_k0(p, N, n, m, n1, n2, mu, nu)
                          + _log_an(p, n, mu, nu) + logp - _lg(n + 1.0)
                          - math.log(2.0) + _lg(1.0 + d + n1)
                          + _lg(mu + m - d - n1) - _lg(1.0 + mu + m))
                ent[i, j] = sgn * math.exp(logmag) * f32
            elif variant == "printed":
                f32 = sf.hyp3f2_unit(n, n + d - mu + 1.0, 1.0 - mu - m,
                                     1.0 - mu, 2.0 + n1 + d - mu - m).real
                logmag = 0.5 * (
                    _lg(m + 1.0) + math.log(SQRT2 * p.beta)
                    + math.log(mu - d - 2.0 * n - 1.0) + math.log(mu + m)
                    + _lg(n1 + d + 1.0) - _lg(n + 1.0) - _lg(n1 + 1.0)
                    - _lg(n2 + 1.0) - math.log(mu) - _lg(n2 + d + 1.0)
                    - _lg(n + d + 1.0) - _lg(mu - n - d)
                    - _lg(mu - n) - _lg(mu + m))
                logmag += (_lg(mu) + _lg(mu + m - d - n1 - 1.0) - math.log(2.0))
                ent[i, j] = (-1.0) ** n * math.exp(logmag) * f32
            else:
                raise OutOfDomainError(f"unknown variant {variant!r}")
    return InterbasisMatrix(N, "3f2", variant, ent, rows, cols)


def w_hahn(p: P1Params, N: int, variant: str = "canonical") -> InterbasisMatrix:
    """The 3F2 assembly re-expressed through Hahn polynomials.

    canonical: W = K0 A_n (-1)^n (1/2) Gamma(1+d+n1)
                   Gamma(mu+m-d-n1-n) / Gamma(1+mu+m)
                   h_n^{(d,-mu)}(mu+m, mu+m-d-n1).

    printed: h_n^{(d,-mu)}(mu+m+1, mu+m-d-n1-1) with the published
    prefactor.
    """
    rows, cols = _indices(p, N)
    nu = p1m.p1_nu(p, N)
    d = p.d
    ent = np.zeros((N + 1, N + 1))
    for i, (n1, n2) in enumerate(rows):
        for j, (n, m) in enumerate(cols):
            mu = p1m.p1_mu(p, m)
            if variant == "canonical":
                h = sf.hahn(n, d, -mu, mu + m, mu + m - d - n1).real
                logmag = (_log_k0(p, N, n, m, n1, n2, mu, nu)
                          + _log_an(p, n, mu, nu) - math.log(2.0)
                          + _lg(1.0 + d + n1) + _lg(mu + m - d - n1 - n)
                          - _lg(1.0 + mu + m))
                ent[i, j] = (-1.0) ** n * math.exp(logmag) * h
            elif variant == "printed":
                h = sf.hahn(n, d, -mu, mu + m + 1.0, mu + m - d - n1 - 1.0).real
                logmag = 0.5 * (
                    _lg(m + 1.0) + _lg(n + 1.0) + math.log(SQRT2 * p.beta)
                    + math.log(mu - d - 2.0 * n - 1.0) + math.log(mu + m)
                    - _lg(n1 + 1.0) - _lg(n2 + 1.0) - math.log(mu)
                    - _lg(n + d + 1.0) - _lg(mu - n - d)
                    + _lg(n1 + d + 1.0) + _lg(mu - n)
                    - _lg(n2 + d + 1.0) - _lg(mu + m))
                logmag += _lg(mu + m - d - n1 - n - 1.0) - math.log(2.0)
                ent[i, j] = (-1.0) ** n * math.exp(logmag) * h
            else:
                raise OutOfDomainError(f"unknown variant {variant!r}")
    return InterbasisMatrix(N, "hahn", variant, ent, rows, cols)


def verify_expansion(p: P1Params, N: int, w: InterbasisMatrix,
                     n_points: int = 50, seed: int = 0) -> float:
    """Pointwise residual of the expansion over random chart points.

    max over points and rows of |Psi_hc(x,y) - sum_m W Psi_eq(a,b)|, scaled
    by the largest |Psi_hc| encountered; coordinates are bridged by
    x = e^b tanh a, y = e^b / cosh a.
    """
    rng = np.random.default_rng(seed)
    a_pts = rng.uniform(0.15, 1.8, size=n_points)
    b_pts = rng.uniform(-1.2, 0.9, size=n_points)
    x_pts = np.exp(b_pts) * np.tanh(a_pts)
    y_pts = np.exp(b_pts) / np.cosh(a_pts)
    eq_states = [P1State(p, "equidistant", nm) for nm in w.cols]
    eq_vals = np.array([p1m.p1_wf_equidistant(st, a_pts, b_pts)
                        for st in eq_states])  # (N+1, n_points)
    worst = 0.0
    scale = 0.0
    for i, (n1, n2) in enumerate(w.rows):
        hc = p1m.p1_wf_horicyclic(P1State(p, "horicyclic", (n1, n2)),
                                  x_pts, y_pts)
        recon = w.entries[i, :] @ eq_vals
        worst = max(worst, float(np.max(np.abs(hc - recon))))
        scale = max(scale, float(np.max(np.abs(hc))))
    return worst / max(scale, 1e-300)
