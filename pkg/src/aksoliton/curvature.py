"""Moment map, Ricci operators and Chern-Ricci data of left-invariant
almost Kähler structures.

Every function accepts an optional ``metric`` (None, a positive diagonal or an
SPD matrix).  A non-canonical metric is handled by moving to an orthonormal
frame with the Cholesky factor ``G = L L^T``: ``g = L^T`` is an isometry onto
the canonical inner product, all formulas are evaluated for ``g.mu`` and
``g.omega`` and the results are pulled back to the original basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie_core import LieBracket, act_basis_change, ad_matrices, ad_matrix
from .symplectic import (
    TwoForm,
    _metric_matrix,
    anti_complexified_part,
    form_action,
    j_operator,
)


@dataclass(frozen=True)
class _Frame:
    mu: LieBracket
    omega: TwoForm | None
    g: np.ndarray
    g_inv: np.ndarray
    canonical: bool

    def pull_op(self, t: np.ndarray) -> np.ndarray:
        if self.canonical:
            return t
        return self.g_inv @ t @ self.g

    def pull_vec(self, v: np.ndarray) -> np.ndarray:
        if self.canonical:
            return v
        return self.g_inv @ v

    def pull_form(self, w: np.ndarray) -> np.ndarray:
        if self.canonical:
            return w
        return self.g.T @ w @ self.g


def _frame(mu: LieBracket, omega: TwoForm | None, metric) -> _Frame:
    n = mu.dim
    if omega is not None and omega.dim != n:
        raise ValueError("form and bracket dimensions differ")
    gm = _metric_matrix(metric, n)
    if np.array_equal(gm, np.eye(n)):
        eye = np.eye(n)
        return _Frame(mu, omega, eye, eye, True)
    g = np.linalg.cholesky(gm).T
    g_inv = np.linalg.inv(g)
    mu2 = act_basis_change(g, mu, tol=0.0)
    om2 = form_action(g, omega) if omega is not None else None
    return _Frame(mu2, om2, g, g_inv, False)


def _mm_canonical(mu: LieBracket) -> np.ndarray:
    c = mu.tensor
    return np.einsum("ijp,ijq->pq", c, c) - 2.0 * np.einsum("pjk,qjk->pq", c, c)


def moment_map_gl(mu: LieBracket) -> np.ndarray:
    """mm(mu) with <<mm(mu), A>> = <A.mu, mu> for the canonical inner products.

    Sums run over all ordered index pairs, so tr(mm) = -|mu|^2.
    """
    return _mm_canonical(mu)


def _ricci_canonical(mu: LieBracket) -> np.ndarray:
    c = mu.tensor
    ads = ad_matrices(mu)
    kill = np.einsum("pab,qba->pq", ads, ads)
    h = np.einsum("ikk->i", c)
    ad_h = np.einsum("a,aij->ij", h, ads)
    return 0.25 * _mm_canonical(mu) - 0.5 * kill - 0.5 * (ad_h + ad_h.T)


def ricci(mu: LieBracket, metric=None) -> np.ndarray:
    """Ricci operator of the left-invariant metric.

    Uses Ric = mm/4 - Kill/2 - S(ad_H), valid for any Lie bracket; for
    nilpotent brackets the last two terms vanish.
    """
    fr = _frame(mu, None, metric)
    return fr.pull_op(_ricci_canonical(fr.mu))


def scalar_curvature(mu: LieBracket, metric=None) -> float:
    return float(np.trace(ricci(mu, metric)))


def _j(omega: TwoForm) -> np.ndarray:
    return j_operator(omega).j


def ric_ac(mu: LieBracket, omega: TwoForm, metric=None) -> np.ndarray:
    """Anti-complexified Ricci operator (Ric + J Ric J) / 2."""
    fr = _frame(mu, omega, metric)
    j = _j(fr.omega)
    return fr.pull_op(anti_complexified_part(_ricci_canonical(fr.mu), j))


def _h_hat_canonical(mu: LieBracket, j: np.ndarray) -> np.ndarray:
    ads = ad_matrices(mu)
    # sum_i ad_{e_i}^T e_i and sum_i J ad_{e_i}^T J e_i
    first = np.einsum("iik->k", ads)
    second = j @ np.einsum("iab,ai->b", ads, j)
    return 0.5 * first + 0.5 * second


def h_hat(mu: LieBracket, omega: TwoForm, metric=None) -> np.ndarray:
    """Vector H with chi(X, Y) = omega(H, [X, Y])."""
    fr = _frame(mu, omega, metric)
    return fr.pull_vec(_h_hat_canonical(fr.mu, _j(fr.omega)))


def mean_curvature_vector(mu: LieBracket, metric=None) -> np.ndarray:
    """H with <H, x> = tr ad_x."""
    fr = _frame(mu, None, metric)
    return fr.pull_vec(np.einsum("ikk->i", fr.mu.tensor))


def _chern_form_canonical(mu: LieBracket, j: np.ndarray) -> np.ndarray:
    c = mu.tensor
    ads = ad_matrices(mu)
    tr_ad = np.einsum("ikk->i", c)
    tr_jad = np.einsum("ab,iba->i", j, ads)
    # chi(e_a, e_b) = (tr ad_{J[a,b]} - tr(J ad_{[a,b]})) / 2
    lin = 0.5 * ((j.T @ tr_ad) - tr_jad)
    return np.einsum("abk,k->ab", c, lin)


def chern_ricci_form(mu: LieBracket, omega: TwoForm, metric=None) -> TwoForm:
    fr = _frame(mu, omega, metric)
    w = _chern_form_canonical(fr.mu, _j(fr.omega))
    return TwoForm.from_matrix(fr.pull_form(w))


def chern_ricci_form_matrix(mu: LieBracket, omega: TwoForm, metric=None) -> np.ndarray:
    fr = _frame(mu, omega, metric)
    return fr.pull_form(_chern_form_canonical(fr.mu, _j(fr.omega)))


def omega_transpose(a: np.ndarray, j: np.ndarray) -> np.ndarray:
    """A^{T omega} = -J A^T J."""
    return -j @ a.T @ j


def p_operator(mu: LieBracket, omega: TwoForm, h, metric=None) -> np.ndarray:
    """P_H = ad_H + ad_H^{T omega}, so omega(P_H X, Y) = omega(H, [X, Y])."""
    fr = _frame(mu, omega, metric)
    j = _j(fr.omega)
    h2 = fr.g @ np.asarray(h, dtype=float)
    a = ad_matrix(fr.mu, h2)
    return fr.pull_op(a + omega_transpose(a, j))


def _chern_op_canonical(mu: LieBracket, j: np.ndarray) -> np.ndarray:
    a = ad_matrix(mu, _h_hat_canonical(mu, j))
    return a + omega_transpose(a, j)


def chern_ricci_operator(mu: LieBracket, omega: TwoForm, metric=None) -> np.ndarray:
    fr = _frame(mu, omega, metric)
    return fr.pull_op(_chern_op_canonical(fr.mu, _j(fr.omega)))


def nilpotency_defect(p: np.ndarray) -> float:
    """max_k |tr(p^k)| for k = 1..dim; zero exactly when p is nilpotent."""
    p = np.asarray(p, dtype=float)
    acc = np.eye(p.shape[0])
    worst = 0.0
    for _ in range(p.shape[0]):
        acc = acc @ p
        worst = max(worst, abs(float(np.trace(acc))))
    return worst


@dataclass(frozen=True)
class CurvatureReport:
    mm_gl: np.ndarray
    ric: np.ndarray
    scal: float
    ric_ac: np.ndarray
    chern_op: np.ndarray
    chern_form: TwoForm
    h_hat: np.ndarray
    h_mean: np.ndarray
    nilpotency_defect: float


def curvature_report(mu: LieBracket, omega: TwoForm, metric=None) -> CurvatureReport:
    """All curvature quantities for one (mu, omega, metric) triple.

    ``mm_gl`` is the moment map in the orthonormal frame; the other operators
    are expressed in the original basis.
    """
    fr = _frame(mu, omega, metric)
    j = _j(fr.omega)
    ric = _ricci_canonical(fr.mu)
    chern = _chern_op_canonical(fr.mu, j)
    return CurvatureReport(
        mm_gl=_mm_canonical(fr.mu),
        ric=fr.pull_op(ric),
        scal=float(np.trace(ric)),
        ric_ac=fr.pull_op(anti_complexified_part(ric, j)),
        chern_op=fr.pull_op(chern),
        chern_form=TwoForm.from_matrix(fr.pull_form(_chern_form_canonical(fr.mu, j))),
        h_hat=fr.pull_vec(_h_hat_canonical(fr.mu, j)),
        h_mean=fr.pull_vec(np.einsum("ikk->i", fr.mu.tensor)),
        nilpotency_defect=nilpotency_defect(chern),
    )
