"""Weights, Gram matrices and minimal compatible metrics for brackets written
in a basis adapted to the canonical symplectic form.

Diagonal matrices in the symplectic algebra are handled as length-n vectors
``d`` with ``d[p] = -d[n-1-p]``; the trace inner product on them is the dot
product.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .curvature import moment_map_gl
from .lie_core import LieBracket, act_basis_change, mu_norm
from .symplectic import (
    TwoForm,
    a_omega_coords,
    a_omega_diag,
    canonical_form,
    is_canonical,
    j_operator,
    proj_sp,
)

DEDUP_TOL = 1e-10


@dataclass(frozen=True)
class WeightSystem:
    """Ordered, deduplicated projected weights with their Gram matrix.

    ``weights`` has shape (m, n); row p is the diagonal of the p-th weight.
    ``support[p]`` lists the (i, j, k) constants producing weight p.
    """

    weights: np.ndarray
    support: tuple[tuple[tuple[int, int, int], ...], ...]
    gram: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.weights.shape[0]

    def matrices(self) -> list[np.ndarray]:
        return [np.diag(w) for w in self.weights]


def _require_canonical(omega: TwoForm | None, dim: int) -> TwoForm:
    if omega is None:
        if dim % 2:
            raise ValueError("odd dimension has no symplectic form")
        return canonical_form(dim // 2)
    if not is_canonical(omega):
        raise ValueError("the weight machinery requires the canonical form; normalize first")
    if omega.dim != dim:
        raise ValueError("form and bracket dimensions differ")
    return omega


def projected_weight(i: int, j: int, k: int, dim: int) -> np.ndarray:
    """Diagonal of the symplectic projection of E_kk - E_ii - E_jj (1-based)."""
    d = np.zeros(dim)
    d[k - 1] += 1.0
    d[i - 1] -= 1.0
    d[j - 1] -= 1.0
    return 0.5 * (d - d[::-1])


def weight_set(mu: LieBracket, omega: TwoForm | None = None) -> WeightSystem:
    _require_canonical(omega, mu.dim)
    found: list[tuple[np.ndarray, list]] = []
    for i, j, k, _ in mu.entries:
        w = projected_weight(i, j, k, mu.dim)
        for vec, sup in found:
            if np.max(np.abs(vec - w)) <= DEDUP_TOL:
                sup.append((i, j, k))
                break
        else:
            found.append((w, [(i, j, k)]))
    found.sort(key=lambda item: tuple(item[0]))
    if found:
        weights = np.array([vec for vec, _ in found])
    else:
        weights = np.zeros((0, mu.dim))
    support = tuple(tuple(sup) for _, sup in found)
    return WeightSystem(weights, support, weights @ weights.T)


def gram_matrix(ws: WeightSystem) -> np.ndarray:
    return ws.gram


def nice_basis_check(
    mu: LieBracket,
    omega: TwoForm | None = None,
    trials: int = 5,
    tol: float = 1e-9,
    seed: int = 42,
) -> tuple[bool, float]:
    """Sample diagonal symplectic scalings and test that mm_sp stays diagonal.

    The defect of one sample is the Frobenius norm of the off-diagonal part of
    proj_sp(mm(a.mu)) divided by |a.mu|^2.  Returns (all defects <= tol, max).
    """
    omega = _require_canonical(omega, mu.dim)
    if not mu.entries:
        return True, 0.0
    j = j_operator(omega)
    rng = np.random.default_rng(seed)
    h = mu.dim // 2
    worst = 0.0
    for _ in range(max(int(trials), 1)):
        x = rng.uniform(-1.0, 1.0, size=h)
        d = np.concatenate([-x, x[::-1]])
        nu = act_basis_change(np.diag(np.exp(d)), mu, tol=0.0)
        m = proj_sp(moment_map_gl(nu), j)
        off = m - np.diag(np.diag(m))
        worst = max(worst, float(np.linalg.norm(off)) / mu_norm(nu) ** 2)
    return worst <= tol, worst


def positive_solution(u: np.ndarray, tol: float = 1e-9) -> tuple[np.ndarray, float] | None:
    """Find x > 0 with U x = lam * 1, or None.

    Maximizes min_i x_i over {U x = lam 1, sum x = 1} with a linear program.
    When the optimal lam is positive the witness is rescaled so that lam = 1.
    """
    u = np.asarray(u, dtype=float)
    m = u.shape[0]
    if m == 0:
        return None
    # variables: x (m), lam, t ; maximize t
    cost = np.zeros(m + 2)
    cost[-1] = -1.0
    a_eq = np.zeros((m + 1, m + 2))
    a_eq[:m, :m] = u
    a_eq[:m, m] = -1.0
    a_eq[m, :m] = 1.0
    b_eq = np.zeros(m + 1)
    b_eq[m] = 1.0
    a_ub = np.zeros((m, m + 2))
    a_ub[:, :m] = -np.eye(m)
    a_ub[:, -1] = 1.0
    b_ub = np.zeros(m)
    bounds = [(None, None)] * m + [(None, None), (None, 1.0)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0 or -res.fun <= tol:
        return None
    z = res.x[: m + 1]
    # pull back onto the affine set exactly
    a_aff = a_eq[:, : m + 1]
    z = z - np.linalg.lstsq(a_aff, a_aff @ z - b_eq, rcond=None)[0]
    x, lam = z[:m], float(z[m])
    if np.min(x) <= tol:
        return None
    if lam > tol:
        x, lam = x / lam, 1.0
    return x, lam


def beta_point(ws: WeightSystem, x: np.ndarray) -> tuple[np.ndarray, float]:
    """beta = sum x_p R_p / sum x_p as a diagonal vector, and |beta|^2."""
    x = np.asarray(x, dtype=float)
    if x.shape != (len(ws),):
        raise ValueError("solution length does not match the number of weights")
    beta = (x @ ws.weights) / np.sum(x)
    return beta, float(beta @ beta)


@dataclass(frozen=True)
class MinimalMetricResult:
    """Outcome of the minimal-metric search.

    ``status`` is "minimal", "no_positive_solution", "not_nice" or
    "not_converged".  ``beta`` and ``a_diag`` are diagonals (vectors);
    ``y`` holds the coordinates of log(a) in ``a_omega_basis``.
    """

    exists: bool
    status: str
    weights: WeightSystem | None
    x: np.ndarray | None
    beta: np.ndarray | None
    beta_norm_sq: float | None
    y: np.ndarray | None
    a_diag: np.ndarray | None
    mu_critical: LieBracket | None
    residual: float
    iterations: int = 0
    nice_defect: float = 0.0


def _scaled(mu: LieBracket, y: np.ndarray) -> LieBracket:
    d = a_omega_diag(y)
    return act_basis_change(np.diag(np.exp(d)), mu, tol=0.0)


def _mm_sp(mu: LieBracket, j) -> np.ndarray:
    return proj_sp(moment_map_gl(mu), j)


def minimal_metric_solve(
    mu: LieBracket,
    omega: TwoForm | None = None,
    tol: float = 1e-9,
    max_iter: int = 200,
    trials: int = 5,
    seed: int = 42,
) -> MinimalMetricResult:
    """Solve mm_sp(exp(Y).mu) = beta for Y diagonal in the symplectic algebra.

    Damped Newton in the a_omega coordinates with a central-difference
    Jacobian and minimum-norm steps; gradient descent on |F|^2 is the fallback
    when backtracking fails.
    """
    omega = _require_canonical(omega, mu.dim)
    n = mu.dim
    h = n // 2
    if not mu.entries:
        ws = weight_set(mu, omega)
        zero = np.zeros(n)
        return MinimalMetricResult(True, "minimal", ws, np.zeros(0), zero, 0.0,
                                   np.zeros(h), np.ones(n), mu, 0.0)
    nice, defect = nice_basis_check(mu, omega, trials=trials, seed=seed)
    if not nice:
        return MinimalMetricResult(False, "not_nice", None, None, None, None, None, None,
                                   None, float("nan"), nice_defect=defect)
    ws = weight_set(mu, omega)
    sol = positive_solution(ws.gram)
    if sol is None:
        return MinimalMetricResult(False, "no_positive_solution", ws, None, None, None, None,
                                   None, None, float("nan"), nice_defect=defect)
    x, _ = sol
    beta, beta_sq = beta_point(ws, x)
    j = j_operator(omega)
    beta_m = np.diag(beta)

    def f(y: np.ndarray) -> np.ndarray:
        return a_omega_coords(_mm_sp(_scaled(mu, y), j)) - a_omega_coords(beta)

    def full_residual(y: np.ndarray) -> float:
        return float(np.linalg.norm(_mm_sp(_scaled(mu, y), j) - beta_m))

    def jac(y: np.ndarray) -> np.ndarray:
        step = 1e-6
        cols = []
        for p in range(h):
            e = np.zeros(h)
            e[p] = step
            cols.append((f(y + e) - f(y - e)) / (2 * step))
        return np.array(cols).T

    y = np.zeros(h)
    fy = f(y)
    phi = 0.5 * float(fy @ fy)
    it = 0
    for it in range(1, max_iter + 1):
        if np.sqrt(2 * phi) <= 1e-14:
            break
        jm = jac(y)
        step = -np.linalg.lstsq(jm, fy, rcond=None)[0]
        alpha, accepted = 1.0, False
        while alpha >= 1e-10:
            y_new = y + alpha * step
            f_new = f(y_new)
            phi_new = 0.5 * float(f_new @ f_new)
            if phi_new <= (1.0 - 1e-4 * alpha) * phi:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            grad = jm.T @ fy
            alpha = 1.0
            while alpha >= 1e-14:
                y_new = y - alpha * grad
                f_new = f(y_new)
                phi_new = 0.5 * float(f_new @ f_new)
                if phi_new < phi:
                    accepted = True
                    break
                alpha *= 0.5
        if not accepted:
            break
        y, fy, phi = y_new, f_new, phi_new
    crit = _scaled(mu, y)
    cut = 1e-14 * max(1.0, max(abs(c) for *_, c in crit.entries))
    crit = LieBracket(n, tuple(e for e in crit.entries if abs(e[3]) > cut))
    residual = full_residual(y)
    ok = residual <= tol
    return MinimalMetricResult(
        ok, "minimal" if ok else "not_converged", ws, x, beta, beta_sq, y,
        np.exp(a_omega_diag(y)), crit, residual, it, defect,
    )
