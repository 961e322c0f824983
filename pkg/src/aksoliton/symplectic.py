"""Symplectic forms, compatible almost complex structures and the projections
used by the moment-map machinery.

Two-forms follow the same sparse convention as brackets: ``(i, j, c)`` with
``i < j`` means ``c e_i^* ^ e_j^*``.  The dense matrix ``W`` has
``W[i, j] = omega(e_i, e_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .lie_core import LieBracket, bracket_eval


@dataclass(frozen=True)
class TwoForm:
    dim: int
    entries: tuple[tuple[int, int, float], ...] = ()
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        seen = set()
        clean = []
        for entry in self.entries:
            if len(entry) != 3:
                raise ValueError(f"form entry must be (i, j, c), got {entry!r}")
            i, j, c = int(entry[0]), int(entry[1]), float(entry[2])
            if not 1 <= i < j <= self.dim:
                raise ValueError(f"bad indices in form entry {entry!r} for dim {self.dim}")
            if (i, j) in seen:
                raise ValueError(f"duplicate form coefficient for (i, j) = {(i, j)}")
            if not np.isfinite(c):
                raise ValueError(f"non-finite coefficient in {entry!r}")
            seen.add((i, j))
            if c != 0.0:
                clean.append((i, j, c))
        object.__setattr__(self, "entries", tuple(sorted(clean)))
        w = np.zeros((self.dim, self.dim))
        for i, j, c in self.entries:
            w[i - 1, j - 1] = c
            w[j - 1, i - 1] = -c
        w.flags.writeable = False
        object.__setattr__(self, "_matrix", w)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @classmethod
    def from_matrix(cls, w: np.ndarray, tol: float = 0.0) -> "TwoForm":
        w = np.asarray(w, dtype=float)
        n = w.shape[0]
        entries = [
            (i + 1, j + 1, float(w[i, j]))
            for i in range(n)
            for j in range(i + 1, n)
            if abs(w[i, j]) > tol
        ]
        return cls(n, tuple(entries))

    def __call__(self, x, y) -> float:
        return float(np.asarray(x) @ self._matrix @ np.asarray(y))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwoForm):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.dim, self.entries))

    def is_nondegenerate(self, tol: float = 1e-9) -> bool:
        if self.dim % 2:
            return False
        return abs(np.linalg.det(self._matrix)) > tol


@dataclass(frozen=True)
class AlmostComplexStructure:
    """J with omega(X, Y) = <JX, Y>; ``defect`` is |J^2 + I| (Frobenius)."""

    j: np.ndarray
    defect: float

    def is_compatible(self, tol: float = 1e-10) -> bool:
        return self.defect <= tol


def canonical_form(n: int) -> TwoForm:
    """omega_cn = sum_i e_i^* ^ e_{2n+1-i}^* on R^{2n}."""
    return TwoForm(2 * n, tuple((i, 2 * n + 1 - i, 1.0) for i in range(1, n + 1)))


def is_canonical(omega: TwoForm) -> bool:
    return omega.dim % 2 == 0 and omega == canonical_form(omega.dim // 2)


def closedness_defect(omega: TwoForm, mu: LieBracket) -> float:
    """max over i<j<k of |omega([e_i,e_j],e_k) + omega([e_j,e_k],e_i) + omega([e_k,e_i],e_j)|."""
    if omega.dim != mu.dim:
        raise ValueError("form and bracket dimensions differ")
    # B[i,j,l] = omega([e_i, e_j], e_l)
    b = np.einsum("ijm,ml->ijl", mu.tensor, omega.matrix)
    worst = 0.0
    for i, j, k in combinations(range(mu.dim), 3):
        worst = max(worst, abs(b[i, j, k] + b[j, k, i] + b[k, i, j]))
    return float(worst)


def _metric_matrix(metric, n: int) -> np.ndarray:
    if metric is None or (isinstance(metric, str) and metric == "canonical"):
        return np.eye(n)
    g = np.asarray(metric, dtype=float)
    if g.ndim == 1:
        g = np.diag(g)
    if g.shape != (n, n):
        raise ValueError(f"metric must be {n}x{n}")
    if not np.allclose(g, g.T, atol=1e-12):
        raise ValueError("metric must be symmetric")
    if np.min(np.linalg.eigvalsh(g)) <= 0:
        raise ValueError("metric must be positive definite")
    return g


def j_operator(omega: TwoForm, metric=None) -> AlmostComplexStructure:
    """J determined by omega(X, Y) = <JX, Y>_metric.

    ``metric`` is None/"canonical", a diagonal list or a full SPD matrix.
    """
    n = omega.dim
    if not omega.is_nondegenerate():
        raise ValueError("two-form is degenerate")
    g = _metric_matrix(metric, n)
    # omega = J^T G  =>  J = -G^{-1} W
    j = -np.linalg.solve(g, omega.matrix)
    defect = float(np.linalg.norm(j @ j + np.eye(n)))
    return AlmostComplexStructure(j, defect)


def _jmat(j) -> np.ndarray:
    return j.j if isinstance(j, AlmostComplexStructure) else np.asarray(j, dtype=float)


def complexified_part(t: np.ndarray, j) -> np.ndarray:
    """T^c = (T - J T J) / 2, the part commuting with J."""
    jm = _jmat(j)
    return 0.5 * (t - jm @ t @ jm)


def anti_complexified_part(t: np.ndarray, j) -> np.ndarray:
    """T^ac = (T + J T J) / 2, the part anticommuting with J."""
    jm = _jmat(j)
    return 0.5 * (t + jm @ t @ jm)


def proj_sp(s: np.ndarray, j, tol: float = 1e-10) -> np.ndarray:
    """Orthogonal projection of a symmetric map onto the symmetric part of sp.

    Assumes J orthogonal (canonical metric).  Non-symmetric input is rejected.
    """
    s = np.asarray(s, dtype=float)
    if np.max(np.abs(s - s.T), initial=0.0) > tol * max(1.0, np.max(np.abs(s), initial=0.0)):
        raise ValueError("proj_sp expects a symmetric matrix")
    return anti_complexified_part(s, j)


def a_omega_basis(dim: int) -> list[np.ndarray]:
    """Orthonormal basis of diagonal matrices in sp(omega_cn).

    The p-th element is (E_{n+1-p, n+1-p} - E_{p, p}) / sqrt(2) in 1-based terms.
    """
    if dim % 2:
        raise ValueError("dimension must be even")
    out = []
    for p in range(dim // 2):
        d = np.zeros(dim)
        d[p] = -1.0
        d[dim - 1 - p] = 1.0
        out.append(np.diag(d / np.sqrt(2.0)))
    return out


def a_omega_coords(diag: np.ndarray) -> np.ndarray:
    """Coordinates of a diagonal (vector or matrix) in ``a_omega_basis``."""
    d = np.asarray(diag, dtype=float)
    if d.ndim == 2:
        d = np.diag(d)
    n = d.shape[0]
    h = n // 2
    return (d[::-1][:h] - d[:h]) / np.sqrt(2.0)


def a_omega_diag(coords: np.ndarray) -> np.ndarray:
    """Diagonal (as a vector) of sum_p coords[p] * basis[p]."""
    coords = np.asarray(coords, dtype=float)
    h = coords.shape[0]
    d = np.zeros(2 * h)
    d[:h] = -coords / np.sqrt(2.0)
    d[h:] = coords[::-1] / np.sqrt(2.0)
    return d


def form_action(g: np.ndarray, omega: TwoForm) -> TwoForm:
    """(g.omega)(x, y) = omega(g^-1 x, g^-1 y)."""
    gi = np.linalg.inv(np.asarray(g, dtype=float))
    return TwoForm.from_matrix(gi.T @ omega.matrix @ gi, tol=1e-14)


def darboux_normalize(omega: TwoForm) -> np.ndarray:
    """Return g with g.omega = omega_cn, via symplectic Gram-Schmidt.

    The pivot is the pair of remaining vectors with largest |omega(v_a, v_b)|;
    ties go to the lexicographically first (a, b).
    """
    n = omega.dim
    if not omega.is_nondegenerate():
        raise ValueError("two-form is degenerate")
    w = omega.matrix
    remaining = [np.eye(n)[:, a].copy() for a in range(n)]
    pairs = []
    while remaining:
        vs = np.array(remaining).T
        m = vs.T @ w @ vs
        best, pa, pb = -1.0, 0, 1
        for a in range(len(remaining)):
            for b in range(a + 1, len(remaining)):
                if abs(m[a, b]) > best + 1e-14:
                    best, pa, pb = abs(m[a, b]), a, b
        u = remaining[pa]
        v = remaining[pb] / m[pa, pb]
        pairs.append((u, v))
        rest = []
        for c, x in enumerate(remaining):
            if c in (pa, pb):
                continue
            rest.append(x - (x @ w @ v) * u + (x @ w @ u) * v)
        remaining = rest
    h = n // 2
    basis = np.zeros((n, n))
    for p, (u, v) in enumerate(pairs):
        basis[:, p] = u
        basis[:, n - 1 - p] = v
    assert len(pairs) == h
    # basis^T W basis = W_cn; the acting element is the inverse of the frame
    return np.linalg.inv(basis)


def nijenhuis(mu: LieBracket, j, x, y) -> np.ndarray:
    """N_J(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]."""
    jm = _jmat(j)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    jx, jy = jm @ x, jm @ y
    return (
        bracket_eval(mu, jx, jy)
        - jm @ bracket_eval(mu, jx, y)
        - jm @ bracket_eval(mu, x, jy)
        - bracket_eval(mu, x, y)
    )
