"""Structure-constant Lie brackets on R^n and the basic operations on them.

A bracket is stored sparsely as ``(i, j, k, c)`` tuples meaning
``[e_i, e_j] = ... + c e_k`` with 1-based indices and ``i < j``.  Linear maps
are plain ``numpy`` arrays in column convention (``m @ e_j`` is column ``j``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

RANK_RTOL = 1e-10
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class LieBracket:
    """Antisymmetric bilinear product on R^dim given by structure constants."""

    dim: int
    entries: tuple[tuple[int, int, int, float], ...] = ()
    _tensor: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        seen = set()
        clean = []
        for entry in self.entries:
            if len(entry) != 4:
                raise ValueError(f"bracket entry must be (i, j, k, c), got {entry!r}")
            i, j, k, c = entry
            i, j, k, c = int(i), int(j), int(k), float(c)
            if not (1 <= i < j <= self.dim and 1 <= k <= self.dim):
                raise ValueError(f"bad indices in entry {entry!r} for dim {self.dim}")
            if not np.isfinite(c):
                raise ValueError(f"non-finite coefficient in {entry!r}")
            if c == 0.0:
                raise ValueError(f"zero coefficient in {entry!r}")
            if (i, j, k) in seen:
                raise ValueError(f"duplicate structure constant for (i, j, k) = {(i, j, k)}")
            seen.add((i, j, k))
            clean.append((i, j, k, c))
        object.__setattr__(self, "entries", tuple(sorted(clean)))
        t = np.zeros((self.dim,) * 3)
        for i, j, k, c in self.entries:
            t[i - 1, j - 1, k - 1] = c
            t[j - 1, i - 1, k - 1] = -c
        t.flags.writeable = False
        object.__setattr__(self, "_tensor", t)

    @property
    def tensor(self) -> np.ndarray:
        """Read-only array ``C`` with ``[e_i, e_j] = sum_k C[i, j, k] e_k`` (0-based)."""
        return self._tensor

    @classmethod
    def from_tensor(cls, tensor: np.ndarray, tol: float = 0.0) -> "LieBracket":
        """Build from a full structure tensor, dropping |c| <= tol.

        Only the ``i < j`` half is read; the tensor is assumed antisymmetric.
        """
        tensor = np.asarray(tensor, dtype=float)
        n = tensor.shape[0]
        entries = [
            (i + 1, j + 1, k + 1, float(tensor[i, j, k]))
            for i in range(n)
            for j in range(i + 1, n)
            for k in range(n)
            if abs(tensor[i, j, k]) > tol
        ]
        return cls(n, tuple(entries))

    @classmethod
    def abelian(cls, dim: int) -> "LieBracket":
        return cls(dim, ())

    def scaled(self, factor: float) -> "LieBracket":
        if factor == 0:
            return LieBracket.abelian(self.dim)
        return LieBracket(self.dim, tuple((i, j, k, factor * c) for i, j, k, c in self.entries))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LieBracket):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.dim, self.entries))


def _check_vec(mu: LieBracket, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (mu.dim,):
        raise ValueError(f"expected a vector of length {mu.dim}, got shape {x.shape}")
    return x


def bracket_eval(mu: LieBracket, x: Sequence[float], y: Sequence[float]) -> np.ndarray:
    """Return mu(x, y)."""
    x = _check_vec(mu, x)
    y = _check_vec(mu, y)
    return np.einsum("i,j,ijk->k", x, y, mu.tensor)


def ad_matrix(mu: LieBracket, x: Sequence[float]) -> np.ndarray:
    """Matrix of ad_x; column j is mu(x, e_j)."""
    x = _check_vec(mu, x)
    return np.einsum("a,abk->kb", x, mu.tensor)


def ad_matrices(mu: LieBracket) -> np.ndarray:
    """Stack of ad_{e_i} for all basis vectors, shape (n, n, n)."""
    return np.transpose(mu.tensor, (0, 2, 1)).copy()


def jacobi_defect(mu: LieBracket) -> float:
    """Largest norm of the Jacobi cyclic sum over basis triples i < j < k."""
    c = mu.tensor
    # J[i,j,k,:] = [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]
    jac = (
        np.einsum("ijm,mkl->ijkl", c, c)
        + np.einsum("jkm,mil->ijkl", c, c)
        + np.einsum("kim,mjl->ijkl", c, c)
    )
    worst = 0.0
    for i, j, k in combinations(range(mu.dim), 3):
        worst = max(worst, float(np.linalg.norm(jac[i, j, k])))
    return worst


def _rank(m: np.ndarray, scale: float) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > RANK_RTOL * max(s[0], scale)))


def _span(vectors: np.ndarray, scale: float) -> np.ndarray:
    """Orthonormal basis (columns) for the column span of ``vectors``."""
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0))
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    r = int(np.sum(s > RANK_RTOL * max(s[0] if s.size else 0.0, scale)))
    return u[:, :r]


def lower_central_series(mu: LieBracket) -> list[int]:
    """Dimensions of C^1 = g, C^2 = [g, g], ... until the series stabilizes."""
    n = mu.dim
    scale = mu_norm(mu)
    current = np.eye(n)
    dims = [n]
    while True:
        if current.shape[1] == 0:
            return dims
        # columns mu(e_i, v) for every basis e_i and every v spanning C^k
        cols = np.einsum("ijk,jv->kiv", mu.tensor, current).reshape(n, -1)
        nxt = _span(cols, scale)
        if nxt.shape[1] == current.shape[1]:
            return dims
        dims.append(nxt.shape[1])
        current = nxt


def nilpotency_step(mu: LieBracket) -> int | None:
    """Smallest k with C^{k+1} = 0, or None when the algebra is not nilpotent.

    The abelian algebra is 1-step.
    """
    dims = lower_central_series(mu)
    if dims[-1] != 0:
        return None
    return max(len(dims) - 1, 1)


def is_unimodular(mu: LieBracket, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Return (all ad_{e_i} traceless, max |tr ad_{e_i}|)."""
    traces = np.einsum("ikk->i", mu.tensor)
    defect = float(np.max(np.abs(traces))) if mu.dim else 0.0
    return defect <= tol, defect


def act_basis_change(g: np.ndarray, mu: LieBracket, tol: float = 1e-12) -> LieBracket:
    """Return g.mu, (g.mu)(x, y) = g mu(g^-1 x, g^-1 y).

    Structure constants with magnitude <= tol * max(1, |g.mu|_max) are dropped.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (mu.dim, mu.dim):
        raise ValueError(f"basis change must be {mu.dim}x{mu.dim}, got {g.shape}")
    if abs(np.linalg.det(g)) <= 1e-12 * max(1.0, np.linalg.norm(g)) ** mu.dim:
        raise ValueError("basis change is singular")
    gi = np.linalg.inv(g)
    t = np.einsum("kc,abc,ai,bj->ijk", g, mu.tensor, gi, gi)
    cut = tol * max(1.0, float(np.max(np.abs(t))) if t.size else 0.0)
    return LieBracket.from_tensor(t, tol=cut)


def mu_norm(mu: LieBracket) -> float:
    """Norm induced by <mu, lam> = sum_{i,j,k} <mu(e_i,e_j),e_k><lam(e_i,e_j),e_k>."""
    return float(np.sqrt(2.0 * sum(c * c for *_, c in mu.entries)))


def leibniz_system(mu: LieBracket) -> np.ndarray:
    """Matrix L with L @ D.ravel() = 0 iff D is a derivation of mu.

    Rows are indexed by (i < j, k): the k-th coordinate of
    D mu(e_i, e_j) - mu(D e_i, e_j) - mu(e_i, D e_j).
    """
    n = mu.dim
    c = mu.tensor
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rows = np.zeros((len(pairs) * n, n * n))
    r = 0
    for i, j in pairs:
        for k in range(n):
            row = np.zeros((n, n))
            row[k, :] += c[i, j, :]
            row[:, i] -= c[:, j, k]
            row[:, j] -= c[i, :, k]
            rows[r] = row.ravel()
            r += 1
    return rows


def nullspace(m: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the nullspace of m via SVD."""
    ncols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(ncols)
    rank = int(np.sum(s > rtol * s[0]))
    return vt[rank:].T.copy()


def derivation_basis(mu: LieBracket) -> list[np.ndarray]:
    """Orthonormal (trace inner product) basis of Der(mu)."""
    n = mu.dim
    ns = nullspace(leibniz_system(mu))
    return [ns[:, p].reshape(n, n) for p in range(ns.shape[1])]


def derivation_defect(d: np.ndarray, mu: LieBracket) -> float:
    """max over basis pairs of |D mu(e_i,e_j) - mu(D e_i,e_j) - mu(e_i,D e_j)|."""
    d = np.asarray(d, dtype=float)
    c = mu.tensor
    lhs = np.einsum("kc,ijc->ijk", d, c)
    rhs = np.einsum("ai,ajk->ijk", d, c) + np.einsum("bj,ibk->ijk", d, c)
    diff = lhs - rhs
    if mu.dim < 2:
        return 0.0
    return float(np.max(np.linalg.norm(diff, axis=2)))


def bracket_close(a: LieBracket, b: LieBracket, tol: float) -> bool:
    """Entrywise comparison of structure tensors."""
    return a.dim == b.dim and float(np.max(np.abs(a.tensor - b.tensor), initial=0.0)) <= tol

