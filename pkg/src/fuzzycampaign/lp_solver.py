"""Scaling-coefficient LP for a handful of client groups.

    maximize    sum_i S_i x_i
    subject to  sum_i s[i, t, j] x_i <= C_j   for every (t, j)
                0 <= x_i <= x_max

:func:`solve` is a dense simplex on the condensed tableau (only the few
structural columns are stored, so a pivot costs O(rows * groups)). Among
optimal points it returns the lexicographic maximum of (x_0, x_1, ...), i.e.
x[stressing] first. :func:`oracle_solve` enumerates polytope vertices
directly and exists to check :func:`solve`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import TooLarge

GROUPS = ("stressing", "medium", "friendly")
X_MAX = 10.0
FEAS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LpProblem:
    """Footprint has shape ``(G, ..., J)``; capacities are indexed by the last axis."""

    group_sizes: np.ndarray
    footprint: np.ndarray
    capacities: np.ndarray
    x_max: float = X_MAX
    groups: tuple[str, ...] = GROUPS

    def __post_init__(self):
        sizes = np.asarray(self.group_sizes, dtype=float)
        fp = np.asarray(self.footprint, dtype=float)
        caps = np.asarray(self.capacities, dtype=float)
        if fp.ndim == 2:
            fp = fp[:, None, :]
        if fp.shape[0] != sizes.size or fp.shape[-1] != caps.size:
            raise ValueError("footprint shape does not match group sizes / capacities")
        if (sizes < 0).any() or (fp < 0).any() or (caps < 0).any():
            raise ValueError("LP inputs must be non-negative")
        if not self.x_max > 0:
            raise ValueError("x_max must be positive")
        groups = tuple(self.groups)
        if len(groups) != sizes.size:
            groups = tuple(f"g{k}" for k in range(sizes.size))
        object.__setattr__(self, "group_sizes", sizes)
        object.__setattr__(self, "footprint", fp)
        object.__setattr__(self, "capacities", caps)
        object.__setattr__(self, "groups", groups)

    @property
    def n_groups(self) -> int:
        return self.group_sizes.size

    def constraint_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """Non-vacuous, de-duplicated ``(A, b)`` with ``A x <= b``."""
        G, J = self.n_groups, self.capacities.size
        A = np.moveaxis(self.footprint.reshape(G, -1, J), 0, -1).reshape(-1, G)
        b = np.broadcast_to(self.capacities, (A.shape[0] // J, J)).reshape(-1)
        active = A.any(axis=1)
        A, b = A[active], b[active]
        if A.shape[0] == 0:
            return A, b
        rows = np.unique(np.column_stack([A, b]), axis=0)
        return rows[:, :G], rows[:, G]


@dataclass(frozen=True, eq=False)
class ScalingSolution:
    x: np.ndarray
    objective: float
    groups: tuple[str, ...] = GROUPS
    pivots: int = field(default=0, compare=False)

    def __getitem__(self, name: str) -> float:
        return float(self.x[self.groups.index(name)])

    def as_dict(self) -> dict[str, float]:
        return {g: float(v) for g, v in zip(self.groups, self.x)}


def _pivot(T, rhs, basic, nonbasic, r, k):
    p = T[r, k]
    row = T[r] / p
    row[k] = 1.0 / p
    col = T[:, k].copy()
    rhs_r = rhs[r] / p
    T -= np.outer(col, T[r] / p)
    T[:, k] = -col / p
    T[r] = row
    rhs -= col * rhs_r
    rhs[r] = rhs_r
    basic[r], nonbasic[k] = nonbasic[k], basic[r]


def _lex_simplex(A, b, objectives, eps=1e-11, max_pivots=None):
    """Maximize ``objectives[0]``, then each later one over the optimal face.

    Rows read ``x_B[i] = rhs[i] - sum_k T[i, k] * x_N[k]``. The origin is
    feasible because ``b >= 0``, so no phase one is needed. Bland's rule on
    variable labels (structural ``0..n-1``, slacks ``n..n+m-1``) rules out
    cycling on the heavily degenerate count data.
    """
    m, n = A.shape
    T = A.astype(float).copy()
    rhs = b.astype(float).copy()
    basic = np.arange(n, n + m)
    nonbasic = np.arange(n)
    allowed = np.ones(n, dtype=bool)
    max_pivots = max_pivots or 50 * (m + n) + 100
    pivots = 0

    def cost(c, labels):
        out = np.zeros(labels.size)
        struct = labels < n
        out[struct] = c[labels[struct]]
        return out

    for c in objectives:
        c = np.asarray(c, dtype=float)
        tol = eps * max(1.0, float(np.abs(c).max(initial=0.0)))
        while True:
            d = cost(c, nonbasic) - cost(c, basic) @ T
            cand = np.flatnonzero(allowed & (d > tol))
            if cand.size == 0:
                break
            k = cand[np.argmin(nonbasic[cand])]
            col = T[:, k]
            pos = np.flatnonzero(col > 1e-12)
            if pos.size == 0:
                raise RuntimeError("unbounded LP; every variable should carry a bound row")
            ratios = np.maximum(rhs[pos], 0.0) / col[pos]
            rmin = ratios.min()
            ties = pos[ratios <= rmin + 1e-12 * (1.0 + rmin)]
            r = ties[np.argmin(basic[ties])]
            _pivot(T, rhs, basic, nonbasic, r, k)
            pivots += 1
            if pivots > max_pivots:
                raise RuntimeError("simplex pivot limit exceeded")
        # later objectives may not leave this objective's optimal face
        allowed &= ~(d < -tol)

    x = np.zeros(n)
    struct = basic < n
    x[basic[struct]] = rhs[struct]
    return x, pivots


def solve(p: LpProblem) -> ScalingSolution:
    """Optimal scaling vector, lexicographically maximal in group order."""
    G = p.n_groups
    A, b = p.constraint_rows()
    A = np.vstack([A, np.eye(G)])
    b = np.concatenate([b, np.full(G, float(p.x_max))])
    objectives = [p.group_sizes] + [np.eye(G)[i] for i in range(G)]
    x, pivots = _lex_simplex(A, b, objectives)
    x = np.clip(x, 0.0, p.x_max)
    return ScalingSolution(x, float(p.group_sizes @ x), p.groups, pivots)


def is_feasible(p: LpProblem, x, tol: float = FEAS_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    if (x < -tol).any() or (x > p.x_max + tol).any():
        return False
    load = np.tensordot(x, p.footprint, axes=(0, 0))
    return bool((load <= p.capacities + tol).all())


# -- verification oracle ------------------------------------------------

ORACLE_CAP = 300


def _oracle_rows(p: LpProblem):
    """Raw rows, tightened bounds for zero-capacity rows, implied rows removed."""
    G, J = p.n_groups, p.capacities.size
    ub = np.full(G, float(p.x_max))
    rows = []
    for t_row in p.footprint.reshape(G, -1, J).transpose(1, 2, 0):
        for j in range(J):
            a = t_row[j]
            if not a.any():
                continue
            if p.capacities[j] == 0:
                ub[a > 0] = 0.0
            else:
                rows.append(a / p.capacities[j])
    if not rows:
        return np.zeros((0, G)), ub
    R = np.unique(np.array(rows), axis=0)
    # a row is implied by any other row that dominates it componentwise (x >= 0)
    keep = np.ones(len(R), dtype=bool)
    for r in range(len(R)):
        dom = (R >= R[r]).all(axis=1)
        dom[r] = False
        if dom.any():
            keep[r] = False
    return R[keep], ub


def oracle_solve(p: LpProblem, cap: int = ORACLE_CAP, tol: float = FEAS_TOL) -> ScalingSolution:
    """Best vertex by brute-force enumeration of every G-subset of hyperplanes."""
    G = p.n_groups
    R, ub = _oracle_rows(p)
    if len(R) > cap:
        raise TooLarge(f"{len(R)} irredundant constraints exceed oracle cap {cap}")
    normals = np.vstack([R, np.eye(G), np.eye(G)])
    offsets = np.concatenate([np.ones(len(R)), np.zeros(G), ub])

    vertices = []
    combos = np.array(list(combinations(range(len(normals)), G)), dtype=np.int64)
    for chunk in np.array_split(combos, max(1, len(combos) // 200_000 + 1)):
        M = normals[chunk]
        rhs = offsets[chunk]
        ok = np.abs(np.linalg.det(M)) > 1e-12
        if not ok.any():
            continue
        X = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
        feas = (X >= -tol).all(axis=1) & (X <= ub + tol).all(axis=1)
        if len(R):
            feas &= (X @ R.T <= 1.0 + tol).all(axis=1)
        vertices.append(X[feas])
    V = np.vstack(vertices) if vertices else np.zeros((0, G))
    if len(V) == 0:
        V = np.zeros((1, G))
    V = np.clip(V, 0.0, ub)

    obj = V @ p.group_sizes
    best = obj.max()
    V = V[obj >= best - 1e-10 * max(1.0, abs(best))]
    for i in range(G):
        top = V[:, i].max()
        V = V[V[:, i] >= top - 1e-10 * max(1.0, abs(top))]
    x = V[0]
    return ScalingSolution(x, float(p.group_sizes @ x), p.groups)


def make_problem(
    group_sizes: Sequence[float],
    footprint,
    capacities,
    x_max: float = X_MAX,
    groups: Sequence[str] = GROUPS,
) -> LpProblem:
    return LpProblem(np.asarray(group_sizes), np.asarray(footprint), np.asarray(capacities), x_max, tuple(groups))
