"""Dense complex linear algebra with explicit accuracy contracts.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Every routine
here is a pure function; nothing is cached and inputs are never modified.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import InputError, RankDeficiency, SingularResolvent

__all__ = [
    "Certificate",
    "ToleranceConfig",
    "as_complex_matrix",
    "cluster_eigenvalues",
    "cluster_points",
    "eigenvalues",
    "eigen_conditioned",
    "numerical_rank",
    "operator_norm",
    "orthonormal_range_basis",
    "solve",
]

PROFILE_ENV = "TRIESZ_TOLERANCE_PROFILE"


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances and quadrature/sampling knobs.

    The four tolerances are relative quantities.  ``eig_cluster_tol``
    decides when eigenvalues are the same point, ``projection_tol`` bounds
    idempotency and commutation defects, ``residual_tol`` bounds linear
    residuals and is also the perturbation level used to group eigenvalues
    that cannot be told apart, ``rank_tol`` is the singular value cut-off.
    """

    eig_cluster_tol: float = 1e-8
    projection_tol: float = 1e-10
    residual_tol: float = 1e-10
    rank_tol: float = 1e-10
    quadrature_min_nodes: int = 32
    quadrature_max_nodes: int = 1024
    witness_samples: int = 8

    def __post_init__(self):
        for name in ("eig_cluster_tol", "projection_tol", "residual_tol", "rank_tol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InputError(f"must be a positive finite number, got {value!r}", path=name)
        if self.eig_cluster_tol >= 1:
            raise InputError("must be < 1", path="eig_cluster_tol")
        if self.quadrature_min_nodes < 4 or self.quadrature_max_nodes < self.quadrature_min_nodes:
            raise InputError("need 4 <= quadrature_min_nodes <= quadrature_max_nodes",
                             path="quadrature_max_nodes")
        if self.witness_samples < 0:
            raise InputError("must be >= 0", path="witness_samples")

    def replace(self, **overrides) -> "ToleranceConfig":
        names = {f.name for f in dataclasses.fields(self)}
        unknown = set(overrides) - names
        if unknown:
            raise InputError(f"unknown tolerance {sorted(unknown)[0]!r}", path="tolerances")
        return dataclasses.replace(self, **overrides)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def profile(cls, name: str | None = None) -> "ToleranceConfig":
        """Named preset; ``name=None`` reads ``$TRIESZ_TOLERANCE_PROFILE``."""
        if name is None:
            name = os.environ.get(PROFILE_ENV, "default")
        try:
            return cls(**PROFILES[name])
        except KeyError:
            raise InputError(f"unknown tolerance profile {name!r}", path=PROFILE_ENV) from None


PROFILES = {
    "default": {},
    "strict": dict(eig_cluster_tol=1e-10, projection_tol=1e-12, residual_tol=1e-12,
                   rank_tol=1e-12, quadrature_max_nodes=4096),
    "loose": dict(eig_cluster_tol=1e-6, projection_tol=1e-8, residual_tol=1e-8, rank_tol=1e-8),
}


@dataclass(frozen=True)
class Certificate:
    """A named residual together with the bound it must satisfy."""

    name: str
    residual: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.bound)

    def to_dict(self) -> dict:
        return {"name": self.name, "residual": float(self.residual),
                "bound": float(self.bound), "passed": self.passed}


def as_complex_matrix(M, name="matrix", square=False) -> np.ndarray:
    """Validate ``M`` and return it as a read-only complex128 2-d array."""
    try:
        arr = np.array(M, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise InputError(f"not a numeric matrix ({exc})", path=name) from None
    if arr.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got {arr.ndim} dimension(s)", path=name)
    if square and arr.shape[0] != arr.shape[1]:
        raise InputError(f"expected a square matrix, got {arr.shape[0]}x{arr.shape[1]}", path=name)
    if not np.all(np.isfinite(arr)):
        raise InputError("contains NaN or Inf", path=name)
    arr.flags.writeable = False
    return arr


def operator_norm(M) -> float:
    """Largest singular value (the C*-norm of a matrix block)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def eigenvalues(M) -> np.ndarray:
    """All ``n`` eigenvalues of ``M`` from a complex Schur triangularization."""
    M = as_complex_matrix(M, square=True)
    if M.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    T = sla.schur(M, output="complex")[0]
    return np.diag(T).copy()


def eigen_conditioned(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues with their condition numbers ``1/|y* x|``.

    ``x`` and ``y`` are unit right/left eigenvectors.  A nearly defective
    eigenvalue gets a huge condition number, which is what lets
    :func:`cluster_eigenvalues` regroup the spray of computed eigenvalues that a
    Jordan block produces under rounding.
    """
    M = as_complex_matrix(M, square=True)
    n = M.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex), np.zeros(0)
    if n == 1:
        return np.array([M[0, 0]]), np.ones(1)
    w, vl, vr = sla.eig(M, left=True, right=True)
    overlap = np.abs(np.sum(vl.conj() * vr, axis=0))
    with np.errstate(divide="ignore"):
        kappa = np.where(overlap > 0, 1.0 / overlap, np.inf)
    return w, kappa


def cluster_points(values, link_tol, weights=None):
    """Single-linkage clustering of complex points at distance ``link_tol``.

    Returns ``[(representative, weight, member_indices), ...]`` where the
    representative is the weight-averaged member.
    """
    z = np.asarray(values, dtype=complex).ravel()
    n = z.size
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if n > 1:
        close = np.abs(z[:, None] - z[None, :]) <= link_tol
        for i, j in zip(*np.nonzero(np.triu(close, 1))):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        idx = np.array(members)
        weight = w[idx].sum()
        out.append((complex(np.sum(z[idx] * w[idx]) / weight), weight, members))
    return out


def _segment_in_pseudospectrum(M, z0, z1, eta, samples=9) -> bool:
    eye = np.eye(M.shape[0])
    # midpoint first: it is the sample most likely to fail
    ts = sorted(np.linspace(0, 1, samples + 2)[1:-1], key=lambda t: abs(t - 0.5))
    for t in ts:
        z = z0 + t * (z1 - z0)
        smin = np.linalg.svd(M - z * eye, compute_uv=False)[-1]
        if smin > eta:
            return False
    return True


def cluster_eigenvalues(M, link_tol: float, eta: float):
    """Cluster the eigenvalues of one square block.

    Two computed eigenvalues are one spectral point when they are within
    ``link_tol``, or when their first-order perturbation discs
    ``kappa * eta`` overlap *and* the segment joining them stays inside the
    ``eta``-pseudospectrum of ``M``.  The second rule regroups the spray a
    (numerically) defective eigenvalue turns into, without merging
    genuinely distinct neighbours.

    Returns ``[(representative, multiplicity, spread_radius), ...]``.
    """
    M = as_complex_matrix(M, square=True)
    w, kappa = eigen_conditioned(M)
    n = w.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if n > 1:
        dist = np.abs(w[:, None] - w[None, :])
        reach = kappa * eta
        close = dist <= link_tol
        candidate = (dist <= reach[:, None] + reach[None, :]) & ~close
        for i, j in zip(*np.nonzero(np.triu(close, 1))):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
        iu, ju = np.nonzero(np.triu(candidate, 1))
        for k in np.argsort(dist[iu, ju], kind="stable"):
            i, j = iu[k], ju[k]
            ri, rj = find(i), find(j)
            if ri != rj and _segment_in_pseudospectrum(M, w[i], w[j], eta):
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        pts = w[members]
        rep = complex(pts.mean())
        out.append((rep, len(members), float(np.max(np.abs(pts - rep)))))
    return out


def numerical_rank(M, rank_tol: float) -> int:
    s = np.linalg.svd(np.asarray(M), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


def solve(M, RHS, cfg: ToleranceConfig | None = None) -> np.ndarray:
    """Solve ``M X = RHS``, refusing matrices singular to ``rank_tol``."""
    cfg = cfg or ToleranceConfig()
    M = as_complex_matrix(M, "M", square=True)
    RHS = as_complex_matrix(RHS, "RHS")
    if RHS.shape[0] != M.shape[0]:
        raise InputError(f"RHS has {RHS.shape[0]} rows, M has {M.shape[0]}", path="RHS")
    s = np.linalg.svd(M, compute_uv=False)
    if s.size and (s[-1] <= cfg.rank_tol * s[0] or s[0] == 0):
        cond = s[0] / s[-1] if s[-1] > 0 else float("inf")
        raise SingularResolvent("matrix is singular to working tolerance", cond)
    X = np.linalg.solve(M, RHS)
    return X


def orthonormal_range_basis(M, k: int, cfg: ToleranceConfig | None = None) -> np.ndarray:
    """``n x k`` orthonormal basis of the dominant ``k``-dimensional range of ``M``."""
    cfg = cfg or ToleranceConfig()
    M = as_complex_matrix(M, "M")
    if k == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(M)
    if s.size < k or s[0] == 0 or s[k - 1] <= cfg.rank_tol * s[0]:
        raise RankDeficiency(f"numerical rank below requested {k}")
    B = U[:, :k]
    # fix the phase so the largest entry of each column is real positive
    pivots = B[np.argmax(np.abs(B), axis=0), np.arange(k)]
    return B * (np.abs(pivots) / pivots)
