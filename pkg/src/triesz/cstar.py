"""Finite-dimensional C*-algebras ``M_{n_1} (+) ... (+) M_{n_k}`` and their elements."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ShapeMismatch
from .numerics import (
    ToleranceConfig,
    as_complex_matrix,
    cluster_eigenvalues,
    cluster_points,
    operator_norm,
)

__all__ = [
    "MAX_ALGEBRA_DIMENSION",
    "AlgebraElement",
    "AlgebraShape",
    "QuasinilpotencyCheck",
    "SpectrumSet",
    "canonical_key",
    "is_invertible",
    "is_normal",
    "is_quasinilpotent",
    "is_selfadjoint_projection",
    "polyval_roots",
    "spectral_radius",
    "spectrum",
]

MAX_ALGEBRA_DIMENSION = 4096


def canonical_key(z: complex):
    """Sort key: decreasing modulus, then increasing argument, then real part."""
    z = complex(z)
    return (-abs(z), cmath.phase(z), z.real)


@dataclass(frozen=True)
class AlgebraShape:
    block_dims: tuple[int, ...]

    def __init__(self, block_dims: Iterable[int], max_dimension: int = MAX_ALGEBRA_DIMENSION):
        dims = tuple(block_dims)
        if not dims:
            raise InputError("an algebra needs at least one block", path="block_dims")
        for i, n in enumerate(dims):
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
                raise InputError(f"block size must be a positive integer, got {n!r}",
                                 path=f"block_dims[{i}]")
        dims = tuple(int(n) for n in dims)
        if sum(n * n for n in dims) > max_dimension:
            raise InputError(f"algebra dimension {sum(n * n for n in dims)} exceeds "
                             f"limit {max_dimension}", path="block_dims")
        object.__setattr__(self, "block_dims", dims)

    def __len__(self):
        return len(self.block_dims)

    def __iter__(self):
        return iter(self.block_dims)

    def __getitem__(self, i):
        return self.block_dims[i]

    @property
    def total_size(self) -> int:
        """Sum of block sizes: the number of eigenvalues of any element."""
        return sum(self.block_dims)

    @property
    def dimension(self) -> int:
        return sum(n * n for n in self.block_dims)


class AlgebraElement:
    """Immutable element of ``M_{n_1} (+) ... (+) M_{n_k}``.

    ``+``, ``-``, unary ``-`` are blockwise; ``@`` is the algebra product and
    ``*`` is reserved for scalars.  ``x.adjoint()`` (or ``x.H``) is the
    blockwise conjugate transpose.
    """

    __slots__ = ("shape", "blocks")

    def __init__(self, blocks: Sequence, shape: AlgebraShape | None = None):
        mats = tuple(as_complex_matrix(b, name=f"blocks[{i}]", square=True)
                     for i, b in enumerate(blocks))
        if shape is None:
            shape = AlgebraShape(m.shape[0] for m in mats)
        if len(mats) != len(shape):
            raise ShapeMismatch(f"{len(mats)} blocks for a {len(shape)}-block algebra", path="blocks")
        for i, (m, n) in enumerate(zip(mats, shape)):
            if m.shape[0] != n:
                raise ShapeMismatch(f"block is {m.shape[0]}x{m.shape[0]}, expected {n}x{n}",
                                    path=f"blocks[{i}]")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", mats)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def _trusted(cls, shape, mats):
        obj = object.__new__(cls)
        for m in mats:
            m.flags.writeable = False
        object.__setattr__(obj, "shape", shape)
        object.__setattr__(obj, "blocks", tuple(mats))
        return obj

    @classmethod
    def identity(cls, shape: AlgebraShape) -> "AlgebraElement":
        return cls._trusted(shape, [np.eye(n, dtype=complex) for n in shape])

    @classmethod
    def zeros(cls, shape: AlgebraShape) -> "AlgebraElement":
        return cls._trusted(shape, [np.zeros((n, n), dtype=complex) for n in shape])

    @classmethod
    def scalar(cls, shape: AlgebraShape, value: complex) -> "AlgebraElement":
        return cls._trusted(shape, [value * np.eye(n, dtype=complex) for n in shape])

    def _check(self, other) -> None:
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected an AlgebraElement, got {type(other).__name__}")
        if other.shape != self.shape:
            raise ShapeMismatch(f"shapes differ: {self.shape.block_dims} vs {other.shape.block_dims}")

    def map_blocks(self, fn) -> "AlgebraElement":
        return AlgebraElement._trusted(self.shape, [np.asarray(fn(b), dtype=complex)
                                                    for b in self.blocks])

    def __add__(self, other):
        self._check(other)
        return AlgebraElement._trusted(self.shape, [x + y for x, y in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement._trusted(self.shape, [x - y for x, y in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return self.map_blocks(lambda b: -b)

    def __matmul__(self, other):
        self._check(other)
        return AlgebraElement._trusted(self.shape, [x @ y for x, y in zip(self.blocks, other.blocks)])

    def __mul__(self, s):
        if not isinstance(s, Number):
            return NotImplemented
        return self.map_blocks(lambda b: s * b)

    __rmul__ = __mul__

    def adjoint(self) -> "AlgebraElement":
        return self.map_blocks(lambda b: b.conj().T)

    @property
    def H(self) -> "AlgebraElement":
        return self.adjoint()

    def norm(self) -> float:
        """C*-norm: the largest block operator norm."""
        return max(operator_norm(b) for b in self.blocks)

    def block_norms(self) -> list[float]:
        return [operator_norm(b) for b in self.blocks]

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks))

    def allclose(self, other, atol=1e-12) -> bool:
        self._check(other)
        return (self - other).norm() <= atol

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement) or other.shape != self.shape:
            return NotImplemented
        return all(np.array_equal(x, y) for x, y in zip(self.blocks, other.blocks))

    __hash__ = None

    def __repr__(self):
        return f"AlgebraElement(shape={self.shape.block_dims})"


def polyval_roots(a: AlgebraElement, roots: Iterable[complex]) -> AlgebraElement:
    """``prod_r (a - r e)`` for a monic polynomial given by its roots."""
    out = AlgebraElement.identity(a.shape)
    for r in roots:
        out = out @ (a - AlgebraElement.scalar(a.shape, complex(r)))
    return out


class SpectrumSet:
    """Finite multiset of spectral points.

    ``points`` is a tuple of ``(value, multiplicity)`` in canonical order;
    ``tol`` is the absolute distance below which two points are the same.
    ``radii`` records how far the raw eigenvalues behind each point were
    spread, which contour placement has to respect.
    """

    __slots__ = ("points", "tol", "radii", "blocks")

    def __init__(self, points: Iterable[tuple[complex, int]], tol: float, radii=None, blocks=None):
        pts = [(complex(z), int(m)) for z, m in points]
        if any(m < 1 for _, m in pts):
            raise InputError("multiplicities must be >= 1", path="points")
        rad = [0.0] * len(pts) if radii is None else [float(r) for r in radii]
        order = sorted(range(len(pts)), key=lambda i: canonical_key(pts[i][0]))
        self.points = tuple(pts[i] for i in order)
        self.radii = tuple(rad[i] for i in order)
        self.tol = float(tol)
        # per algebra block: ((point index, local value, multiplicity, spread), ...)
        self.blocks = None
        if blocks is not None:
            where = {old: new for new, old in enumerate(order)}
            self.blocks = tuple(tuple((where[g], z, m, r) for g, z, m, r in blk) for blk in blocks)

    @classmethod
    def from_values(cls, values, tol: float, weights=None) -> "SpectrumSet":
        groups = cluster_points(values, tol, weights)
        return cls([(rep, round(w)) for rep, w, _ in groups], tol)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return (z for z, _ in self.points)

    def __repr__(self):
        inner = ", ".join(f"{z:.6g}" + (f"^{m}" if m > 1 else "") for z, m in self.points)
        return f"SpectrumSet({{{inner}}})"

    @property
    def values(self) -> np.ndarray:
        return np.array([z for z, _ in self.points], dtype=complex)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.points)

    @property
    def total_multiplicity(self) -> int:
        return sum(self.multiplicities)

    def contains(self, z: complex, tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        return any(abs(complex(z) - p) <= tol for p in self)

    def nearest(self, z: complex) -> tuple[int, float]:
        d = np.abs(self.values - complex(z))
        i = int(np.argmin(d))
        return i, float(d[i])

    def issubset(self, other: "SpectrumSet", tol: float | None = None) -> bool:
        tol = max(self.tol, other.tol) if tol is None else tol
        return all(other.contains(z, tol) for z in self)

    def same_points(self, other: "SpectrumSet", tol: float | None = None) -> bool:
        return self.issubset(other, tol) and other.issubset(self, tol)

    def plain(self) -> "SpectrumSet":
        """The same points with every multiplicity set to one."""
        return SpectrumSet([(z, 1) for z in self], self.tol, self.radii)

    def union(self, other: "SpectrumSet") -> "SpectrumSet":
        tol = max(self.tol, other.tol)
        vals = list(self) + list(other)
        weights = list(self.multiplicities) + list(other.multiplicities)
        return SpectrumSet.from_values(vals, tol, weights)

    def without(self, other: "SpectrumSet", tol: float | None = None) -> "SpectrumSet":
        tol = max(self.tol, other.tol) if tol is None else tol
        keep = [i for i, z in enumerate(self) if not other.contains(z, tol)]
        return SpectrumSet([self.points[i] for i in keep], self.tol, [self.radii[i] for i in keep])

    def to_dict(self) -> dict:
        return {
            "points": [[z.real, z.imag] for z in self],
            "multiplicities": list(self.multiplicities),
        }


def _scale(a: AlgebraElement) -> float:
    return max(1.0, a.norm())


def spectrum(a: AlgebraElement, cfg: ToleranceConfig | None = None) -> SpectrumSet:
    """Clustered spectrum of ``a``: union over blocks with summed multiplicities."""
    cfg = cfg or ToleranceConfig()
    scale = _scale(a)
    link = cfg.eig_cluster_tol * scale
    eta = cfg.residual_tol * scale
    reps, mults, radii, owner = [], [], [], []
    for b, block in enumerate(a.blocks):
        for rep, m, r in cluster_eigenvalues(block, link, eta):
            reps.append(rep)
            mults.append(m)
            radii.append(r)
            owner.append(b)
    merged = []
    per_block = [[] for _ in a.blocks]
    for g, (rep, weight, members) in enumerate(cluster_points(reps, link, mults)):
        spread = max(radii[i] + abs(reps[i] - rep) for i in members)
        merged.append((rep, round(weight), spread))
        for i in members:
            per_block[owner[i]].append((g, reps[i], mults[i], radii[i]))
    return SpectrumSet([(z, m) for z, m, _ in merged], link, [r for *_, r in merged], per_block)


def spectral_radius(a: AlgebraElement, cfg: ToleranceConfig | None = None) -> float:
    s = spectrum(a, cfg)
    return float(np.max(np.abs(s.values))) if len(s) else 0.0


@dataclass(frozen=True)
class QuasinilpotencyCheck:
    """Outcome of :func:`is_quasinilpotent`; truthy when quasinilpotent.

    ``gelfand_estimate`` is ``max_i ||a_i^{n_i}||^{1/n_i}`` over blocks and
    ``power_test`` says whether ``(a_i/||a_i||)^{n_i}`` vanishes to
    rounding level; ``agree`` compares it with the spectral decision.
    """

    quasinilpotent: bool
    spectral_radius: float
    bound: float
    gelfand_estimate: float
    power_test: bool

    @property
    def agree(self) -> bool:
        return self.quasinilpotent == self.power_test

    def __bool__(self):
        return self.quasinilpotent

    def to_dict(self) -> dict:
        return {
            "quasinilpotent": self.quasinilpotent,
            "spectral_radius": self.spectral_radius,
            "bound": self.bound,
            "gelfand_estimate": self.gelfand_estimate,
            "power_test": self.power_test,
            "agree": self.agree,
        }


def is_quasinilpotent(a: AlgebraElement, cfg: ToleranceConfig | None = None) -> QuasinilpotencyCheck:
    cfg = cfg or ToleranceConfig()
    rho = spectral_radius(a, cfg)
    bound = cfg.eig_cluster_tol * _scale(a)
    gelfand = 0.0
    power_ok = True
    for b in a.blocks:
        n = b.shape[0]
        nb = operator_norm(b)
        if nb == 0:
            continue
        pw = np.linalg.matrix_power(b / nb, n)
        pn = operator_norm(pw)
        gelfand = max(gelfand, nb * pn ** (1.0 / n))
        power_ok &= pn <= n * cfg.residual_tol
    return QuasinilpotencyCheck(bool(rho <= bound), rho, bound, gelfand, bool(power_ok))


def _smin(b: np.ndarray) -> float:
    return float(np.linalg.svd(b, compute_uv=False)[-1])


def is_invertible(a: AlgebraElement, cfg: ToleranceConfig | None = None) -> bool:
    """Every block has smallest singular value above ``rank_tol * max(1, ||a||)``."""
    cfg = cfg or ToleranceConfig()
    cut = cfg.rank_tol * _scale(a)
    return all(_smin(b) > cut for b in a.blocks)


def normality_defect(a: AlgebraElement) -> float:
    return (a @ a.H - a.H @ a).norm()


def is_normal(a: AlgebraElement, cfg: ToleranceConfig | None = None) -> bool:
    cfg = cfg or ToleranceConfig()
    return normality_defect(a) <= cfg.projection_tol * a.norm() ** 2


def is_selfadjoint_projection(a: AlgebraElement, cfg: ToleranceConfig | None = None) -> bool:
    cfg = cfg or ToleranceConfig()
    return ((a - a.H).norm() <= cfg.projection_tol
            and (a @ a - a).norm() <= cfg.projection_tol)
