"""Unital *-homomorphisms between finite-dimensional C*-algebras.

Every such map is unitarily equivalent to a canonical one: target block
``j`` receives ``mult[j][i]`` diagonal copies of source block ``i``,
optionally conjugated by a unitary ``U_j``.  That canonical form is the
only representation accepted here.  Block indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .cstar import AlgebraElement, AlgebraShape, spectrum
from .errors import InputError, ShapeMismatch, UnitalityError
from .numerics import ToleranceConfig, as_complex_matrix

__all__ = [
    "AxiomFailure",
    "AxiomReport",
    "KernelSupport",
    "RieszPropertyReport",
    "StarHomomorphism",
    "StrongRieszReport",
    "apply",
    "is_T_null",
    "is_almost_T_null",
    "kernel_support",
    "riesz_property_report",
    "strong_riesz_property_check",
    "verify_homomorphism_axioms",
]


class StarHomomorphism:
    """``T: A -> B`` in canonical multiplicity form.

    Parameters
    ----------
    source, target : AlgebraShape
    mult : sequence of sequences of int
        ``mult[j][i]`` copies of source block ``i`` inside target block ``j``.
    conjugators : sequence of square matrices, optional
        One unitary per target block; target block ``j`` is
        ``U_j B U_j^{-1}``, which is ``U_j B U_j*`` for a unitary.
    validate : bool
        Skip the unitarity check on conjugators when False.  Only meant
        for deliberately corrupted maps in tests: a non-unitary ``U_j``
        still gives an algebra homomorphism, just not a *-preserving one.
        The dimension bookkeeping is always enforced.
    """

    def __init__(self, source, target, mult, conjugators=None, *,
                 cfg: ToleranceConfig | None = None, validate: bool = True):
        cfg = cfg or ToleranceConfig()
        source = source if isinstance(source, AlgebraShape) else AlgebraShape(source)
        target = target if isinstance(target, AlgebraShape) else AlgebraShape(target)
        try:
            m = np.array(mult)
        except ValueError:
            raise InputError("ragged multiplicity matrix", path="mult") from None
        if m.shape != (len(target), len(source)):
            raise ShapeMismatch(f"multiplicity matrix must be {len(target)}x{len(source)}, "
                                f"got {'x'.join(map(str, m.shape))}", path="mult")
        if m.dtype.kind not in "iu" and not (m.dtype.kind == "f" and np.all(m == np.round(m))):
            raise InputError("multiplicities must be integers", path="mult")
        m = m.astype(int)
        if np.any(m < 0):
            raise InputError("multiplicities must be nonnegative", path="mult")
        n = np.array(source.block_dims)
        for j, N in enumerate(target):
            got = int(m[j] @ n)
            if got != N:
                raise UnitalityError(f"target block {j} has size {N} but receives {got} "
                                     f"(sum_i mult[{j}][i]*n_i)", path=f"mult[{j}]")
        conj = inv = None
        if conjugators is not None:
            if len(conjugators) != len(target):
                raise ShapeMismatch(f"{len(conjugators)} conjugators for {len(target)} target blocks",
                                    path="conjugators")
            conj, inv = [], []
            for j, (U, N) in enumerate(zip(conjugators, target)):
                U = as_complex_matrix(U, name=f"conjugators[{j}]", square=True)
                if U.shape[0] != N:
                    raise ShapeMismatch(f"conjugator is {U.shape[0]}x{U.shape[0]}, expected {N}x{N}",
                                        path=f"conjugators[{j}]")
                unitary = np.linalg.norm(U.conj().T @ U - np.eye(N), 2) <= cfg.projection_tol
                if validate and not unitary:
                    raise InputError("conjugator is not unitary", path=f"conjugators[{j}]")
                if not unitary and np.linalg.cond(U) > 1 / cfg.rank_tol:
                    raise InputError("conjugator is singular", path=f"conjugators[{j}]")
                conj.append(U)
                inv.append(U.conj().T if unitary else np.linalg.inv(U))
            conj, inv = tuple(conj), tuple(inv)
        self.source = source
        self.target = target
        self.mult = tuple(tuple(int(v) for v in row) for row in m)
        self.conjugators = conj
        self._inverses = inv

    @classmethod
    def identity(cls, shape) -> "StarHomomorphism":
        shape = shape if isinstance(shape, AlgebraShape) else AlgebraShape(shape)
        return cls(shape, shape, np.eye(len(shape), dtype=int))

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return apply(self, a)

    def __repr__(self):
        return (f"StarHomomorphism({self.source.block_dims} -> {self.target.block_dims}, "
                f"mult={self.mult}{', conjugated' if self.conjugators else ''})")


def apply(T: StarHomomorphism, a: AlgebraElement) -> AlgebraElement:
    if a.shape != T.source:
        raise ShapeMismatch(f"element has shape {a.shape.block_dims}, "
                            f"homomorphism expects {T.source.block_dims}")
    out = []
    for j, row in enumerate(T.mult):
        parts = [a.blocks[i] for i, k in enumerate(row) for _ in range(k)]
        B = sla.block_diag(*parts).astype(complex)
        if T.conjugators is not None:
            B = T.conjugators[j] @ B @ T._inverses[j]
        out.append(B)
    return AlgebraElement._trusted(T.target, out)


@dataclass(frozen=True)
class KernelSupport:
    """Source blocks killed by ``T``; ``T^{-1}(0)`` is exactly the elements living on them."""

    zero_blocks: frozenset
    n_blocks: int

    @property
    def live_blocks(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_blocks) if i not in self.zero_blocks)

    def project(self, a: AlgebraElement) -> AlgebraElement:
        """Zero out every block outside the kernel support."""
        return AlgebraElement._trusted(a.shape, [
            b.copy() if i in self.zero_blocks else np.zeros_like(b)
            for i, b in enumerate(a.blocks)])

    def contains(self, a: AlgebraElement, tol: float = 0.0) -> bool:
        return all(np.linalg.norm(a.blocks[i], 2) <= tol for i in self.live_blocks)


def kernel_support(T: StarHomomorphism) -> KernelSupport:
    m = np.array(T.mult)
    zero = frozenset(int(i) for i in np.nonzero(~m.any(axis=0))[0])
    return KernelSupport(zero, len(T.source))


def is_T_null(T: StarHomomorphism, a: AlgebraElement, cfg: ToleranceConfig | None = None) -> bool:
    cfg = cfg or ToleranceConfig()
    return apply(T, a).norm() <= cfg.residual_tol * max(1.0, a.norm())


def is_almost_T_null(T: StarHomomorphism, a: AlgebraElement,
                     cfg: ToleranceConfig | None = None) -> bool:
    """``T a`` in the Jacobson radical of the target, which is zero for C*-algebras."""
    return is_T_null(T, a, cfg)


@dataclass(frozen=True)
class RieszPropertyReport:
    holds: bool
    samples: int
    max_accumulation_points: int
    note: str

    def to_dict(self) -> dict:
        return {"holds": self.holds, "samples": self.samples,
                "max_accumulation_points": self.max_accumulation_points, "note": self.note}


def riesz_property_report(T: StarHomomorphism, samples: int = 100, seed: int = 0,
                          cfg: ToleranceConfig | None = None) -> RieszPropertyReport:
    """Check ``acc(sigma(a))`` is inside ``{0}`` on random kernel elements.

    In finite dimension every spectrum is finite, so the property holds
    vacuously; the sample is evidence that the executable check agrees.
    """
    from .spectra import iso_acc_split

    rng = np.random.default_rng(seed)
    ker = kernel_support(T)
    worst = 0
    for _ in range(samples):
        blocks = [(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
                  if i in ker.zero_blocks else np.zeros((n, n), dtype=complex)
                  for i, n in enumerate(T.source)]
        a = AlgebraElement._trusted(T.source, blocks)
        _, acc = iso_acc_split(spectrum(a, cfg))
        if any(abs(z) > acc.tol for z in acc):
            worst = max(worst, len(acc))
    return RieszPropertyReport(worst == 0, samples, worst,
                               "finite spectra have no accumulation points; holds vacuously")


@dataclass(frozen=True)
class StrongRieszReport:
    holds: bool
    boundary: object
    sigma_T: object
    isolated: object

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {"holds": self.holds, "boundary": self.boundary.to_dict(),
                "sigma_T": self.sigma_T.to_dict(), "isolated": self.isolated.to_dict()}


def strong_riesz_property_check(T: StarHomomorphism, a: AlgebraElement,
                                cfg: ToleranceConfig | None = None) -> StrongRieszReport:
    """Literal check of ``boundary(sigma(a))`` inside ``sigma_T(a) | iso(sigma(a))``."""
    from .spectra import boundary_and_hull, iso_acc_split, sigma_T

    s = spectrum(a, cfg)
    boundary, _ = boundary_and_hull(s)
    iso, _ = iso_acc_split(s)
    st = sigma_T(T, a, cfg)
    rhs = st.plain().union(iso.plain())
    return StrongRieszReport(boundary.issubset(rhs), boundary, st, iso)


@dataclass(frozen=True)
class AxiomFailure:
    axiom: str
    residual: float
    bound: float
    witness: int


@dataclass
class AxiomReport:
    ok: bool
    pairs: int
    max_residuals: dict = field(default_factory=dict)
    max_ratios: dict = field(default_factory=dict)  # worst residual / bound per axiom
    failures: list = field(default_factory=list)

    def violated(self) -> set[str]:
        return {f.axiom for f in self.failures}

    def to_dict(self) -> dict:
        return {"ok": self.ok, "pairs": self.pairs, "max_residuals": dict(self.max_residuals),
                "max_ratios": dict(self.max_ratios),
                "failures": [vars(f) for f in self.failures[:20]],
                "violated": sorted(self.violated())}


def verify_homomorphism_axioms(T: StarHomomorphism, seed: int = 0, pairs: int = 100,
                               cfg: ToleranceConfig | None = None) -> AxiomReport:
    """Randomized check of multiplicativity, *-preservation, unitality and linearity."""
    cfg = cfg or ToleranceConfig()
    rng = np.random.default_rng(seed)

    def rand():
        return AlgebraElement._trusted(T.source, [
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for n in T.source])

    report = AxiomReport(True, pairs)
    worst = {"multiplicative": 0.0, "star": 0.0, "unital": 0.0, "linear": 0.0}
    ratio = dict.fromkeys(worst, 0.0)

    def record(axiom, residual, bound, k):
        worst[axiom] = max(worst[axiom], residual)
        ratio[axiom] = max(ratio[axiom], residual / bound)
        if not residual <= bound:
            report.failures.append(AxiomFailure(axiom, float(residual), float(bound), k))

    e_src = AlgebraElement.identity(T.source)
    e_tgt = AlgebraElement.identity(T.target)
    record("unital", (apply(T, e_src) - e_tgt).norm(), cfg.residual_tol, -1)
    for k in range(pairs):
        x, y = rand(), rand()
        Tx, Ty = apply(T, x), apply(T, y)
        scale = max(1.0, x.norm() * y.norm())
        record("multiplicative", (apply(T, x @ y) - Tx @ Ty).norm(), cfg.residual_tol * scale, k)
        record("star", (apply(T, x.H) - Tx.H).norm(), cfg.residual_tol * max(1.0, x.norm()), k)
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        record("linear", (apply(T, x + alpha * y) - Tx - alpha * Ty).norm(),
               cfg.residual_tol * max(1.0, x.norm() + abs(alpha) * y.norm()), k)
    report.max_residuals = {k: float(v) for k, v in worst.items()}
    report.max_ratios = {k: float(v) for k, v in ratio.items()}
    report.ok = not report.failures
    return report
