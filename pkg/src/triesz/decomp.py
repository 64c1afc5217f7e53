"""Constructive decompositions with certificates.

The building blocks are Riesz projections computed by trapezoidal
quadrature of the resolvent on circles, and a nested orthogonalization
that turns a flag of spectral subspaces into mutually orthogonal
self-adjoint projections ``E_k``.  For a T-Riesz element ``a`` the normal
part ``d = sum_k lambda_k E_k`` over the nonzero spectrum lives in the
kernel of ``T`` and ``c = a - d`` is quasinilpotent; the polynomially
T-Riesz case runs the same flag construction cluster by cluster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cstar import (
    AlgebraElement,
    SpectrumSet,
    canonical_key,
    is_quasinilpotent,
    normality_defect,
    polyval_roots,
    spectrum,
)
from .errors import (
    ClusterGapError,
    EmptyOmega,
    InputError,
    NotTRiesz,
    RankDriftError,
    TheoremHypothesisViolation,
)
from .hom import StarHomomorphism, apply, kernel_support
from .numerics import Certificate, ToleranceConfig, numerical_rank, orthonormal_range_basis
from .spectra import sigma_T

__all__ = [
    "GeneralizedRieszDecomposition",
    "MinimalPolynomial",
    "NestedStep",
    "Partition",
    "PolyRieszDecomposition",
    "RieszProjection",
    "WestDecomposition",
    "cluster_partition",
    "generalized_riesz_decompose",
    "minimal_sigma_polynomial",
    "nested_orthogonalize",
    "poly_riesz_decompose",
    "riesz_projection",
    "west_decompose",
]


def _passed(certs) -> bool:
    return all(c.passed for c in certs)


# --------------------------------------------------------------------------
# Riesz projections


@dataclass(frozen=True)
class RieszProjection:
    p: AlgebraElement
    cluster: tuple
    multiplicity: int
    contours: tuple  # ((block, center, radius, nodes), ...)
    certificates: tuple

    @property
    def passed(self) -> bool:
        return _passed(self.certificates)


def _circle_for(inside, outside, clamp: float):
    """Center/radius of a circle around ``inside`` avoiding ``outside``, or None.

    Both are lists of ``(value, spread)``.
    """
    center = complex(np.mean([z for z, _ in inside]))
    r_in = max(abs(z - center) + r for z, r in inside)
    d_out = min(abs(z - center) - r for z, r in outside)
    if d_out - r_in <= clamp:
        return None
    return center, 0.5 * (r_in + d_out)


def _margin(circle, inside, outside) -> float:
    center, radius = circle
    r_in = max(abs(z - center) + r for z, r in inside)
    d_out = min((abs(z - center) - r for z, r in outside), default=np.inf)
    return min(radius - r_in, d_out - radius) / radius


def _block_circles(entries, idx, clamp):
    """Contours for one block: one circle if it is well separated, else one per enclosed point.

    The trapezoidal rule on a circle converges like ``(1 - margin)^N`` in the
    relative margin, so a single circle squeezed between enclosed and excluded
    points is worse than several small ones.
    """
    inside = [(z, r) for g, z, _, r in entries if g in idx]
    outside = [(z, r) for g, z, _, r in entries if g not in idx]
    single = _circle_for(inside, outside, clamp)
    if single is not None and _margin(single, inside, outside) >= 0.5:
        return [single]
    circles = []
    for g in sorted({g for g, *_ in entries if g in idx}):
        own = [(z, r) for h, z, _, r in entries if h == g]
        rest = [(z, r) for h, z, _, r in entries if h != g]
        c = _circle_for(own, rest, clamp)
        if c is None:
            if single is not None:
                return [single]
            raise ClusterGapError(f"spectral point {own[0][0]:.6g} is not separated from "
                                  f"the rest of the spectrum by more than {clamp:.3g}")
        circles.append(c)
    return circles


def _quadrature(A, circles, n_nodes):
    """Trapezoidal sum ``(R/N) sum_k e^{i theta_k} (z_k - A)^{-1}`` over the circles."""
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)
    acc = np.zeros((n, n), dtype=complex)
    w = np.exp(2j * np.pi * np.arange(n_nodes) / n_nodes)
    for center, radius in circles:
        z = center + radius * w
        R = np.linalg.solve(z[:, None, None] * eye - A, np.broadcast_to(eye, (n_nodes, n, n)))
        acc += (radius / n_nodes) * np.tensordot(w, R, axes=1)
    return acc


def _block_projection(A, circles, cfg):
    """Node doubling for one block; returns the most idempotent attempt and its node count."""
    # aim well below projection_tol so rank decisions downstream stay clear-cut;
    # once at tolerance, stop as soon as doubling no longer helps (rounding floor)
    best = None
    nodes = cfg.quadrature_min_nodes
    while True:
        P = _quadrature(A, circles, nodes)
        excess = np.linalg.norm(P @ P - P, 2) / (cfg.projection_tol * max(1.0, np.linalg.norm(P, 2) ** 2))
        stalled = best is not None and best[1] <= 1.0 and excess > 0.5 * best[1]
        if best is None or excess < best[1]:
            best = (P, excess, nodes)
        if best[1] <= 1e-3 or stalled or nodes * 2 > cfg.quadrature_max_nodes:
            return best[0], best[2]
        nodes *= 2


def riesz_projection(a: AlgebraElement, cluster: Sequence[complex],
                     cfg: ToleranceConfig | None = None, spec: SpectrumSet | None = None) -> RieszProjection:
    """Spectral projection of ``a`` for a set of its spectral points.

    The projection is computed block by block, each block with contours
    placed against its own eigenvalues only: one circle around the enclosed
    points halfway to the nearest excluded one, or one circle per point
    when a single circle cannot separate them.  A block with nothing
    enclosed gets exactly 0 and a block with nothing excluded exactly the
    identity.  Node counts double from ``quadrature_min_nodes`` until the
    block is idempotent to ``projection_tol`` or ``quadrature_max_nodes``
    is reached; the best attempt is then kept and the certificates say so.
    """
    cfg = cfg or ToleranceConfig()
    if spec is None or spec.blocks is None:
        spec = spectrum(a, cfg)
    scale = max(1.0, a.norm())
    idx = set()
    for z in cluster:
        i, dist = spec.nearest(z) if len(spec) else (None, math.inf)
        if dist > spec.tol:
            raise InputError(f"{complex(z):.6g} is not a spectral point", path="cluster")
        idx.add(i)
    clamp = 10 * cfg.eig_cluster_tol * scale

    blocks, contours = [], []
    for b, (A, entries) in enumerate(zip(a.blocks, spec.blocks)):
        n = A.shape[0]
        if not any(g in idx for g, *_ in entries):
            blocks.append(np.zeros((n, n), dtype=complex))
        elif all(g in idx for g, *_ in entries):
            blocks.append(np.eye(n, dtype=complex))
        else:
            circles = _block_circles(entries, idx, clamp)
            P, nodes = _block_projection(A, circles, cfg)
            blocks.append(P)
            contours.extend((b, complex(c), float(r), nodes) for c, r in circles)
    p = AlgebraElement._trusted(a.shape, blocks)

    mult = sum(spec.multiplicities[i] for i in idx)
    pn = p.norm()
    certs = (
        Certificate("idempotent", (p @ p - p).norm(), cfg.projection_tol * max(1.0, pn * pn)),
        Certificate("commutes", (p @ a - a @ p).norm(), cfg.projection_tol * max(1.0, scale * pn)),
        Certificate("trace", abs(p.trace() - mult), 1e-6),
    )
    return RieszProjection(p, tuple(complex(spec.values[i]) for i in sorted(idx)), mult,
                           tuple(contours), certs)


# --------------------------------------------------------------------------
# nested orthogonalization


@dataclass(frozen=True)
class NestedStep:
    E: AlgebraElement
    lam: complex
    riesz: RieszProjection


def nested_orthogonalize(a: AlgebraElement, ordered_clusters, cfg: ToleranceConfig | None = None,
                         spec: SpectrumSet | None = None) -> list[NestedStep]:
    """Orthogonal differences ``E_k = q_k - q_{k-1}`` of the flag ``range(P_1 + ... + P_k)``.

    ``q_k`` is the orthogonal projection onto the range of the partial sum
    of Riesz projections, computed blockwise with rank equal to the
    cumulative algebraic multiplicity in that block.
    """
    cfg = cfg or ToleranceConfig()
    spec = spectrum(a, cfg) if spec is None else spec
    steps = []
    S = [np.zeros((n, n), dtype=complex) for n in a.shape]
    q_prev = [np.zeros((n, n), dtype=complex) for n in a.shape]
    for cluster in ordered_clusters:
        cluster = list(cluster)
        rp = riesz_projection(a, cluster, cfg, spec)
        q_new = []
        for i, (Si, Pi) in enumerate(zip(S, rp.p.blocks)):
            if not Pi.any():
                q_new.append(q_prev[i])
                continue
            Si = Si + Pi
            S[i] = Si
            tr = np.trace(Si).real
            k = int(round(tr))
            if abs(np.trace(Si) - k) > 1e-6 or numerical_rank(Si, cfg.rank_tol) != k:
                raise RankDriftError(f"block {i}: cumulative multiplicity {tr:.6g} does not match "
                                     f"numerical rank {numerical_rank(Si, cfg.rank_tol)}")
            if k == Si.shape[0]:
                q_new.append(np.eye(k, dtype=complex))
                continue
            B = orthonormal_range_basis(Si, k, cfg)
            q_new.append(B @ B.conj().T)
        E = AlgebraElement._trusted(a.shape, [qn - qp for qn, qp in zip(q_new, q_prev)])
        lam = complex(np.mean(rp.cluster)) if rp.cluster else 0j
        steps.append(NestedStep(E, lam, rp))
        q_prev = q_new
    return steps


# --------------------------------------------------------------------------
# West decomposition


@dataclass(frozen=True)
class WestDecomposition:
    """``a = c + d`` with ``c`` quasinilpotent and ``d`` a normal kernel element."""

    c: AlgebraElement
    d: AlgebraElement
    eigenvalues: tuple
    projections: tuple
    certificates: tuple
    quasinilpotency: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return _passed(self.certificates)

    def certificate(self, name: str) -> Certificate:
        return next(c for c in self.certificates if c.name == name)


def _west_certificates(T, a, c, d, cfg):
    scale = max(1.0, a.norm())
    qn = is_quasinilpotent(c, cfg)
    dn = d.norm()
    certs = (
        Certificate("sum", (a - c - d).norm(), cfg.residual_tol * scale),
        Certificate("c_quasinilpotent", qn.spectral_radius, cfg.eig_cluster_tol * scale),
        Certificate("d_in_kernel", apply(T, d).norm(), cfg.residual_tol * scale),
        Certificate("d_normal", normality_defect(d), cfg.projection_tol * max(1.0, dn * dn)),
    )
    return certs, qn


def west_decompose(T: StarHomomorphism, a: AlgebraElement,
                   cfg: ToleranceConfig | None = None) -> WestDecomposition:
    cfg = cfg or ToleranceConfig()
    qn_Ta = is_quasinilpotent(apply(T, a), cfg)
    if not qn_Ta:
        raise NotTRiesz(f"T a is not quasinilpotent (spectral radius {qn_Ta.spectral_radius:.3e} > "
                        f"{qn_Ta.bound:.3e})")
    spec = spectrum(a, cfg)
    cut = cfg.eig_cluster_tol * max(1.0, a.norm())
    nonzero = [z for z in spec if abs(z) > cut]  # canonical order already
    steps = nested_orthogonalize(a, [[z] for z in nonzero], cfg, spec)
    scale = max(1.0, a.norm())
    for st in steps:
        leak = apply(T, st.riesz.p).norm()
        if leak > cfg.projection_tol * max(1.0, st.riesz.p.norm()) * scale:
            raise TheoremHypothesisViolation(
                f"T P for the spectral point {st.lam:.6g} does not vanish (norm {leak:.3e})")
    d = AlgebraElement.zeros(a.shape)
    for st in steps:
        d = d + st.lam * st.E
    c = a - d
    certs, qn = _west_certificates(T, a, c, d, cfg)
    return WestDecomposition(c, d, tuple(st.lam for st in steps), tuple(st.E for st in steps),
                             certs, qn.to_dict())


# --------------------------------------------------------------------------
# minimal polynomial and the polynomially T-Riesz decomposition


@dataclass(frozen=True)
class MinimalPolynomial:
    roots: tuple
    certificate: Certificate
    quasinilpotency: dict

    @property
    def degree(self) -> int:
        return len(self.roots)

    @property
    def passed(self) -> bool:
        return self.certificate.passed

    def __call__(self, x):
        if isinstance(x, AlgebraElement):
            return polyval_roots(x, self.roots)
        return complex(np.prod([x - r for r in self.roots]))


def minimal_sigma_polynomial(T: StarHomomorphism, a: AlgebraElement,
                             cfg: ToleranceConfig | None = None) -> MinimalPolynomial:
    """Monic polynomial with one simple root per point of ``sigma_T(a)``."""
    cfg = cfg or ToleranceConfig()
    roots = tuple(sigma_T(T, a, cfg))
    qn = is_quasinilpotent(apply(T, polyval_roots(a, roots)), cfg)
    cert = Certificate("T_P_a_quasinilpotent", qn.spectral_radius, qn.bound)
    return MinimalPolynomial(roots, cert, qn.to_dict())


@dataclass(frozen=True)
class Partition:
    """Assignment of every point of ``sigma(a)`` to a root ``lambda_i`` of ``omega_T(a)``."""

    omega: tuple
    points: tuple
    labels: tuple

    def members(self, i: int) -> list[complex]:
        return [z for z, k in zip(self.points, self.labels) if k == i]

    def to_dict(self) -> dict:
        return {"omega": [[z.real, z.imag] for z in self.omega],
                "points": [[z.real, z.imag] for z in self.points],
                "labels": list(self.labels)}


def cluster_partition(sigma_A: SpectrumSet, omega: SpectrumSet) -> Partition:
    """Each point goes to the nearest ``omega`` point; ties go to the earlier one canonically."""
    if len(omega) == 0:
        raise EmptyOmega("omega_T(a) is empty")
    om = sorted(omega, key=canonical_key)
    tol = max(sigma_A.tol, omega.tol)
    labels = []
    for z in sigma_A:
        d = np.abs(np.array(om) - z)
        hit = np.nonzero(d <= tol)[0]
        if hit.size:
            labels.append(int(hit[np.argmin(d[hit])]))
            continue
        labels.append(int(np.nonzero(d <= d.min() + tol)[0][0]))
    return Partition(tuple(om), tuple(sigma_A), tuple(labels))


@dataclass(frozen=True)
class PolyRieszDecomposition:
    """``a = c + d + f``: ``c`` quasinilpotent, ``d`` in the kernel, ``sigma(f) = omega_T(a)``."""

    c: AlgebraElement
    d: AlgebraElement
    f: AlgebraElement
    poly: MinimalPolynomial
    partition: Partition
    cluster_projections: tuple
    certificates: tuple
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return _passed(self.certificates)

    def certificate(self, name: str) -> Certificate:
        return next(c for c in self.certificates if c.name == name)


def poly_riesz_decompose(T: StarHomomorphism, a: AlgebraElement,
                         cfg: ToleranceConfig | None = None) -> PolyRieszDecomposition:
    """Decompose any element; in finite dimension ``omega_T(a)`` is always finite.

    All points of ``sigma(a)`` are put in one flag: cluster by cluster in
    canonical order of their roots, and inside a cluster by decreasing
    distance to the root, with the root itself last.  With ``F_k`` the
    orthogonal steps of that flag, ``f = sum_i lambda_i Q_i`` (``Q_i`` the sum
    of the cluster's ``F_k``), ``d = sum_k (mu_k - lambda_i) F_k`` over the
    non-root points and ``c = a - d - f``, which is block strictly upper
    triangular in a basis adapted to the flag.
    """
    cfg = cfg or ToleranceConfig()
    spec = spectrum(a, cfg)
    omega = sigma_T(T, a, cfg).plain()
    part = cluster_partition(spec, omega)
    ker = kernel_support(T)
    ordered, coeffs, owner = [], [], []
    for i, lam in enumerate(part.omega):
        members = part.members(i)
        root = min(members, key=lambda z: abs(z - lam))
        rest = sorted((z for z in members if z != root), key=lambda z: canonical_key(z - lam))
        for z in rest:
            ordered.append([z])
            coeffs.append(z - lam)
            owner.append(i)
        ordered.append([root])
        coeffs.append(0j)
        owner.append(i)
    steps = nested_orthogonalize(a, ordered, cfg, spec)

    zero = AlgebraElement.zeros(a.shape)
    Q = [zero] * len(part.omega)
    R = [zero] * len(part.omega)
    d = zero
    for st, coef, i in zip(steps, coeffs, owner):
        Q[i] = Q[i] + st.E
        R[i] = R[i] + st.riesz.p
        if coef != 0:
            d = d + coef * st.E
    f = zero
    for lam, Qi in zip(part.omega, Q):
        f = f + lam * Qi
    c = a - d - f

    scale = max(1.0, a.norm())
    e = AlgebraElement.identity(a.shape)
    poly = minimal_sigma_polynomial(T, a, cfg)
    qn = is_quasinilpotent(c, cfg)
    spec_f = spectrum(f, cfg)
    live_leak = max([float(np.abs(d.blocks[i]).max()) for i in ker.live_blocks], default=0.0)
    rn = max(r.norm() for r in R)
    cross = max([(R[i] @ R[j]).norm() for i in range(len(R)) for j in range(len(R)) if i != j],
                default=0.0)
    certs = (
        Certificate("sum", (a - c - d - f).norm(), cfg.residual_tol * scale),
        Certificate("c_quasinilpotent", qn.spectral_radius, cfg.eig_cluster_tol * scale),
        Certificate("d_in_kernel", apply(T, d).norm(), cfg.residual_tol * scale),
        Certificate("d_support_exact", live_leak, cfg.residual_tol * scale),
        Certificate("spectrum_f_equals_omega",
                    0.0 if spec_f.same_points(omega, max(spec_f.tol, omega.tol)) else math.inf,
                    0.0),
        Certificate("cluster_projections_sum", (sum(R[1:], R[0]) - e).norm(),
                    cfg.projection_tol * max(1.0, rn)),
        Certificate("cluster_projections_orthogonal", cross, cfg.projection_tol * max(1.0, rn * rn)),
        poly.certificate,
    )
    dn = d.norm()
    diagnostics = {
        "d_normality_defect": normality_defect(d),
        "d_normality_bound": cfg.projection_tol * max(1.0, dn * dn),
        "c_quasinilpotency": qn.to_dict(),
    }
    return PolyRieszDecomposition(c, d, f, poly, part, tuple(Q), certs, diagnostics)


@dataclass(frozen=True)
class GeneralizedRieszDecomposition:
    """``a = d + c`` with ``d`` a normal kernel element and ``sigma(c) = Omega``."""

    d: AlgebraElement
    c: AlgebraElement
    omega: tuple
    certificates: tuple
    poly: PolyRieszDecomposition

    @property
    def passed(self) -> bool:
        return _passed(self.certificates)

    def certificate(self, name: str) -> Certificate:
        return next(c for c in self.certificates if c.name == name)


def generalized_riesz_decompose(T: StarHomomorphism, a: AlgebraElement,
                                cfg: ToleranceConfig | None = None) -> GeneralizedRieszDecomposition:
    cfg = cfg or ToleranceConfig()
    pr = poly_riesz_decompose(T, a, cfg)
    c = pr.c + pr.f
    omega = SpectrumSet([(z, 1) for z in pr.partition.omega], cfg.eig_cluster_tol * max(1.0, a.norm()))
    spec_c = spectrum(c, cfg)
    scale = max(1.0, a.norm())
    dn = pr.d.norm()
    # generalized T-Riesz: sigma_T = omega_T = beta_T finite (always here);
    # polynomially T-Riesz: the minimal polynomial certificate passes
    consistent = pr.poly.certificate.passed
    certs = (
        Certificate("sum", (a - c - pr.d).norm(), cfg.residual_tol * scale),
        Certificate("spectrum_c_equals_omega",
                    0.0 if spec_c.same_points(omega, max(spec_c.tol, omega.tol)) else math.inf, 0.0),
        Certificate("d_in_kernel", apply(T, pr.d).norm(), cfg.residual_tol * scale),
        Certificate("d_normal", normality_defect(pr.d), cfg.projection_tol * max(1.0, dn * dn)),
        Certificate("generalized_equals_polynomial", 0.0 if consistent else math.inf, 0.0),
    )
    return GeneralizedRieszDecomposition(pr.d, c, pr.partition.omega, certs, pr)
