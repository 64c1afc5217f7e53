"""Relative spectra of an element with respect to a homomorphism ``T``.

In finite dimension every spectrum is finite, so the Weyl, Browder and
almost-invertible spectra all collapse onto ``sigma_T(a) = sigma(Ta)``.
The collapse is not taken on faith: each returned set carries explicit
Browder witnesses at sampled points of its complement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cstar import AlgebraElement, SpectrumSet, is_invertible, spectrum
from .errors import NoWitness, SingularResolvent, TheoremHypothesisViolation, Unsupported
from .hom import StarHomomorphism, apply, kernel_support
from .numerics import Certificate, ToleranceConfig, solve

__all__ = [
    "BrowderWitness",
    "PointClassification",
    "WitnessedSpectrum",
    "almost_inv_spectrum",
    "beta_T",
    "boundary_and_hull",
    "browder_witness",
    "classify_point",
    "iso_acc_split",
    "omega_T",
    "sigma_T",
    "sigma_T_from_blocks",
]


def sigma_T(T: StarHomomorphism, a: AlgebraElement, cfg: ToleranceConfig | None = None) -> SpectrumSet:
    """``{lambda : lambda e - a is not T-Fredholm}``, i.e. the spectrum of ``T a``."""
    return spectrum(apply(T, a), cfg)


def sigma_T_from_blocks(T: StarHomomorphism, a: AlgebraElement,
                        cfg: ToleranceConfig | None = None) -> SpectrumSet:
    """Union of the spectra of the source blocks ``T`` does not kill."""
    live = kernel_support(T).live_blocks
    sub = AlgebraElement([a.blocks[i] for i in live])
    return spectrum(sub, cfg)


@dataclass(frozen=True)
class BrowderWitness:
    """``lambda e - a = c + d`` with ``c`` in the kernel, ``d`` invertible, ``cd = dc``."""

    lam: complex
    c: AlgebraElement
    d: AlgebraElement
    certificates: tuple

    @property
    def passed(self) -> bool:
        return all(cert.passed for cert in self.certificates)

    def certificate(self, name: str) -> Certificate:
        return next(c for c in self.certificates if c.name == name)


def browder_witness(T: StarHomomorphism, a: AlgebraElement, lam: complex,
                    cfg: ToleranceConfig | None = None) -> BrowderWitness:
    from .decomp import riesz_projection

    cfg = cfg or ToleranceConfig()
    lam = complex(lam)
    e = AlgebraElement.identity(a.shape)
    b = lam * e - a
    if not is_invertible(apply(T, b), cfg):
        raise NoWitness(f"lambda={lam:.6g} lies in sigma_T(a): T(lambda e - a) is singular")
    ker = kernel_support(T)
    sb = spectrum(b, cfg)
    zero = [z for z in sb if abs(z) <= cfg.eig_cluster_tol * max(1.0, b.norm())]
    if zero:
        P = riesz_projection(b, zero, cfg).p
        c = ker.project((b - e) @ P)
    else:
        c = AlgebraElement.zeros(a.shape)
    d = b - c
    return BrowderWitness(lam, c, d, witness_certificates(T, b, c, d, cfg))


def witness_certificates(T, b, c, d, cfg, tol=None):
    tol = cfg.residual_tol if tol is None else tol
    # a backward-stable inverse leaves a residual of order eps * cond(d); singular d raises
    cond = max(np.linalg.cond(x) for x in d.blocks)
    try:
        inv = AlgebraElement._trusted(d.shape, [solve(x, np.eye(x.shape[0]), cfg) for x in d.blocks])
        inv_res = (d @ inv - AlgebraElement.identity(d.shape)).norm()
    except SingularResolvent:
        inv_res = float("inf")
    return (
        Certificate("c_in_kernel", apply(T, c).norm(), tol * max(1.0, c.norm())),
        Certificate("d_invertible", inv_res, tol * max(1.0, cond)),
        Certificate("commute", (c @ d - d @ c).norm(), tol * max(1.0, c.norm() * d.norm())),
        Certificate("sum", (c + d - b).norm(), tol * max(1.0, b.norm())),
    )


class WitnessedSpectrum(SpectrumSet):
    """A point set plus Browder witnesses at sampled points outside it."""

    __slots__ = ("witnesses",)

    def __init__(self, base: SpectrumSet, witnesses):
        super().__init__(base.points, base.tol, base.radii)
        self.witnesses = tuple(witnesses)

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["witnesses"] = [
            {"lambda": [w.lam.real, w.lam.imag],
             "certificates": [c.to_dict() for c in w.certificates]}
            for w in self.witnesses]
        return out


def _sample_points(a, st, cfg, seed):
    """Points outside ``sigma_T``: first ``sigma(a) minus sigma_T``, then random ones."""
    rng = np.random.default_rng(seed)
    k = cfg.witness_samples
    sa = spectrum(a, cfg)
    pts = [z for z in sa if not st.contains(z)][:k]
    radius = 1.5 * max(1.0, a.norm())
    # random points keep a margin from sigma(a): near a defective eigenvalue the
    # resolvent is so large that no residual test is meaningful
    margin = max(10 * sa.tol, 0.02 * radius)
    while len(pts) < k:
        z = radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        if not sa.contains(z, margin):
            pts.append(complex(z))
    return pts


def _witnessed(T, a, cfg, seed) -> WitnessedSpectrum:
    cfg = cfg or ToleranceConfig()
    st = sigma_T(T, a, cfg)
    witnesses = []
    for z in _sample_points(a, st, cfg, seed):
        try:
            w = browder_witness(T, a, z, cfg)
        except NoWitness as exc:
            raise TheoremHypothesisViolation(f"no Browder witness at {z:.6g} outside sigma_T") from exc
        if not w.passed:
            bad = [c.name for c in w.certificates if not c.passed]
            raise TheoremHypothesisViolation(f"Browder witness at {z:.6g} fails {bad}")
        witnesses.append(w)
    return WitnessedSpectrum(st.plain(), witnesses)


def omega_T(T, a, cfg=None, seed: int = 0) -> WitnessedSpectrum:
    """T-Weyl spectrum (reported without multiplicities)."""
    return _witnessed(T, a, cfg, seed)


def beta_T(T, a, cfg=None, seed: int = 0) -> WitnessedSpectrum:
    """T-Browder spectrum, equal to ``sigma_T(a) | acc sigma(a)``."""
    return _witnessed(T, a, cfg, seed)


def almost_inv_spectrum(T, a, cfg=None, seed: int = 0) -> WitnessedSpectrum:
    """``sigma_T(a) | acc sigma(a)``; ``acc`` is empty for finite spectra."""
    base = _witnessed(T, a, cfg, seed)
    _, acc = iso_acc_split(spectrum(a, cfg))
    return WitnessedSpectrum(base.union(acc).plain(), base.witnesses)


def _as_finite(S) -> SpectrumSet:
    if isinstance(S, SpectrumSet):
        return S
    try:
        vals = [complex(z) for z in S]
    except TypeError:
        raise Unsupported("only finite point sets are supported") from None
    return SpectrumSet([(z, 1) for z in vals], 0.0)


def iso_acc_split(S) -> tuple[SpectrumSet, SpectrumSet]:
    """Isolated and accumulation points: a finite set is all isolated."""
    S = _as_finite(S)
    return S, SpectrumSet([], S.tol)


def boundary_and_hull(S) -> tuple[SpectrumSet, SpectrumSet]:
    """Topological boundary and connected hull; both are ``S`` when ``S`` is finite."""
    S = _as_finite(S)
    return S, S


@dataclass(frozen=True)
class PointClassification:
    lam: complex
    invertible: bool
    almost_invertible_T_fredholm: bool
    T_browder: bool
    T_weyl: bool
    T_fredholm: bool

    @property
    def chain_holds(self) -> bool:
        flags = [self.invertible, self.almost_invertible_T_fredholm, self.T_browder,
                 self.T_weyl, self.T_fredholm]
        return all(not x or y for x, y in zip(flags, flags[1:]))

    def to_dict(self) -> dict:
        return {"lambda": [self.lam.real, self.lam.imag], "invertible": self.invertible,
                "almost_invertible_T_fredholm": self.almost_invertible_T_fredholm,
                "T_browder": self.T_browder, "T_weyl": self.T_weyl, "T_fredholm": self.T_fredholm}


def classify_point(T, a, lam, cfg=None) -> PointClassification:
    cfg = cfg or ToleranceConfig()
    lam = complex(lam)
    b = lam * AlgebraElement.identity(a.shape) - a
    invertible = is_invertible(b, cfg)
    fredholm = is_invertible(apply(T, b), cfg)
    weyl = browder = False
    if fredholm:
        w = browder_witness(T, a, lam, cfg)
        certs = {c.name: c.passed for c in w.certificates}
        weyl = certs["c_in_kernel"] and certs["d_invertible"] and certs["sum"]
        browder = weyl and certs["commute"]
    _, acc = iso_acc_split(spectrum(a, cfg))
    almost = fredholm and not acc.contains(lam)
    out = PointClassification(lam, invertible, almost, browder, weyl, fredholm)
    if not out.chain_holds:
        raise TheoremHypothesisViolation(f"implication chain broken at {lam:.6g}: {out}")
    return out
