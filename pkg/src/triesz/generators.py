"""Seeded random instances: unitaries, nilpotents, homomorphisms and element families.

Every family keeps distinct spectral points at least ``min_gap`` apart
(and away from zero where zero is special), redrawing otherwise, so the
contours used downstream always have room.
"""

from __future__ import annotations

import itertools

import numpy as np

from .cstar import AlgebraElement, AlgebraShape
from .errors import GenerationError
from .hom import StarHomomorphism, kernel_support

__all__ = [
    "KINDS",
    "canonical_mult",
    "random_element",
    "random_homomorphism",
    "random_matrix",
    "random_nilpotent",
    "random_unitary",
    "instance",
    "parse_shape_spec",
]

KINDS = ("t_riesz", "poly_t_riesz", "kernel_normal", "generic")
MAX_TRIES = 200


def random_matrix(n, rng):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def random_unitary(n, rng):
    q, r = np.linalg.qr(random_matrix(n, rng))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_nilpotent(n, rng):
    U = random_unitary(n, rng)
    return U @ np.triu(random_matrix(n, rng), 1) @ U.conj().T


def _triangular_with(diag, rng, coupling=1.0):
    n = len(diag)
    U = random_unitary(n, rng)
    T = np.diag(np.asarray(diag, dtype=complex)) + coupling * np.triu(random_matrix(n, rng), 1)
    return U @ T @ U.conj().T


def _separated(values, min_gap, avoid=()):
    pts = list(values) + list(avoid)
    for x, y in itertools.combinations(range(len(pts)), 2):
        if x < len(values) and abs(pts[x] - pts[y]) < min_gap:
            return False
    return True


def canonical_mult(source, target):
    """Multiplicity matrix meeting unitality with the fewest copies per target block.

    Ties prefer earlier source blocks.
    """
    source = tuple(source)
    rows = []
    for j, N in enumerate(target):
        best = None
        ranges = [range(N // n + 1) for n in source]
        for m in itertools.product(*ranges):
            if sum(k * n for k, n in zip(m, source)) != N:
                continue
            key = (sum(m), [-k for k in m])
            if best is None or key < best[0]:
                best = (key, m)
        if best is None:
            raise GenerationError(f"no unital embedding of {source} into a block of size {N}",
                                  path=f"target[{j}]")
        rows.append(list(best[1]))
    return rows


def parse_shape_spec(text: str):
    """``"4,3->4"`` or ``"2,1->2,3:1,0;1,1"`` into ``(source, target, mult)``."""
    try:
        shapes, _, mult_txt = text.partition(":")
        src_txt, tgt_txt = shapes.split("->")
        source = [int(x) for x in src_txt.split(",")]
        target = [int(x) for x in tgt_txt.split(",")]
        mult = [[int(x) for x in row.split(",")] for row in mult_txt.split(";")] if mult_txt else None
    except ValueError:
        raise GenerationError(f"cannot parse shape spec {text!r}; expected e.g. '4,3->4' "
                              f"or '2,1->2,3:1,0;1,1'", path="spec") from None
    if mult is None:
        mult = canonical_mult(source, target)
    return AlgebraShape(source), AlgebraShape(target), mult


def random_homomorphism(rng, max_blocks=4, max_dim=6, kernel_prob=0.4, conjugate=True):
    """Random unital *-homomorphism with at least one block not in the kernel."""
    k = int(rng.integers(1, max_blocks + 1))
    source = [int(rng.integers(1, max_dim + 1)) for _ in range(k)]
    live = [i for i in range(k) if rng.uniform() >= kernel_prob] or [int(rng.integers(k))]
    n_target = int(rng.integers(1, 3))
    mult = np.zeros((n_target, k), dtype=int)
    for i in live:
        mult[int(rng.integers(n_target)), i] = int(rng.integers(1, 3))
    mult = mult[mult.any(axis=1)]
    target = [int(row @ np.array(source)) for row in mult]
    conj = [random_unitary(N, rng) for N in target] if conjugate else None
    return StarHomomorphism(source, target, mult, conj)


def random_element(T: StarHomomorphism, kind: str, rng, *, min_gap=0.05, roots=None):
    """Element of ``T.source`` from one of the families in :data:`KINDS`.

    ``t_riesz``: blocks outside the kernel are unitary conjugates of
    strictly upper triangular matrices, kernel blocks are arbitrary.
    ``poly_t_riesz``: blocks outside the kernel are upper triangular (up to
    unitary conjugation) with diagonal drawn from ``roots``.
    ``kernel_normal``: normal, supported on the kernel blocks.
    ``generic``: every block arbitrary.
    """
    ker = kernel_support(T)
    shape = T.source
    if kind == "kernel_normal" and not ker.zero_blocks:
        raise GenerationError("kernel_normal needs at least one source block in the kernel of T",
                              path="spec")
    if kind not in KINDS:
        raise GenerationError(f"unknown kind {kind!r}; expected one of {KINDS}", path="kind")
    if kind == "poly_t_riesz" and roots is None:
        roots = _draw_roots(rng, int(rng.integers(1, 4)))
    for _ in range(MAX_TRIES):
        blocks, free, used = [], [], set()
        for i, n in enumerate(shape):
            if i in ker.zero_blocks:
                if kind == "kernel_normal":
                    U = random_unitary(n, rng)
                    blocks.append(U @ np.diag(2 * random_matrix(n, rng)[0]) @ U.conj().T)
                else:
                    blocks.append(2 * random_matrix(n, rng))
                free.append(i)
            elif kind == "t_riesz":
                blocks.append(random_nilpotent(n, rng))
            elif kind == "poly_t_riesz":
                diag = [roots[k] for k in rng.integers(len(roots), size=n)]
                used.update(diag)
                blocks.append(_triangular_with(diag, rng))
            elif kind == "kernel_normal":
                blocks.append(np.zeros((n, n), dtype=complex))
            else:
                blocks.append(2 * random_matrix(n, rng))
                free.append(i)
        eigs = [z for i in free for z in np.linalg.eigvals(blocks[i])]
        avoid = list(roots) if kind == "poly_t_riesz" else [0j] if kind != "generic" else []
        if _separated(eigs, min_gap, avoid):
            return AlgebraElement(blocks, shape), (sorted(used, key=lambda z: (z.real, z.imag))
                                                   if kind == "poly_t_riesz" else None)
    raise GenerationError(f"could not draw a {kind} element with spectral gap {min_gap}")


def _draw_roots(rng, k, min_gap=0.5, radius=2.0):
    for _ in range(MAX_TRIES):
        r = radius * np.sqrt(rng.uniform(size=k)) * np.exp(2j * np.pi * rng.uniform(size=k))
        if _separated(list(r), min_gap):
            return [complex(z) for z in r]
    raise GenerationError("could not draw separated roots")


def instance(kind: str, source, target, mult, seed: int, conjugate: bool = False):
    """Deterministic ``(T, a, ground_truth)`` for a kind and shape."""
    rng = np.random.default_rng(seed)
    conj = [random_unitary(N, rng) for N in target] if conjugate else None
    T = StarHomomorphism(source, target, mult, conj)
    a, roots = random_element(T, kind, rng)
    truth = {
        "kind": kind,
        "t_riesz": kind in ("t_riesz", "kernel_normal"),
        "kernel_supported": kind == "kernel_normal",
        "normal": kind == "kernel_normal",
        "poly_t_riesz": True,
    }
    if roots is not None:
        truth["sigma_T"] = [[z.real, z.imag] for z in roots]
    return T, a, truth
