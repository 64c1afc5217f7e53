"""JSON scenarios in, certificate reports out.

A scenario fixes the algebras, the homomorphism, a set of named elements
and an ordered list of requests.  :func:`run` executes the requests one
after another and never lets a failing request stop the later ones; the
resulting :class:`Report` embeds the scenario and every computed component
so :func:`verify` can re-check the certificates offline.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .cstar import AlgebraElement, AlgebraShape, is_quasinilpotent, normality_defect, spectral_radius, spectrum
from .decomp import generalized_riesz_decompose, minimal_sigma_polynomial, poly_riesz_decompose, west_decompose
from .errors import InputError, TrieszError, nest_path
from .generators import KINDS, instance, parse_shape_spec
from .hom import (
    StarHomomorphism,
    apply,
    kernel_support,
    riesz_property_report,
    strong_riesz_property_check,
    verify_homomorphism_axioms,
)
from .numerics import Certificate, ToleranceConfig
from .spectra import almost_inv_spectrum, beta_T, browder_witness, classify_point, omega_T, sigma_T, witness_certificates

__all__ = [
    "OPS",
    "SCHEMA_VERSION",
    "Report",
    "Request",
    "Scenario",
    "emit",
    "generate",
    "parse_report",
    "parse_scenario",
    "run",
    "strip_timing",
    "verify",
]

SCHEMA_VERSION = 1

# op -> (needs an element, required parameters)
OPS = {
    "spectrum": (True, ()),
    "sigma_t": (True, ()),
    "omega_t": (True, ()),
    "beta_t": (True, ()),
    "almost_inv": (True, ()),
    "classify": (True, ("lambda",)),
    "riesz_check": (True, ()),
    "west": (True, ()),
    "poly_riesz": (True, ()),
    "generalized": (True, ()),
    "minimal_poly": (True, ()),
    "browder_witness": (True, ("lambda",)),
    "strong_riesz": (True, ()),
    "axioms": (False, ()),
    "riesz_property": (False, ()),
}
_PARAMS = {"lambda", "seed", "pairs", "samples"}

DEFAULT_REQUESTS = {
    "t_riesz": ["riesz_check", "sigma_t", "omega_t", "west"],
    "kernel_normal": ["riesz_check", "west", "generalized"],
    "poly_t_riesz": ["riesz_check", "minimal_poly", "poly_riesz", "generalized"],
    "generic": ["spectrum", "sigma_t", "omega_t", "poly_riesz"],
}


# --------------------------------------------------------------------------
# JSON helpers


def _jsonable(x):
    """Plain JSON data; complex as ``[re, im]``, non-finite floats as strings."""
    if isinstance(x, AlgebraElement):
        return [_jsonable(b) for b in x.blocks]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(float(x.real)), _jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def _number(v, path) -> float:
    if isinstance(v, str) and v in ("inf", "-inf", "nan"):
        return float(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"expected a number, got {v!r}", path=path)
    return float(v)


def _complex(v, path) -> complex:
    """``[re, im]``; a bare real number is accepted as shorthand."""
    if isinstance(v, list):
        if len(v) != 2:
            raise InputError(f"complex numbers are [re, im] pairs, got {len(v)} entries", path=path)
        return complex(_number(v[0], f"{path}[0]"), _number(v[1], f"{path}[1]"))
    return complex(_number(v, path))


def _matrix(v, path) -> np.ndarray:
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise InputError("a matrix is a non-empty list of rows", path=path)
    n = len(v)
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(v):
        if len(row) != n:
            raise InputError(f"row has {len(row)} entries, expected {n} (blocks are square)",
                             path=f"{path}[{i}]")
        for j, x in enumerate(row):
            out[i, j] = _complex(x, f"{path}[{i}][{j}]")
    return out


def _element(v, shape: AlgebraShape, path) -> AlgebraElement:
    if not isinstance(v, list):
        raise InputError("an element is a list of blocks", path=path)
    if len(v) != len(shape):
        raise InputError(f"{len(v)} blocks given, the source algebra has {len(shape)}", path=path)
    blocks = []
    for i, (b, n) in enumerate(zip(v, shape)):
        m = _matrix(b, f"{path}[{i}]")
        if m.shape[0] != n:
            raise InputError(f"block is {m.shape[0]}x{m.shape[0]}, expected {n}x{n}", path=f"{path}[{i}]")
        if not np.all(np.isfinite(m)):
            raise InputError("entries must be finite", path=f"{path}[{i}]")
        blocks.append(m)
    return AlgebraElement(blocks, shape)


def _int(v, path, minimum=None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"expected an integer, got {v!r}", path=path)
    if minimum is not None and v < minimum:
        raise InputError(f"must be >= {minimum}", path=path)
    return v


def _load_json(text, what):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON {what} at line {exc.lineno} column {exc.colno}: {exc.msg}",
                         path="$") from None


# --------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class Request:
    op: str
    element: str | None = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"op": self.op}
        if self.element is not None:
            out["element"] = self.element
        out.update(_jsonable(self.params))
        return out


@dataclass(frozen=True)
class Scenario:
    hom: StarHomomorphism
    elements: dict
    requests: tuple
    tolerances: dict = field(default_factory=dict)
    profile: str | None = None
    seed: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def source(self) -> AlgebraShape:
        return self.hom.source

    @property
    def target(self) -> AlgebraShape:
        return self.hom.target

    @property
    def cfg(self) -> ToleranceConfig:
        return ToleranceConfig.profile(self.profile).replace(**self.tolerances)

    def with_tolerances(self, **overrides) -> "Scenario":
        out = dataclasses.replace(self, tolerances={**self.tolerances, **overrides})
        _ = out.cfg  # fail here, not at run time
        return out

    def to_dict(self, effective_tolerances: bool = False) -> dict:
        hom = {"mult": [list(r) for r in self.hom.mult]}
        if self.hom.conjugators is not None:
            hom["conjugators"] = _jsonable(list(self.hom.conjugators))
        out = {
            "schema_version": SCHEMA_VERSION,
            "source": list(self.source.block_dims),
            "target": list(self.target.block_dims),
            "homomorphism": hom,
            "elements": {k: _jsonable(v) for k, v in self.elements.items()},
            "requests": [r.to_dict() for r in self.requests],
            "tolerances": self.cfg.to_dict() if effective_tolerances else dict(self.tolerances),
            "seed": self.seed,
        }
        if self.profile is not None and not effective_tolerances:
            out["profile"] = self.profile
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


_TOP_KEYS = {"schema_version", "source", "target", "homomorphism", "elements", "requests",
             "tolerances", "profile", "seed", "metadata"}


def _parse_tolerances(v) -> dict:
    if not isinstance(v, dict):
        raise InputError("expected an object of name: value", path="tolerances")
    fields = {f.name: f.type for f in dataclasses.fields(ToleranceConfig)}
    out = {}
    for name, value in v.items():
        if name not in fields:
            raise InputError(f"unknown tolerance {name!r}; known: {sorted(fields)}", path="tolerances")
        path = f"tolerances.{name}"
        out[name] = _int(value, path) if fields[name] == "int" else _number(value, path)
    return out


def _parse_request(v, i, names) -> Request:
    path = f"requests[{i}]"
    if isinstance(v, str):
        v = {"op": v}
    if not isinstance(v, dict) or "op" not in v:
        raise InputError("a request is an op name or an object with an 'op' field", path=path)
    op = v["op"]
    if op not in OPS:
        raise InputError(f"unknown op {op!r}; expected one of {sorted(OPS)}", path=f"{path}.op")
    needs_element, required = OPS[op]
    unknown = set(v) - _PARAMS - {"op", "element"}
    if unknown:
        raise InputError(f"unknown field {sorted(unknown)[0]!r}", path=path)
    element = v.get("element")
    if needs_element:
        if element is None and len(names) == 1:
            element = names[0]
        if element is None:
            raise InputError("request needs an 'element'", path=path)
        if element not in names:
            raise InputError(f"undefined element {element!r}", path=f"{path}.element")
    elif element is not None:
        raise InputError(f"op {op!r} takes no element", path=f"{path}.element")
    params = {}
    for name in required:
        if name not in v:
            raise InputError(f"op {op!r} needs {name!r}", path=path)
    if "lambda" in v:
        params["lambda"] = _complex(v["lambda"], f"{path}.lambda")
    for name, minimum in (("seed", 0), ("pairs", 1), ("samples", 1)):
        if name in v:
            params[name] = _int(v[name], f"{path}.{name}", minimum)
    return Request(op, element, params)


def scenario_from_dict(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise InputError("a scenario is a JSON object", path="$")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise InputError(f"unknown field {sorted(unknown)[0]!r}", path="$")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InputError(f"unsupported schema_version {version!r}; this build reads {SCHEMA_VERSION}",
                         path="schema_version")
    for key in ("source", "homomorphism", "elements", "requests"):
        if key not in doc:
            raise InputError("missing required field", path=key)
    try:
        source = AlgebraShape(doc["source"]) if isinstance(doc["source"], list) else None
    except InputError as exc:
        raise nest_path("source", exc) from None
    if source is None:
        raise InputError("expected a list of block sizes", path="source")

    hom = doc["homomorphism"]
    if hom == "identity":
        hom = {"mult": np.eye(len(source), dtype=int).tolist()}
    if not isinstance(hom, dict) or "mult" not in hom:
        raise InputError("expected \"identity\" or an object with 'mult'", path="homomorphism")
    tdoc = doc.get("target", list(source.block_dims) if doc["homomorphism"] == "identity" else None)
    if tdoc is None:
        raise InputError("missing required field", path="target")
    if not isinstance(tdoc, list):
        raise InputError("expected a list of block sizes", path="target")
    try:
        target = AlgebraShape(tdoc)
    except InputError as exc:
        raise nest_path("target", exc) from None
    conj = hom.get("conjugators")
    if conj is not None:
        if not isinstance(conj, list):
            raise InputError("expected a list of matrices", path="homomorphism.conjugators")
        conj = [_matrix(U, f"homomorphism.conjugators[{j}]") for j, U in enumerate(conj)]
    profile = doc.get("profile")
    if profile is not None and not isinstance(profile, str):
        raise InputError("expected a profile name", path="profile")
    tolerances = _parse_tolerances(doc.get("tolerances", {}))
    try:
        base = ToleranceConfig.profile(profile)
    except InputError as exc:
        raise InputError(exc.detail, path="profile" if profile else exc.path) from None
    try:
        cfg = base.replace(**tolerances)
    except InputError as exc:
        raise nest_path("tolerances", exc) from None
    try:
        T = StarHomomorphism(source, target, hom["mult"], conj, cfg=cfg)
    except InputError as exc:
        raise nest_path("homomorphism", exc) from None

    if not isinstance(doc["elements"], dict) or not doc["elements"]:
        raise InputError("expected a non-empty object of name: blocks", path="elements")
    elements = {str(k): _element(v, source, f"elements.{k}") for k, v in doc["elements"].items()}
    if not isinstance(doc["requests"], list):
        raise InputError("expected a list", path="requests")
    names = list(elements)
    requests = tuple(_parse_request(r, i, names) for i, r in enumerate(doc["requests"]))
    seed = _int(doc.get("seed", 0), "seed", 0)
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise InputError("expected an object", path="metadata")
    return Scenario(T, elements, requests, tolerances, profile, seed, metadata)


def parse_scenario(text) -> Scenario:
    """Parse and validate a UTF-8 JSON scenario document."""
    return scenario_from_dict(_load_json(text, "scenario"))


# --------------------------------------------------------------------------
# running requests


def _flatten(prefix, certs):
    return [Certificate(f"{prefix}.{c.name}", c.residual, c.bound) for c in certs]


def _witnessed(ws):
    certs = [c for k, w in enumerate(ws.witnesses) for c in _flatten(f"witness[{k}]", w.certificates)]
    return {"spectrum": ws.to_dict()}, certs


def _op(sc: Scenario, req: Request, cfg: ToleranceConfig):
    T = sc.hom
    a = sc.elements.get(req.element)
    p = req.params
    seed = p.get("seed", sc.seed)
    op = req.op
    if op == "spectrum":
        return {"spectrum": spectrum(a, cfg).to_dict()}, []
    if op == "sigma_t":
        return {"spectrum": sigma_T(T, a, cfg).to_dict()}, []
    if op == "omega_t":
        return _witnessed(omega_T(T, a, cfg, seed))
    if op == "beta_t":
        return _witnessed(beta_T(T, a, cfg, seed))
    if op == "almost_inv":
        return _witnessed(almost_inv_spectrum(T, a, cfg, seed))
    if op == "classify":
        pc = classify_point(T, a, p["lambda"], cfg)
        return {**pc.to_dict(), "chain_holds": pc.chain_holds}, []
    if op == "riesz_check":
        qn = is_quasinilpotent(apply(T, a), cfg)
        return {"t_riesz": bool(qn), "quasinilpotency": qn.to_dict()}, []
    if op == "west":
        w = west_decompose(T, a, cfg)
        return {"c": w.c, "d": w.d, "eigenvalues": list(w.eigenvalues),
                "quasinilpotency": w.quasinilpotency}, list(w.certificates)
    if op == "poly_riesz":
        r = poly_riesz_decompose(T, a, cfg)
        return {"c": r.c, "d": r.d, "f": r.f, "omega": list(r.partition.omega),
                "partition": r.partition.to_dict(), "poly_roots": list(r.poly.roots),
                "diagnostics": r.diagnostics}, list(r.certificates)
    if op == "generalized":
        g = generalized_riesz_decompose(T, a, cfg)
        return {"c": g.c, "d": g.d, "omega": list(g.omega)}, list(g.certificates)
    if op == "minimal_poly":
        mp = minimal_sigma_polynomial(T, a, cfg)
        return {"roots": list(mp.roots), "degree": mp.degree,
                "quasinilpotency": mp.quasinilpotency}, [mp.certificate]
    if op == "browder_witness":
        w = browder_witness(T, a, p["lambda"], cfg)
        return {"lambda": w.lam, "c": w.c, "d": w.d}, list(w.certificates)
    if op == "strong_riesz":
        s = strong_riesz_property_check(T, a, cfg)
        return s.to_dict(), [Certificate("boundary_in_sigma_T_or_isolated", 0.0 if s.holds else math.inf, 0.0)]
    if op == "axioms":
        rep = verify_homomorphism_axioms(T, seed, p.get("pairs", 100), cfg)
        return rep.to_dict(), [Certificate(k, v, 1.0) for k, v in rep.max_ratios.items()]
    if op == "riesz_property":
        rp = riesz_property_report(T, p.get("samples", 100), seed, cfg)
        return rp.to_dict(), [Certificate("kernel_spectra_accumulate_only_at_0",
                                          0.0 if rp.holds else math.inf, 0.0)]
    raise InputError(f"unknown op {op!r}", path="op")  # pragma: no cover - parse rejects these


@dataclass
class Report:
    scenario: dict
    results: list
    elapsed: float = 0.0

    @property
    def exit_code(self) -> int:
        code = 0
        for r in self.results:
            if r["status"] == "fail":
                code = max(code, 1)
            elif r["status"] == "error":
                code = max(code, r["error"]["exit_code"])
        return code

    @property
    def summary(self) -> dict:
        count = {s: sum(r["status"] == s for r in self.results) for s in ("pass", "fail", "error")}
        return {"requests": len(self.results), **count, "exit_code": self.exit_code}

    def to_dict(self, timing: bool = True) -> dict:
        results = [r if timing else {k: v for k, v in r.items() if k != "timing"} for r in self.results]
        out = {"schema_version": SCHEMA_VERSION, "generator": f"triesz {__version__}",
               "scenario": self.scenario, "results": results, "summary": self.summary}
        if timing:
            out["timing"] = {"total_seconds": self.elapsed}
        return out


def run(sc: Scenario) -> Report:
    """Execute every request in order; failures are recorded, never raised."""
    cfg = sc.cfg
    results = []
    start = time.perf_counter()
    for i, req in enumerate(sc.requests):
        t0 = time.perf_counter()
        entry = {"index": i, "op": req.op, "element": req.element, "params": _jsonable(req.params)}
        try:
            payload, certs = _op(sc, req, cfg)
            entry["status"] = "pass" if all(c.passed for c in certs) else "fail"
            entry["result"] = _jsonable(payload)
            entry["certificates"] = [_jsonable(c.to_dict()) for c in certs]
            entry["error"] = None
        except TrieszError as exc:
            entry.update(status="error", result=None, certificates=[],
                         error={"type": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code})
        except Exception as exc:  # internal: report it, keep going
            entry.update(status="error", result=None, certificates=[],
                         error={"type": type(exc).__name__, "message": str(exc), "exit_code": 3})
        entry["timing"] = {"seconds": time.perf_counter() - t0}
        results.append(entry)
    return Report(sc.to_dict(effective_tolerances=True), results, time.perf_counter() - start)


def strip_timing(doc: dict) -> dict:
    """A report dictionary without any timing fields."""
    out = {k: v for k, v in doc.items() if k != "timing"}
    out["results"] = [{k: v for k, v in r.items() if k != "timing"} for r in doc.get("results", [])]
    return out


def _fmt_z(z) -> str:
    z = complex(z)
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _text(doc: dict) -> str:
    sc = doc["scenario"]
    lines = [f"{doc['generator']}  schema {doc['schema_version']}",
             f"source {tuple(sc['source'])} -> target {tuple(sc['target'])}, "
             f"{len(sc['elements'])} element(s), {len(sc['requests'])} request(s)", ""]
    for r in doc["results"]:
        head = f"[{r['index']}] {r['op']}" + (f"({r['element']})" if r["element"] else "")
        lam = r["params"].get("lambda")
        if lam is not None:
            head += f" at {_fmt_z(complex(*lam))}"
        lines.append(f"{head:<40} {r['status'].upper()}")
        if r["error"]:
            lines.append(f"    {r['error']['type']}: {r['error']['message']}")
            continue
        res = r["result"]
        spec = res.get("spectrum") if isinstance(res.get("spectrum"), dict) else None
        if spec is not None:
            pts = ", ".join(_fmt_z(complex(*z)) + (f" (x{m})" if m > 1 else "")
                            for z, m in zip(spec["points"], spec["multiplicities"]))
            lines.append(f"    points: {{{pts}}}")
        for key in ("t_riesz", "omega", "roots", "eigenvalues"):
            if key in res:
                val = res[key]
                if isinstance(val, list):
                    val = "{" + ", ".join(_fmt_z(complex(*z)) for z in val) + "}"
                lines.append(f"    {key}: {val}")
        if "invertible" in res:
            flags = ("invertible", "almost_invertible_T_fredholm", "T_browder", "T_weyl", "T_fredholm")
            lines.append("    " + "  ".join(f"{k}={res[k]}" for k in flags))
        certs = r["certificates"]
        if len(certs) > 8:  # witness lists: only what failed, plus a count
            bad = [c for c in certs if not c["passed"]]
            lines.append(f"    {len(certs) - len(bad)}/{len(certs)} certificates ok")
            certs = bad
        for c in certs:
            mark = "ok" if c["passed"] else "FAILED"
            lines.append(f"    {c['name']:<36} {_number(c['residual'], 'r'):10.3e} <= "
                         f"{_number(c['bound'], 'b'):10.3e}  {mark}")
    s = doc["summary"]
    lines += ["", f"{s['pass']} pass, {s['fail']} fail, {s['error']} error; exit {s['exit_code']}"]
    return "\n".join(lines) + "\n"


def emit(report: Report, fmt: str = "json", timing: bool = True) -> str:
    doc = report.to_dict(timing=timing)
    if fmt == "json":
        return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    if fmt == "text":
        return _text(doc)
    raise InputError(f"unknown format {fmt!r}; expected json or text", path="format")


# --------------------------------------------------------------------------
# offline verification


def parse_report(text) -> dict:
    doc = _load_json(text, "report")
    if not isinstance(doc, dict) or not {"scenario", "results"} <= set(doc):
        raise InputError("a report has 'scenario' and 'results'", path="$")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InputError(f"unsupported schema_version {doc.get('schema_version')!r}", path="schema_version")
    return doc


@dataclass
class VerifyResult:
    checked: int = 0
    problems: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 1 if self.problems else 0


def _recheck(kind, T, a, res, cfg, path):
    """Certificates recomputed from the embedded components of one result."""
    shape = a.shape
    comp = {k: _element(res[k], shape, f"{path}.result.{k}") for k in ("c", "d", "f") if k in res}
    scale = max(1.0, a.norm())
    c, d = comp["c"], comp["d"]
    if kind == "browder_witness":
        lam = _complex(res["lambda"], f"{path}.result.lambda")
        b = lam * AlgebraElement.identity(shape) - a
        return list(witness_certificates(T, b, c, d, cfg))
    f = comp.get("f", AlgebraElement.zeros(shape))
    dn = d.norm()
    out = [Certificate("sum", (a - c - d - f).norm(), cfg.residual_tol * scale),
           Certificate("d_in_kernel", apply(T, d).norm(), cfg.residual_tol * scale)]
    if kind in ("west", "generalized"):
        out.append(Certificate("d_normal", normality_defect(d), cfg.projection_tol * max(1.0, dn * dn)))
    if kind in ("west", "poly_riesz"):
        out.append(Certificate("c_quasinilpotent", spectral_radius(c, cfg), cfg.eig_cluster_tol * scale))
    if kind == "poly_riesz":
        live = kernel_support(T).live_blocks
        leak = max([float(np.abs(d.blocks[i]).max()) for i in live], default=0.0)
        out.append(Certificate("d_support_exact", leak, cfg.residual_tol * scale))
    return out


def verify(doc: dict) -> VerifyResult:
    """Re-check a report's certificates; decompositions are not recomputed.

    Every stored certificate must be internally consistent and passing, and
    the algebraic certificates of each decomposition are recomputed from
    the embedded components against the embedded scenario.
    """
    try:
        sc = scenario_from_dict(doc["scenario"])
    except InputError as exc:
        raise nest_path("scenario", exc) from None
    cfg = sc.cfg
    out = VerifyResult()
    for k, r in enumerate(doc["results"]):
        path = f"results[{k}]"
        if r.get("status") == "error":
            out.problems.append(f"{path} ({r.get('op')}): recorded error {r['error']['type']}")
            continue
        certs = r.get("certificates", [])
        for c in certs:
            res, bound = _number(c["residual"], f"{path}.residual"), _number(c["bound"], f"{path}.bound")
            out.checked += 1
            if bool(res <= bound) != bool(c["passed"]):
                out.problems.append(f"{path} ({r['op']}): certificate {c['name']} says passed={c['passed']} "
                                    f"but residual {res:.3e} vs bound {bound:.3e}")
            elif not c["passed"]:
                out.problems.append(f"{path} ({r['op']}): certificate {c['name']} failed "
                                    f"({res:.3e} > {bound:.3e})")
        status = "pass" if all(c["passed"] for c in certs) else "fail"
        if r.get("status") != status:
            out.problems.append(f"{path} ({r['op']}): status {r.get('status')!r} should be {status!r}")
        if r["op"] in ("west", "poly_riesz", "generalized", "browder_witness"):
            a = sc.elements[r["element"]]
            for c in _recheck(r["op"], sc.hom, a, r["result"], cfg, path):
                out.checked += 1
                if not c.passed:
                    out.problems.append(f"{path} ({r['op']}): recomputed {c.name} fails "
                                        f"({c.residual:.3e} > {c.bound:.3e})")
    return out


# --------------------------------------------------------------------------
# generation


def generate(kind: str, shape_spec: str, seed: int, requests=None) -> Scenario:
    """Seeded random scenario; ``metadata.ground_truth`` labels what holds by construction."""
    if kind not in KINDS:
        raise InputError(f"unknown kind {kind!r}; expected one of {list(KINDS)}", path="kind")
    source, target, mult = parse_shape_spec(shape_spec)
    T, a, truth = instance(kind, source, target, mult, seed, conjugate=True)
    reqs = tuple(Request(op, "a" if OPS[op][0] else None) for op in (requests or DEFAULT_REQUESTS[kind]))
    meta = {"generator": {"kind": kind, "spec": shape_spec, "seed": seed}, "ground_truth": truth}
    return Scenario(T, {"a": a}, reqs, {}, None, seed, meta)
