"""Batch workbench: load a JSON fixture, run a suite, emit a report.

Fixture schema (UTF-8 JSON; every section is optional)::

    {
      "pcas": {"A": {"backend": "sk", "atoms": ["o1"], "filter": "pure"}},
      "assemblies": {"X": {"pca": "A", "points": [{"point": "x", "realizers": ["k"]}]}},
      "morphisms": {"f": {"source": "X", "target": "Y", "map": [["x", "y"]],
                          "tracker": ["s k k"], "certificate": {...}}},
      "members": [{"name": "m", "pca": "A", "set": ["k"], "certificate": {...}}],
      "adjunctions": [{"assembly": "X", "points": ["a", "b"]}],
      "slices": [{"name": "S", "pca": "A", "over": {"kind": "nabla", "n": 2},
                  "battery": {"pool": ["k", "s"], "max_size": 2}, "expect": "diagonal",
                  "objects": [{"assembly": "X", "map": [["x", 0]]}]}],
      "products": [{"pca": "A", "left": "X", "right": "Y", "test": "Z"}],
      "density": [{"name": "d", "pca": "A", "kind": "pullback", "index": [0, 1],
                   "convert": true, "adjoint": {"X": {...}, "Y": {...}},
                   "dense_pool": ["k", "s"]}]
    }

Realizer sets are lists of element strings (read by the backend) or ``"A"``
for the whole carrier; sets over an index are lists of such parts. Points
written as JSON lists become tuples. ``over`` is an assembly name or one of
``{"kind": "one"}``, ``{"kind": "one_plus_one"}``, ``{"kind": "nabla", "n": n}``.

A certificates file, written by ``synthesize --out`` and read by ``replay``,
is ``{"certificates": [{"name", "pca", "set", "certificate", "verdict"}]}``.

Exit status: 0 when nothing is Refuted and every replay matches, 1 otherwise,
2 for usage, parse and reference errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

from . import density as D
from . import fixtures
from . import terms as T
from .assemblies import (
    Assembly,
    adjunction_bijection,
    all_functions,
    assembly_from_json,
    check_morphism,
    product,
    product_universal,
)
from .morphisms import identity
from .outcome import Verdict, conjoin
from .pca import (
    Budget,
    FilterCertificate,
    MalformedCertificate,
    Pca,
    axiom_suite,
    cert_from_json,
    cert_to_json,
    filter_member,
    make_backend,
    verify_kit,
)
from .realizers import FULL, Family, RealizerSet, parts_of
from .slicing import (
    SlicePca,
    battery,
    filter_battery,
    nabla_points,
    one_plus_one,
    one_point,
    over,
    slice_equivalence,
    slice_pca,
)

COMMANDS = ("check", "synthesize", "slice", "product", "density", "replay")
KINDS = ("Proven", "Evidence", "Refuted", "Unknown")


class ParseError(ValueError):
    """A malformed fixture, with the position of the problem."""

    def __init__(self, position: str, message: str):
        super().__init__(f"{position}: {message}")
        self.position = position
        self.message = message


class UnresolvedReference(KeyError):
    def __init__(self, position: str, name: str):
        super().__init__(f"{position}: unknown name {name!r}")
        self.position = position
        self.name = name

    def __str__(self) -> str:
        return self.args[0]


# --- loading -------------------------------------------------------------------


def _need(obj: Any, key: str, path: str) -> Any:
    if not isinstance(obj, Mapping) or key not in obj:
        raise ParseError(path, f"missing field {key!r}")
    return obj[key]


def _point(x: Any) -> Any:
    return tuple(_point(v) for v in x) if isinstance(x, list) else x


def _pairs(data: Any, path: str) -> dict:
    if isinstance(data, Mapping):
        return {_point(k): _point(v) for k, v in data.items()}
    if isinstance(data, list) and all(isinstance(p, list) and len(p) == 2 for p in data):
        return {_point(a): _point(b) for a, b in data}
    raise ParseError(path, "a map is an object or a list of [point, image] pairs")


def read_set(data: Any, pca: Pca, path: str) -> Any:
    """A realizer set (or family) from its JSON form."""

    def part(d: Any, i: int, p: str) -> RealizerSet:
        pas = pca.fibers[i]
        if d == "A":
            return RealizerSet.full(pas.const(T.K))
        if not isinstance(d, list) or not d or not all(isinstance(e, str) for e in d):
            raise ParseError(p, "a realizer set is \"A\" or a nonempty list of elements")
        try:
            return RealizerSet.of(pas.read(e) for e in d)
        except (ValueError, T.ParseError) as exc:
            raise ParseError(p, str(exc)) from exc

    if not pca.indexed:
        return part(data, 0, path)
    if not isinstance(data, list) or len(data) != len(pca.fibers):
        raise ParseError(path, f"expected {len(pca.fibers)} parts")
    return Family(tuple(part(d, i, f"{path}/{i}") for i, d in enumerate(data)))


def set_to_json(u: Any, pca: Pca) -> Any:
    def part(p: RealizerSet, i: int) -> Any:
        if p.kind == FULL:
            return "A"
        shown = [pca.fibers[i].show(e) for e in p.elements]
        return shown if p.is_finite else {"kind": p.kind, "observed": shown}

    if isinstance(u, Family):
        return [part(p, i) for i, p in enumerate(u.parts)]
    return part(u, 0)


@dataclass
class Workspace:
    """Everything a fixture declares, resolved against a budget."""

    path: str
    data: dict
    budget: Budget
    pcas: dict = field(default_factory=dict)
    assemblies: dict = field(default_factory=dict)
    owners: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    slices: dict = field(default_factory=dict)

    def pca(self, name: Any, path: str) -> Pca:
        if name in self.pcas:
            return self.pcas[name]
        if name in self.slices:
            return self.slices[name].pca
        raise UnresolvedReference(path, str(name))

    def assembly(self, name: Any, path: str) -> Assembly:
        if name not in self.assemblies:
            raise UnresolvedReference(path, str(name))
        return self.assemblies[name]


def _build_pca(spec: Any, budget: Budget, path: str) -> Pca:
    kind = _need(spec, "backend", path)
    opts: dict = {"budget": budget}
    if kind == "sk":
        opts["atoms"] = tuple(spec.get("atoms", ()))
        if "filter" in spec:
            if spec["filter"] not in ("pure", "maximal"):
                raise ParseError(f"{path}/filter", "filter is \"pure\" or \"maximal\"")
            opts["filter"] = spec["filter"]
        opts["fuel"] = int(spec.get("fuel", budget.fuel))
    elif kind == "graph":
        opts["level"] = int(spec.get("level", 8))
    elif kind != "trivial":
        raise ParseError(f"{path}/backend", f"unknown backend {kind!r}")
    return make_backend(kind, **opts)


def _read_assembly(spec: Any, pca: Pca, name: str, path: str) -> Assembly:
    points = _need(spec, "points", path)
    if not isinstance(points, list) or not points:
        raise ParseError(f"{path}/points", "points is a nonempty list")
    for j, entry in enumerate(points):
        q = f"{path}/points/{j}"
        _need(entry, "point", q)
        r = _need(entry, "realizers", q)
        i = entry.get("index", 0)
        if not isinstance(i, int) or not 0 <= i < len(pca.fibers):
            raise ParseError(f"{q}/index", f"index out of range for {pca.name}")
        if r != "A" and not (isinstance(r, list) and r and all(isinstance(e, str) for e in r)):
            raise ParseError(f"{q}/realizers", "realizers is \"A\" or a nonempty list of elements")
        for k, e in enumerate(r if r != "A" else ()):
            try:
                pca.fibers[i].read(e)
            except (ValueError, T.ParseError) as exc:
                raise ParseError(f"{q}/realizers/{k}", str(exc)) from exc
    return assembly_from_json({"name": spec.get("name", name), "points": points}, pca)


def load(path: str | Path, budget: Budget) -> Workspace:
    """Parse and resolve a fixture file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    if not isinstance(data, dict):
        raise ParseError("/", "a fixture is a JSON object")
    ws = Workspace(str(path), data, budget)
    for name, spec in data.get("pcas", {}).items():
        ws.pcas[name] = _build_pca(spec, budget, f"/pcas/{name}")
    for name, spec in data.get("assemblies", {}).items():
        p = f"/assemblies/{name}"
        pca = ws.pca(_need(spec, "pca", p), f"{p}/pca")
        ws.assemblies[name] = _read_assembly(spec, pca, name, p)
        ws.owners[name] = spec["pca"]
    for name, spec in data.get("morphisms", {}).items():
        p = f"/morphisms/{name}"
        src = ws.assembly(_need(spec, "source", p), f"{p}/source")
        tgt = ws.assembly(_need(spec, "target", p), f"{p}/target")
        pca = ws.pca(ws.owners[spec["source"]], f"{p}/source")
        mapping = _pairs(_need(spec, "map", p), f"{p}/map")
        for x in src.carrier:
            if x not in mapping:
                raise ParseError(f"{p}/map", f"no image for {x!r}")
            if mapping[x] not in tgt.E:
                raise UnresolvedReference(f"{p}/map", str(mapping[x]))
        tracker = read_set(spec["tracker"], pca, f"{p}/tracker") if "tracker" in spec else None
        cert = _read_cert(spec.get("certificate"), pca, f"{p}/certificate")
        ws.morphisms[name] = (pca, src, tgt, mapping, tracker, cert)
    for j, spec in enumerate(data.get("slices", [])):
        p = f"/slices/{j}"
        name = _need(spec, "name", p)
        base = ws.pca(_need(spec, "pca", p), f"{p}/pca")
        ws.slices[name] = slice_pca(base, _index_assembly(ws, base, _need(spec, "over", p), f"{p}/over"), name)
    return ws


def _read_cert(data: Any, pca: Pca, path: str) -> FilterCertificate | None:
    if data is None:
        return None
    try:
        return cert_from_json(data, pca)
    except MalformedCertificate as exc:
        raise ParseError(path, str(exc)) from exc


def _index_assembly(ws: Workspace, base: Pca, spec: Any, path: str) -> Assembly:
    if isinstance(spec, str):
        return ws.assembly(spec, path)
    kind = _need(spec, "kind", path)
    if kind == "one":
        return one_point(base)
    if kind == "one_plus_one":
        return one_plus_one(base)
    if kind == "nabla":
        return nabla_points(base, int(spec.get("n", 2)))
    raise ParseError(f"{path}/kind", f"unknown index kind {kind!r}")


# --- reports ---------------------------------------------------------------------


@dataclass
class Result:
    name: str
    verdict: Verdict
    certificate: Any = None
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "name": self.name,
            "verdict": self.verdict.to_json(),
            "certificate": self.certificate,
            "coverage": {"checked": self.verdict.checked, "exhaustive": self.verdict.exhaustive},
        }
        if self.extra:
            out["details"] = self.extra
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


@dataclass
class Report:
    command: str
    fixture: str
    budget: Budget
    results: list = field(default_factory=list)
    stored: list = field(default_factory=list)
    replay_failures: int = 0

    @property
    def exit_status(self) -> int:
        return 1 if self.replay_failures or any(r.verdict.refuted for r in self.results) else 0

    def summary(self) -> dict:
        return {k: sum(r.verdict.kind == k for r in self.results) for k in KINDS}

    def to_json(self, timings: bool = False) -> dict:
        b = self.budget
        return {
            "command": self.command,
            "fixture": self.fixture,
            "budget": {"fuel": b.fuel, "term_size": b.term_size, "arity": b.arity, "samples": b.samples, "seed": b.seed},
            "results": [r.to_json(timings) for r in self.results],
            "summary": self.summary(),
            "replay_failures": self.replay_failures,
        }


def emit(report: Report, fmt: str = "text", timings: bool = False) -> str:
    """Text lines in declaration order, or JSON with sorted keys."""
    if fmt == "json":
        return json.dumps(report.to_json(timings), sort_keys=True, ensure_ascii=False, indent=2) + "\n"
    lines = [f"relpca {report.command}: {report.fixture}"]
    for r in report.results:
        v = r.verdict
        cover = f"{v.checked} checked" + ("" if v.exhaustive else ", sampled")
        line = f"{v.kind:<8} {r.name} ({cover})"
        if timings:
            line += f" [{r.seconds:.3f}s]"
        lines.append(line)
        if v.refuted:
            lines.append("  counterexample: " + json.dumps(v.to_json()["counterexample"], sort_keys=True, ensure_ascii=False))
        elif v.kind == "Unknown":
            lines.append("  budget: " + json.dumps(v.to_json().get("budget"), sort_keys=True, ensure_ascii=False))
        if v.note:
            lines.append(f"  note: {v.note}")
    s = report.summary()
    lines.append(", ".join(f"{k} {s[k]}" for k in KINDS) + (f", replay failures {report.replay_failures}" if report.replay_failures else ""))
    return "\n".join(lines) + "\n"


def _timed(report: Report, name: str, fn: Callable[[], Any]) -> Result:
    start = time.perf_counter()
    out = fn()
    verdict, cert, extra = (out + (None, {}))[:3] if isinstance(out, tuple) else (out, None, {})
    r = Result(name, verdict, cert, time.perf_counter() - start, extra or {})
    report.results.append(r)
    return r


# --- suites ------------------------------------------------------------------------


def run_check(ws: Workspace, report: Report) -> None:
    triples = int(ws.data.get("axiom_triples", 50))
    for name, pca in ws.pcas.items():
        _timed(report, f"kit:{name}", lambda pca=pca: conjoin(verify_kit(pca, ws.budget).values()))

        def axioms(pca: Pca = pca) -> tuple:
            rep = axiom_suite(pca.pas, triples, ws.budget.seed, ws.budget.fuel)
            v = conjoin(rep.verdicts.values())
            return v.with_note(f"unknown rate {rep.unknown_rate:.4f}"), None, {"unknown_rate": round(rep.unknown_rate, 6)}

        _timed(report, f"axioms:{name}", axioms)
    for name, (pca, src, tgt, mp, tracker, cert) in ws.morphisms.items():

        def morph(pca: Pca = pca, src: Assembly = src, tgt: Assembly = tgt, mp: dict = mp, tracker: Any = tracker, cert: Any = cert) -> tuple:
            h = check_morphism(pca, src, tgt, mp, tracker, ws.budget, cert)
            return h.verdict, _cert_json(h.certificate, pca)

        _timed(report, f"morphism:{name}", morph)
    for j, spec in enumerate(ws.data.get("members", [])):
        p = f"/members/{j}"
        pca = ws.pca(_need(spec, "pca", p), f"{p}/pca")
        u = read_set(_need(spec, "set", p), pca, f"{p}/set")
        cert = _read_cert(spec.get("certificate"), pca, f"{p}/certificate")

        def member(pca: Pca = pca, u: Any = u, cert: Any = cert) -> tuple:
            v, c = filter_member(pca, u, cert, ws.budget)
            return v, _cert_json(c, pca)

        _timed(report, f"member:{spec.get('name', j)}", member)
    for j, spec in enumerate(ws.data.get("adjunctions", [])):
        p = f"/adjunctions/{j}"
        X = ws.assembly(_need(spec, "assembly", p), f"{p}/assembly")
        pca = ws.pca(ws.owners[spec["assembly"]], p)
        pts = [_point(x) for x in _need(spec, "points", p)]
        _timed(report, f"adjunction:{spec['assembly']}", lambda X=X, pca=pca, pts=pts: adjunction_bijection(pca, X, pts, ws.budget))


def _cert_json(cert: FilterCertificate | None, pca: Pca) -> Any:
    if cert is None:
        return None
    try:
        return cert_to_json(cert, pca)
    except MalformedCertificate:
        return None


def run_synthesize(ws: Workspace, report: Report) -> None:
    for name, (pca, src, tgt, mp, tracker, cert) in ws.morphisms.items():
        h = None

        def search(pca: Pca = pca, src: Assembly = src, tgt: Assembly = tgt, mp: dict = mp) -> tuple:
            nonlocal h
            h = check_morphism(pca, src, tgt, mp, None, ws.budget)
            return h.verdict, _cert_json(h.certificate, pca)

        r = _timed(report, f"tracker:{name}", search)
        if h is not None and h.tracker is not None and r.certificate is not None:
            report.stored.append(_stored(f"tracker:{name}", ws.owners[ws.data["morphisms"][name]["source"]], h.tracker, r.certificate, pca, h.verdict))
    for j, spec in enumerate(ws.data.get("members", [])):
        p = f"/members/{j}"
        pname = _need(spec, "pca", p)
        pca = ws.pca(pname, f"{p}/pca")
        u = read_set(_need(spec, "set", p), pca, f"{p}/set")
        label = f"member:{spec.get('name', j)}"

        def member(pca: Pca = pca, u: Any = u) -> tuple:
            v, c = filter_member(pca, u, None, ws.budget)
            return v, _cert_json(c, pca)

        r = _timed(report, label, member)
        if r.certificate is not None:
            report.stored.append(_stored(label, pname, u, r.certificate, pca, r.verdict))


def _stored(name: str, pname: str, u: Any, cert: Any, pca: Pca, v: Verdict) -> dict:
    return {"name": name, "pca": pname, "set": set_to_json(u, pca), "certificate": cert, "verdict": v.kind}


def run_replay(ws: Workspace, report: Report, certs_path: str | None) -> None:
    if certs_path is None:
        raise ParseError("--certificates", "replay needs a certificates file")
    text = Path(certs_path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{certs_path}: line {exc.lineno} column {exc.colno}", exc.msg) from exc
    for j, entry in enumerate(_need(data, "certificates", "/")):
        p = f"/certificates/{j}"
        pca = ws.pca(_need(entry, "pca", p), f"{p}/pca")
        u = read_set(_need(entry, "set", p), pca, f"{p}/set")
        cert = _read_cert(_need(entry, "certificate", p), pca, f"{p}/certificate")
        want = entry.get("verdict")
        r = _timed(report, f"replay:{entry.get('name', j)}", lambda pca=pca, u=u, cert=cert: (pca.replay(u, cert, ws.budget), entry["certificate"]))
        if r.verdict.refuted or (want is not None and r.verdict.kind != want):
            report.replay_failures += 1
            r.extra["expected"] = want


def _expectation(kind: str, sp: SlicePca, budget: Budget) -> Callable[[Any], bool]:
    core = sp.base.filter.core
    if kind in ("parts", "diagonal") and core is None:
        raise ParseError("expect", "the base filter has no core predicate")
    if kind == "parts":
        return lambda u: all(any(core(e) for e in p.elements) for p in parts_of(u))
    if kind == "diagonal":
        return lambda u: bool(frozenset.intersection(*[frozenset(e for e in p.elements if core(e)) for p in parts_of(u)]))
    if kind == "base":
        return lambda u: filter_member(sp.base, parts_of(u)[0], None, budget)[0].ok
    raise ParseError("expect", f"unknown expectation {kind!r}")


def run_slice(ws: Workspace, report: Report) -> None:
    for j, spec in enumerate(ws.data.get("slices", [])):
        p = f"/slices/{j}"
        name = spec["name"]
        sp = ws.slices[name]
        if "battery" in spec:
            bat = spec["battery"]
            pool = [sp.base.pas.read(e) for e in _need(bat, "pool", f"{p}/battery")]
            cands = battery([pool] * len(sp.points), int(bat.get("max_size", 2)))
            pred = _expectation(_need(spec, "expect", p), sp, ws.budget)

            def bat_run(sp: SlicePca = sp, cands: list = cands, pred: Callable = pred) -> tuple:
                rep = filter_battery(sp.pca, cands, pred, ws.budget)
                return rep.verdict, None, {"accepted": rep.accepted, "rejected": rep.rejected, "undecided": len(rep.undecided)}

            _timed(report, f"slice:{name}:battery", bat_run)
        objs, sobjs = [], []
        for k, o in enumerate(spec.get("objects", [])):
            q = f"{p}/objects/{k}"
            X = ws.assembly(_need(o, "assembly", q), f"{q}/assembly")
            obj = over(sp.base, X, sp.I, _pairs(_need(o, "map", q), f"{q}/map"), None, ws.budget)
            if obj.over.tracker is None:
                report.results.append(Result(f"slice:{name}:over:{o['assembly']}", obj.over.verdict))
            else:
                objs.append(obj)
        for k, o in enumerate(spec.get("slice_objects", [])):
            sobjs.append(_read_assembly(o, sp.pca, o.get("name", f"Y{k}"), f"{p}/slice_objects/{k}"))
        if objs or sobjs:
            eq = slice_equivalence(sp, None, ws.budget)
            _timed(report, f"slice:{name}:equivalence", lambda eq=eq, objs=objs, sobjs=sobjs: eq.round_trip(objs, sobjs))


def run_product(ws: Workspace, report: Report) -> None:
    for j, spec in enumerate(ws.data.get("products", [])):
        p = f"/products/{j}"
        X = ws.assembly(_need(spec, "left", p), f"{p}/left")
        Y = ws.assembly(_need(spec, "right", p), f"{p}/right")
        pca = ws.pca(_need(spec, "pca", p), f"{p}/pca")
        label = f"product:{spec['left']}×{spec['right']}"
        prod = product(pca, X, Y, ws.budget)
        _timed(report, f"{label}:projections", lambda prod=prod: conjoin([prod.proj0.verdict, prod.proj1.verdict]))
        if "test" not in spec:
            continue
        Z = ws.assembly(spec["test"], f"{p}/test")

        def universal(Z: Assembly = Z, X: Assembly = X, Y: Assembly = Y, prod: Any = prod, pca: Pca = pca) -> tuple:
            arrows = {}
            undecided = []
            for B in (X, Y):
                ok = []
                for mp in all_functions(Z.carrier, B.carrier):
                    h = check_morphism(pca, Z, B, mp, None, ws.budget)
                    if h.verdict.ok:
                        ok.append(h)
                    elif not h.verdict.refuted:
                        undecided.append(h.verdict)
                arrows[id(B)] = ok
            pairs = list(itertools.product(arrows[id(X)], arrows[id(Y)]))
            v = product_universal(pca, prod, pairs, ws.budget)
            return conjoin([v] + undecided), None, {"competitors": len(pairs)}

        _timed(report, f"{label}:universal", universal)


def _density_morphism(ws: Workspace, spec: Any, path: str) -> Any:
    base = ws.pca(_need(spec, "pca", path), f"{path}/pca")
    kind = _need(spec, "kind", path)
    if kind == "pullback":
        return fixtures.cocartesian(base, tuple(_point(x) for x in _need(spec, "index", path)), ws.budget)
    if kind == "slice":
        sp = slice_pca(base, _index_assembly(ws, base, _need(spec, "over", path), f"{path}/over"))
        return fixtures.slice_inclusion(sp, ws.budget)
    if kind == "identity":
        return identity(base, ws.budget)
    raise ParseError(f"{path}/kind", f"unknown morphism kind {kind!r}")


def run_density(ws: Workspace, report: Report) -> None:
    for j, spec in enumerate(ws.data.get("density", [])):
        p = f"/density/{j}"
        name = spec.get("name", str(j))
        m = _density_morphism(ws, spec, p)
        budget = ws.budget
        _timed(report, f"density:{name}:morphism", lambda m=m: m.verdict)
        v, w = D.check_qs(m, None, None, budget)
        report.results.append(Result(f"density:{name}:qs", v, _cert_json(w.certificate, m.target) if w else None, 0.0, {"strategy": w.strategy} if w else {}))
        cd = None
        if spec.get("convert") and w is not None:
            try:
                cd = D.convert_density("QsToCd", w, budget)
                report.results.append(Result(f"density:{name}:qs_to_cd", cd.verdict, _cert_json(cd.certificate, m.target)))
                back = D.convert_density("CdToQs", cd, budget)
                report.results.append(Result(f"density:{name}:cd_to_qs", back.verdict, _cert_json(back.certificate, m.target)))
            except D.ReplayFailure as exc:
                report.results.append(Result(f"density:{name}:conversion", exc.verdict))
                report.replay_failures += 1
        adj_spec = spec.get("adjoint")
        if adj_spec is None:
            continue
        direct = D.direct_cd(m, None, budget)
        if direct.verdict.ok:
            cd = direct
        elif cd is None and w is not None:
            cd = D.qs_to_cd(w, budget)
        if cd is None:
            report.results.append(Result(f"density:{name}:adjoint", Verdict.unknown({"density witness": None})))
            continue
        adj = D.right_adjoint(m, cd, None, budget)
        X = _read_assembly(_need(adj_spec, "X", f"{p}/adjoint"), m.source, "X", f"{p}/adjoint/X")
        Y = _read_assembly(_need(adj_spec, "Y", f"{p}/adjoint"), m.target, "Y", f"{p}/adjoint/Y")

        def hom(adj: Any = adj, X: Assembly = X, Y: Assembly = Y) -> tuple:
            h = adj.hom_bijection(X, Y)
            return h.verdict, None, {"left": h.left, "right": h.right, "undecided": h.undecided}

        _timed(report, f"density:{name}:adjoint:hom", hom)
        _timed(report, f"density:{name}:adjoint:unit", lambda adj=adj, X=X: adj.unit(X).verdict)
        _timed(report, f"density:{name}:adjoint:counit", lambda adj=adj, Y=Y: adj.counit(Y).verdict)
        _timed(report, f"density:{name}:adjoint:triangles", lambda adj=adj, X=X, Y=Y: adj.triangles(X, Y))
        _timed(report, f"density:{name}:adjoint:compatibility", lambda adj=adj, Y=Y: adj.compatibility(Y))
        if "dense_pool" in spec:
            pool = [m.source.pas.read(e) for e in spec["dense_pool"]]

            def dense(adj: Any = adj, pool: list = pool) -> tuple:
                wd = D.adjoint_implies_dense(adj, pool)
                return wd.verdict, _cert_json(wd.certificate, adj.morphism.target)

            _timed(report, f"density:{name}:dense", dense)


# --- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relpca", description="Relative PCA workbench: run check suites on a JSON fixture.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("fixture", help="fixture file (JSON)")
    d = Budget()
    ap.add_argument("--fuel", type=int, default=d.fuel, help="reduction steps per application")
    ap.add_argument("--term-size", type=int, default=d.term_size, help="largest term in certificate searches")
    ap.add_argument("--arity", type=int, default=d.arity, help="most generators in a certificate search")
    ap.add_argument("--samples", type=int, default=d.samples, help="samples per infinite quantifier")
    ap.add_argument("--seed", type=int, default=d.seed, help="seed for every sampled check")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--timings", action="store_true", help="include wall-clock times (reports stop being byte-stable)")
    ap.add_argument("--out", help="synthesize: write the stored certificates here")
    ap.add_argument("--certificates", help="replay: certificates file to replay")
    return ap


def run(argv: list | None = None, out: Any = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    budget = Budget(fuel=args.fuel, term_size=args.term_size, arity=args.arity, samples=args.samples, seed=args.seed)
    try:
        ws = load(args.fixture, budget)
        report = Report(args.command, Path(args.fixture).name, budget)
        if args.command == "check":
            run_check(ws, report)
        elif args.command == "synthesize":
            run_synthesize(ws, report)
        elif args.command == "slice":
            run_slice(ws, report)
        elif args.command == "product":
            run_product(ws, report)
        elif args.command == "density":
            run_density(ws, report)
        else:
            run_replay(ws, report, args.certificates)
    except (ParseError, UnresolvedReference) as exc:
        print(f"relpca: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"relpca: {exc}", file=sys.stderr)
        return 2
    out.write(emit(report, args.format, args.timings))
    if args.out and args.command == "synthesize":
        Path(args.out).write_text(json.dumps({"certificates": report.stored}, sort_keys=True, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return report.exit_status


def main() -> None:
    sys.exit(run())
