"""Document formats: canonical JSON plus a small text DSL.

JSON is the machine format; every analysis result serializes to plain
dicts ready for json.dumps.  The text DSL covers posets and maps only
and exists for hand-written fixtures:

    # a comment
    poset B1 {
      points: a, b;
      covers: a < b;
    }
    map p1 : E1 -> B1 {
      (a,0) -> a; (a,1) -> a; (b,0) -> b;
    }

Element names may contain commas and parentheses; separators split
only at top level.  Map domains and codomains name a poset defined
earlier in the same text or use a "gallery:ID" reference.
"""

from __future__ import annotations

import re
from typing import Optional, Union

from .errors import ParseError
from .gallery import gallery_entry
from .grothendieck import BundleReport, GrothendieckReport, LiftFailure, PosetFunctor
from .posets import MonotoneMap, Poset, product
from .slices import MapLike, MapReduction, as_slice
from .stong import ReductionTrace
from .verdict import Certificate, NecessaryReport, RetractCertificate, Verdict

Doc = Union[dict, list, str, int, bool, None]


def poset_to_doc(p: Poset) -> dict:
    return {"elements": list(p.elements), "covers": [list(c) for c in p.covers()]}


def poset_from_doc(doc: Doc) -> Poset:
    if not isinstance(doc, dict):
        raise ParseError("poset document must be an object")
    if "elements" not in doc:
        raise ParseError("poset document needs an 'elements' list")
    elements = doc["elements"]
    covers = doc.get("covers", [])
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise ParseError("'elements' must be a list of strings")
    if not isinstance(covers, list):
        raise ParseError("'covers' must be a list of pairs")
    pairs = []
    for c in covers:
        if not (isinstance(c, (list, tuple)) and len(c) == 2):
            raise ParseError(f"cover {c!r} is not a pair")
        pairs.append((c[0], c[1]))
    return Poset.build(elements, pairs)


def _resolve_poset(doc: Doc, field: str) -> Poset:
    if isinstance(doc, str):
        if doc.startswith("gallery:"):
            entry = gallery_entry(doc[len("gallery:") :])
            if entry.kind != "poset":
                raise ParseError(f"{field}: {doc!r} is not a poset entry")
            return entry.build()
        raise ParseError(f"{field}: expected a poset object or 'gallery:ID'")
    return poset_from_doc(doc)


def map_to_doc(m: MapLike) -> dict:
    m = as_slice(m).map
    return {
        "domain": poset_to_doc(m.dom),
        "codomain": poset_to_doc(m.cod),
        "values": dict(m.values),
    }


def map_from_doc(doc: Doc) -> MonotoneMap:
    if not isinstance(doc, dict):
        raise ParseError("map document must be an object")
    for key in ("domain", "codomain", "values"):
        if key not in doc:
            raise ParseError(f"map document needs a {key!r} field")
    dom = _resolve_poset(doc["domain"], "domain")
    cod = _resolve_poset(doc["codomain"], "codomain")
    values = doc["values"]
    if not isinstance(values, dict):
        raise ParseError("'values' must be an object mapping elements to elements")
    return MonotoneMap.build(dom, cod, values)


_PAIR_KEY = re.compile(r"^(.*?)<=(.*)$")


def functor_to_doc(d: PosetFunctor) -> dict:
    return {
        "base": poset_to_doc(d.base),
        "variance": d.variance,
        "fibers": {b: poset_to_doc(f) for b, f in d.fibers.items()},
        "transitions": {
            f"{lo}<={hi}": dict(t.values) for (lo, hi), t in sorted(d.transitions.items())
        },
    }


def functor_from_doc(doc: Doc) -> PosetFunctor:
    if not isinstance(doc, dict):
        raise ParseError("functor document must be an object")
    for key in ("base", "variance", "fibers"):
        if key not in doc:
            raise ParseError(f"functor document needs a {key!r} field")
    base = _resolve_poset(doc["base"], "base")
    variance = doc["variance"]
    if variance not in ("covariant", "contravariant"):
        raise ParseError("'variance' must be 'covariant' or 'contravariant'")
    fibers_doc = doc["fibers"]
    if not isinstance(fibers_doc, dict):
        raise ParseError("'fibers' must map base elements to posets")
    fibers = {b: _resolve_poset(f, f"fibers[{b}]") for b, f in fibers_doc.items()}
    transitions = {}
    for key, mapping in doc.get("transitions", {}).items():
        m = _PAIR_KEY.match(key)
        if not m:
            raise ParseError(f"transition key {key!r} must look like 'b<=b2'")
        lo, hi = m.group(1).strip(), m.group(2).strip()
        if lo not in fibers or hi not in fibers:
            raise ParseError(f"transition {key!r} names an unknown base element")
        src, dst = (lo, hi) if variance == "covariant" else (hi, lo)
        transitions[(lo, hi)] = MonotoneMap.build(fibers[src], fibers[dst], mapping)
    return PosetFunctor.build(base, variance, fibers, transitions)


def lift_failure_to_doc(f: Optional[LiftFailure]) -> Optional[dict]:
    if f is None:
        return None
    doc = {"side": f.side, "e": f.e, "b": f.b, "reason": f.reason}
    if f.stray is not None:
        doc["stray"] = f.stray
    return doc


def groth_to_doc(rep: GrothendieckReport) -> dict:
    return {
        "fibration": rep.is_fibration,
        "opfibration": rep.is_opfibration,
        "bifibration": rep.is_bifibration,
        "fibration_failure": lift_failure_to_doc(rep.fibration_failure),
        "opfibration_failure": lift_failure_to_doc(rep.opfibration_failure),
    }


def bundle_to_doc(rep: BundleReport) -> dict:
    return {
        "status": rep.status,
        "trivializations": {b: dict(t) for b, t in rep.trivializations.items()},
        "failed_at": rep.failed_at,
        "undecided_at": rep.undecided_at,
    }


def trace_to_doc(trace: ReductionTrace) -> dict:
    return {
        "source": list(trace.source.elements),
        "result": list(trace.result.elements),
        "removed": [list(step) for step in trace.removed],
        "retraction": dict(trace.retraction.values),
    }


def map_reduction_to_doc(red: MapReduction) -> dict:
    doc = trace_to_doc(red.trace)
    doc["base"] = list(red.reduced.base.elements)
    return doc


def necessary_to_doc(report: NecessaryReport) -> dict:
    return {
        c.name: {"passed": c.passed, "witness": c.witness} for c in report.conditions
    }


def retract_certificate_to_doc(cert: RetractCertificate) -> dict:
    return {
        "x": poset_to_doc(cert.x),
        "y": poset_to_doc(cert.y),
        "i": dict(cert.i.values),
        "r": dict(cert.r.values),
        "j": dict(cert.j.values),
        "s": dict(cert.s.values),
    }


def retract_certificate_from_doc(doc: Doc, p: MapLike) -> RetractCertificate:
    if not isinstance(doc, dict):
        raise ParseError("retract certificate must be an object")
    for key in ("x", "y", "i", "r", "j", "s"):
        if key not in doc:
            raise ParseError(f"retract certificate needs a {key!r} field")
    sl = as_slice(p)
    x = poset_from_doc(doc["x"])
    y = poset_from_doc(doc["y"])
    prod, _, _ = product(x, y)
    return RetractCertificate(
        x,
        y,
        MonotoneMap.build(sl.total, prod, doc["i"]),
        MonotoneMap.build(prod, sl.total, doc["r"]),
        MonotoneMap.build(sl.base, x, doc["j"]),
        MonotoneMap.build(x, sl.base, doc["s"]),
    )


def certificate_to_doc(cert: Certificate) -> dict:
    doc = {"kind": cert.kind}
    data = cert.data
    if "minimum" in data:
        doc["minimum"] = data["minimum"]
    if "maximum" in data:
        doc["maximum"] = data["maximum"]
    if "fiber_of" in data:
        doc["fiber_of"] = data["fiber_of"]
    if "iso" in data:
        doc["iso"] = dict(data["iso"])
    if "reduction" in data:
        doc["reduction"] = map_reduction_to_doc(data["reduction"])
    if "retract" in data:
        doc["retract"] = retract_certificate_to_doc(data["retract"])
    if "certificate" in data:
        doc["retract"] = retract_certificate_to_doc(data["certificate"])
    return doc


def verdict_to_doc(v: Verdict) -> dict:
    components = []
    for c in v.components:
        components.append(
            {
                "base_component": list(c.component),
                "status": c.status,
                "certificate": certificate_to_doc(c.certificate) if c.certificate else None,
                "witness": c.witness,
                "necessary": necessary_to_doc(c.necessary) if c.necessary else None,
            }
        )
    return {
        "status": v.status,
        "components": components,
        "skipped_components": [list(c) for c in v.skipped_components],
        "certificate": certificate_to_doc(v.certificate) if v.certificate else None,
        "witness": v.witness,
    }


def detect_doc_kind(doc: Doc) -> str:
    """Classify a parsed JSON object as poset, map, or functor."""
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    if "fibers" in doc:
        return "functor"
    if "values" in doc or "domain" in doc:
        return "map"
    if "elements" in doc:
        return "poset"
    raise ParseError("document is none of poset, map, or functor")


def _split_top(text: str, seps: str) -> list[str]:
    """Split on separator characters not nested inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        if ch in seps and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


_BLOCK = re.compile(
    r"(poset|map)\s+(\S+?)\s*(?::\s*(\S+)\s*->\s*(\S+))?\s*\{([^}]*)\}", re.S
)


def _strip_comments(text: str) -> str:
    return re.sub(r"#[^\n]*", "", text)


def _dsl_poset(name: str, body: str) -> Poset:
    points: list[str] = []
    covers: list[tuple[str, str]] = []
    for clause in _split_top(body, ";"):
        key, _, rest = clause.partition(":")
        key = key.strip()
        if key == "points":
            points = _split_top(rest, ",")
        elif key == "covers":
            for item in _split_top(rest, ","):
                sides = _split_top(item, "<")
                if len(sides) != 2:
                    raise ParseError(f"poset {name}: cover {item!r} must be 'x < y'")
                covers.append((sides[0], sides[1]))
        else:
            raise ParseError(f"poset {name}: unknown clause {key!r}")
    if not points:
        raise ParseError(f"poset {name}: no points clause")
    return Poset.build(points, covers)


def _dsl_map(
    name: str, dom_name: str, cod_name: str, body: str, posets: dict[str, Poset]
) -> MonotoneMap:
    def resolve(ref: str) -> Poset:
        if ref.startswith("gallery:"):
            return _resolve_poset(ref, f"map {name}")
        if ref not in posets:
            raise ParseError(f"map {name}: unknown poset {ref!r}")
        return posets[ref]

    values = {}
    for item in _split_top(body.replace("\n", ";"), ";,"):
        src, arrow, dst = item.partition("->")
        if not arrow:
            raise ParseError(f"map {name}: entry {item!r} must be 'x -> y'")
        values[src.strip()] = dst.strip()
    return MonotoneMap.build(resolve(dom_name), resolve(cod_name), values)


def parse_text(text: str) -> list[tuple[str, str, Union[Poset, MonotoneMap]]]:
    """Parse the text DSL; returns (kind, name, object) in file order."""
    clean = _strip_comments(text)
    out: list[tuple[str, str, Union[Poset, MonotoneMap]]] = []
    posets: dict[str, Poset] = {}
    consumed = 0
    for m in _BLOCK.finditer(clean):
        if clean[consumed : m.start()].strip():
            raise ParseError(f"unparsed text: {clean[consumed:m.start()].strip()!r}")
        kind, name, dom_name, cod_name, body = m.groups()
        if kind == "poset":
            if dom_name is not None:
                raise ParseError(f"poset {name}: unexpected '->' header")
            p = _dsl_poset(name, body)
            posets[name] = p
            out.append(("poset", name, p))
        else:
            if dom_name is None:
                raise ParseError(f"map {name}: missing ': DOM -> COD' header")
            out.append(("map", name, _dsl_map(name, dom_name, cod_name, body, posets)))
        consumed = m.end()
    if clean[consumed:].strip():
        raise ParseError(f"unparsed text: {clean[consumed:].strip()!r}")
    if not out:
        raise ParseError("no poset or map blocks found")
    return out


def poset_to_text(name: str, p: Poset) -> str:
    lines = [f"poset {name} {{"]
    lines.append("  points: " + ", ".join(p.elements) + ";")
    covers = p.covers()
    if covers:
        lines.append("  covers: " + ", ".join(f"{lo} < {hi}" for lo, hi in covers) + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


def map_to_text(name: str, m: MapLike, dom_name: str = "E", cod_name: str = "B") -> str:
    m = as_slice(m).map
    out = [poset_to_text(dom_name, m.dom), poset_to_text(cod_name, m.cod)]
    lines = [f"map {name} : {dom_name} -> {cod_name} {{"]
    for e in m.dom.elements:
        lines.append(f"  {e} -> {m(e)};")
    lines.append("}")
    out.append("\n".join(lines) + "\n")
    return "\n".join(out)
