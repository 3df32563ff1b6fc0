"""System spec files: a small YAML tree describing one system model.

Grammar (every key required unless marked optional)::

    name: ship                      # optional, free text
    components:                     # ids must be exactly 1..n, any order
      - id: 1
        dist:
          family: exponential       # exponential | weibull | uniform
          params: {rate: 1/60}      # numbers, or "p/q" fraction strings
    copula:
      family: fgm                   # product | fgm | clayton
      theta: 1                      # fgm only; alpha for clayton
      dimension: 4                  # optional, must equal n
    structure:
      minimal_path_sets: [[1], [2, 3], [2, 4]]

Diagnostics carry 1-based line numbers of the offending node.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import yaml

from .conditional import SystemModel
from .copulas import make_copula
from .marginals import make_marginal
from .structure import StructureError, SystemStructure

COPULA_PARAMS = {"product": set(), "fgm": {"theta"}, "clayton": {"alpha"}}


@dataclass(frozen=True)
class Diagnostic:
    line: int | None
    message: str

    def __str__(self):
        return f"line {self.line}: {self.message}" if self.line else self.message


class SpecError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class _Node:
    """Plain value plus the line it came from."""

    __slots__ = ("value", "line")

    def __init__(self, value, line):
        self.value = value
        self.line = line


def _convert(node):
    line = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            out[str(_convert(k).value)] = _convert(v)
        return _Node(out, line)
    if isinstance(node, yaml.SequenceNode):
        return _Node([_convert(v) for v in node.value], line)
    return _Node(yaml.safe_load(yaml.serialize(node)), line)


def _number(node, what, diags):
    v = node.value
    if isinstance(v, bool):
        diags.append(Diagnostic(node.line, f"{what}: expected a number, got {v!r}"))
        return None
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            return float(Fraction(v.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    diags.append(Diagnostic(node.line, f"{what}: expected a number, got {v!r}"))
    return None


def _get(mapping, key, diags, what):
    if not isinstance(mapping.value, dict):
        diags.append(Diagnostic(mapping.line, f"{what}: expected a mapping"))
        return None
    if key not in mapping.value:
        diags.append(Diagnostic(mapping.line, f"{what}: missing key {key!r}"))
        return None
    return mapping.value[key]


def _unknown_keys(mapping, allowed, diags, what):
    if isinstance(mapping.value, dict):
        for k, v in mapping.value.items():
            if k not in allowed:
                diags.append(Diagnostic(v.line, f"{what}: unknown key {k!r}"))


def _build(factory, args, line, diags):
    try:
        return factory(**args)
    except (TypeError, ValueError) as exc:
        diags.append(Diagnostic(line, str(exc)))
        return None


def parse_spec(text: str) -> SystemModel:
    """Parse and fully validate spec text; raise :class:`SpecError` on any problem."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise SpecError([Diagnostic(mark.line + 1 if mark else None, f"syntax error: {exc}")]) from None
    if root is None:
        raise SpecError([Diagnostic(None, "empty spec")])
    doc = _convert(root)
    diags: list[Diagnostic] = []
    if not isinstance(doc.value, dict):
        raise SpecError([Diagnostic(doc.line, "top level must be a mapping")])
    _unknown_keys(doc, {"name", "components", "copula", "structure"}, diags, "spec")
    name = str(doc.value["name"].value) if "name" in doc.value else ""

    marginals = {}
    comps = _get(doc, "components", diags, "spec")
    if comps is not None and not isinstance(comps.value, list):
        diags.append(Diagnostic(comps.line, "components: expected a list"))
        comps = None
    for c in comps.value if comps is not None else []:
        _unknown_keys(c, {"id", "dist"}, diags, "component")
        cid, dist = _get(c, "id", diags, "component"), _get(c, "dist", diags, "component")
        if cid is None or dist is None:
            continue
        if not isinstance(cid.value, int) or isinstance(cid.value, bool):
            diags.append(Diagnostic(cid.line, f"component id must be an integer, got {cid.value!r}"))
            continue
        if cid.value in marginals:
            diags.append(Diagnostic(cid.line, f"duplicate component id {cid.value}"))
            continue
        _unknown_keys(dist, {"family", "params"}, diags, f"component {cid.value} dist")
        fam = _get(dist, "family", diags, f"component {cid.value} dist")
        params = _get(dist, "params", diags, f"component {cid.value} dist")
        if fam is None or params is None:
            continue
        if not isinstance(params.value, dict):
            diags.append(Diagnostic(params.line, "params: expected a mapping"))
            continue
        values = {k: _number(v, f"component {cid.value} {k}", diags) for k, v in params.value.items()}
        if None in values.values():
            continue
        marginals[cid.value] = _build(lambda **kw: make_marginal(str(fam.value), **kw), values, dist.line, diags)

    n = len(marginals)
    if marginals and sorted(marginals) != list(range(1, n + 1)):
        diags.append(Diagnostic(comps.line, f"component ids must be exactly 1..{n}, got {sorted(marginals)}"))

    copula = None
    cop = _get(doc, "copula", diags, "spec")
    if cop is not None:
        fam = _get(cop, "family", diags, "copula")
        if fam is not None:
            family = str(fam.value)
            if family not in COPULA_PARAMS:
                diags.append(Diagnostic(fam.line, f"unknown copula family {family!r}; expected one of {sorted(COPULA_PARAMS)}"))
            else:
                _unknown_keys(cop, {"family", "dimension"} | COPULA_PARAMS[family], diags, "copula")
                args = {}
                for key in COPULA_PARAMS[family]:
                    node = _get(cop, key, diags, f"{family} copula")
                    if node is not None:
                        args[key] = _number(node, f"copula {key}", diags)
                dim = n
                if "dimension" in cop.value:
                    dnode = cop.value["dimension"]
                    dim = dnode.value
                    if dim != n:
                        diags.append(Diagnostic(dnode.line, f"copula dimension {dim} != {n} components"))
                if None not in args.values() and isinstance(dim, int) and dim >= 1:
                    copula = _build(lambda **kw: make_copula(family, dim, **kw), args, cop.line, diags)

    structure = None
    st = _get(doc, "structure", diags, "spec")
    if st is not None:
        _unknown_keys(st, {"minimal_path_sets"}, diags, "structure")
        ps = _get(st, "minimal_path_sets", diags, "structure")
        if ps is not None:
            ok = isinstance(ps.value, list) and all(
                isinstance(p.value, list) and all(isinstance(j.value, int) for j in p.value) for p in ps.value
            )
            if not ok:
                diags.append(Diagnostic(ps.line, "minimal_path_sets: expected a list of lists of component ids"))
            else:
                sets = [[j.value for j in p.value] for p in ps.value]
                structure = SystemStructure(n, sets)
                diags.extend(Diagnostic(ps.line, msg) for msg in structure.validate())

    if diags:
        raise SpecError(diags)
    try:
        return SystemModel(structure, [marginals[j] for j in range(1, n + 1)], copula, name)
    except (StructureError, ValueError) as exc:
        raise SpecError([Diagnostic(None, str(exc))]) from None


def load_spec(path) -> SystemModel:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def emit_spec(model: SystemModel) -> str:
    """Spec text for ``model``; floats are written with ``repr`` so they round-trip."""
    cop = {"family": model.copula.family, **{k: float(v) for k, v in model.copula.params.items()},
           "dimension": model.n}
    doc = {
        "name": model.name,
        "components": [
            {"id": j, "dist": {"family": d.family, "params": {k: float(v) for k, v in d.params.items()}}}
            for j, d in enumerate(model.marginals, 1)
        ],
        "copula": cop,
        "structure": {"minimal_path_sets": [sorted(p) for p in model.structure.path_sets]},
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def spec_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def bundled_specs() -> dict[str, str]:
    """Bundled example specs, keyed by file stem."""
    root = resources.files("sysimportance") / "specs"
    return {p.name[:-5]: p.read_text(encoding="utf-8") for p in sorted(root.iterdir(), key=lambda p: p.name)
            if p.name.endswith(".yaml")}


def bundled_model(name: str) -> SystemModel:
    specs = bundled_specs()
    if name not in specs:
        raise KeyError(f"no bundled spec {name!r}; available: {sorted(specs)}")
    return parse_spec(specs[name])
