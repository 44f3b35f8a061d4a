"""JSON network files and evidence tokens.

Network file layout::

    {
      "variables": [{"name": "asia", "states": ["yes", "no"]}, ...],
      "cpts": [{"child": "tub", "parents": ["asia"], "values": [...]}, ...]
    }

``values`` lists the CPT with the child varying fastest, then the parents
in the listed order (first parent next-fastest).
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Iterable

from .dense import DenseTable
from .domain import Domain
from .errors import DomainError, NetworkError
from .inference import Evidence, NetworkSpec, validate_cpt_list
from .table import from_dense, to_dense

_TOP_KEYS = {"variables", "cpts"}
_VAR_KEYS = {"name", "states"}
_CPT_KEYS = {"child", "parents", "values"}


def _check_keys(obj, expected: set, what: str) -> None:
    if not isinstance(obj, dict):
        raise NetworkError(f"{what} must be a JSON object")
    missing = expected - obj.keys()
    extra = obj.keys() - expected
    if missing:
        raise NetworkError(f"{what} is missing keys {sorted(missing)}")
    if extra:
        raise NetworkError(f"{what} has unexpected keys {sorted(extra)}")


def parse_network(text: str) -> NetworkSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"invalid JSON: {exc}") from None
    _check_keys(doc, _TOP_KEYS, "network document")

    labels, states = [], []
    for i, var in enumerate(doc["variables"]):
        _check_keys(var, _VAR_KEYS, f"variables[{i}]")
        labels.append(var["name"])
        states.append([str(s) for s in var["states"]])
    domain = Domain(labels, states)

    tables = []
    for i, cpt in enumerate(doc["cpts"]):
        _check_keys(cpt, _CPT_KEYS, f"cpts[{i}]")
        child, parents = cpt["child"], list(cpt["parents"])
        family = [child] + parents
        for v in family:
            if v not in domain:
                raise DomainError(f"cpts[{i}] names unknown variable {v!r}")
        sub = domain.subdomain(family)
        values = cpt["values"]
        expected = sub.statespace_size()
        if len(values) != expected:
            raise NetworkError(
                f"CPT of {child!r} has {len(values)} values, expected {expected}"
            )
        tables.append(from_dense(DenseTable(sub, values)))
    return validate_cpt_list(tables)


def load_network(path: str | Path) -> NetworkSpec:
    return parse_network(Path(path).read_text(encoding="utf-8"))


def load_asia() -> NetworkSpec:
    """The bundled eight-variable chest-clinic network."""
    text = resources.files("sparsejt").joinpath("data/asia.json").read_text(encoding="utf-8")
    return parse_network(text)


def asia_path() -> Path:
    return Path(str(resources.files("sparsejt").joinpath("data/asia.json")))


def serialize_network(spec: NetworkSpec) -> str:
    doc = {
        "variables": [
            {"name": l, "states": list(spec.domain.states(l))} for l in spec.domain.labels
        ],
        "cpts": [
            {
                "child": t.labels[0],
                "parents": list(t.labels[1:]),
                "values": to_dense(t).values.tolist(),
            }
            for t in spec.cpts
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_evidence(tokens: str | Iterable[str] | None) -> Evidence:
    """``"tub=yes smoke=no"`` or ``["tub=yes", ...]`` to :class:`Evidence`.

    State validity is checked later, against the network.
    """
    if tokens is None:
        return Evidence({})
    if isinstance(tokens, str):
        tokens = tokens.split()
    out: dict[str, str] = {}
    for tok in tokens:
        if tok.count("=") != 1:
            raise ValueError(f"malformed evidence token {tok!r}; expected var=state")
        var, st = (p.strip() for p in tok.split("="))
        if not var or not st:
            raise ValueError(f"malformed evidence token {tok!r}; expected var=state")
        if var in out:
            raise ValueError(f"duplicate evidence for variable {var!r}")
        out[var] = st
    return Evidence(out)
