"""JSON encoding of algebras and operator bases.

The on-disk shape is versioned with a ``format`` field; operators are
stored as grammar text so files stay readable and diffable.
"""

from __future__ import annotations

import json

from .errors import ParseError
from .groebner import AnnihilatingIdeal
from .ore import GeneratorSpec, OreAlgebra
from .polys import VariableTable
from .textio import parse_operator

FORMAT_VERSION = 1


def algebra_to_json(algebra):
    return {
        "variables": [{"name": n, "kind": k}
                      for n, k in zip(algebra.table.names, algebra.table.kinds)],
        "generators": [{"name": g.name, "kind": g.kind, "variable": g.var}
                       for g in algebra.gens],
    }


def json_to_algebra(data):
    try:
        variables = data["variables"]
        generators = data["generators"]
        table = VariableTable([v["name"] for v in variables],
                              [v["kind"] for v in variables])
        gens = [GeneratorSpec(g["name"], g["kind"], g["variable"])
                for g in generators]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed algebra description: {exc}") from None
    return OreAlgebra(table, gens)


def ideal_to_json(ideal):
    return {
        "format": FORMAT_VERSION,
        "algebra": algebra_to_json(ideal.algebra),
        "basis": [str(g) for g in ideal.basis],
    }


def json_to_ideal(data):
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object")
    version = data.get("format")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format {version!r}; "
                         f"this build reads format {FORMAT_VERSION}")
    algebra = json_to_algebra(data.get("algebra") or {})
    try:
        texts = list(data["basis"])
    except (KeyError, TypeError):
        raise ParseError("missing operator list under 'basis'") from None
    gens = [parse_operator(t, algebra) for t in texts]
    # stored bases are re-completed on load; for a basis that already is
    # one this is a cheap no-op pass
    return AnnihilatingIdeal.from_generators(algebra, gens)


def dump_ideal(ideal, fp=None):
    data = ideal_to_json(ideal)
    if fp is None:
        return json.dumps(data, indent=2)
    json.dump(data, fp, indent=2)
    fp.write("\n")
    return None


def load_ideal(source):
    """Accepts a JSON string or an open file object."""
    if hasattr(source, "read"):
        data = json.load(source)
    else:
        data = json.loads(source)
    return json_to_ideal(data)
