"""JSON encoding of chains.

Schema (``format_version`` 1)::

    {"format_version": 1, "degree": 4, "curfew": "3",
     "terms": [{"coeff": "2", "word": [{"base": "A1", "scale": 4}, ...]}]}

A base is a generator id, or an object ``{"witness": {...}}``,
``{"block": {...}}`` or ``{"chain": {...}}`` for nested sub-expressions.
Encoding is canonical, so ``dumps(loads(s)) == s``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping

from .chain_calc import Atom, Block, ChainError, FormalChain, Generator, Witness

FORMAT_VERSION = 1

__all__ = ["chain_to_json", "chain_from_json", "dumps", "loads", "FORMAT_VERSION"]


def _base_to_json(base):
    if isinstance(base, Generator):
        return base.id
    if isinstance(base, Witness):
        return {"witness": {
            "id": base.id,
            "dimension": base.dimension,
            "curfew": str(base.curfew),
            "suplength": str(base.suplength),
            "volume": str(base.volume),
            "lipschitz": str(base.lipschitz),
            "skeleton": base.skeleton,
            "boundary": chain_to_json(base.boundary),
            "provenance": [list(p) for p in base.provenance],
            "pieces": [[name, str(v)] for name, v in base.pieces],
        }}
    if isinstance(base, Block):
        return {"block": {
            "id": base.id,
            "suplength": str(base.suplength),
            "volume": str(base.volume),
            "body": chain_to_json(base.body),
        }}
    if isinstance(base, FormalChain):
        return {"chain": chain_to_json(base)}
    raise ChainError(f"cannot serialize atom base {base!r}")


def chain_to_json(c: FormalChain) -> dict:
    terms = [
        {"coeff": str(v), "word": [{"base": _base_to_json(a.base), "scale": a.scale} for a in w]}
        for w, v in c.terms.items()
    ]
    terms.sort(key=lambda t: json.dumps(t, sort_keys=True))
    return {
        "format_version": FORMAT_VERSION,
        "degree": c.degree,
        "curfew": None if c.curfew is None else str(c.curfew),
        "terms": terms,
    }


def _base_from_json(obj, generators: Mapping[str, Generator]):
    if isinstance(obj, str):
        try:
            return generators[obj]
        except KeyError:
            raise ChainError(f"unknown generator {obj!r}") from None
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ChainError(f"malformed atom base {obj!r}")
    kind, d = next(iter(obj.items()))
    if kind == "witness":
        return Witness(
            id=d["id"],
            dimension=int(d["dimension"]),
            boundary=chain_from_json(d["boundary"], generators),
            curfew=Fraction(d["curfew"]),
            suplength=Fraction(d["suplength"]),
            volume=Fraction(d["volume"]),
            skeleton=int(d["skeleton"]),
            lipschitz=Fraction(d["lipschitz"]),
            provenance=tuple(tuple(p) for p in d["provenance"]),
            pieces=tuple((name, Fraction(v)) for name, v in d["pieces"]),
        )
    if kind == "block":
        return Block(d["id"], chain_from_json(d["body"], generators),
                     Fraction(d["suplength"]), Fraction(d["volume"]))
    if kind == "chain":
        return chain_from_json(d, generators)
    raise ChainError(f"unknown atom base kind {kind!r}")


def chain_from_json(obj: dict, generators: Mapping[str, Generator]) -> FormalChain:
    """Decode and validate; raises :class:`ChainError` on malformed input."""
    try:
        if obj.get("format_version", FORMAT_VERSION) != FORMAT_VERSION:
            raise ChainError(f"unsupported format_version {obj.get('format_version')!r}")
        items = []
        for t in obj["terms"]:
            word = tuple(Atom(_base_from_json(a["base"], generators), int(a["scale"]))
                         for a in t["word"])
            items.append((word, Fraction(t["coeff"])))
        c = FormalChain(items)
    except ChainError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError, ZeroDivisionError) as exc:
        raise ChainError(f"invalid chain JSON: {exc!r}") from None
    if len(c.terms) != len(obj["terms"]):
        raise ChainError("invalid chain JSON: repeated or zero terms")
    if c.degree != obj.get("degree"):
        raise ChainError(f"declared degree {obj.get('degree')} != {c.degree}")
    declared = obj.get("curfew")
    if (declared is None) != (c.curfew is None) or (
            declared is not None and Fraction(declared) != c.curfew):
        raise ChainError(f"declared curfew {declared} != {c.curfew}")
    return c


def dumps(c: FormalChain) -> str:
    return json.dumps(chain_to_json(c), sort_keys=True)


def loads(s: str, generators: Mapping[str, Generator]) -> FormalChain:
    try:
        obj = json.loads(s)
    except json.JSONDecodeError as exc:
        raise ChainError(f"invalid chain JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ChainError("invalid chain JSON: expected an object")
    return chain_from_json(obj, generators)
