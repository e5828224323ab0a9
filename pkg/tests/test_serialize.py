import json

import pytest
from hypothesis import given, settings

from loopcalc.chain_calc import ChainError
from loopcalc.homology_builder import multiscale_witness
from loopcalc.serialize import chain_from_json, chain_to_json, dumps, loads
from loopcalc.spaces import build_ZL, preset_Y

from .strategies import chains

GENS = preset_Y().generators


@pytest.mark.parametrize("L", [1, 8])
def test_roundtrip_ZL(L):
    z = build_ZL(L)
    s = dumps(z)
    back = loads(s, GENS)
    assert back == z
    assert dumps(back) == s


def test_roundtrip_witness_block():
    Y = preset_Y()
    P = multiscale_witness(Y.gen("A1"), Y.gen("B"), 4)
    assert loads(dumps(P), GENS) == P


@settings(max_examples=200)
@given(chains())
def test_roundtrip_random(c):
    assert loads(dumps(c), GENS) == c


@pytest.mark.parametrize("text, msg", [
    ("not json", "invalid chain JSON"),
    ("[1, 2]", "expected an object"),
    ('{"terms": [{"coeff": "1", "word": [{"base": "Q", "scale": 1}]}]}', "unknown generator"),
    ('{"terms": [{"coeff": "1"}]}', "invalid chain JSON"),
    ('{"format_version": 9, "terms": []}', "format_version"),
    ('{"degree": 2, "terms": [{"coeff": "1", "word": [{"base": "A1", "scale": 1}]}]}',
     "declared degree"),
])
def test_corrupted_input(text, msg):
    with pytest.raises(ChainError, match=msg):
        loads(text, GENS)


def test_schema_has_version():
    d = chain_to_json(build_ZL(1))
    assert d["format_version"] == 1
    assert json.loads(json.dumps(d)) == d
