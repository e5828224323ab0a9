import csv
import io
import json
import math
from fractions import Fraction

import pytest

from loopcalc.cli import main, parse_L_range, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_L_range_parsing():
    assert parse_L_range("8..128") == (8, 16, 32, 64, 128)
    assert parse_L_range("5..7") == ()
    with pytest.raises(UsageError):
        parse_L_range("8-128")


def test_verify_Y_L64(capsys):
    code, out, _ = run(capsys, "verify", "--L", "64")
    assert code == 0
    assert "boundary(Z_64) = 0" in out and "FAIL" not in out


def test_verify_not_power_of_two(capsys):
    code, _, err = run(capsys, "verify", "--L", "3")
    assert code == 2 and "not a power of two" in err


def test_verify_corrupted_chain(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"terms": [{"coeff": "1", "word": [{"base": "A1"}]}]}')
    code, _, err = run(capsys, "verify", "--chain", str(p))
    assert code == 1 and "validation error" in err


def test_verify_good_chain_file(tmp_path, capsys):
    from loopcalc.serialize import dumps
    from loopcalc.spaces import build_ZL

    p = tmp_path / "z.json"
    p.write_text(dumps(build_ZL(4)))
    code, out, _ = run(capsys, "verify", "--chain", str(p), "--L", "4")
    assert code == 0 and "chain file parses" in out


def test_verify_unknown_preset(capsys):
    code, _, err = run(capsys, "verify", "--space", "Q7")
    assert code == 2 and "preset not found" in err


@pytest.mark.parametrize("word, chain, expected", [
    ("a1 c1", "Z64", "524288"),
    ("a1", "B", "0"),
    ("a1 c1", "Z1", "2"),
])
def test_pair(capsys, word, chain, expected):
    code, out, _ = run(capsys, "pair", word, chain)
    assert code == 0 and out.strip() == expected


def test_pair_unknown_label(capsys):
    code, _, err = run(capsys, "pair", "a1 x9", "Z1")
    assert code == 2 and "unknown form label" in err


def test_pair_inexpressible(tmp_path, capsys):
    from loopcalc.chain_calc import loop_power
    from loopcalc.serialize import dumps
    from loopcalc.spaces import preset_Y

    Y = preset_Y()
    p = tmp_path / "c.json"
    p.write_text(dumps(loop_power(2, Y.gen("A1") * Y.gen("A1"))))
    code, _, err = run(capsys, "pair", "a1 a1", str(p))
    assert code == 1 and "inexpressible pairing" in err


def test_scaling_symbolic(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, stdout, _ = run(capsys, "scaling", "--L-range", "2..1024", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [int(r["L"]) for r in rows] == [2 ** k for k in range(1, 11)]
    norm = {Fraction(r["vol_multiscale"]) / (int(r["L"]) * math.log2(int(r["L"])))
            for r in rows if int(r["L"]) >= 4}
    assert len(norm) == 1
    assert "exponent[vol_multiscale]" in stdout


def test_scaling_empty_range(capsys):
    code, out, _ = run(capsys, "scaling", "--L-range", "5..7")
    assert code == 0
    assert out.strip() == "format_version,L,suplength,vol_multiscale,vol_naive,chen_value,runtime_ms"


def test_scaling_truncation_marker(capsys):
    code, out, _ = run(capsys, "scaling", "--L-range", "2..8", "--max-seconds", "0")
    assert code == 0 and "# truncated" in out


def test_scaling_numeric(capsys):
    code, out, err = run(capsys, "scaling", "--numeric", "--L-range", "8..16")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 2 and float(rows[1]["chen_value"]) == pytest.approx(16, rel=1e-3)


def test_certify_Y(capsys):
    code, out, _ = run(capsys, "certify", "--L-range", "16..1024")
    doc = json.loads(out)
    checks = [c["check"] for c in doc["certificates"]]
    assert code == 0 and all(0.5 <= c / checks[0] <= 2 for c in checks)


def test_certify_L1(capsys):
    code, out, _ = run(capsys, "certify", "--L", "1")
    cert = json.loads(out)["certificates"][0]
    assert code == 0 and Fraction(cert["pairing"]) == 2


def test_certify_sphere_examples(capsys):
    for n in (2, 4):
        for ex, power in ((1, n), (2, 2 * n)):
            code, out, _ = run(capsys, "certify", "--space", f"S{n}", "--example", str(ex),
                               "--L-range", "2..256")
            vals = [c["check"] for c in json.loads(out)["certificates"]]
            assert code == 0 and max(vals) / min(vals) <= 2, (n, ex)


def test_certify_hopf_needs_even_sphere(capsys):
    code, _, err = run(capsys, "certify", "--space", "S3", "--example", "2", "--L", "2")
    assert code == 2


def test_threads_env_validated(monkeypatch, capsys):
    monkeypatch.setenv("LOOPCALC_THREADS", "zero")
    code, _, err = run(capsys, "pair", "a1", "B")
    assert code == 2 and "LOOPCALC_THREADS" in err


def test_argparse_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
