"""``loopcalc`` command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from .chain_calc import ChainError, FormalChain, boundary, bracket, cost_bounds, is_cycle
from .chen_pairing import InexpressiblePairing, distortion_certificate, pair
from .homology_builder import log2_exact, multiscale_boundary, multiscale_witness, naive_witness
from .serialize import loads
from .spaces import (
    build_ZL,
    get_preset,
    sphere_degree_family,
    sphere_hopf_family,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMAT_VERSION = 1


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    space: str = "Y"
    Ls: tuple = (1,)
    resolution: int | None = None
    samples: int | None = None
    out: str | None = None
    seed: int = 0
    numeric: bool = False
    tolerance: float | None = None


def _power_of_two(text: str) -> int:
    try:
        L = int(text)
    except ValueError:
        raise UsageError(f"L = {text!r} is not an integer") from None
    try:
        log2_exact(L)
    except ChainError as exc:
        raise UsageError(str(exc)) from None
    return L


def parse_L_range(text: str) -> tuple:
    """``"8..128"`` -> (8, 16, 32, 64, 128); an empty range gives ()."""
    if ".." not in text:
        raise UsageError(f"L range {text!r} must look like LO..HI")
    lo_s, hi_s = text.split("..", 1)
    try:
        lo, hi = int(lo_s), int(hi_s)
    except ValueError:
        raise UsageError(f"L range {text!r} must have integer bounds") from None
    if lo < 1:
        raise UsageError("L range must start at 1 or above")
    out, L = [], 1
    while L <= hi:
        if L >= lo:
            out.append(L)
        L *= 2
    return tuple(out)


def _config(args) -> RunConfig:
    if args.L_range is not None:
        Ls = parse_L_range(args.L_range)
    elif args.L is not None:
        Ls = (_power_of_two(args.L),)
    else:
        Ls = args.default_Ls
    try:
        get_preset(args.space)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"preset not found: {args.space!r} ({exc})") from None
    return RunConfig(args.space, Ls, args.resolution, args.samples, args.out, args.seed,
                     args.numeric, args.tolerance)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# verify

def _random_chain(gens, rng, terms=3, length=3):
    from .chain_calc import atom_chain, linear_combination, product

    out = []
    for _ in range(terms):
        w = atom_chain(rng.choice(gens))
        for _ in range(rng.randint(0, length - 1)):
            w = product(w, atom_chain(rng.choice(gens)))
        out.append((rng.randint(-3, 3) or 1, w))
    return out


def _identity_checks(cfg: RunConfig):
    p = get_preset(cfg.space)
    rng = random.Random(cfg.seed)
    gens = list(p.generators.values())
    checks = []

    def check(name, ok):
        checks.append((name, bool(ok)))

    from .chain_calc import atom_chain

    for g in gens:
        check(f"d^2 = 0 on {g.id}", boundary(boundary(atom_chain(g))).is_zero())
    # d^2, Leibniz and Jacobi on random words; only homogeneous pieces combine
    for n in range(20):
        words = [w for _, w in _random_chain(gens, rng)]
        x, y, z = words
        check(f"d^2 = 0 on random word {n}", boundary(boundary(x)).is_zero())
        if x.curfew is not None and y.curfew is not None:
            lhs = boundary(x * y)
            rhs = boundary(x) * y + (-1) ** x.degree * (x * boundary(y))
            check(f"Leibniz {n}", lhs == rhs)
            check(f"antisymmetry {n}",
                  bracket(x, y) == -((-1) ** (x.degree * y.degree)) * bracket(y, x))
            if z.curfew is not None:
                a, b, c = x.degree, y.degree, z.degree
                jac = ((-1) ** (a * c)) * bracket(x, bracket(y, z)) \
                    + ((-1) ** (b * a)) * bracket(y, bracket(z, x)) \
                    + ((-1) ** (c * b)) * bracket(z, bracket(x, y))
                check(f"Jacobi {n}", jac.is_zero())
    if cfg.space == "Y":
        for L in cfg.Ls:
            check(f"boundary(Z_{L}) = 0", is_cycle(build_ZL(L)))
        L = max(cfg.Ls)
        names = [g.id for g in gens if g.spherical]
        for i, a in enumerate(names):
            for b in names[i:]:
                za, zb = p.gen(a), p.gen(b)
                P = multiscale_witness(za, zb, L)
                check(f"telescope boundary {a},{b} L={L}",
                      boundary(P) == multiscale_boundary(za, zb, L))
    else:
        zeta = p.gen("zeta")
        for L in cfg.Ls:
            check(f"boundary({{{L}}}zeta) = 0", is_cycle(sphere_degree_family(p.dimension)(L)))
            P = multiscale_witness(zeta, zeta, L)
            check(f"telescope boundary zeta,zeta L={L}",
                  boundary(P) == multiscale_boundary(zeta, zeta, L))
    return checks


def _numeric_checks(cfg: RunConfig):
    from .loop_geom import area_form, chen_integral_numeric, power, sweepout_s2
    from .numeric_witness import boundary_residual, build_P_numeric, target_boundary

    R = cfg.resolution or 64
    S = cfg.samples or 256
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-3
    checks = []
    f = sweepout_s2(R, S)
    for L in (1, 2, 4, 8):
        v = chen_integral_numeric([area_form()], power(L, f))
        checks.append((f"<area, {{{L}}}zeta> = {L} (got {v:.6f})", abs(v - L) <= L * tol))
    for L in (2, 4):
        res, n = boundary_residual(build_P_numeric(L, 4, 8), target_boundary(L, 4, 8))
        checks.append((f"numeric telescope faces L={L}", res == 0 and n == 0))
    return checks


def cmd_verify(cfg: RunConfig, chain_path: str | None = None) -> int:
    p = get_preset(cfg.space)
    lines = []
    if chain_path:
        try:
            with open(chain_path) as fh:
                c = loads(fh.read(), p.generators)
        except OSError as exc:
            raise UsageError(f"cannot read {chain_path}: {exc}") from None
        except ChainError as exc:
            print(f"validation error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        lines.append(f"PASS  chain file parses (degree {c.degree}, curfew {c.curfew})")
        lines.append(f"{'PASS' if boundary(boundary(c)).is_zero() else 'FAIL'}  d^2 = 0 on chain file")
    checks = _identity_checks(cfg)
    if cfg.numeric:
        checks += _numeric_checks(cfg)
    lines += [f"{'PASS' if ok else 'FAIL'}  {name}" for name, ok in checks]
    failed = sum(1 for ln in lines if ln.startswith("FAIL"))
    lines.append(f"{len(lines) - failed} passed, {failed} failed")
    _emit("\n".join(lines), cfg.out)
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# pair

def _resolve_chain(p, ref: str) -> FormalChain:
    import os
    import re

    if os.path.exists(ref):
        with open(ref) as fh:
            return loads(fh.read(), p.generators)
    if ref in p.generators:
        return p.gen(ref)
    m = re.fullmatch(r"Z_?(\d+)", ref)
    if m and p.name == "Y":
        return build_ZL(_power_of_two(m.group(1)))
    m = re.fullmatch(r"(deg|hopf)_?(\d+)", ref)
    if m and p.name != "Y":
        fam = sphere_degree_family if m.group(1) == "deg" else sphere_hopf_family
        return fam(p.dimension)(_power_of_two(m.group(2)))
    raise UsageError(f"unknown chain {ref!r}: not a file, generator or builder id")


def cmd_pair(cfg: RunConfig, word: str, chain: str) -> int:
    p = get_preset(cfg.space)
    try:
        w = p.word(word)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    try:
        c = _resolve_chain(p, chain)
        value = pair(w, c, p.pairing_table)
    except InexpressiblePairing as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    except ChainError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(str(value), cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# scaling

SYMBOLIC_COLUMNS = ("format_version", "L", "suplength", "vol_multiscale", "vol_naive",
                    "chen_value", "runtime_ms")


def _symbolic_rows(cfg: RunConfig, deadline: float):
    p = get_preset(cfg.space)
    rows, truncated = [], False
    for L in cfg.Ls:
        if time.perf_counter() > deadline:
            truncated = True
            break
        t0 = time.perf_counter()
        if p.name == "Y":
            z = build_ZL(L)
            w = p.word("a1 c1")
            a, b = p.gen("A1"), p.gen("B")
        else:
            z = sphere_degree_family(p.dimension)(L)
            w = p.word("omega")
            a = b = p.gen("zeta")
        cb = cost_bounds(z)
        naive = cost_bounds(naive_witness(a, b, L)).volume if L > 1 else Fraction(0)
        chen = pair(w, z, p.pairing_table)
        rows.append({"format_version": FORMAT_VERSION, "L": L, "suplength": cb.suplength,
                     "vol_multiscale": cb.volume, "vol_naive": naive, "chen_value": chen,
                     "runtime_ms": round(1000 * (time.perf_counter() - t0), 3)})
    return rows, truncated


def _numeric_rows(cfg: RunConfig, deadline: float):
    from dataclasses import asdict

    from .numeric_witness import DEFAULT_RESOLUTION, DEFAULT_SAMPLES
    from .scaling import scaling_row

    R = cfg.resolution or DEFAULT_RESOLUTION
    S = cfg.samples or DEFAULT_SAMPLES
    rows, truncated = [], False
    for L in cfg.Ls:
        if time.perf_counter() > deadline:
            truncated = True
            break
        rows.append(asdict(scaling_row(L, R, S)))
    return rows, truncated


def _fits(rows):
    from .scaling import fit_exponent

    out = {}
    big = [r for r in rows if r["L"] >= 2]
    if len(big) >= 2:
        Ls = [r["L"] for r in big]
        for col in ("suplength", "vol_multiscale", "vol_naive"):
            vals = [float(r[col]) for r in big]
            if all(v > 0 for v in vals):
                out[col] = fit_exponent(Ls, vals)
    return out


def cmd_scaling(cfg: RunConfig, max_seconds: float = math.inf) -> int:
    import csv

    deadline = time.perf_counter() + max_seconds
    rows, truncated = (_numeric_rows if cfg.numeric else _symbolic_rows)(cfg, deadline)
    out = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=SYMBOLIC_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: r[k] for k in SYMBOLIC_COLUMNS})
        if truncated:
            out.write("# truncated: resource cap reached\n")
    finally:
        if cfg.out:
            out.close()
    msg = sys.stderr if not cfg.out else sys.stdout
    for col, e in _fits(rows).items():
        print(f"exponent[{col}] = {e:.4f}", file=msg)
    if not cfg.numeric:
        for r in rows:
            if r["L"] >= 2:
                norm = Fraction(r["vol_multiscale"]) / (r["L"] * log2_exact(r["L"]))
                print(f"L={r['L']}: suplength/L = {Fraction(r['suplength']) / r['L']}, "
                      f"volume/(L log2 L) = {norm}, "
                      f"naive/L^2 = {Fraction(r['vol_naive']) / r['L'] ** 2}", file=msg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# certify

def cmd_certify(cfg: RunConfig, word: str | None, example: int = 1) -> int:
    p = get_preset(cfg.space)
    if p.name == "Y":
        word = word or "a1 c1"
        family, exponent, label = build_ZL, 6, "value*log2(L)/L^6"
    else:
        n = p.dimension
        word = word or ("omega" if example == 1 else "omega omega")
        if example == 1:
            family, exponent = sphere_degree_family(n), n
        else:
            try:
                family = sphere_hopf_family(n)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            exponent = 2 * n
        label = f"value/L^{exponent}"
    try:
        w = p.word(word)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    certs = []
    for L in cfg.Ls:
        try:
            c = distortion_certificate(w, family, L, p.pairing_table)
        except InexpressiblePairing as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_FAIL
        except ChainError as exc:
            print(f"rejected: {exc}", file=sys.stderr)
            return EXIT_FAIL
        d = c.to_json()
        log_power = 1 if p.name == "Y" else 0
        d["check"] = c.normalized(exponent, log_power) if L > 1 or log_power == 0 else None
        certs.append(d)
    doc = {"format_version": FORMAT_VERSION, "space": p.name, "word": word,
           "check_label": label, "certificates": certs}
    _emit(json.dumps(doc, indent=1), cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", default="Y", help="preset: Y or S<n> (default Y)")
    common.add_argument("--L", help="single L, a power of two")
    common.add_argument("--L-range", dest="L_range", help="powers of two in LO..HI")
    common.add_argument("--resolution", type=int, help="parameter grid cells per axis")
    common.add_argument("--samples", type=int, help="time samples per unit curfew")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--numeric", dest="numeric", action="store_true")
    mode.add_argument("--symbolic", dest="numeric", action="store_false")
    common.add_argument("--tolerance", type=float, help="override numeric tolerance")

    parser = argparse.ArgumentParser(prog="loopcalc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run the identity checks")
    v.add_argument("--chain", help="chain JSON file to validate")
    v.set_defaults(default_Ls=(1, 2, 4, 8))

    pr = sub.add_parser("pair", parents=[common], help="evaluate an iterated integral")
    pr.add_argument("word", help='whitespace-separated form labels, e.g. "a1 c1"')
    pr.add_argument("chain", help="generator id, Z<L>, deg<L>, hopf<L>, or a JSON file")
    pr.set_defaults(default_Ls=(1,))

    sc = sub.add_parser("scaling", parents=[common], help="write a CSV scaling report")
    sc.add_argument("--max-seconds", type=float, default=math.inf,
                    help="stop after this long and mark the CSV truncated")
    sc.set_defaults(default_Ls=(2, 4, 8, 16, 32, 64, 128, 256, 512, 1024))

    ce = sub.add_parser("certify", parents=[common], help="distortion certificates as JSON")
    ce.add_argument("--word", help="form word (default a1 c1 for Y, omega for spheres)")
    ce.add_argument("--example", type=int, choices=(1, 2), default=1,
                    help="sphere family: 1 = degree family, 2 = Whitehead square")
    ce.set_defaults(default_Ls=(16, 32, 64, 128, 256, 512, 1024))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        from .scaling import thread_count

        thread_count()
        cfg = _config(args)
        if args.command == "verify":
            return cmd_verify(cfg, args.chain)
        if args.command == "pair":
            return cmd_pair(cfg, args.word, args.chain)
        if args.command == "scaling":
            return cmd_scaling(cfg, args.max_seconds)
        return cmd_certify(cfg, args.word, args.example)
    except (UsageError, ValueError) as exc:
        print(f"loopcalc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
