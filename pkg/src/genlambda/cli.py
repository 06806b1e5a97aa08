"""Command-line interface: ``genlambda {expand,cosets,modpoly,verify,eval}``.

Exit status is 0 on success, 2 when arguments violate a constraint, 3 when
a computation runs out of precision and 1 when ``verify`` finds a mismatch
or a certificate cannot be issued.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .phiexp import ParameterError

log = logging.getLogger("genlambda")

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_VALIDATION = 2
EXIT_PRECISION = 3

CACHE_ENV = "GENLAMBDA_CACHE_DIR"


class ValidationError(ValueError):
    pass


def _ints(text: str, n: int, what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValidationError(f"{what} must be {n} comma-separated integers, got {text!r}") from None
    if len(vals) != n:
        raise ValidationError(f"{what} must be {n} comma-separated integers, got {text!r}")
    return vals


def _matrix(args):
    from .phiexp import UnimodularMatrix

    if args.matrix is None:
        return UnimodularMatrix(1, 0, 0, 1)
    a, b, c, d = _ints(args.matrix, 4, "--matrix")
    if a * d - b * c != 1:
        raise ValidationError(f"--matrix requires a*d - b*c = 1 (got {a * d - b * c})")
    return UnimodularMatrix(a, b, c, d)


def _level(args) -> int:
    from .cyclotomic import MIN_LEVEL

    if args.level < MIN_LEVEL:
        raise ValidationError(f"requires N >= {MIN_LEVEL} (got N={args.level})")
    return args.level


def _params(args):
    from .phiexp import LambdaParams

    N = _level(args)
    k, l = args.k, args.l  # noqa: E741
    if k is None or l is None:
        raise ValidationError("requires both --k and --l")
    if not (1 < l < N / 2 and 1 < k < N / 2 and k != l):
        raise ValidationError(f"requires 1 < l != k < N/2 (got N={N}, k={k}, l={l})")
    return LambdaParams(N, k, l)


def _emit(text: str, out: str | None):
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# expand ---------------------------------------------------------------

def cmd_expand(args) -> int:
    from .phiexp import lambda_slash, phi_slash, w_slash

    N = _level(args)
    A = _matrix(args)
    prec = args.prec if args.prec is not None else 2 * N
    if prec < 1:
        raise ValidationError("--prec must be positive")
    modes = sum(x is not None for x in (args.phi, args.w)) + (args.k is not None or args.l is not None)
    if modes != 1:
        raise ValidationError("choose exactly one of --k/--l, --phi, --w")
    if args.phi is not None:
        if args.phi % N == 0:
            raise ValidationError(f"--phi requires s nonzero mod N (got s={args.phi})")
        f = phi_slash(args.phi, A, prec, N)
    elif args.w is not None:
        a1, a2, a3 = _ints(args.w, 3, "--w")
        if not all(0 < x <= N / 2 for x in (a1, a2, a3)) or len({a1, a2, a3}) != 3:
            raise ValidationError(f"--w requires 0 < a_i <= N/2 pairwise distinct (got {a1},{a2},{a3})")
        f = w_slash(a1, a2, a3, A, prec, N)
    else:
        f = lambda_slash(_params(args), A, prec)
    if args.format == "json":
        obj = f.to_json_obj()
        obj["order"] = f.order() if not f.is_zero() else None
        obj["matrix"] = A.rows()
        _emit(json.dumps(obj, sort_keys=True), args.out)
    else:
        _emit(f"# matrix {A.rows()}\n" + f.to_text(), args.out)
    return EXIT_OK


# cosets ---------------------------------------------------------------

def cmd_cosets(args) -> int:
    from .cosets import build_transversal

    R = build_transversal(_level(args))
    if args.format == "json":
        _emit(R.to_json(), args.out)
    else:
        lines = [f"# {len(R)} coset representatives for level {R.N}"]
        for e in R:
            lines.append(f"v={e.v} t={e.t} u={e.u} k={e.k}  {e.matrix.rows()}")
        _emit("\n".join(lines), args.out)
    return EXIT_OK


# modpoly with cache ---------------------------------------------------

def cache_dir(args) -> Path:
    if getattr(args, "cache_dir", None):
        return Path(args.cache_dir)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "genlambda"


def _cache_path(base: Path, N: int, k: int, l: int) -> Path:  # noqa: E741
    return base / f"modpoly-N{N}-k{k}-l{l}-v{__version__}.json"


def load_cached(base: Path, N: int, k: int, l: int):  # noqa: E741
    from .modpoly import ModularEquation

    path = _cache_path(base, N, k, l)
    digest = path.with_suffix(".sha256")
    if not path.exists() or not digest.exists():
        return None
    text = path.read_text()
    if hashlib.sha256(text.encode()).hexdigest() != digest.read_text().strip():
        log.warning("cache entry %s failed its checksum; recomputing", path)
        return None
    try:
        return ModularEquation.from_json(text)
    except (ValueError, KeyError) as exc:
        log.warning("cache entry %s is unreadable (%s); recomputing", path, exc)
        return None


def store_cached(base: Path, me) -> None:
    base.mkdir(parents=True, exist_ok=True)
    path = _cache_path(base, me.N, me.k, me.l)
    text = me.to_json()
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text)
    tmp.replace(path)
    path.with_suffix(".sha256").write_text(hashlib.sha256(text.encode()).hexdigest() + "\n")


def get_modular_equation(p, args, *, use_cache: bool = True):
    from .modpoly import modular_equation

    base = cache_dir(args)
    me = load_cached(base, p.N, p.k, p.l) if use_cache and not args.no_cache else None
    if me is None:
        me = modular_equation(p, workers=args.workers)
        if use_cache and not args.no_cache:
            try:
                store_cached(base, me)
            except OSError as exc:
                log.warning("could not write cache in %s: %s", base, exc)
    return me


def cmd_modpoly(args) -> int:
    p = _params(args)
    if args.workers < 1:
        raise ValidationError("--workers must be >= 1")
    me = get_modular_equation(p, args)
    if args.format == "json":
        _emit(me.to_json(), args.out)
    else:
        lines = [f"# Phi(X, J) for N={me.N} k={me.k} l={me.l}: degree {me.degree} in X, "
                 f"{me.j_degree()} in J; integer={me.verified_integer} guard={me.guard_terms}"]
        for i, row in enumerate(me.coeffs):
            if me.verified_integer:
                lines.append(f"X^{i}: " + " ".join(str(c.num[0]) for c in row))
            else:
                lines.append(f"X^{i}: " + " ".join(repr(c) for c in row))
        _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .modpoly import ModularEquation, modular_equation
    from .phiexp import LambdaParams

    text = Path(args.infile).read_text()
    try:
        stored = ModularEquation.from_json(text)
    except (ValueError, KeyError) as exc:
        raise ValidationError(f"{args.infile} is not a modular equation file: {exc}") from None
    fresh = modular_equation(LambdaParams(stored.N, stored.k, stored.l), workers=args.workers)
    if fresh.to_json() == text:
        print("OK")
        return EXIT_OK
    print(f"MISMATCH: {args.infile} differs from a fresh computation")
    return EXIT_MISMATCH


# eval -----------------------------------------------------------------

def cmd_eval(args) -> int:
    import mpmath

    from .cmeval import (
        CertificationError,
        CMPoint,
        UnsupportedClassNumber,
        certify_integral,
        eval_j,
        eval_lambda,
    )
    from .modpoly import ModularEquation

    p = _params(args)
    if args.bits < 64:
        raise ValidationError("--bits must be >= 64")
    try:
        pt = CMPoint.canonical(args.disc)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    bits = args.bits
    if not args.certify:
        with mpmath.workprec(bits):
            lam = eval_lambda(p, pt, bits)
            jv = eval_j(pt.tau(bits), bits)
        digits = max(15, int(bits * 0.30103) - 5)
        obj = {
            "N": p.N, "k": p.k, "l": p.l, "discriminant": args.disc,
            "point": [pt.a, pt.b, pt.c], "bits": bits,
            "lambda": {"re": mpmath.nstr(lam.real, digits), "im": mpmath.nstr(lam.imag, digits)},
            "j": {"re": mpmath.nstr(jv.real, digits), "im": mpmath.nstr(jv.imag, digits)},
        }
        _emit(json.dumps(obj, sort_keys=True, indent=1), args.out)
        return EXIT_OK
    if args.modpoly:
        me = ModularEquation.from_json(Path(args.modpoly).read_text())
        if (me.N, me.k, me.l) != (p.N, p.k, p.l):
            raise ValidationError(f"{args.modpoly} holds N={me.N} k={me.k} l={me.l}, not the requested parameters")
    else:
        me = get_modular_equation(p, args)
    try:
        cert = certify_integral(p, pt, me, bits, minimal=args.minimal)
    except UnsupportedClassNumber as exc:
        print(f"error: unsupported class number: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CertificationError as exc:
        print(f"error: certification failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    if args.format == "json":
        _emit(cert.to_json(), args.out)
    else:
        obj = cert.to_json_obj()
        lines = [f"{key}: {obj[key]}" for key in sorted(obj)]
        _emit("\n".join(lines), args.out)
    return EXIT_OK


# parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genlambda", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, params=False):
        sp.add_argument("--level", "-N", type=int, required=True, help="level N >= 7")
        if params:
            sp.add_argument("--k", type=int)
            sp.add_argument("--l", type=int)
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--out", help="write to this file instead of stdout")

    def caching(sp):
        sp.add_argument("--cache-dir", help=f"cache directory (default ${CACHE_ENV} or ~/.cache/genlambda)")
        sp.add_argument("--no-cache", action="store_true")
        sp.add_argument("--workers", type=int, default=1, help="processes for factor expansion")

    sp = sub.add_parser("expand", help="q-expansion of Lambda, phi_s or W under a matrix")
    common(sp, params=True)
    sp.add_argument("--phi", type=int, metavar="S", help="expand phi_S[A]_2")
    sp.add_argument("--w", metavar="A1,A2,A3", help="expand W_[A1,A2,A3] o A")
    sp.add_argument("--matrix", metavar="a,b,c,d", help="matrix A in SL2(Z) (default identity)")
    sp.add_argument("--prec", type=int, help="number of q-terms (default 2N)")
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("cosets", help="coset representatives of Gamma_1(N){+-1}")
    common(sp)
    sp.set_defaults(func=cmd_cosets)

    sp = sub.add_parser("modpoly", help="modular equation Phi(X, J)")
    common(sp, params=True)
    caching(sp)
    sp.set_defaults(func=cmd_modpoly)

    sp = sub.add_parser("verify", help="recompute a modular equation file and compare bytes")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("eval", help="evaluate Lambda and j at (D + sqrt D)/2, optionally certify")
    common(sp, params=True)
    caching(sp)
    sp.add_argument("--disc", type=int, required=True, help="negative discriminant D")
    sp.add_argument("--bits", type=int, default=256)
    sp.add_argument("--certify", action="store_true")
    sp.add_argument("--modpoly", help="modular equation JSON file to use for the certificate")
    sp.add_argument("--minimal", action="store_true", help="also report the minimal polynomial")
    sp.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    from .qlaurent import PrecisionExhausted

    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PrecisionExhausted as exc:
        print(f"error: precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
