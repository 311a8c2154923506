import argparse
import os
import sys
import typing

from ellcarm.arith import Factorization, factorize
from ellcarm.curve import CurveModel, DEFAULT_ENUM_CAP, parse_curve_string
from ellcarm.korselt import (
    census_carmichael_curves,
    CensusResult,
    classify_pq,
    DEFAULT_CENSUS_CAP,
    DEFAULT_ORACLE_CAP,
    is_elliptic_pseudoprime,
    build_certificate,
    KorseltCertificate,
    PqClass,
    Verdict,
)
from ellcarm.lseries import AnCache, a_n
from ellcarm.search import (
    evaluate,
    OutputFormat,
    Parity,
    run_search,
    SearchConfig,
    SearchMode,
    SearchRecord,
    verdict_for,
    write_records,
)
from ellcarm.utils import (
    ArithOverflowError,
    CurveFormatError,
    DomainError,
    NotApplicableError,
    ResourceLimitError,
    SingularCurveError,
)

EXIT_TRUE: typing.Final[int] = 0
EXIT_FALSE: typing.Final[int] = 1
EXIT_NOT_APPLICABLE: typing.Final[int] = 2
EXIT_USAGE: typing.Final[int] = 64
EXIT_SINGULAR: typing.Final[int] = 65
EXIT_RESOURCE: typing.Final[int] = 66
EXIT_FAILURE: typing.Final[int] = 70

VERDICT_EXIT_CODES: typing.Final[typing.Dict[Verdict, int]] = {
    Verdict.TRUE : EXIT_TRUE,
    Verdict.FALSE : EXIT_FALSE,
    Verdict.NOT_APPLICABLE : EXIT_NOT_APPLICABLE,
}

class ArgumentParser(argparse.ArgumentParser):
    """
    argparse with usage errors reported as exit code 64
    """

    def error(self, message: str) -> typing.NoReturn:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)

def _with_factors(value: int) -> str:
    if value <= 1:
        return str(value)
    return f"{value} = {factorize(value).format()}"

def _load_cache(curve: CurveModel, path: str) -> AnCache:
    if path:
        return AnCache.load(path, curve)
    return AnCache(curve)

def _parse_point(text: str) -> typing.List[int]:
    try:
        coords: typing.List[int] = [int(part) for part in text.split(",")]
    except ValueError as e:
        raise DomainError(f"point \"{text}\" must be comma-separated integers") from e
    if len(coords) not in (2, 3):
        raise DomainError(f"point \"{text}\" needs 2 or 3 coordinates")
    return coords

def cmd_check(
    curve: CurveModel,
    n: int,
    mode: SearchMode,
    output: OutputFormat = OutputFormat.TABLE,
    point: typing.Sequence[int] | None = None,
    cache: AnCache | None = None,
    oracle_cap: int = DEFAULT_ORACLE_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
    out: typing.TextIO = sys.stdout,
) -> int:
    """
    Prints the certificate of n and returns the exit code of its verdict
    """
    cert: KorseltCertificate
    if mode == SearchMode.PSEUDOPRIME and point is not None:
        cert = build_certificate(curve, n, cache)
        is_elliptic_pseudoprime(curve, n, point, cache, certificate=cert)
    else:
        cert = evaluate(curve, n, mode, cache, enum_cap, oracle_cap)
    write_records([SearchRecord(n, cert)], output, out)
    verdict: Verdict | None = verdict_for(cert, mode)
    return VERDICT_EXIT_CODES[verdict if verdict is not None else Verdict.NOT_APPLICABLE]

def cmd_search(config: SearchConfig, cache: AnCache | None = None, out: typing.TextIO = sys.stdout) -> int:
    write_records(run_search(config, cache), config.output, out)
    return EXIT_TRUE

def cmd_an(curve: CurveModel, n: int, cache: AnCache | None = None, out: typing.TextIO = sys.stdout) -> int:
    """
    Prints n, a_n and n + 1 - a_n with their factorizations
    """
    try:
        an: int = a_n(curve, n, cache)
    except NotApplicableError as e:
        print(str(e), file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    out.write(f"n = {_with_factors(n)}\n")
    out.write(f"a_n = {an}\n")
    out.write(f"n+1-a_n = {_with_factors(n + 1 - an)}\n")
    return EXIT_TRUE

def format_pq(cert: KorseltCertificate, pq: PqClass) -> str:
    return (
        f"{cert.n} = {cert.factorization.format()} | p = {pq.p} | q = {pq.q} | ap = {pq.ap} | aq = {pq.aq} | "
        + " ".join(str(tag) for tag in pq.tags)
    )

def cmd_pq(
    curve: CurveModel,
    max_n: int,
    min_n: int = 2,
    threads: int = 1,
    cache: AnCache | None = None,
    out: typing.TextIO = sys.stdout,
) -> int:
    """
    Classifies every square-free two-prime Type I hit in [min_n, max_n]
    """
    if max_n < max(min_n, 2):
        return EXIT_TRUE
    config: SearchConfig = SearchConfig(curve, max(min_n, 2), max_n, SearchMode.TYPE1, threads=threads)
    for record in run_search(config, cache):
        cert: KorseltCertificate | None = record.certificate
        if cert is None:
            continue
        fact: Factorization = cert.factorization
        if fact.num_primes != 2 or not fact.is_squarefree():
            continue
        out.write(format_pq(cert, classify_pq(curve, cert.n, cert)) + "\n")
    return EXIT_TRUE

def format_census(result: CensusResult) -> str:
    lines: typing.List[str] = [f"n = {result.n} | count = {result.count} | unit_total = {result.unit_total}"]
    for p, counts in result.classes.items():
        for entry in counts:
            lines.append(f"    p = {p} | ap = {entry.ap} | exponent = {entry.exponent} | count = {entry.count}")
    for witness in result.witnesses:
        lines.append(f"    witness = {','.join(str(a) for a in witness)}")
    return "\n".join(lines)

def cmd_census(
    n: int, list_limit: int = 0, cap: int = DEFAULT_CENSUS_CAP, out: typing.TextIO = sys.stdout
) -> int:
    out.write(format_census(census_carmichael_curves(n, cap, list_limit)) + "\n")
    return EXIT_TRUE

def build_parser() -> ArgumentParser:
    parser: ArgumentParser = ArgumentParser(
        prog="ellcarm",
        description="Elliptic pseudoprimes, elliptic Korselt numbers and elliptic Carmichael numbers",
        epilog="Example usage:\n    ellcarm check --curve 0,0,0,1,3 --n 725 --mode type1\n"
               "    ellcarm search --curve E3 --max 5000\n    ellcarm an --curve [1,3] --n 875",
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    subparsers = parser.add_subparsers(dest="command")

    curve_args: ArgumentParser = ArgumentParser(add_help=False)
    curve_args.add_argument("--curve", "-c", required=True, help="Curve as a1,a2,a3,a4,a6, as [a4,a6] or by name (E1, E2, E3)")
    curve_args.add_argument("--cache-file", help="a_p cache file, read at startup and rewritten on exit", default="")

    mode_args: ArgumentParser = ArgumentParser(add_help=False)
    mode_args.add_argument("--mode", "-m", choices=[mode.value for mode in SearchMode], default=SearchMode.TYPE1.value)
    mode_args.add_argument("--out", choices=[fmt.value for fmt in OutputFormat], default=OutputFormat.TABLE.value,
                           help="Output encoding")
    mode_args.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP, help="Largest group the oracle enumerates")
    mode_args.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP, help="Largest p^i enumerated for exponents")

    check = subparsers.add_parser("check", parents=[curve_args, mode_args], help="Check a single n")
    check.add_argument("--n", type=int, required=True)
    check.add_argument("--point", help="Point x,y or X,Y,Z for --mode pseudoprime (default: a hashed sample)", default="")

    search = subparsers.add_parser("search", parents=[curve_args, mode_args], help="Search a range of n")
    search.add_argument("--min", type=int, default=2)
    search.add_argument("--max", type=int, required=True)
    search.add_argument("--parity", choices=[parity.value for parity in Parity], default=Parity.ODD.value)
    search.add_argument("--threads", "-j", type=int, default=1, help="Worker processes")
    search.add_argument("--point-seed", type=int, default=0, help="Seed of the hashed points for --mode pseudoprime")
    search.add_argument("--output-path", "-o", help="Write records to this file instead of stdout", default="")

    an = subparsers.add_parser("an", parents=[curve_args], help="Print a_n and n+1-a_n")
    an.add_argument("--n", type=int, required=True)

    pq = subparsers.add_parser("pq", parents=[curve_args], help="Classify the Type I hits n = pq")
    pq.add_argument("--min", type=int, default=2)
    pq.add_argument("--max", type=int, required=True)
    pq.add_argument("--threads", "-j", type=int, default=1)

    census = subparsers.add_parser("census", help="Count curves mod n for which n is Carmichael")
    census.add_argument("--n", type=int, required=True)
    census.add_argument("--list", type=int, default=0, help="Also print up to this many witness curves")
    census.add_argument("--census-cap", type=int, default=DEFAULT_CENSUS_CAP)
    return parser

def run(args: argparse.Namespace, out: typing.TextIO = sys.stdout) -> int:
    if args.command == "census":
        return cmd_census(args.n, args.list, args.census_cap, out)
    curve: CurveModel = parse_curve_string(args.curve)
    cache: AnCache = _load_cache(curve, args.cache_file)
    try:
        if args.command == "check":
            return cmd_check(
                curve,
                args.n,
                SearchMode(args.mode),
                OutputFormat(args.out),
                _parse_point(args.point) if args.point else None,
                cache,
                args.oracle_cap,
                args.enum_cap,
                out,
            )
        if args.command == "search":
            config: SearchConfig = SearchConfig(
                curve,
                args.min,
                args.max,
                SearchMode(args.mode),
                Parity(args.parity),
                OutputFormat(args.out),
                args.oracle_cap,
                args.enum_cap,
                args.threads,
                point_seed=args.point_seed,
            )
            if args.output_path:
                os.makedirs(os.path.dirname(os.path.abspath(args.output_path)), exist_ok=True)
                with open(args.output_path, "w", encoding="utf-8", newline="") as f:
                    return cmd_search(config, cache, f)
            return cmd_search(config, cache, out)
        if args.command == "an":
            return cmd_an(curve, args.n, cache, out)
        return cmd_pq(curve, args.max, args.min, args.threads, cache, out)
    finally:
        if args.cache_file:
            cache.save(args.cache_file)

def main(argv: typing.Sequence[str] | None = None) -> None:
    parser: ArgumentParser = build_parser()
    args, _ = parser.parse_known_args(argv)

    if args.command is None:
        parser.print_help()
        sys.exit(EXIT_USAGE)

    try:
        code: int = run(args, sys.stdout)
    except SingularCurveError as e:
        print(str(e), file=sys.stderr)
        code = EXIT_SINGULAR
    except (CurveFormatError, DomainError, ArithOverflowError) as e:
        print(str(e), file=sys.stderr)
        code = EXIT_USAGE
    except ResourceLimitError as e:
        print(str(e), file=sys.stderr)
        code = EXIT_RESOURCE
    except Exception as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        code = EXIT_FAILURE
    sys.exit(code)

if __name__ == "__main__":
    main()
