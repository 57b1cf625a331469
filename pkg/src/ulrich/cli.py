"""Command-line front end: ``ulrich <command> [options]``.

Exit status is 0 on success or a positive verdict, 1 on a negative verdict
and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .gallery import NAMES, fixture, fixture_json
from .numerology import (UlrichContext, bott_dimension, chi_ulrich,
                         rank1_classify, rank2_chern, resolution_ranks, ulrich_profile)
from .resolution import (LinearResolution, NotUlrich, ResolutionDefect, UlrichCertificate,
                         cohomology_table, reverify, ulrich_verdict)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _num(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else str(v)
    return v


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def render_table(profiles, fmt: str = "text", ctx: UlrichContext | None = None) -> str:
    """Render profiles (ascending twists) as text, csv or json.

    In text form the nonzero entry of each row is starred.
    """
    profiles = sorted(profiles, key=lambda p: p.twist)
    ctxs = {p.ctx for p in profiles} | ({ctx} if ctx else set())
    if len(ctxs) > 1:
        raise ValueError("profiles from different contexts cannot share a table")
    if not ctxs:
        raise ValueError("an empty table needs its context")
    (ctx,) = ctxs
    header = ["twist"] + [f"h{q}" for q in range(ctx.n + 1)]
    if fmt == "json":
        return _dump({"context": ctx.to_json(),
                      "rows": [{"twist": p.twist, "h": [_num(v) for v in p.values]}
                               for p in profiles]}) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for p in profiles:
            w.writerow([p.twist] + [str(v) for v in p.values])
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    rows = [header]
    for p in profiles:
        rows.append([str(p.twist)] + [f"{v}*" if v else "0" for v in p.values])
    widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
    return "".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) + "\n" for r in rows)


def _ctx(args) -> UlrichContext:
    return UlrichContext(args.n, args.d, args.r)


def _load_resolution(args):
    """A resolution from --gallery or a JSON file (resolution or certificate)."""
    if getattr(args, "gallery", None):
        try:
            return fixture(args.gallery), None
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from exc
    if not getattr(args, "file", None):
        raise UsageError("give --gallery NAME or a resolution JSON file")
    try:
        with open(args.file) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {args.file}: {exc}") from exc
    if "report" in data:
        return LinearResolution.from_json(data), UlrichCertificate.from_json(data)
    return LinearResolution.from_json(data), None


def cmd_chi(args):
    chi = str(chi_ulrich(_ctx(args), args.p))
    return EXIT_OK, {"chi": chi}, chi


def cmd_profile(args):
    prof = ulrich_profile(_ctx(args), args.p)
    data = {"twist": args.p, "h": [_num(v) for v in prof.values],
            "violation": prof.violation.to_json() if prof.violation else None}
    text = " ".join(str(v) for v in prof.values)
    if prof.violation:
        return EXIT_NEGATIVE, data, f"{text}\nno Ulrich bundle: {prof.violation}"
    return EXIT_OK, data, text


def cmd_table(args):
    if args.gallery or args.file:
        res, _ = _load_resolution(args)
        try:
            ulrich_verdict(res, seed=args.seed)
        except NotUlrich as exc:
            return EXIT_NEGATIVE, exc.report.to_json(), exc.report.summary()
        ctx = res.ctx
        profiles = cohomology_table(res, args.t_min, args.t_max).profiles()
    else:
        if None in (args.n, args.d, args.r):
            raise UsageError("table needs -n, -d and -r, or a resolution")
        ctx = _ctx(args)
        profiles = [ulrich_profile(ctx, t) for t in range(args.t_min, args.t_max + 1)]
    return EXIT_OK, None, render_table(profiles, args.format, ctx)


def cmd_ranks(args):
    sig = resolution_ranks(_ctx(args))
    data = {"ranks": list(sig.ranks), "violations": [v.to_json() for v in sig.violations]}
    if not sig.ok:
        return EXIT_NEGATIVE, data, "no integral resolution: " + "; ".join(map(str, sig.violations))
    return EXIT_OK, data, " ".join(map(str, sig.ranks))


def cmd_bott(args):
    v = bott_dimension(args.n, args.p, args.q, args.t)
    return EXIT_OK, {"h": v}, str(v)


def cmd_chern(args):
    c1, c2 = rank2_chern(args.n, args.d)
    obstructed = c2.denominator != 1
    data = {"c1": c1, "c2": str(c2), "obstructed": obstructed}
    text = f"c1={c1} c2={c2}"
    if obstructed:
        return EXIT_NEGATIVE, data, text + "\nc2 is not an integer: no rank-2 Ulrich bundle"
    return EXIT_OK, data, text


def cmd_rank1(args):
    a = rank1_classify(args.n, args.d)
    if a is None:
        return EXIT_NEGATIVE, {"twist": None}, "no Ulrich line bundle"
    return EXIT_OK, {"twist": a}, f"O({a})"


def cmd_verify(args):
    res, cert = _load_resolution(args)
    prov = {"source": f"gallery:{args.gallery}" if args.gallery else args.file,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    try:
        if cert is not None:
            new = reverify(cert)
            if new.content_hash != cert.content_hash:
                return (EXIT_NEGATIVE, {"stored": cert.content_hash, "recomputed": new.content_hash},
                        "certificate does not reproduce its content hash")
            return EXIT_OK, None, new.dumps()
        new = ulrich_verdict(res, seed=args.seed, full=args.full, provenance=prov)
    except NotUlrich as exc:
        return EXIT_NEGATIVE, None, json.dumps(exc.report.to_json(), sort_keys=True, indent=2)
    return EXIT_OK, None, new.dumps()


def cmd_gallery(args):
    if args.name is None:
        return EXIT_OK, {"names": list(NAMES)}, "\n".join(NAMES)
    if args.name not in NAMES and not args.name.startswith("p2-banded-d"):
        raise UsageError(f"unknown gallery fixture {args.name!r}; known: {', '.join(NAMES)}")
    try:
        data = fixture_json(args.name)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    return EXIT_OK, None, json.dumps(data, sort_keys=True, indent=2)


def cmd_search(args):
    from .search import SearchConfig, search_ulrich, write_results

    try:
        pool = tuple(Fraction(s) for s in args.pool.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --pool {args.pool!r}: {exc}") from exc
    cfg = SearchConfig(_ctx(args), pool, args.budget, args.seed, args.mode,
                       start=args.start, limit=args.limit)
    result = search_ulrich(cfg, jobs=args.jobs)
    if args.results:
        write_results(result, args.results)
    manifest = result.manifest()
    text = json.dumps({"manifest": manifest,
                       "certificates": [c.to_json() for c in result.certificates]},
                      sort_keys=True, indent=2)
    return EXIT_OK, None, text


def _int(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--format", choices=("text", "csv", "json"), default="text")
    out.add_argument("--json", action="store_true", help="same as --format json")
    out.add_argument("--out", metavar="FILE", help="write output to FILE")

    parser = argparse.ArgumentParser(prog="ulrich", description="Ulrich bundles on Veronese varieties.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_, ctx=True, twist=False):
        p = sub.add_parser(name, help=help_, parents=[out])
        if ctx:
            p.add_argument("-n", type=_int, required=True)
            p.add_argument("-d", type=_int, required=True)
            p.add_argument("-r", type=_int, required=True)
        if twist:
            p.add_argument("-p", type=_int, required=True, help="twist of E")
        p.set_defaults(func=func)
        return p

    add("chi", cmd_chi, "Euler characteristic of E(p)", twist=True)
    add("profile", cmd_profile, "forced cohomology h^0..h^n of E(p)", twist=True)
    p = add("table", cmd_table, "cohomology table over a twist window", ctx=False)
    p.add_argument("-n", type=_int)
    p.add_argument("-d", type=_int)
    p.add_argument("-r", type=_int)
    p.add_argument("--from", dest="t_min", type=_int, required=True)
    p.add_argument("--to", dest="t_max", type=_int, required=True)
    p.add_argument("--gallery", metavar="NAME")
    p.add_argument("--resolution", dest="file", metavar="FILE")
    p.add_argument("--seed", type=_int, default=0)
    add("ranks", cmd_ranks, "ranks a_1..a_n of the linear resolution")
    p = add("bott", cmd_bott, "h^q(P^n, Omega^p(t))", ctx=False)
    for flag in ("-n", "-p", "-q", "-t"):
        p.add_argument(flag, type=_int, required=True)
    p = add("chern", cmd_chern, "Chern classes of a rank-2 Ulrich bundle", ctx=False)
    p.add_argument("-n", type=_int, required=True)
    p.add_argument("-d", type=_int, required=True)
    p = add("rank1", cmd_rank1, "Ulrich line bundles", ctx=False)
    p.add_argument("-n", type=_int, required=True)
    p.add_argument("-d", type=_int, required=True)
    p = add("verify", cmd_verify, "certify a resolution", ctx=False)
    p.add_argument("file", nargs="?", help="resolution or certificate JSON")
    p.add_argument("--gallery", metavar="NAME")
    p.add_argument("--seed", type=_int, default=0, help="point-screening seed (default 0)")
    p.add_argument("--full", action="store_true", help="skip the rank-2 reduction")
    p = add("gallery", cmd_gallery, "list or print gallery fixtures", ctx=False)
    p.add_argument("name", nargs="?")
    p = add("search", cmd_search, "search for Ulrich resolutions")
    p.add_argument("--pool", default="0,1", help="comma-separated coefficients")
    p.add_argument("--budget", type=_int, required=True)
    p.add_argument("--seed", type=_int, required=True)
    p.add_argument("--mode", choices=("random", "exhaustive"), default="random")
    p.add_argument("--start", type=_int, default=0)
    p.add_argument("--limit", type=_int)
    p.add_argument("--jobs", type=_int, default=1)
    p.add_argument("--results", metavar="DIR", help="write certificates and manifest.json to DIR")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.json:
        args.format = "json"
    try:
        code, data, text = args.func(args)
    except (UsageError, ValueError, KeyError) as exc:
        print(f"ulrich {args.command}: error: {exc}", file=stderr)
        return EXIT_USAGE
    except ResolutionDefect as exc:
        print(f"ulrich {args.command}: resolution defect: {exc}", file=stderr)
        return EXIT_NEGATIVE
    if args.format == "json" and data is not None:
        text = _dump(data)
    if text and not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
