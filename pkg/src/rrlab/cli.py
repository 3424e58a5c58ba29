"""Command-line front end.

Every subcommand writes its artifacts into ``--out`` (default ``.``) and
prints a JSON summary on stdout.  Validation failures exit with status 2 and
a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .capacity import dirichlet_inputs, outer_bound_region, product_grid, verify_theorem3
from .channel import ChannelSpec, validate_channel
from .corollaries import check_inclusion, identity_suite, random_compatible_channel
from .covering import TypicalityConfig, binning_example, covering_experiment
from .distributions import assemble_joint, default_cards, sample_factored
from .errors import ValidationError
from .io import (
    load_channel,
    load_distributions,
    polytope_to_dict,
    read_json,
    system_from_dict,
    write_csv,
    write_json,
)
from .parallel import ordered_map
from .region import (
    MODES,
    TOL_GEO,
    build_rate_system,
    compute_mode_terms,
    eliminate_all,
    polygon_from_halfplanes,
    region_polytope,
    union_hull,
)
from .region.terms import MODE_SCHEMES


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _file_digest(path) -> str | None:
    if path is None:
        return None
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {p}")
    return hashlib.sha256(p.read_bytes()).hexdigest()


def _parse_cards(items) -> dict[str, int]:
    out = {}
    for it in items or ():
        name, sep, val = it.partition("=")
        if not sep:
            raise UsageError(f"cardinality override {it!r} must look like VAR=K")
        try:
            out[name.strip()] = int(val)
        except ValueError:
            raise UsageError(f"cardinality override {it!r} needs an integer") from None
        if out[name.strip()] < 1:
            raise UsageError(f"cardinality override {it!r} must be >= 1")
    return out


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _config(args, **extra) -> dict:
    """Resolved configuration recorded in every artifact (no paths, no times)."""
    skip = {"out", "func", "channel", "dist", "system"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    for key in ("channel", "dist", "system"):
        if getattr(args, key, None) is not None:
            cfg[f"{key}_sha256"] = _file_digest(getattr(args, key))
    cfg.update(extra)
    return cfg


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _vertex_rows(poly):
    return [(x, y) for x, y in poly.vertices]


# -- region ------------------------------------------------------------------

def _region_scheme(mode: str, requested: str | None) -> str:
    if requested:
        return requested
    return "corollary1" if mode in ("outer", "corollary1") else MODE_SCHEMES[mode][0]


def _region_task(job):
    fd, ch, mode, opts = job
    p = assemble_joint(fd, ch)
    terms = compute_mode_terms(p, mode, fd.scheme)
    return region_polytope(build_rate_system(terms, mode, **opts))


def cmd_region(args) -> dict:
    ch = load_channel(args.channel)
    if args.mode not in MODES:
        raise UsageError(f"unknown mode {args.mode!r}")
    scheme = _region_scheme(args.mode, args.scheme)
    if args.dist:
        dists = load_distributions(args.dist)
    else:
        cards = default_cards(scheme, ch, _parse_cards(args.card))
        dists = sample_factored(scheme, cards, args.sample, args.seed, args.alpha, args.indep_prob)
    opts = {}
    if args.mode in ("theorem1", "pre_elim") and args.drop_rules is not None:
        opts["drop_rules"] = args.drop_rules
    if args.mode == "pre_elim" and args.separate_x3_rate:
        opts["separate_x3_rate"] = True
    if args.mode == "pcrbc" and args.omit_direct_term:
        opts["omit_direct_term"] = True
    polys = ordered_map(_region_task, [(fd, ch, args.mode, opts) for fd in dists])
    region = union_hull(polys)
    cfg = _config(args, scheme=scheme)
    out = _out(args)
    vpath = write_csv(out / f"{args.prefix}vertices.csv", ("R1", "R2"), _vertex_rows(region), cfg)
    per = [{"index": i, "label": fd.label, **polytope_to_dict(poly)} for i, (fd, poly) in enumerate(zip(dists, polys))]
    hpath = write_json(out / f"{args.prefix}halfplanes.json",
                       {"mode": args.mode, "scheme": scheme, "region": polytope_to_dict(region),
                        "per_distribution": per}, cfg)
    return {"artifacts": [str(vpath), str(hpath)], "mode": args.mode, "distributions": len(dists),
            "nonempty": sum(not p.is_empty for p in polys), "vertices": [list(v) for v in region.vertices]}


# -- outer / capacity ---------------------------------------------------------

def _inputs(ch: ChannelSpec, args) -> list[np.ndarray]:
    cards = (ch.card_x1, ch.card_x2, ch.card_x3)
    out = product_grid(cards, args.grid) if args.grid > 0 else []
    if args.samples > 0:
        out += dirichlet_inputs(cards, args.samples, args.seed)
    if not out:
        raise UsageError("need --grid > 0 or --samples > 0")
    return out


def cmd_outer(args) -> dict:
    ch = load_channel(args.channel)
    region = outer_bound_region(ch, _inputs(ch, args))
    cfg = _config(args)
    out = _out(args)
    vpath = write_csv(out / f"{args.prefix}outer_vertices.csv", ("R1", "R2"), _vertex_rows(region), cfg)
    hpath = write_json(out / f"{args.prefix}outer_halfplanes.json", {"region": polytope_to_dict(region)}, cfg)
    return {"artifacts": [str(vpath), str(hpath)], "vertices": [list(v) for v in region.vertices]}


def cmd_capacity_z(args) -> dict:
    ch = load_channel(args.channel)
    rep = verify_theorem3(ch, _inputs(ch, args), tol=args.tol, force=args.force)
    cfg = _config(args)
    out = _out(args)
    paths = [
        write_json(out / f"{args.prefix}capacity_report.json", rep.to_dict(), cfg),
        write_csv(out / f"{args.prefix}capacity_inner.csv", ("R1", "R2"), _vertex_rows(rep.inner), cfg),
        write_csv(out / f"{args.prefix}capacity_outer.csv", ("R1", "R2"), _vertex_rows(rep.outer), cfg),
    ]
    return {"artifacts": [str(p) for p in paths], "verdict": rep.verdict, "max_hausdorff": rep.max_distance,
            "max_degraded_residual": rep.max_degraded_residual}


# -- corollaries ---------------------------------------------------------------

def _inclusion_task(job):
    corollary, ch, samples, seed, alpha, indep_prob, label = job
    return check_inclusion(corollary, ch, samples, seed, alpha, indep_prob, label)


def cmd_check_inclusion(args) -> dict:
    if args.channel:
        channels = [load_channel(args.channel)]
    else:
        rng = np.random.default_rng([args.seed, args.corollary])
        channels = [random_compatible_channel(args.corollary, rng, alpha=args.channel_alpha)
                    for _ in range(args.channels)]
    jobs = [(args.corollary, ch, args.samples, args.seed + i, args.alpha, args.indep_prob, f"channel={i},")
            for i, ch in enumerate(channels)]
    reports = ordered_map(_inclusion_task, jobs, min_items=2)
    violations = sum(len(r.violations) for r in reports)
    payload = {
        "corollary": args.corollary,
        "verdict": "holds" if violations == 0 else "violated",
        "channels": len(channels),
        "violations": violations,
        "checks": sum(r.checks for r in reports),
        "nonempty_specialised": sum(r.nonempty for r in reports),
        "per_channel": [r.to_dict() for r in reports],
    }
    path = write_json(_out(args) / f"{args.prefix}inclusion_report.json", payload, _config(args))
    return {"artifacts": [str(path)], **{k: payload[k] for k in ("verdict", "violations", "checks")}}


def cmd_identities(args) -> dict:
    ch = load_channel(args.channel)
    if args.dist:
        dists = load_distributions(args.dist)
    else:
        cards = default_cards(args.scheme, ch, _parse_cards(args.card))
        dists = sample_factored(args.scheme, cards, args.sample, args.seed, args.alpha, args.indep_prob)
    reports = []
    for fd in dists:
        if fd.scheme != args.scheme:
            raise UsageError(f"distribution {fd.label!r} is a {fd.scheme} distribution, expected {args.scheme}")
        reports.append({"label": fd.label, **identity_suite(assemble_joint(fd, ch), args.scheme).to_dict()})
    eqs = [v for r in reports for v in r["equalities"].values()]
    slacks = [v for r in reports for v in r["slacks"].values() if v is not None]
    payload = {
        "scheme": args.scheme,
        "distributions": len(reports),
        "max_equality_residual": max(eqs, default=0.0),
        "min_slack": min(slacks, default=0.0),
        "flagged": sum(bool(r["flagged"]) for r in reports),
        "per_distribution": reports,
    }
    path = write_json(_out(args) / f"{args.prefix}identities_report.json", payload, _config(args))
    return {"artifacts": [str(path)], **{k: payload[k] for k in ("max_equality_residual", "min_slack", "flagged")}}


# -- covering -----------------------------------------------------------------

def cmd_simulate_covering(args) -> dict:
    if args.channel:
        ch = load_channel(args.channel)
    else:
        # the covering step never looks at channel outputs
        ch = validate_channel((2, 2, 2, 2, 2), np.full(32, 0.25))
    if args.dist:
        dists = load_distributions(args.dist)
        if not 0 <= args.index < len(dists):
            raise UsageError(f"--index {args.index} out of range for {len(dists)} distributions")
        fd = dists[args.index]
    else:
        fd = binning_example(ch, args.mode, args.crossover)
    results = covering_experiment(args.mode, fd, ch, args.n, _parse_floats(args.offsets), args.trials,
                                  args.seed, TypicalityConfig(args.epsilon, args.n), args.engine, args.r1b)
    cols = ("offset", "n", "trials", "successes", "success_rate", "rate_used", "threshold", "engine")
    rows = [[r.to_row()[c] for c in cols] for r in results]
    path = write_csv(_out(args) / f"{args.prefix}covering.csv", cols, rows, _config(args))
    return {"artifacts": [str(path)], "threshold": results[0].threshold if results else None,
            "success_rates": [r.success_rate for r in results]}


# -- fme ----------------------------------------------------------------------

def cmd_fme(args) -> dict:
    sys_, keep = system_from_dict(read_json(args.system))
    reduced = eliminate_all(sys_, keep)
    cfg = _config(args)
    out = _out(args)
    rows = [{"coeffs": c, "sense": s, "const": b} for c, s, b in reduced.rows]
    payload = {"vars": list(reduced.vars), "empty": reduced.empty, "rows": rows}
    paths = []
    if len(keep) == 2:
        poly = polygon_from_halfplanes(reduced.A, reduced.b) if not reduced.empty else None
        if poly is not None:
            payload["polygon"] = polytope_to_dict(poly)
            paths.append(write_csv(out / f"{args.prefix}fme_vertices.csv", keep, _vertex_rows(poly), cfg))
    paths.insert(0, write_json(out / f"{args.prefix}fme_system.json", payload, cfg))
    return {"artifacts": [str(p) for p in paths], "rows": len(rows), "empty": reduced.empty}


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rrlab", description="Rate-region toolkit for interference channels with a relay.")
    ap.add_argument("--version", action="version", version=f"rrlab {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, seed=True):
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--prefix", default="", help="prefix for artifact file names")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    def sampling(p, default_count):
        p.add_argument("--dist", help="distribution file (instead of sampling)")
        p.add_argument("--sample", type=int, default=default_count, help="number of sampled distributions")
        p.add_argument("--card", action="append", metavar="VAR=K", help="auxiliary cardinality override")
        p.add_argument("--alpha", type=float, default=1.0, help="Dirichlet concentration of sampled rows")
        p.add_argument("--indep-prob", type=float, default=0.0,
                       help="chance that a sampled factor ignores its parents")

    p = sub.add_parser("region", help="rate region of one mode over distributions")
    p.add_argument("--mode", required=True, choices=MODES)
    p.add_argument("--channel", required=True)
    p.add_argument("--scheme", help="factored scheme of the distributions")
    p.add_argument("--drop-rules", action=argparse.BooleanOptionalAction, default=None,
                   help="include the relaxed system variants (theorem1, pre_elim)")
    p.add_argument("--separate-x3-rate", action="store_true", help="pre_elim: separate rate for the X3 index")
    p.add_argument("--omit-direct-term", action="store_true", help="pcrbc: drop the direct-link term")
    sampling(p, 20)
    common(p)
    p.set_defaults(func=cmd_region)

    for name, func, helptext in (("outer", cmd_outer, "outer bound over input distributions"),
                                 ("capacity-z", cmd_capacity_z, "inner vs outer bound on a degraded Z channel")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--channel", required=True)
        p.add_argument("--grid", type=int, default=8, help="product grid with steps of 1/GRID (0 disables)")
        p.add_argument("--samples", type=int, default=200, help="extra Dirichlet input distributions")
        if name == "capacity-z":
            p.add_argument("--tol", type=float, default=TOL_GEO)
            p.add_argument("--force", action="store_true", help="evaluate channels not flagged as degraded Z")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("check-inclusion", help="corollary inclusion harness")
    p.add_argument("--corollary", type=int, required=True, choices=(2, 3, 4, 5, 6))
    p.add_argument("--channel", help="channel file (default: random compatible channels)")
    p.add_argument("--channels", type=int, default=20)
    p.add_argument("--channel-alpha", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--indep-prob", type=float, default=0.5)
    common(p)
    p.set_defaults(func=cmd_check_inclusion)

    p = sub.add_parser("identities", help="information identities of a special-case scheme")
    p.add_argument("--scheme", required=True, choices=("rsub", "chu", "pcrbc"))
    p.add_argument("--channel", required=True)
    sampling(p, 100)
    common(p)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("simulate-covering", help="Monte Carlo of the binning steps")
    p.add_argument("--mode", required=True, choices=("gp", "marton"))
    p.add_argument("--channel")
    p.add_argument("--dist", help="theorem1 distribution file (default: built-in BSC example)")
    p.add_argument("--index", type=int, default=0, help="which distribution of --dist")
    p.add_argument("--crossover", type=float, default=0.18, help="crossover of the built-in example")
    p.add_argument("--n", type=int, default=800)
    p.add_argument("--offsets", default="-0.15,0,0.15", help="comma-separated rate offsets")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--engine", choices=("auto", "analytic", "exhaustive"), default="auto")
    p.add_argument("--r1b", type=float, default=0.0, help="marton: rate of the V12 list")
    common(p)
    p.set_defaults(func=cmd_simulate_covering)

    p = sub.add_parser("fme", help="Fourier-Motzkin projection of a system file")
    p.add_argument("--system", required=True)
    common(p, seed=False)
    p.set_defaults(func=cmd_fme)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("missing subcommand; expected one of region, outer, capacity-z, "
                             "check-inclusion, identities, simulate-covering, fme")
        summary = args.func(args)
    except FileNotFoundError as e:
        print(json.dumps({"error": "FileNotFound", "message": str(e)}), file=sys.stderr)
        return 2
    except ValidationError as e:
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return 2
    print(json.dumps(summary, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
