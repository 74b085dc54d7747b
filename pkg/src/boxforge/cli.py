"""Command-line interface.

Exit codes: 0 success, 1 verification/validity failure, 2 usage, parse, or
I/O errors.  Every data file the CLI writes is JSON it can read back;
--format csv selects an additional export rendering where applicable.
Randomized commands take --seed and are bit-reproducible for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analysis, box_core, distill, quantum, serialize, wiring

JOBS_ENV = "BOXFORGE_JOBS"


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def _parse_functional(spec: str) -> box_core.BellFunctional:
    if spec == "chsh":
        return box_core.chsh()
    if spec.startswith("variant:"):
        bits = spec.split(":", 1)[1]
        if len(bits) != 3 or any(c not in "01" for c in bits):
            raise ValueError("variant bits must be three 0/1 characters")
        return box_core.chsh_variant(*(int(c) for c in bits))
    if spec.startswith("tilted:"):
        return box_core.tilted_chsh(float(spec.split(":", 1)[1]))
    raise ValueError(
        f"unknown functional {spec!r} (use chsh, variant:BBB, or tilted:ALPHA)"
    )


def _make_parent(kind: str, theta: float | None, bits: str | None,
                 noise: float) -> box_core.Box222:
    if kind == "pr":
        box = box_core.pr_box()
    elif kind == "uniform":
        box = box_core.uniform_box()
    elif kind == "vertex":
        if bits is None or len(bits) not in (3, 4):
            raise ValueError("--bits must give 3 (nonlocal) or 4 (local) bits")
        label = box_core.VertexLabel(
            "local" if len(bits) == 4 else "nonlocal", tuple(int(c) for c in bits)
        )
        box = box_core.make_vertex(label)
    elif kind == "tsirelson":
        box = quantum.realize_box(quantum.tsirelson_realization())
    elif kind == "hardy":
        box = quantum.realize_box(quantum.hardy_optimal_realization())
    elif kind == "tilted":
        if theta is None:
            raise ValueError("--theta is required for the tilted box")
        realization, _ = quantum.tilted_realization(theta)
        box = quantum.realize_box(realization)
    else:
        raise ValueError(f"unknown box kind {kind!r}")
    if noise:
        box = box_core.convex_mix(box_core.uniform_box(), box, noise)
    return box


def _emit(data, output: str | None, fmt: str, csv_render=None) -> None:
    if fmt == "csv":
        if csv_render is None:
            raise ValueError("csv format is not available for this command")
        header, rows = csv_render(data)
        if output:
            serialize.write_csv(output, header, rows)
        else:
            print(",".join(str(h) for h in header))
            for row in rows:
                print(",".join(str(v) for v in row))
        return
    if output:
        serialize.save_json(output, data)
    else:
        json.dump(data, sys.stdout, indent=2, sort_keys=True)
        print()


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_box_make(args) -> int:
    box = _make_parent(args.kind, args.theta, args.bits, args.noise)
    if args.copies > 1:
        out = box.as_ncopy()
        for _ in range(args.copies - 1):
            out = box_core.tensor(out, box)
        data = serialize.box_to_json_dict(out)
    else:
        data = serialize.box_to_json_dict(box)
    _emit(data, args.output, args.format)
    return 0


def _cmd_box_check(args) -> int:
    data = serialize.load_json(args.input)
    serialize.validate_against_schema(data, "box.schema.json")
    try:
        serialize.box_from_json_dict(data)
    except box_core.BoxError as exc:
        print(f"invalid box: {exc}", file=sys.stderr)
        return 1
    print("ok")
    return 0


def _cmd_box_eval(args) -> int:
    box = serialize.box_from_json_dict(serialize.load_json(args.input))
    if isinstance(box, box_core.NCopyBox):
        box = box.as_box222()
    values = {}
    for spec in args.functional:
        values[spec] = box_core.evaluate(_parse_functional(spec), box)
    if args.output is None and args.format == "json" and len(values) == 1:
        print(f"{next(iter(values.values())):.12g}")
        return 0
    _emit(
        values,
        args.output,
        args.format,
        csv_render=lambda d: (
            ["functional", "value"],
            [[k, f"{v:.12g}"] for k, v in d.items()],
        ),
    )
    return 0


def _cmd_box_fractions(args) -> int:
    box = serialize.box_from_json_dict(serialize.load_json(args.input))
    if isinstance(box, box_core.NCopyBox):
        box = box.as_box222()
    fr = box_core.fractions(box, args.alpha)
    data = {
        "alpha": fr.alpha,
        "tsirelson_distance": fr.tsirelson_distance,
        "tilted_distance": fr.tilted_distance,
        "chsh_value": fr.chsh_value,
        "tilted_value": fr.tilted_value,
        "tilted_bound_oracle": fr.tilted_bound_oracle,
        "tilted_bound_printed": fr.tilted_bound_printed,
    }
    _emit(
        data,
        args.output,
        args.format,
        csv_render=lambda d: (
            list(d.keys()),
            [[f"{v:.12g}" for v in d.values()]],
        ),
    )
    return 0


def _cmd_realize_make(args) -> int:
    if args.kind == "tsirelson":
        realization = quantum.tsirelson_realization()
        extra = {"chsh": box_core.evaluate(box_core.chsh(),
                                           quantum.realize_box(realization))}
    elif args.kind == "hardy":
        opt = quantum.hardy_optimum(restarts=args.restarts, seed=args.seed)
        realization = opt.realization
        extra = {"hardy_q": opt.q, "family_parameter": opt.family_parameter}
    elif args.kind == "tilted":
        if args.theta is None:
            raise ValueError("--theta is required for the tilted realization")
        realization, alpha = quantum.tilted_realization(args.theta)
        extra = {
            "alpha": alpha,
            "alpha_printed_formula": quantum.tilted_alpha_printed(args.theta),
        }
    else:
        raise ValueError(f"unknown realization kind {args.kind!r}")
    data = serialize.realization_to_json_dict(realization)
    _emit(data, args.output, args.format)
    if extra:
        print(json.dumps(extra, sort_keys=True), file=sys.stderr)
    return 0


def _cmd_realize_box(args) -> int:
    realization = serialize.realization_from_json_dict(serialize.load_json(args.input))
    box = quantum.realize_box(realization)
    _emit(serialize.box_to_json_dict(box), args.output, args.format)
    return 0


def _cmd_wire_enumerate(args) -> int:
    if args.two_copy_raw:
        data = {
            "kind": "two_copy_raw_indices",
            "count": wiring.RAW_PER_PARTY,
            "note": "reconstruct with TwoCopyLocalWiring.from_index",
        }
        _emit(data, args.output, args.format)
        return 0
    protocols = [serialize.wiring_to_json_dict(w) for w in wiring.enumerate_single_copy()]
    _emit(
        {"kind": "single_copy_list", "wirings": protocols},
        args.output,
        args.format,
        csv_render=lambda d: (
            ["index", "input_a", "input_b", "output_a", "output_b"],
            [
                [i, w["input_a"], w["input_b"], w["output_a"], w["output_b"]]
                for i, w in enumerate(d["wirings"])
            ],
        ),
    )
    return 0


def _cmd_wire_canonicalize(args) -> int:
    classes = wiring.canonicalize_two_copy(wiring.enumerate_two_copy_raw())
    per_input = wiring.per_input_classes()
    data = {
        "raw_per_party": wiring.RAW_PER_PARTY,
        "canonical_per_party": len(classes),
        "canonical_per_input": len(per_input),
        "published_total": 82**4,
        "canonical_per_input_pow4": len(per_input) ** 4,
        "canonical_per_party_pow2": len(classes) ** 2,
        "note": "published per-input census (82 per party and input) uses a "
                "different counting convention; totals reported, equality "
                "not asserted",
        "fingerprints": [c.fingerprint for c in classes] if args.fingerprints else None,
    }
    if data["fingerprints"] is None:
        del data["fingerprints"]
    _emit(data, args.output, args.format)
    return 0


def _cmd_wire_apply(args) -> int:
    w = serialize.wiring_from_json_dict(serialize.load_json(args.wiring))
    box = serialize.box_from_json_dict(serialize.load_json(args.input))
    if isinstance(w, wiring.SingleCopyWiring):
        if isinstance(box, box_core.NCopyBox):
            box = box.as_box222()
        child = wiring.apply_single_copy(w, box)
    elif isinstance(w, wiring.TwoCopyWiring):
        if isinstance(box, box_core.Box222):
            raise ValueError("two-copy wirings need a 2-copy parent box")
        child = wiring.apply_two_copy(w.party_a, w.party_b, box)
    elif isinstance(w, wiring.StochasticWiring):
        child = wiring.apply_stochastic(w, box)
    else:
        raise ValueError("unsupported wiring kind for apply")
    _emit(serialize.box_to_json_dict(child), args.output, args.format)
    return 0


_VERIFY_RUNNERS = {
    "prop1": lambda a: analysis.verify_prop1(
        n_max=a.n_max, restarts=a.restarts, seed=a.seed
    ),
    "prop2": lambda a: analysis.verify_prop2(n_max=a.spectrum_n_max),
    "theorem1": lambda a: analysis.verify_theorem1(
        n_max=a.n_max, restarts=a.restarts, seed=a.seed,
        spectrum_n_max=a.spectrum_n_max,
    ),
    "theorem2": lambda a: analysis.verify_theorem2(
        np.linspace(0.02, math.pi / 4 - 0.01, a.theta_count), n_max=a.spectrum_n_max
    ),
    "lemma1": lambda a: analysis.verify_lemma1(seed=a.seed),
    "appendix-a": lambda a: analysis.verify_appendix_a(),
}


def _cmd_verify(args) -> int:
    if args.claim == "all":
        reports = analysis.run_all(
            seed=args.seed,
            restarts=args.restarts,
            n_max=args.n_max,
            theta_count=args.theta_count,
            spectrum_n_max=args.spectrum_n_max,
        )
    else:
        report = _VERIFY_RUNNERS[args.claim](args)
        reports = {report.claim_id: report}

    if args.output:
        if len(reports) > 1:
            os.makedirs(args.output, exist_ok=True)
            for claim_id, report in reports.items():
                serialize.save_json(
                    os.path.join(args.output, f"{claim_id}.json"),
                    serialize.report_to_json_dict(report),
                )
        else:
            report = next(iter(reports.values()))
            serialize.save_json(args.output, serialize.report_to_json_dict(report))
    for claim_id, report in reports.items():
        print(f"{claim_id}: {report.verdict}")
    return analysis.exit_code(reports)


def _cmd_distill_scan(args) -> int:
    parent = _make_parent(args.parent, args.theta, args.bits, args.noise)
    alphas = tuple(float(v) for v in args.alphas.split(",")) if args.alphas else ()
    results = distill.scan(
        parent,
        alphas=alphas,
        top_k=args.top_k,
        include_hardy=not args.no_hardy,
        checkpoint=args.checkpoint,
        jobs=args.jobs,
    )
    payload = {
        "parent": serialize.box_to_json_dict(parent),
        "alphas": list(alphas),
        "results": [
            {
                "blocks_a": list(r.blocks_a),
                "blocks_b": list(r.blocks_b),
                "objectives": {k: float(v) for k, v in r.objectives.items()},
                "pareto": r.pareto,
                "gold": r.gold,
                "best_for": list(r.best_for),
                "child": serialize.box_to_json_dict(r.child),
            }
            for r in results
        ],
        "gold_found": any(r.gold for r in results),
        "exhaustive": True,
    }
    _emit(
        payload,
        args.output,
        args.format,
        csv_render=lambda d: serialize.scan_results_rows(results),
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", help="write result to this path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxforge",
        description="Two-input/two-output no-signaling boxes: construction, "
                    "locality tests, quantum realizations, wirings, and "
                    "two-copy distillation scans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    box = sub.add_parser("box", help="construct, validate, and evaluate boxes")
    box_sub = box.add_subparsers(dest="subcommand", required=True)

    p = box_sub.add_parser("make", help="emit a named box as JSON")
    p.add_argument("--kind", required=True,
                   choices=("pr", "uniform", "vertex", "tsirelson", "hardy", "tilted"))
    p.add_argument("--bits", help="vertex bits, e.g. 000 (nonlocal) or 0000 (local)")
    p.add_argument("--theta", type=float)
    p.add_argument("--noise", type=float, default=0.0,
                   help="weight of uniform noise mixed into the box")
    p.add_argument("--copies", type=int, default=1,
                   help="tensor-power the box to this many copies")
    _add_output_args(p)
    p.set_defaults(func=_cmd_box_make)

    p = box_sub.add_parser("check", help="validate a box file")
    p.add_argument("--input", required=True)
    _add_output_args(p)
    p.set_defaults(func=_cmd_box_check)

    p = box_sub.add_parser("eval", help="evaluate Bell functionals on a box")
    p.add_argument("--input", required=True)
    p.add_argument("--functional", action="append", required=True,
                   help="chsh, variant:BBB, or tilted:ALPHA (repeatable)")
    _add_output_args(p)
    p.set_defaults(func=_cmd_box_eval)

    p = box_sub.add_parser("fractions",
                           help="distances from the CHSH and tilted-CHSH quantum "
                                "boundary hyperplanes")
    p.add_argument("--input", required=True)
    p.add_argument("--alpha", type=float, required=True)
    _add_output_args(p)
    p.set_defaults(func=_cmd_box_fractions)

    re_cmd = sub.add_parser("realize", help="quantum realizations")
    re_sub = re_cmd.add_subparsers(dest="subcommand", required=True)

    p = re_sub.add_parser("make", help="emit a named realization as JSON")
    p.add_argument("--kind", required=True, choices=("tsirelson", "hardy", "tilted"))
    p.add_argument("--theta", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=200)
    _add_output_args(p)
    p.set_defaults(func=_cmd_realize_make)

    p = re_sub.add_parser("box", help="Born-rule box of a realization file")
    p.add_argument("--input", required=True)
    _add_output_args(p)
    p.set_defaults(func=_cmd_realize_box)

    wire = sub.add_parser("wire", help="wiring protocols")
    wire_sub = wire.add_subparsers(dest="subcommand", required=True)

    p = wire_sub.add_parser("enumerate", help="list single-copy protocols")
    p.add_argument("--two-copy-raw", action="store_true",
                   help="report the raw two-copy census instead of the list")
    _add_output_args(p)
    p.set_defaults(func=_cmd_wire_enumerate)

    p = wire_sub.add_parser("canonicalize",
                            help="two-copy equivalence-class census")
    p.add_argument("--fingerprints", action="store_true",
                   help="include all class fingerprints")
    _add_output_args(p)
    p.set_defaults(func=_cmd_wire_canonicalize)

    p = wire_sub.add_parser("apply", help="apply a wiring file to a box file")
    p.add_argument("--wiring", required=True)
    p.add_argument("--input", required=True)
    _add_output_args(p)
    p.set_defaults(func=_cmd_wire_apply)

    p = sub.add_parser("verify", help="run claim verifiers")
    p.add_argument("claim", choices=("prop1", "prop2", "theorem1", "theorem2",
                                     "lemma1", "appendix-a", "all"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--n-max", type=int, default=2)
    p.add_argument("--theta-count", type=int, default=50)
    p.add_argument("--spectrum-n-max", type=int, default=20)
    _add_output_args(p)
    p.set_defaults(func=_cmd_verify)

    dist = sub.add_parser("distill", help="two-copy distillation scans")
    dist_sub = dist.add_subparsers(dest="subcommand", required=True)

    p = dist_sub.add_parser("scan", help="exhaustive canonical wiring-pair scan")
    p.add_argument("--parent", required=True,
                   choices=("pr", "uniform", "vertex", "tsirelson", "hardy", "tilted"))
    p.add_argument("--bits")
    p.add_argument("--theta", type=float)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--alphas", help="comma-separated tilt values")
    p.add_argument("--top-k", type=int, default=3)
    p.add_argument("--no-hardy", action="store_true",
                   help="drop the Hardy success cell objective")
    p.add_argument("--checkpoint", help="resumable chunk checkpoint file")
    p.add_argument("--jobs", type=int, default=_default_jobs(),
                   help=f"parallel chunks (default ${JOBS_ENV} or 1)")
    _add_output_args(p)
    p.set_defaults(func=_cmd_distill_scan)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (serialize.FormatError, json.JSONDecodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    console_main()
