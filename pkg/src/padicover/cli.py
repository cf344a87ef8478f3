"""Command-line front end: classify, verify, atlas, example8.

Exit codes are part of the interface:

  0  success (for ``verify``: the two routes agree)
  1  ``verify`` ran both routes and they disagree
  2  the cover does not have simple reduction (offending branch values listed)
  3  malformed input: bad JSON, bad schema, unparsable rationals, bad flags
  4  a domain or engine error, with advice on what to try

Input files are JSON.  Exact mode describes a cover by its critical divisor::

    {"p": 5, "e": 1, "critical": [{"x": "5", "m": 3},
                                  {"x": "0", "m": 2}, {"x": "-1", "m": 2}]}

("x" may also be a list of e rational strings — coefficients over the
pi-power basis.)  Formula mode skips the field entirely and names the branch
points with their fiber profiles; a colliding pair carries the valuation of
the difference::

    {"p": 5, "branch_points": [
        {"name": "0", "profile": [3, 1, 1], "tail_with": "lam", "epsilon": "7"},
        {"name": "lam", "profile": [2, 1, 1, 1]},
        {"name": "1", "profile": [2, 1, 1, 1]}]}
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import newton
from .branchtree import AllPointsCoalesce, build_branch_tree
from .classifier import (
    ClassifierError,
    InvalidProfile,
    NotSimpleReduction,
    ThresholdUndefined,
    admissible_partitions,
    classify_cover,
    classify_formula,
    pair_excess,
)
from .cover import branch_data, branch_label, cover_from_json
from .field import NotRepresentable, fmt_rat, parse_rat
from .kpoly import sub as kpoly_sub
from .oracle import (
    NonTermination,
    NotIntegralCover,
    OracleError,
    ResidualRootOutsideFp,
    run_oracle,
)


class SchemaError(ValueError):
    """Anything wrong with the shape of the input, file or flags."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse's default exit code clashes with ours
        raise SchemaError(message)


def _canonical(doc):
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


def _load_cover(path):
    doc = _read_json(path)
    try:
        return cover_from_json(doc)
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def _load_profiles(path):
    doc = _read_json(path)
    try:
        p = int(doc["p"])
        specs = []
        for entry in doc["branch_points"]:
            spec = {"name": str(entry["name"]), "profile": tuple(entry["profile"])}
            if "tail_with" in entry:
                spec["tail_with"] = str(entry["tail_with"])
            if "epsilon" in entry:
                spec["epsilon"] = Fraction(parse_rat(str(entry["epsilon"])))
            specs.append(spec)
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return p, specs


def _apply_pair_flags(specs, pair, epsilon, path):
    """--pair a,b and --epsilon override or install a colliding pair."""
    if pair is None and epsilon is None:
        return specs
    by_name = {s["name"]: dict(s) for s in specs}
    if len(by_name) != len(specs):
        raise SchemaError(f"{path}: duplicate branch point names")
    for s in by_name.values():
        s.pop("tail_with", None) if pair is not None else None
    if pair is not None:
        names = [n.strip() for n in pair.split(",")]
        if len(names) != 2 or not all(n in by_name for n in names):
            raise SchemaError(
                f"--pair must name two branch points from the file, got {pair!r}"
            )
        if epsilon is None:
            raise SchemaError("--pair requires --epsilon")
        for s in by_name.values():
            s.pop("epsilon", None)
        by_name[names[0]]["tail_with"] = names[1]
        by_name[names[0]]["epsilon"] = Fraction(epsilon)
    else:
        tails = [s for s in by_name.values() if "tail_with" in s or "epsilon" in s]
        if not tails:
            raise SchemaError("--epsilon given but the file declares no pair")
        for s in tails:
            if "epsilon" in s:
                s["epsilon"] = Fraction(epsilon)
    return list(by_name.values())


# ---------------------------------------------------------------------------
# emission helpers


def _write_outputs(outdir, basename, model, emit):
    outdir.mkdir(parents=True, exist_ok=True)
    files = []
    if emit in ("json", "both"):
        path = outdir / f"{basename}.json"
        path.write_text(_canonical(model.to_json()), encoding="utf-8")
        files.append(path.name)
    if emit in ("dot", "both"):
        path = outdir / f"{basename}.dot"
        path.write_text(model.to_dot(), encoding="utf-8")
        files.append(path.name)
    return files


def _classification_doc(classification, emit, mode):
    doc = {
        "mode": mode,
        "p": classification.p,
        "ordinary": [
            {"label": label, "profile": list(profile)}
            for label, profile in classification.ordinary
        ],
        "tails": [t.to_json() for t in classification.tails],
        "model_count": len(classification.models),
    }
    if emit in ("json", "both"):
        doc["models"] = [m.to_json() for m in classification.models]
    if emit in ("dot", "both"):
        doc["dot"] = [m.to_dot() for m in classification.models]
    return doc


def _newton_doc(cover):
    data = branch_data(cover)
    out = {}
    for bp in data.branch:
        fiber = kpoly_sub(cover.beta_list(), [bp.value])
        out[branch_label(bp.value)] = newton.newton_polygon(fiber).to_json()
    return out


def _branch_tree_doc(cover):
    data = branch_data(cover)
    values = [bp.value for bp in data.branch]
    try:
        return build_branch_tree(values).to_json()
    except AllPointsCoalesce as exc:
        return {"error": str(exc)}


# ---------------------------------------------------------------------------
# subcommands


def _cmd_classify(args):
    if bool(args.cover) == bool(args.profiles):
        raise SchemaError("classify needs exactly one of --cover or --profiles")
    if args.cover:
        cover = _load_cover(args.cover)
        classification = classify_cover(cover)
        mode = "exact"
    else:
        if args.emit_newton or args.emit_branch_tree:
            raise SchemaError("--emit-newton/--emit-branch-tree need --cover")
        p, specs = _load_profiles(args.profiles)
        specs = _apply_pair_flags(specs, args.pair, args.epsilon, args.profiles)
        classification = classify_formula(p, specs)
        mode = "formula"
    doc = _classification_doc(classification, args.emit, mode)
    if args.cover and args.emit_newton:
        doc["newton"] = _newton_doc(cover)
    if args.cover and args.emit_branch_tree:
        doc["branch_tree"] = _branch_tree_doc(cover)
    if args.out:
        outdir = Path(args.out)
        for i, model in enumerate(classification.models):
            _write_outputs(outdir, f"model-{i:02d}", model, args.emit)
        (outdir / "classification.json").write_text(_canonical(doc), encoding="utf-8")
    sys.stdout.write(_canonical(doc))
    return 0


def _cmd_verify(args):
    cover = _load_cover(args.cover)
    classification = classify_cover(cover)
    result = run_oracle(cover)
    matched = [
        i
        for i, m in enumerate(classification.models)
        if result.model.is_isomorphic_to(m)
    ]
    doc = {
        "p": cover.ctx.p,
        "e": result.e,
        "blowups": result.blowups,
        "labels": list(result.labels),
        "candidates": len(classification.models),
        "matched_index": matched[0] if matched else None,
        "verdict": "AGREE" if len(matched) == 1 else "DISAGREE",
    }
    if args.emit in ("json", "both"):
        doc["oracle_model"] = result.model.to_json()
    if args.emit in ("dot", "both"):
        doc["oracle_dot"] = result.model.to_dot()
    if args.trace:
        doc["trace"] = result.trace_json()
    if args.out:
        outdir = Path(args.out)
        _write_outputs(outdir, "oracle-model", result.model, args.emit)
        (outdir / "verify.json").write_text(_canonical(doc), encoding="utf-8")
    sys.stdout.write(_canonical(doc))
    return 0 if doc["verdict"] == "AGREE" else 1


def _partitions_of(p):
    """All fiber profiles: partitions of p other than the unramified one."""
    out = []

    def rec(remaining, largest, prefix):
        if not remaining:
            out.append(tuple(prefix))
            return
        for part in range(min(largest, remaining), 0, -1):
            rec(remaining - part, part, prefix + [part])

    rec(p, p, [])
    return [pi for pi in out if pi != (1,) * p]


def _atlas_rows(p):
    profiles = _partitions_of(p)
    rows = []
    for k in (1, 2, 3):
        for combo in itertools.combinations_with_replacement(profiles, k):
            if sum(p - len(pi) for pi in combo) != p - 1:
                continue
            pairs = []
            for pi1, pi2 in sorted(set(itertools.combinations(sorted(combo), 2))):
                u = pair_excess(p, pi1, pi2)
                entry = {"profiles": [list(pi1), list(pi2)], "u": u}
                if u > 0:
                    entry["threshold"] = fmt_rat(Fraction(p, u))
                    entry["partitions"] = len(admissible_partitions(p, pi1, pi2))
                else:
                    entry["threshold"] = None
                    entry["partitions"] = 0
                pairs.append(entry)
            rows.append(
                {"p": p, "profiles": [list(pi) for pi in sorted(combo)], "pairs": pairs}
            )
    return rows


def _atlas_markdown(rows):
    lines = [
        "# Colliding-pair atlas",
        "",
        "All branch profile combinations for small primes (at most three finite",
        "branch values), with the collision threshold and the number of",
        "admissible splittings for every pair.  A dash means the pair's fibers",
        "already account for p + 1 points, so no threshold exists.",
        "",
        "| p | profiles | pair | threshold | splittings |",
        "|---|----------|------|-----------|------------|",
    ]

    def show(profile):
        return "(" + ",".join(str(x) for x in profile) + ")"

    for row in rows:
        profs = " ".join(show(pi) for pi in row["profiles"])
        if not row["pairs"]:
            lines.append(f"| {row['p']} | {profs} | — | — | — |")
        for pair in row["pairs"]:
            pp = " vs ".join(show(pi) for pi in pair["profiles"])
            thr = pair["threshold"] if pair["threshold"] is not None else "—"
            cnt = pair["partitions"] if pair["threshold"] is not None else "—"
            lines.append(f"| {row['p']} | {profs} | {pp} | {thr} | {cnt} |")
    return "\n".join(lines) + "\n"


def _cmd_atlas(args):
    if not args.out:
        raise SchemaError("atlas needs --out DIR")
    rows = []
    for p in (3, 5, 7):
        rows.extend(_atlas_rows(p))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "atlas.json").write_text(_canonical({"rows": rows}), encoding="utf-8")
    (outdir / "atlas.md").write_text(_atlas_markdown(rows), encoding="utf-8")
    sys.stdout.write(_canonical({"rows": len(rows), "out": str(outdir)}))
    return 0


_SHOWCASE_PROFILES = {"0": (3, 1, 1), "1": (2, 1, 1, 1), "lam": (2, 1, 1, 1)}


def _showcase_specs(collide_with=None, epsilon=None):
    specs = []
    for name in ("0", "1", "lam"):
        spec = {"name": name, "profile": _SHOWCASE_PROFILES[name]}
        if collide_with is not None and name == collide_with:
            spec["tail_with"] = "lam"
            spec["epsilon"] = Fraction(epsilon)
        specs.append(spec)
    return specs


def _iter_showcase():
    """The fixed demonstration family: one good star and two colliding pairs.

    Three branch values with profiles (3,1,1), (2,1,1,1), (2,1,1,1); the
    floating value "lam" collides with "0" (threshold 5) or with "1"
    (threshold 5/2) at a representative distance in each regime.  Nine models
    in all: the near cases contribute one model per admissible splitting.
    Yields (name, classification, model, collides_with, epsilon, choice).
    """
    good = classify_formula(5, _showcase_specs())
    yield ("good", good, good.model, None, None, 0)
    for collide, cases in (
        ("0", (("far", 1), ("critical", 5), ("near", 7))),
        ("1", (("far", 1), ("critical", Fraction(5, 2)), ("near", 3))),
    ):
        for tag, eps in cases:
            classification = classify_formula(5, _showcase_specs(collide, eps))
            for j, model in enumerate(classification.models):
                suffix = "" if len(classification.models) == 1 else "-" + "ab"[j]
                yield (
                    f"collide{collide}-{tag}{suffix}",
                    classification,
                    model,
                    collide,
                    Fraction(eps),
                    j,
                )


def _cmd_example8(args):
    if not args.out:
        raise SchemaError("example8 needs --out DIR")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    index = []
    counter = 0
    for name, classification, model, collide, eps, j in _iter_showcase():
        basename = f"showcase-{counter:02d}-{name}"
        counter += 1
        files = _write_outputs(outdir, basename, model, args.emit)
        entry = {
            "name": basename,
            "files": files,
            "profiles": {k: list(v) for k, v in _SHOWCASE_PROFILES.items()},
        }
        if collide is not None:
            tail = classification.tails[0]
            entry.update(
                {
                    "collides": [collide, "lam"],
                    "epsilon": fmt_rat(eps),
                    "threshold": fmt_rat(tail.threshold),
                    "regime": tail.regime,
                    "model_choice": j,
                }
            )
        index.append(entry)
    (outdir / "index.json").write_text(_canonical({"bundle": index}), encoding="utf-8")
    sys.stdout.write(_canonical({"models": len(index), "out": str(outdir)}))
    return 0


def _iter_showcase():
    yield ("good", classify_formula(5, _showcase_specs()), *_single_model_tail(None))
    for collide, cases in (
        ("0", (("far", 1), ("critical", 5), ("near", 7))),
        ("1", (("far", 1), ("critical", Fraction(5, 2)), ("near", 3))),
    ):
        for tag, eps in cases:
            classification = classify_formula(5, _showcase_specs(collide, eps))
            for j, model in enumerate(classification.models):
                suffix = "" if len(classification.models) == 1 else "-" + "ab"[j]
                yield (
                    f"collide{collide}-{tag}{suffix}",
                    classification,
                    model,
                    collide,
                    Fraction(eps),
                    j,
                )


def _single_model_tail(_):
    # companion values for the good-star entry of the showcase iterator
    return (None, None, 0)


# ---------------------------------------------------------------------------
# entry point


def _build_parser():
    parser = _Parser(
        prog="padicover",
        description="Reduction types of prime-degree covers of the line over p-adic fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, cover=True, profiles=False):
        if cover:
            sp.add_argument("--cover", help="exact-mode cover JSON file")
        if profiles:
            sp.add_argument("--profiles", help="formula-mode branch data JSON file")
            sp.add_argument("--pair", help="two branch names, comma separated")
            sp.add_argument("--epsilon", help="collision distance, e.g. 7 or 5/2")
        sp.add_argument(
            "--emit",
            choices=["json", "dot", "both"],
            default="json",
            help="what to emit for each model",
        )
        sp.add_argument("--out", help="directory for per-model output files")

    classify = sub.add_parser("classify", help="closed-form reduction type")
    common(classify, cover=True, profiles=True)
    classify.add_argument("--emit-newton", action="store_true")
    classify.add_argument("--emit-branch-tree", action="store_true")

    verify = sub.add_parser("verify", help="cross-check the answer by blow-ups")
    common(verify, cover=True)
    verify.add_argument("--trace", action="store_true", help="include stage records")

    atlas = sub.add_parser("atlas", help="profile/threshold tables for p in {3,5,7}")
    atlas.add_argument("--out", help="directory for atlas.md and atlas.json")

    example8 = sub.add_parser("example8", help="emit the fixed showcase bundle")
    example8.add_argument(
        "--emit", choices=["json", "dot", "both"], default="both"
    )
    example8.add_argument("--out", help="directory for the nine model files")
    return parser


_ADVICE = {
    NotIntegralCover: "shift and scale coordinates until the polynomial has "
    "integral coefficients and p-th-power reduction, then retry",
    ResidualRootOutsideFp: "the separating model needs an unramified extension "
    "of the residue field; this engine only lifts F_p-rational centers",
    NonTermination: "the blow-up budget ran out; the cover may be degenerate",
    ThresholdUndefined: "the two fibers already account for p + 1 points, so "
    "no collision threshold exists for this pair",
    AllPointsCoalesce: "apply a coordinate change spreading the branch values "
    "over at least two residue classes, then retry",
    NotRepresentable: "the needed valuations leave the declared value group; "
    "rerun with a larger e",
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "verify":
            if not args.cover:
                raise SchemaError("verify needs --cover")
            return _cmd_verify(args)
        if args.command == "atlas":
            return _cmd_atlas(args)
        return _cmd_example8(args)
    except SchemaError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 3
    except NotSimpleReduction as exc:
        sys.stderr.write(_canonical({"error": str(exc), "offenders": list(exc.offenders)}))
        return 2
    except InvalidProfile as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 3
    except (ClassifierError, OracleError, AllPointsCoalesce, NotRepresentable) as exc:
        advice = ""
        for kind, text in _ADVICE.items():
            if isinstance(exc, kind):
                advice = text
                break
        sys.stderr.write(_canonical({"error": str(exc), "advice": advice}))
        return 4


if __name__ == "__main__":
    sys.exit(main())
