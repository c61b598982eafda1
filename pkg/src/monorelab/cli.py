"""Command-line front end: file ingestion, method selection, result emission.

Exit codes: 0 success, 2 malformed input or validation failure, 3 objective
incompatible with the order variant or the label scale.  Timings go to
stderr so the result document stays byte-identical across runs.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import linear_strong, oracle, penalized, relabel
from .model import (
    DagOrder,
    Instance,
    LabelFunction,
    LabelScale,
    LinearOrder,
    PointsOrder,
    ValidationError,
    validate,
)
from .violator import transitive_reduction, violating_pairs

__all__ = ["main"]

LINEAR_ONLY = {"strong-l0p", "strong-l0-ordinal", "penalized", "weak-l02"}
NUMERIC_ONLY = {"weak-l01", "weak-l0inf", "strong-l0inf", "strong-l0p", "penalized", "weak-l02"}


class CompatibilityError(Exception):
    pass


def _read_rows(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from None
    header = None
    rows = []
    for ln in lines:
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if ln.lower().startswith("labels:"):
            header = [t.strip() for t in ln.split(":", 1)[1].split(",") if t.strip()]
            continue
        rows.append([t.strip() for t in ln.split(",")])
    if not rows:
        raise ValidationError(f"no data rows in {path}")
    return header, rows


def _build_scale(tokens, header):
    numeric = True
    try:
        [float(t) for t in tokens]
    except ValueError:
        numeric = False
    if numeric and header is None:
        scale = LabelScale.from_values([float(t) for t in tokens])
        ranks = [scale.rank_of(float(t)) for t in tokens]
        return scale, ranks
    if header is None:
        raise ValidationError("token labels need a 'labels:' header declaring the scale order")
    used = [t for t in header if t in set(tokens)]
    missing = set(tokens) - set(header)
    if missing:
        raise ValidationError(f"labels {sorted(missing)} missing from the labels: header")
    scale = LabelScale.ordinal(tuple(used))
    ranks = [scale.rank_of(t) for t in tokens]
    return scale, ranks


def _load_instance(args) -> Instance:
    header, rows = _read_rows(args.input)
    if args.order == "points":
        width = len(rows[0])
        if width < 2:
            raise ValidationError("points rows need at least one coordinate and a label")
        coords = []
        tokens = []
        for row in rows:
            if len(row) != width:
                raise ValidationError("dimension mismatch between point rows")
            try:
                coords.append([float(x) for x in row[:-1]])
            except ValueError as e:
                raise ValidationError(f"malformed coordinate: {e}") from None
            tokens.append(row[-1])
        scale, ranks = _build_scale(tokens, header)
        order = PointsOrder(np.asarray(coords))
        return validate(order, LabelFunction.from_ranks(ranks), scale)

    labelled = {}
    for row in rows:
        if len(row) != 2:
            raise ValidationError(f"expected vertex_id,label rows, got {','.join(row)}")
        try:
            vid = int(row[0])
        except ValueError:
            raise ValidationError(f"malformed vertex id {row[0]!r}") from None
        if vid in labelled:
            raise ValidationError(f"duplicate vertex id {vid}")
        labelled[vid] = row[1]
    n = len(labelled)
    if sorted(labelled) != list(range(n)):
        raise ValidationError("vertex ids must be dense 0..n-1")
    tokens = [labelled[v] for v in range(n)]
    scale, ranks = _build_scale(tokens, header)
    if args.order == "linear":
        order = LinearOrder(n)
    else:
        if not args.edges:
            raise ValidationError("dag orders need --edges FILE")
        _, erows = _read_rows(args.edges)
        edges = []
        for row in erows:
            if len(row) != 2:
                raise ValidationError("edge rows must be u,v")
            try:
                edges.append((int(row[0]), int(row[1])))
            except ValueError as e:
                raise ValidationError(f"malformed edge: {e}") from None
        order = DagOrder(n, tuple(edges))
    return validate(order, LabelFunction.from_ranks(ranks), scale)


def _check_compat(args, inst: Instance):
    if args.objective in LINEAR_ONLY and not isinstance(inst.order, LinearOrder):
        raise CompatibilityError(f"objective {args.objective} requires a linear order")
    if args.objective in NUMERIC_ONLY and not inst.scale.is_numeric:
        raise CompatibilityError(f"objective {args.objective} requires numeric labels")
    if args.objective == "penalized" and args.alpha is None:
        raise CompatibilityError("penalized needs --alpha")
    if args.objective == "strong-l0p" and args.p not in ("1", "2"):
        raise CompatibilityError("strong-l0p needs --p 1 or --p 2")
    if args.objective == "penalized" and args.p not in ("1", "2", "inf"):
        raise CompatibilityError("penalized needs --p 1, 2, or inf")


def _fit(args, inst: Instance):
    obj = args.objective
    if obj == "l0":
        return relabel.l0_regression(inst)
    if obj == "weak-l00":
        return relabel.weak_l00(inst)
    if obj == "weak-l01":
        return relabel.weak_l01(inst)
    if obj == "weak-l0inf":
        return relabel.weak_l0inf(inst)
    if obj == "strong-l0inf":
        if isinstance(inst.order, LinearOrder):
            return linear_strong.strong_l0inf_linear(inst)
        return relabel.strong_l0inf(inst)
    if obj == "weak-l02":
        return relabel.weak_l02_approx(inst, eps=args.eps)
    if obj == "strong-l0p":
        return linear_strong.strong_l0p_linear(inst, int(args.p))
    if obj == "strong-l0-ordinal":
        return linear_strong.strong_l0_ordinal(inst)
    if obj == "penalized":
        if args.p == "inf":
            return penalized.penalized_linf(inst, args.alpha)
        return penalized.penalized_lp(inst, args.alpha, int(args.p))
    raise CompatibilityError(f"unknown objective {obj}")


def _fmt_num(x) -> str:
    xf = float(x)
    if math.isfinite(xf) and xf == int(xf) and abs(xf) < 1e15:
        return str(int(xf))
    return repr(xf)


def _emit(inst: Instance, res, args, out):
    scale = inst.scale
    lines = ["monorelab-result v1"]
    lines.append(f"order: {args.order}")
    lines.append(f"objective: {args.objective}")
    lines.append(f"n: {inst.n}")
    lines.append("labels: " + ",".join(
        _fmt_num(t) if scale.is_numeric else str(t) for t in scale.labels))
    if res.g_ranks is not None and not scale.is_numeric:
        gtxt = ",".join(str(scale.labels[r - 1]) for r in res.g_ranks)
    else:
        gtxt = ",".join(_fmt_num(x) for x in res.g)
    lines.append("g: " + gtxt)
    lines.append("kept: " + ",".join(str(v) for v in res.kept_set))
    lines.append(f"l0_distance: {res.l0_distance}")
    if res.stage_counts is not None:
        lines.append("stage_counts: " + ",".join(str(c) for c in res.stage_counts))
    if res.lp_error is not None:
        lines.append(f"lp_error: {_fmt_num(res.lp_error)}")
        lines.append(f"lp_p: {'inf' if res.lp_p == math.inf else res.lp_p}")
    if res.objective is not None:
        lines.append(f"objective_value: {_fmt_num(res.objective)}")
        lines.append(f"alpha: {_fmt_num(res.alpha)}")
    out.write("\n".join(lines) + "\n")


def _cmd_relabel(args, out) -> int:
    inst = _load_instance(args)
    _check_compat(args, inst)
    t0 = time.perf_counter()
    res = _fit(args, inst)
    print(f"fit: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    _emit(inst, res, args, out)
    return 0


def _cmd_distance(args, out) -> int:
    inst = _load_instance(args)
    kept, vio = relabel.max_isotonic_vertices(inst)
    out.write("monorelab-result v1\n")
    out.write(f"order: {args.order}\n")
    out.write(f"n: {inst.n}\n")
    out.write(f"n_violators: {len(vio.vio_vertices)}\n")
    out.write(f"l0_distance: {inst.n - len(kept)}\n")
    return 0


def _cmd_oracle(args, out) -> int:
    inst = _load_instance(args)
    _check_compat(args, inst)
    cap = os.environ.get("MONORELAB_ORACLE_MAX_N")
    budget = oracle.OracleBudget(max_n=int(cap)) if cap else oracle.DEFAULT_BUDGET
    obj = args.objective
    if obj == "l0":
        val, witness = oracle.brute_best_regression(inst, "l0", budget=budget)
        out.write(f"oracle l0_distance: {val}\n")
        out.write("witness: " + ",".join(str(v) for v in witness) + "\n")
    elif obj == "strong-l0p":
        val, _ = oracle.brute_best_regression(inst, "strong-lp", p=int(args.p), budget=budget)
        out.write(f"oracle strong_l0p_error: {_fmt_num(val)}\n")
    elif obj == "strong-l0-ordinal":
        hist, g = oracle.brute_best_regression(inst, "stage-lexmax", budget=budget)
        out.write("oracle stage_counts: " + ",".join(str(c) for c in hist) + "\n")
        out.write("g_ranks: " + ",".join(str(r) for r in g) + "\n")
    elif obj == "penalized":
        p = math.inf if args.p == "inf" else int(args.p)
        val, _ = oracle.brute_best_regression(inst, "penalized", p=p, alpha=args.alpha,
                                              budget=budget)
        out.write(f"oracle penalized_objective: {_fmt_num(val)}\n")
    else:
        raise CompatibilityError(f"oracle does not cover objective {obj}")
    return 0


def _half_swap_instance(n: int) -> Instance:
    vals = list(range(n // 2 + 1, n + 1)) + list(range(1, n // 2 + 1))
    scale = LabelScale.from_values(vals)
    f = LabelFunction.from_ranks([scale.rank_of(float(v)) for v in vals])
    return validate(LinearOrder(n), f, scale)


def _cmd_bench(args, out) -> int:
    rng = np.random.default_rng(args.seed)
    sizes = [int(s) for s in args.sizes.split(",")]
    out.write("family,n,n_violators,m_closure,m_reduction,l0_distance\n")
    for fam in ("half-swap", "random"):
        for n in sizes:
            if fam == "half-swap":
                inst = _half_swap_instance(n)
            else:
                ranks = rng.integers(1, min(8, n) + 1, size=n)
                scale = LabelScale.from_values(list(range(1, min(8, n) + 1)))
                inst = validate(LinearOrder(n), LabelFunction.from_ranks(ranks), scale)
            t0 = time.perf_counter()
            vio = violating_pairs(inst)
            red = transitive_reduction(vio)
            t1 = time.perf_counter()
            kept, _ = relabel.max_isotonic_vertices(inst, vio=red)
            t2 = time.perf_counter()
            out.write(f"{fam},{n},{len(vio.vio_vertices)},{len(vio.edges)},"
                      f"{len(red.edges)},{inst.n - len(kept)}\n")
            print(f"bench {fam} n={n}: dag {t1 - t0:.3f}s flow {t2 - t1:.3f}s",
                  file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="monorelab",
                                     description="Hamming-optimal monotonic relabeling")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_common(p, objective=True):
        p.add_argument("--input", required=True, help="csv of vertex_id,label (or coords,label)")
        p.add_argument("--order", choices=["linear", "dag", "points"], default="linear")
        p.add_argument("--edges", help="dag edge file of u,v rows")
        p.add_argument("--output", help="write the result document here instead of stdout")
        if objective:
            p.add_argument("--objective", required=True,
                           choices=["l0", "weak-l00", "weak-l01", "weak-l0inf",
                                    "strong-l0inf", "weak-l02", "strong-l0p",
                                    "strong-l0-ordinal", "penalized"])
            p.add_argument("--p", default="2", help="1, 2, or inf where applicable")
            p.add_argument("--alpha", type=float, help="penalty weight for penalized")
            p.add_argument("--eps", type=float, default=1e-6, help="tolerance for weak-l02")

    p_rel = sub.add_parser("relabel", help="fit and write the result document")
    add_common(p_rel)
    p_dist = sub.add_parser("distance", help="Hamming distance to monotonicity only")
    add_common(p_dist, objective=False)
    p_orc = sub.add_parser("oracle", help="brute-force reference within budget")
    add_common(p_orc)
    p_bench = sub.add_parser("bench", help="desk-scale size/timing table")
    p_bench.add_argument("--sizes", default="4,8,16,64")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--output")

    args = parser.parse_args(argv)
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as out:
                return _dispatch(args, out)
        return _dispatch(args, sys.stdout)
    except (ValidationError, oracle.OracleBudgetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CompatibilityError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


def _dispatch(args, out) -> int:
    if args.cmd == "relabel":
        return _cmd_relabel(args, out)
    if args.cmd == "distance":
        return _cmd_distance(args, out)
    if args.cmd == "oracle":
        return _cmd_oracle(args, out)
    return _cmd_bench(args, out)


if __name__ == "__main__":
    raise SystemExit(main())
