"""Command-line front end: config ingestion, experiments, JSON/CSV reports.

Subcommands: frame {gen|validate}, dimensions, counterexample,
cover {enum|exponents|points}, sample.  Outputs are schema-versioned and
byte-identical across runs for identical configs and seeds.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bowen, cover, pressure, sampler
from .frame import (
    Frame,
    FrameError,
    frame_from_doc,
    minimal_frame,
    validate_frame,
)
from .rifs import (
    ProbVector,
    SpecValidationError,
    check_bowen_hypothesis,
    load_spec,
)

SCHEMA = "rifs-lab/1"


def _emit(doc: dict, out: Path | None = None) -> None:
    text = json.dumps({"schema": SCHEMA, **doc}, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _fail(message: str, detail: dict | None = None) -> int:
    _emit({"error": message, **(detail or {})})
    return 2


def _parse_seeds(args: argparse.Namespace) -> list[int]:
    if args.seeds:
        base_str, _, count_str = args.seeds.partition(":")
        try:
            base, count = int(base_str), int(count_str or "1")
        except ValueError:
            raise SpecValidationError(f"--seeds expects BASE:COUNT, got {args.seeds!r}")
        if count < 1:
            raise SpecValidationError("--seeds count must be >= 1")
        return [base + i for i in range(count)]
    return [args.seed]


# -- frame -----------------------------------------------------------------


def cmd_frame(args: argparse.Namespace) -> int:
    if args.frame_cmd == "gen":
        if args.levels < 1:
            return _fail("--levels must be >= 1")
        try:
            slack = tuple(args.slack) if args.slack else None
            frame = minimal_frame(args.levels, slack=slack)
        except FrameError as exc:
            return _fail(str(exc))
        doc = {"frame": frame.to_doc(), "entries": _frame_entries(frame)}
        _emit(doc, args.out)
        return 0

    text = Path(args.path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        return _fail(f"not valid JSON: {exc}")
    if isinstance(doc, dict):
        try:
            frame_from_doc(doc)
        except FrameError as exc:
            return _fail(str(exc))
        _emit({"valid": True, "rule": doc.get("rule")})
        return 0
    try:
        pairs = [(int(u), int(v)) for u, v in doc]
    except (TypeError, ValueError):
        return _fail("frame file must hold [U, V] decimal-string pairs")
    report = validate_frame(pairs)
    _emit(report.to_dict())
    return 0 if report.valid else 1


def _frame_entries(frame: Frame) -> list[dict]:
    out = []
    for n in range(1, len(frame) + 1):
        lvl = frame.entry(n)
        entry = {"level": n, "log2_U": lvl.u.log2, "log2_V": lvl.v.log2}
        if lvl.u.is_exact and lvl.u.as_int().bit_length() <= 256:
            entry["U"] = str(lvl.u.as_int())
            entry["V"] = str(lvl.v.as_int())
        out.append(entry)
    return out


# -- dimensions --------------------------------------------------------------


def cmd_dimensions(args: argparse.Namespace) -> int:
    try:
        spec = load_spec(Path(args.config).read_text())
    except (SpecValidationError, FrameError, OSError) as exc:
        return _fail(str(exc))

    report: dict = {"tolerance": args.tol, "truncation": args.truncation}
    try:
        report["bowen"] = bowen.bowen_parameter(spec, tol=args.tol,
                                                truncation=args.truncation)
    except bowen.UnboundedDimensionError as exc:
        return _fail(str(exc))
    try:
        report["mauldin"] = bowen.mauldin_dimension(spec, tol=args.tol)
    except (bowen.MauldinDomainError, bowen.UnboundedDimensionError):
        report["mauldin"] = None
    report["hypothesis"] = check_bowen_hypothesis(spec).to_dict()

    verdicts = []
    if spec.is_frame_family and not spec.probabilities.is_finite:
        probes = [float(spec.d), 0.99 * spec.d]
    else:
        probes = [0.0, report["bowen"]]
    for t in probes:
        verdict = bowen.expected_log_fitness(spec, t, truncation=args.truncation)
        verdicts.append({"t": t, **verdict.to_dict()})
    report["verdicts"] = verdicts
    _emit(report, args.out)
    return 0


# -- counterexample -----------------------------------------------------------


def _bound_rows(profile, result, t_grid):
    rows = []
    for st in result.times:
        for t in t_grid:
            chk = pressure.subsequence_bound_check(profile, st, t)
            m_dec = str(st.m.as_int()) if st.m.is_exact else repr(st.m.log2)
            rows.append({
                "n": st.n,
                "record_pos": st.record_pos,
                "record_symbol": st.record_symbol,
                "j_before": (str(st.j_before.as_int()) if st.j_before.is_exact
                             else repr(st.j_before.log2)),
                "m": m_dec,
                "m_form": "dec" if st.m.is_exact else "log2",
                "t": t,
                "exponent": chk.exponent,
                "lhs": chk.lhs,
                "bound_rhs": chk.rhs,
                "holds": chk.holds,
                "ratio": chk.ratio,
            })
    return rows


_CSV_COLUMNS = ["n", "record_pos", "record_symbol", "j_before", "m", "m_form",
                "t", "exponent", "lhs", "bound_rhs", "holds", "ratio"]


def _rows_to_csv(rows: list[dict]) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for row in rows:
        cells = []
        for col in _CSV_COLUMNS:
            val = row[col]
            if isinstance(val, bool):
                cells.append("true" if val else "false")
            elif isinstance(val, float):
                cells.append(repr(val))
            else:
                cells.append(str(val))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_counterexample(args: argparse.Namespace) -> int:
    try:
        spec = load_spec(Path(args.config).read_text())
        seeds = _parse_seeds(args)
    except (SpecValidationError, FrameError, OSError) as exc:
        return _fail(str(exc))
    if not spec.is_frame_family:
        return _fail("the counterexample experiment needs a frame-family config")

    t_grid = [float(t) for t in args.t_grid.split(",")] if args.t_grid else [0.0, 0.5, 1.0]
    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    per_seed = []
    estimates = []
    violations = 0
    truncated_seeds = 0
    failed = 0
    for seed in seeds:
        record: dict = {"seed": seed}
        try:
            path = sampler.sample_scenery(spec.probabilities, args.horizon, seed)
            seqs = sampler.record_sequences(path, args.pairs)
            prefix_len = max((p.position for p in seqs.pairs), default=1)
            profile = pressure.build_branch_profile(
                path.prefix(prefix_len), spec.frame, spec.d
            )
            result = pressure.special_times(profile, seqs)
            rows = _bound_rows(profile, result, t_grid)
            estimate = pressure.dim_upper_estimate(profile, seqs)
        except Exception as exc:  # isolate per-seed failures
            record["error"] = f"{type(exc).__name__}: {exc}"
            failed += 1
            per_seed.append(record)
            continue
        record.update({
            "pairs": len(seqs.pairs),
            "degenerate": seqs.degenerate,
            "truncated": seqs.truncated or result.truncated,
            "estimate": estimate,
            "bound_violations": sum(1 for r in rows if not r["holds"]),
        })
        violations += record["bound_violations"]
        truncated_seeds += record["truncated"]
        estimates.append(estimate)
        per_seed.append(record)
        if out_dir is not None:
            (out_dir / f"seed_{seed}.csv").write_text(_rows_to_csv(rows))

    summary = {
        "bowen": bowen.bowen_parameter(spec),
        "d": spec.d,
        "seeds": len(seeds),
        "failed_seeds": failed,
        "truncated_seeds": truncated_seeds,
        "bound_violations": violations,
        "estimates": {
            "count": len(estimates),
            "max": max(estimates) if estimates else None,
            "below_0.2": sum(1 for e in estimates if e < 0.2),
        },
        "per_seed": per_seed,
        "horizon": args.horizon,
        "t_grid": t_grid,
    }
    _emit(summary, (out_dir / "summary.json") if out_dir is not None else None)
    if out_dir is not None:
        _emit({"written": str(out_dir)})
    return 0 if failed == 0 else 1


# -- cover ---------------------------------------------------------------------


def _profile_from_args(args: argparse.Namespace):
    symbols = [int(s) for s in args.symbols.split(",")]
    if any(s < 1 for s in symbols):
        raise SpecValidationError("symbols are positive integers")
    if args.frame:
        frame = frame_from_doc(json.loads(Path(args.frame).read_text()))
    else:
        frame = minimal_frame(args.levels)
    import numpy as np

    path = sampler.SceneryPath(np.asarray(symbols, dtype=np.int64), seed=0)
    return pressure.build_branch_profile(path, frame, args.d)


def cmd_cover(args: argparse.Namespace) -> int:
    try:
        profile = _profile_from_args(args)
    except (SpecValidationError, FrameError, json.JSONDecodeError) as exc:
        return _fail(str(exc))

    if args.cover_cmd == "exponents":
        depths = [int(m) for m in args.depths.split(",")]
        try:
            pairs = cover.box_exponents(profile, depths)
        except pressure.CoverageError as exc:
            return _fail(str(exc))
        lines = ["m,exponent"] + [f"{m},{e!r}" for m, e in pairs]
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text)
            _emit({"written": str(args.out), "rows": len(pairs)})
        else:
            sys.stdout.write(text)
        return 0

    try:
        cubes = cover.enumerate_cylinders(profile, args.depth, budget=args.budget)
    except cover.BudgetError as exc:
        return _fail(str(exc), {"required_budget": exc.required})
    except pressure.CoverageError as exc:
        return _fail(str(exc))

    if args.cover_cmd == "enum":
        _emit({
            "depth": args.depth,
            "count": len(cubes),
            "osc": cover.osc_check(cubes),
            "cubes": [{"level": c.level, "corner": list(c.corner)} for c in cubes],
        }, args.out)
        return 0

    try:
        text = cover.emit_points(cubes)
    except cover.UnsupportedDimensionError as exc:
        return _fail(str(exc))
    if args.out:
        Path(args.out).write_text(text)
        _emit({"written": str(args.out), "rows": len(cubes)})
    else:
        sys.stdout.write(text)
    return 0


# -- sample ----------------------------------------------------------------------


def cmd_sample(args: argparse.Namespace) -> int:
    try:
        if args.config:
            spec = load_spec(Path(args.config).read_text())
            probs = spec.probabilities
        else:
            probs = ProbVector("inverse_square")
        path = sampler.sample_scenery(probs, args.horizon, args.seed)
    except (SpecValidationError, FrameError, OSError) as exc:
        return _fail(str(exc))
    except sampler.RareTailError as exc:
        return _fail(str(exc), {"variate": exc.variate, "cap": exc.cap})
    text = sampler.scenery_csv(path)
    if args.out:
        Path(args.out).write_text(text)
        _emit({
            "written": str(args.out),
            "seed": args.seed,
            "horizon": args.horizon,
            "domination_start": sampler.domination_start(path),
        })
    else:
        sys.stdout.write(text)
    return 0


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rifs-lab",
        description="Random IFS lab: frames, dimension solvers, and the "
                    "dimension-drop experiment.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_frame = sub.add_parser("frame", help="generate or validate frames")
    frame_sub = p_frame.add_subparsers(dest="frame_cmd", required=True)
    p_gen = frame_sub.add_parser("gen", help="generate a frame with tight axioms")
    p_gen.add_argument("--minimal", action="store_true",
                       help="tight growth rule (the default)")
    p_gen.add_argument("--levels", type=int, required=True)
    p_gen.add_argument("--slack", type=int, nargs=2, metavar=("SU", "SV"),
                       help="multipliers on the tight choices")
    p_gen.add_argument("--out", type=Path)
    p_val = frame_sub.add_parser("validate", help="check a frame file")
    p_val.add_argument("path")
    p_frame.set_defaults(func=cmd_frame)

    p_dim = sub.add_parser("dimensions", help="Bowen and random-recursive dimensions")
    p_dim.add_argument("config", help="system config JSON")
    p_dim.add_argument("--tol", type=float, default=1e-9)
    p_dim.add_argument("--truncation", type=int, default=50)
    p_dim.add_argument("--out", type=Path)
    p_dim.set_defaults(func=cmd_dimensions)

    p_ce = sub.add_parser("counterexample",
                          help="per-seed dimension-drop experiment")
    p_ce.add_argument("config", help="frame-family config JSON")
    p_ce.add_argument("--seed", type=int, default=0)
    p_ce.add_argument("--seeds", help="BASE:COUNT expansion")
    p_ce.add_argument("--horizon", type=int, default=10_000)
    p_ce.add_argument("--pairs", type=int, default=2,
                      help="record pairs (special times) per seed")
    p_ce.add_argument("--t-grid", default="0,0.5,1")
    p_ce.add_argument("--out", help="directory for per-seed CSV + summary.json")
    p_ce.set_defaults(func=cmd_counterexample)

    p_cov = sub.add_parser("cover", help="cylinder covers of a fixed prefix")
    cov_sub = p_cov.add_subparsers(dest="cover_cmd", required=True)
    for name, helptext in (
        ("enum", "enumerate cylinder cubes"),
        ("exponents", "covering exponents d*B_m/m"),
        ("points", "emit corner/side CSV for plotting"),
    ):
        pc = cov_sub.add_parser(name, help=helptext)
        pc.add_argument("--symbols", required=True, help="comma-separated prefix")
        pc.add_argument("--levels", type=int, default=8,
                        help="minimal-frame depth when no frame file is given")
        pc.add_argument("--frame", help="frame file (JSON)")
        pc.add_argument("--d", type=int, default=1)
        pc.add_argument("--budget", type=int, default=cover.DEFAULT_BUDGET)
        pc.add_argument("--out", type=Path)
        if name == "exponents":
            pc.add_argument("--depths", required=True, help="comma-separated depths")
        else:
            pc.add_argument("--depth", type=int, required=True)
    p_cov.set_defaults(func=cmd_cover)

    p_sam = sub.add_parser("sample", help="sample a scenery to CSV")
    p_sam.add_argument("config", nargs="?", help="optional config JSON for probabilities")
    p_sam.add_argument("--seed", type=int, default=0)
    p_sam.add_argument("--horizon", type=int, default=1000)
    p_sam.add_argument("--out", type=Path)
    p_sam.set_defaults(func=cmd_sample)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecValidationError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
