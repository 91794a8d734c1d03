"""Command line front end.

Reports are JSON (sorted keys, two-space indent) or, for per-vertex
tables, CSV with hyphen-joined vertex words.  Output is deterministic:
fixed tie-breaks upstream, sorted emission here, no timestamps anywhere.
Exit codes: 0 on success, 1 when --assert is set and a verdict fails,
2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .barrier import CutoffReport, compute_barrier, letter_cutoff
from .optimizer import DEFAULT_TOL, WeightedMemoryGraph, build_memory_graph, optimize
from .potential import PotentialSpec, TAIL_LINEAR, parse_potential, validate_table
from .shift_space import (
    KIND_EXPLICIT,
    KIND_FULL,
    KIND_RENEWAL,
    ConditionVerdict,
    FiniteShift,
    ShiftSpec,
    Word,
    check_bi,
    check_bp,
    covering_core,
    is_transitive,
    parse_shift_spec,
    truncate,
)
from .subaction import verify_subaction, uniqueness_comparison
from .truncation import (
    BOUNDED,
    DIVERGENT,
    BoundednessProbe,
    Stage,
    StabilizationReport,
    bp_boundedness_probe,
    build_family,
    stabilization_experiment,
)

SCHEMA = 1


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    shift_path: str | None = None
    potential_path: str | None = None
    values_path: str | None = None
    values_b_path: str | None = None
    out_path: str | None = None
    fmt: str = "json"
    tol: float = DEFAULT_TOL
    use_cache: bool = True
    max_letter: int | None = None
    stages: tuple[int, ...] = ()
    letters: tuple[int, ...] = ()
    scan_to: int | None = None
    assert_verdict: bool = False
    horizon: int = 100
    renewal_a: int = 2
    renewal_b: int = 0


def _word_key(word: Word) -> str:
    return "-".join(str(l) for l in word)


def _parse_word_key(text: str) -> Word:
    try:
        return tuple(int(part) for part in text.split("-"))
    except ValueError:
        raise ValueError(f"malformed vertex word {text!r}") from None


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from None


def _load_values_csv(path: str) -> dict[Word, float]:
    values: dict[Word, float] = {}
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        key, _, raw = line.partition(",")
        if not raw:
            raise ValueError(f"{path}:{lineno}: expected 'vertex_word,value'")
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad value {raw!r}") from None
        values[_parse_word_key(key.strip())] = value
    if not values:
        raise ValueError(f"{path}: no value rows found")
    return values


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(cfg: RunConfig, payload: dict) -> None:
    _emit(cfg, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _verdict_payload(verdict: ConditionVerdict) -> dict:
    return {
        "condition": verdict.condition,
        "status": verdict.status,
        "bound": verdict.bound,
        "witnesses": list(verdict.witnesses),
        "detail": verdict.detail,
    }


def _cutoff_payload(cutoff: CutoffReport) -> dict:
    return {
        "letter": cutoff.letter,
        "excursion_cutoff": cutoff.excursion_cutoff,
        "confinement_bound": cutoff.confinement_bound,
        "local_connect_len": cutoff.local_connect_len,
        "wide_connect_len": cutoff.wide_connect_len,
        "wide_bound": cutoff.wide_bound,
    }


def _load_inputs(cfg: RunConfig) -> tuple[ShiftSpec, PotentialSpec]:
    if not cfg.shift_path or not cfg.potential_path:
        raise ValueError("--shift and --potential are required")
    spec = parse_shift_spec(_read_text(cfg.shift_path))
    pot = parse_potential(_read_text(cfg.potential_path))
    validate_table(pot, spec)
    return spec, pot


def _finite_for(cfg: RunConfig, spec: ShiftSpec) -> FiniteShift:
    if spec.kind in (KIND_EXPLICIT, KIND_FULL):
        bound = spec.max_letter() if cfg.max_letter is None else cfg.max_letter
        return truncate(spec, bound)
    if cfg.max_letter is None:
        raise ValueError("--max-letter is required for countable-alphabet shifts")
    return covering_core(spec, range(cfg.max_letter + 1))


def _optimized_graph(cfg: RunConfig) -> tuple[ShiftSpec, PotentialSpec, WeightedMemoryGraph]:
    spec, pot = _load_inputs(cfg)
    finite = _finite_for(cfg, spec)
    graph = build_memory_graph(finite, pot)
    optimize(graph, cfg.tol)
    return spec, pot, graph


def _cmd_shift_check(cfg: RunConfig) -> int:
    if not cfg.shift_path:
        raise ValueError("--shift is required")
    spec = parse_shift_spec(_read_text(cfg.shift_path))
    transitive = None
    if spec.kind in (KIND_EXPLICIT, KIND_FULL):
        transitive = is_transitive(truncate(spec, spec.max_letter()))
    _emit_json(
        cfg,
        {
            "schema": SCHEMA,
            "kind": spec.kind,
            "bp": _verdict_payload(check_bp(spec, cfg.horizon)),
            "bi": _verdict_payload(check_bi(spec, cfg.horizon)),
            "transitive": transitive,
        },
    )
    return 0


def _cmd_optimize(cfg: RunConfig) -> int:
    _, _, graph = _optimized_graph(cfg)
    _emit_json(
        cfg,
        {
            "schema": SCHEMA,
            "m": graph.max_mean,
            "cycle": [list(v) for v in graph.critical_cycle],
            "critical_class_unique": graph.critical_class_unique,
        },
    )
    return 0


def _cmd_barrier(cfg: RunConfig) -> int:
    spec, pot, graph = _optimized_graph(cfg)
    result = compute_barrier(graph, cfg.tol)
    if cfg.fmt == "csv":
        rows = [f"{_word_key(v)},{value!r}" for v, value in sorted(result.values.items())]
        _emit(cfg, "\n".join(rows) + "\n")
        return 0

    bounds = result.bounds
    cutoff = letter_cutoff(spec, pot, graph.shift, result.base_vertex[0])
    _emit_json(
        cfg,
        {
            "schema": SCHEMA,
            "m": result.max_mean,
            "base": list(result.base_vertex),
            "values": {_word_key(v): x for v, x in result.values.items()},
            "bounds": {
                "per_letter": sorted([a, x] for a, x in bounds.per_letter.items()),
                "low_letter_peak": bounds.low_letter_peak,
                "base_cycle_peak": bounds.base_cycle_peak,
                "low_letter_cutoff": bounds.low_letter_cutoff,
                "ambient_variation": bounds.ambient_variation,
                "global_bound": bounds.global_bound,
            },
            "cutoff": _cutoff_payload(cutoff),
        },
    )
    return 0


def _cmd_subaction_verify(cfg: RunConfig) -> int:
    if not cfg.values_path:
        raise ValueError("--values is required")
    _, _, graph = _optimized_graph(cfg)
    values = _load_values_csv(cfg.values_path)
    report = verify_subaction(graph, values, cfg.tol)
    _emit_json(
        cfg,
        {
            "schema": SCHEMA,
            "is_subaction": report.is_subaction,
            "worst_violation": report.worst_violation,
            "is_calibrated": report.is_calibrated,
            "uncalibrated": [_word_key(v) for v in report.uncalibrated_vertices],
            "contact_edges": sorted(
                [_word_key(u), _word_key(v)] for u, v in report.contact_edges
            ),
            "supp_in_contact": report.supp_in_contact,
        },
    )
    if cfg.assert_verdict and not (
        report.is_subaction and report.is_calibrated and report.supp_in_contact
    ):
        return 1
    return 0


def _cmd_subaction_compare(cfg: RunConfig) -> int:
    if not cfg.values_path or not cfg.values_b_path:
        raise ValueError("--values and --values-b are required")
    _, _, graph = _optimized_graph(cfg)
    first = _load_values_csv(cfg.values_path)
    second = _load_values_csv(cfg.values_b_path)
    report = uniqueness_comparison(graph, first, second, cfg.tol)
    _emit_json(
        cfg,
        {
            "schema": SCHEMA,
            "is_constant_diff": report.comparison.is_constant_diff,
            "constant": report.comparison.constant,
            "max_deviation": report.comparison.max_deviation,
            "critical_class_unique": report.critical_class_unique,
            "consistent": report.consistent,
            "note": report.note,
        },
    )
    if cfg.assert_verdict and not report.comparison.is_constant_diff:
        return 1
    return 0


def _stage_summary(stage: Stage) -> dict:
    return {
        "requested": stage.requested,
        "used": stage.used,
        "m": stage.graph.max_mean,
        "base": list(stage.barrier.base_vertex),
        "cycle": [list(v) for v in stage.graph.critical_cycle],
        "vertices": len(stage.graph.vertices),
    }


def _stabilization_payload(report: StabilizationReport) -> dict:
    return {
        "ok": report.ok,
        "entries": [
            {
                "letter": e.letter,
                "observed_index": e.observed_index,
                "observed_requested": e.observed_requested,
                "observed_used": e.observed_used,
                "predicted": None if e.predicted is None else _cutoff_payload(e.predicted),
                "ok": e.ok,
                "note": e.note,
            }
            for e in report.entries
        ],
    }


def _probe_payload(probe: BoundednessProbe) -> dict:
    return {
        "floors": sorted([j, x] for j, x in probe.floors.items()),
        "bp": _verdict_payload(probe.bp),
        "verdict": probe.verdict,
        "floor": probe.floor,
        "slope": probe.slope,
        "fit_letters": list(probe.fit_letters),
        "consistent": probe.consistent,
        "note": probe.note,
    }


def _cmd_converge(cfg: RunConfig) -> int:
    spec, pot = _load_inputs(cfg)
    if not cfg.stages:
        raise ValueError("--stages is required")
    family = build_family(spec, pot, cfg.stages, tol=cfg.tol, use_cache=cfg.use_cache)

    if cfg.fmt == "csv":
        rows = []
        for stage in family.stages:
            for v, value in sorted(stage.barrier.values.items()):
                rows.append(f"{stage.requested},{_word_key(v)},{value!r}")
        _emit(cfg, "\n".join(rows) + "\n")
        return 0

    stabilization = None
    if cfg.letters:
        stabilization = stabilization_experiment(family, cfg.letters, cfg.tol)
    probe = None
    if cfg.scan_to is not None:
        probe = bp_boundedness_probe(family, spec, cfg.scan_to, cfg.tol)
    _emit_json(
        cfg,
        {
            "schema": SCHEMA,
            "stages": [_stage_summary(s) for s in family.stages],
            "base_stable": family.base_stable,
            "cycle_stable": family.cycle_stable,
            "stabilization": None if stabilization is None else _stabilization_payload(stabilization),
            "probe": None if probe is None else _probe_payload(probe),
        },
    )
    if cfg.assert_verdict:
        if stabilization is not None and not stabilization.ok:
            return 1
        if probe is not None and not probe.consistent:
            return 1
    return 0


def _cmd_demo_renewal(cfg: RunConfig) -> int:
    spec = ShiftSpec(kind=KIND_RENEWAL, renewal_rule=(cfg.renewal_a, cfg.renewal_b))
    pot = PotentialSpec(depth=1, tail_kind=TAIL_LINEAR, tail_scale=1.0, table={(0,): 0.0})
    stages = cfg.stages or (6, 12, 24)
    scan_to = 23 if cfg.scan_to is None else cfg.scan_to
    family = build_family(spec, pot, stages, tol=cfg.tol, use_cache=cfg.use_cache)
    probe = bp_boundedness_probe(family, spec, scan_to, cfg.tol)
    bi = check_bi(spec)
    if probe.verdict == DIVERGENT:
        conclusion = "no bounded calibrated subaction exists."
    elif probe.verdict == BOUNDED:
        conclusion = "a bounded calibrated subaction exists."
    else:
        conclusion = "the probe is inconclusive."
    _emit_json(
        cfg,
        {
            "schema": SCHEMA,
            "renewal": {"a": cfg.renewal_a, "b": cfg.renewal_b},
            "stages": [_stage_summary(s) for s in family.stages],
            "m": family.stages[-1].graph.max_mean,
            "base_stable": family.base_stable,
            "cycle_stable": family.cycle_stable,
            "probe": _probe_payload(probe),
            "verdicts": {"bp": probe.bp.status, "boundedness": probe.verdict},
            "bi": _verdict_payload(bi),
            "conclusion": conclusion,
            "notes": [
                "every renewal rule fails the exit-set check: each letter j >= 1 has "
                "the single outgoing edge j -> j-1, so the transposed adjacency is "
                "reported under the same literal definitions rather than any looser "
                "convention."
            ],
        },
    )
    return 0


def _int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peierls",
        description="maximizing cycles, barriers and subactions on Markov shifts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p: argparse.ArgumentParser, potential: bool = True) -> None:
        p.add_argument("--shift", required=True, help="shift spec JSON file")
        if potential:
            p.add_argument("--potential", required=True, help="potential JSON file")
            p.add_argument("--max-letter", type=int, default=None)
            p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--out", default=None, help="write the report here instead of stdout")

    shift = sub.add_parser("shift", help="inspect a shift spec")
    shift_sub = shift.add_subparsers(dest="action", required=True)
    check = shift_sub.add_parser("check", help="entry/exit boundedness and transitivity")
    add_io(check, potential=False)
    check.add_argument("--horizon", type=int, default=100)

    optimize_p = sub.add_parser("optimize", help="maximum cycle mean and critical cycle")
    add_io(optimize_p)

    barrier_p = sub.add_parser("barrier", help="barrier values from the base vertex")
    add_io(barrier_p)
    barrier_p.add_argument("--format", choices=("json", "csv"), default="json")

    subaction_p = sub.add_parser("subaction", help="verify or compare subaction tables")
    subaction_sub = subaction_p.add_subparsers(dest="action", required=True)
    verify = subaction_sub.add_parser("verify", help="check a values CSV")
    add_io(verify)
    verify.add_argument("--values", required=True, help="CSV of vertex_word,value")
    verify.add_argument("--assert", dest="assert_verdict", action="store_true")
    compare = subaction_sub.add_parser("compare", help="compare two values CSVs")
    add_io(compare)
    compare.add_argument("--values", required=True)
    compare.add_argument("--values-b", required=True)
    compare.add_argument("--assert", dest="assert_verdict", action="store_true")

    converge_p = sub.add_parser("converge", help="truncation family experiments")
    add_io(converge_p)
    converge_p.add_argument("--stages", type=_int_list, required=True)
    converge_p.add_argument("--letters", type=_int_list, default=())
    converge_p.add_argument("--scan-to", type=int, default=None)
    converge_p.add_argument("--no-cache", dest="use_cache", action="store_false")
    converge_p.add_argument("--format", choices=("json", "csv"), default="json")
    converge_p.add_argument("--assert", dest="assert_verdict", action="store_true")

    demo = sub.add_parser("demo", help="worked examples end to end")
    demo_sub = demo.add_subparsers(dest="action", required=True)
    renewal = demo_sub.add_parser("renewal", help="renewal shift divergence study")
    renewal.add_argument("--a", type=int, default=2)
    renewal.add_argument("--b", type=int, default=0)
    renewal.add_argument("--stages", type=_int_list, default=(6, 12, 24))
    renewal.add_argument("--scan-to", type=int, default=23)
    renewal.add_argument("--tol", type=float, default=DEFAULT_TOL)
    renewal.add_argument("--no-cache", dest="use_cache", action="store_false")
    renewal.add_argument("--out", default=None)

    return parser


def _config_from(args: argparse.Namespace) -> RunConfig:
    command = args.command
    if getattr(args, "action", None):
        command = f"{command}-{args.action}"
    return RunConfig(
        subcommand=command,
        shift_path=getattr(args, "shift", None),
        potential_path=getattr(args, "potential", None),
        values_path=getattr(args, "values", None),
        values_b_path=getattr(args, "values_b", None),
        out_path=getattr(args, "out", None),
        fmt=getattr(args, "format", "json"),
        tol=getattr(args, "tol", DEFAULT_TOL),
        use_cache=getattr(args, "use_cache", True),
        max_letter=getattr(args, "max_letter", None),
        stages=tuple(getattr(args, "stages", ()) or ()),
        letters=tuple(getattr(args, "letters", ()) or ()),
        scan_to=getattr(args, "scan_to", None),
        assert_verdict=getattr(args, "assert_verdict", False),
        horizon=getattr(args, "horizon", 100),
        renewal_a=getattr(args, "a", 2),
        renewal_b=getattr(args, "b", 0),
    )


_DISPATCH = {
    "shift-check": _cmd_shift_check,
    "optimize": _cmd_optimize,
    "barrier": _cmd_barrier,
    "subaction-verify": _cmd_subaction_verify,
    "subaction-compare": _cmd_subaction_compare,
    "converge": _cmd_converge,
    "demo-renewal": _cmd_demo_renewal,
}


def run(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = _config_from(args)
    handler = _DISPATCH[cfg.subcommand]
    try:
        return handler(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
