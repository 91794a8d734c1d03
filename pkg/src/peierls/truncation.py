"""Increasing truncation families, stabilization experiments, divergence probe.

A family holds one optimized stage per requested bound.  Each stage is
the transitive core of the truncation at the smallest workable bound at
or above the request (a truncation can strand its top letters, so the
builder advances until the core covers the requested range and records
the substituted bound).  Larger stages only add walks, so the maximum
cycle mean never decreases along the family and per-vertex barrier
values never decrease where comparable.

Stage results are cached on disk keyed by the shift, the weights and the
requested bound, so sweeps over stage lists can reuse earlier runs.  A
cache entry stores exact floats; restoring one reproduces the freshly
computed stage bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import os
import statistics
import tempfile
from dataclasses import dataclass
from typing import Iterable, Mapping

from .barrier import BarrierResult, CutoffReport, UpperBoundReport, compute_barrier, letter_cutoff
from .optimizer import DEFAULT_TOL, WeightedMemoryGraph, build_memory_graph, optimize
from .potential import PotentialSpec
from .shift_space import (
    KIND_ORACLE,
    SATISFIED,
    REFUTED,
    ConditionVerdict,
    FiniteShift,
    ShiftSpec,
    Word,
    check_bp,
    covering_core,
)

BOUNDED = "BOUNDED"
DIVERGENT = "DIVERGENT"
INCONCLUSIVE = "INCONCLUSIVE"

CACHE_SCHEMA = 1
MIN_TREND_LETTERS = 5


class FamilyError(ValueError):
    """The requested stage list cannot form a valid increasing family."""


@dataclass(frozen=True)
class Stage:
    requested: int
    used: int
    shift: FiniteShift
    graph: WeightedMemoryGraph
    barrier: BarrierResult
    from_cache: bool


@dataclass(frozen=True)
class TruncationFamily:
    spec: ShiftSpec
    pot: PotentialSpec
    stages: tuple[Stage, ...]
    base_stable: bool
    cycle_stable: bool


@dataclass(frozen=True)
class LetterStabilization:
    letter: int
    observed_index: int | None
    observed_requested: int | None
    observed_used: int | None
    predicted: CutoffReport | None
    ok: bool | None
    note: str


@dataclass(frozen=True)
class StabilizationReport:
    entries: tuple[LetterStabilization, ...]
    ok: bool


@dataclass(frozen=True)
class BoundednessProbe:
    floors: Mapping[int, float]
    bp: ConditionVerdict
    verdict: str
    floor: float | None
    slope: float | None
    fit_letters: tuple[int, ...]
    consistent: bool
    note: str


def _shift_payload(spec: ShiftSpec) -> dict:
    payload: dict = {"kind": spec.kind, "lambda": spec.metric_base}
    if spec.alphabet_size is not None:
        payload["alphabet_size"] = spec.alphabet_size
    if spec.edges is not None:
        payload["edges"] = sorted([i, j] for i, j in spec.edges)
    if spec.renewal_rule is not None:
        payload["renewal"] = list(spec.renewal_rule)
    return payload


def _pot_payload(pot: PotentialSpec) -> dict:
    return {
        "depth": pot.depth,
        "tail": {"kind": pot.tail_kind, "c": pot.tail_scale},
        "table": sorted([list(w), x] for w, x in pot.table.items()),
    }


def _cache_key(spec: ShiftSpec, pot: PotentialSpec, requested: int) -> str:
    blob = json.dumps(
        {"pot": _pot_payload(pot), "requested": requested, "shift": _shift_payload(spec)},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(blob.encode("ascii")).hexdigest()[:32]


def _cache_path(spec: ShiftSpec, pot: PotentialSpec, requested: int) -> str:
    root = os.environ.get("PEIERLS_CACHE_DIR", ".peierls-cache")
    return os.path.join(root, f"stage-{_cache_key(spec, pot, requested)}.json")


def _word(obj) -> Word:
    return tuple(int(x) for x in obj)


def _stage_payload(stage: Stage) -> dict:
    graph = stage.graph
    bounds = stage.barrier.bounds
    return {
        "schema": CACHE_SCHEMA,
        "requested": stage.requested,
        "used": stage.used,
        "max_mean": graph.max_mean,
        "cycle": [list(v) for v in graph.critical_cycle],
        "components": [[list(v) for v in comp] for comp in graph.critical_components],
        "critical_edges": sorted([list(u), list(v)] for u, v in graph.critical_edges),
        "unique": graph.critical_class_unique,
        "barrier": [[list(v), x] for v, x in sorted(stage.barrier.values.items())],
        "bounds": None
        if bounds is None
        else {
            "per_letter": sorted([a, x] for a, x in bounds.per_letter.items()),
            "low_letter_peak": bounds.low_letter_peak,
            "base_cycle_peak": bounds.base_cycle_peak,
            "low_letter_cutoff": bounds.low_letter_cutoff,
            "ambient_variation": bounds.ambient_variation,
            "global_bound": bounds.global_bound,
        },
    }


def _restore_stage(
    payload: dict, requested: int, core: FiniteShift, graph: WeightedMemoryGraph
) -> Stage | None:
    if payload.get("schema") != CACHE_SCHEMA or payload.get("requested") != requested:
        return None
    used = int(payload["used"])
    if used != max(core.letters):
        return None
    values = {_word(v): float(x) for v, x in payload["barrier"]}
    if set(values) != set(graph.succ):
        return None
    cycle = tuple(_word(v) for v in payload["cycle"])
    components = tuple(tuple(_word(v) for v in comp) for comp in payload["components"])
    edges = frozenset((_word(u), _word(v)) for u, v in payload["critical_edges"])
    if any(v not in graph.succ for v in cycle):
        return None
    graph.max_mean = float(payload["max_mean"])
    graph.critical_cycle = cycle
    graph.critical_components = components
    graph.critical_class = frozenset(v for comp in components for v in comp)
    graph.critical_edges = edges
    graph.critical_class_unique = bool(payload["unique"])
    raw = payload["bounds"]
    bounds = None
    if raw is not None:
        bounds = UpperBoundReport(
            per_letter={int(a): float(x) for a, x in raw["per_letter"]},
            low_letter_peak=float(raw["low_letter_peak"]),
            base_cycle_peak=float(raw["base_cycle_peak"]),
            low_letter_cutoff=int(raw["low_letter_cutoff"]),
            ambient_variation=float(raw["ambient_variation"]),
            global_bound=float(raw["global_bound"]),
        )
    barrier = BarrierResult(
        base_vertex=cycle[0], values=values, max_mean=graph.max_mean, bounds=bounds
    )
    return Stage(
        requested=requested,
        used=used,
        shift=core,
        graph=graph,
        barrier=barrier,
        from_cache=True,
    )


def _write_cache(path: str, payload: dict) -> None:
    root = os.path.dirname(path)
    os.makedirs(root, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=root, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii") as handle:
            json.dump(payload, handle, sort_keys=True)
        os.replace(tmp, path)
    except OSError:
        try:
            os.unlink(tmp)
        except OSError:
            pass


def build_stage(
    spec: ShiftSpec,
    pot: PotentialSpec,
    requested: int,
    tol: float = DEFAULT_TOL,
    use_cache: bool = True,
) -> Stage:
    """One optimized truncation stage, from cache when an entry matches."""
    if requested < 0:
        raise FamilyError("stage bounds must be nonnegative")
    core = covering_core(spec, range(requested + 1))
    graph = build_memory_graph(core, pot)
    cacheable = use_cache and spec.kind != KIND_ORACLE
    path = _cache_path(spec, pot, requested) if cacheable else None

    if path is not None and os.path.exists(path):
        try:
            with open(path, "r", encoding="ascii") as handle:
                payload = json.load(handle)
            stage = _restore_stage(payload, requested, core, graph)
        except (OSError, ValueError, KeyError, TypeError, IndexError):
            stage = None
        if stage is not None:
            return stage

    optimize(graph, tol)
    stage = Stage(
        requested=requested,
        used=max(core.letters),
        shift=core,
        graph=graph,
        barrier=compute_barrier(graph, tol),
        from_cache=False,
    )
    if path is not None:
        _write_cache(path, _stage_payload(stage))
    return stage


def build_family(
    spec: ShiftSpec,
    pot: PotentialSpec,
    max_letters: Iterable[int],
    tol: float = DEFAULT_TOL,
    use_cache: bool = True,
) -> TruncationFamily:
    """Optimized stages at each requested bound, with nesting checks."""
    requested = list(max_letters)
    if not requested:
        raise FamilyError("at least one stage bound is required")
    if any(b <= a for a, b in zip(requested, requested[1:])):
        raise FamilyError(f"stage bounds must be strictly increasing: {requested}")

    stages = tuple(
        build_stage(spec, pot, n, tol=tol, use_cache=use_cache) for n in requested
    )
    for prev, cur in zip(stages, stages[1:]):
        if not set(prev.shift.letters) <= set(cur.shift.letters):
            raise FamilyError(
                f"stage {cur.requested} lost letters present at stage {prev.requested}"
            )
        if cur.graph.max_mean < prev.graph.max_mean - tol:
            raise FamilyError(
                f"max mean dropped from {prev.graph.max_mean!r} at stage "
                f"{prev.requested} to {cur.graph.max_mean!r} at stage {cur.requested}"
            )
    return TruncationFamily(
        spec=spec,
        pot=pot,
        stages=stages,
        base_stable=len({s.barrier.base_vertex for s in stages}) == 1,
        cycle_stable=len({s.graph.critical_cycle for s in stages}) == 1,
    )


def _letter_values(stage: Stage, letter: int) -> dict[Word, float]:
    return {
        v: stage.barrier.values[v] for v in stage.graph.vertices if v[0] == letter
    }


def stabilization_experiment(
    family: TruncationFamily,
    letters_of_interest: Iterable[int],
    tol: float = DEFAULT_TOL,
) -> StabilizationReport:
    """Observed versus predicted stage at which per-letter values freeze.

    A letter's values have stabilized at a stage when every later stage
    assigns the same barrier value to each of the stage's vertices
    starting with that letter.  The prediction is the two-stage cutoff
    bound; observing stabilization at a larger bound than predicted
    falsifies the bound and fails the report.
    """
    if len(family.stages) < 2:
        raise FamilyError("stabilization needs at least two stages")
    final = family.stages[-1]
    entries: list[LetterStabilization] = []
    for letter in sorted(set(letters_of_interest)):
        if letter not in final.shift.pred:
            entries.append(
                LetterStabilization(
                    letter=letter,
                    observed_index=None,
                    observed_requested=None,
                    observed_used=None,
                    predicted=None,
                    ok=None,
                    note="letter is missing from the widest stage",
                )
            )
            continue

        observed: tuple[int, int, int] | None = None
        for idx, stage in enumerate(family.stages):
            if letter not in stage.shift.pred:
                continue
            mine = _letter_values(stage, letter)
            stable = all(
                abs(value - later.barrier.values[v]) <= tol
                for later in family.stages[idx + 1 :]
                for v, value in mine.items()
            )
            if stable:
                observed = (idx, stage.requested, stage.used)
                break

        try:
            predicted = letter_cutoff(family.spec, family.pot, final.shift, letter)
            prediction_note = ""
        except ValueError as exc:
            predicted = None
            prediction_note = f"prediction unavailable: {exc}"

        if observed is None:
            ok: bool | None = False
            note = "values still moving at the final stage"
        elif predicted is None:
            ok = None
            note = prediction_note
        else:
            ok = observed[2] <= predicted.confinement_bound
            note = "" if ok else "stabilized later than the predicted bound"
        entries.append(
            LetterStabilization(
                letter=letter,
                observed_index=None if observed is None else observed[0],
                observed_requested=None if observed is None else observed[1],
                observed_used=None if observed is None else observed[2],
                predicted=predicted,
                ok=ok,
                note=note,
            )
        )
    return StabilizationReport(
        entries=tuple(entries), ok=not any(e.ok is False for e in entries)
    )


def bp_boundedness_probe(
    family: TruncationFamily,
    spec: ShiftSpec,
    scan_to: int,
    tol: float = DEFAULT_TOL,
) -> BoundednessProbe:
    """Final-stage barrier floors per letter, fused with the exact BP verdict.

    Letters entered only from strictly larger letters are the ones a
    bounded incoming alphabet would have to miss, so the floor trend is
    fitted over those.  The divergence call needs an established trend:
    at least MIN_TREND_LETTERS fitted letters, floors non-increasing, and
    fitted slope at most -tol.
    """
    if scan_to < 0:
        raise ValueError("scan_to must be nonnegative")
    final = family.stages[-1]
    if max(final.shift.letters) < scan_to:
        raise FamilyError(
            f"final stage tops out at {max(final.shift.letters)}, below scan_to={scan_to}"
        )

    values = final.barrier.values
    floors: dict[int, float] = {}
    for j in final.shift.letters:
        if j > scan_to:
            continue
        floors[j] = min(values[v] for v in final.graph.vertices if v[0] == j)

    bp = check_bp(spec)

    fit = tuple(
        j
        for j in sorted(floors)
        if j >= 1 and final.shift.pred[j] and min(final.shift.pred[j]) > j
    )
    slope: float | None = None
    if len(fit) >= 2:
        slope = statistics.linear_regression(fit, [floors[j] for j in fit]).slope
    monotone = all(
        floors[b] <= floors[a] + tol for a, b in zip(fit, fit[1:])
    )
    trending_down = (
        len(fit) >= MIN_TREND_LETTERS and monotone and slope is not None and slope <= -tol
    )

    if bp.status == SATISFIED and not trending_down:
        verdict = BOUNDED
        floor = min(floors.values())
        note = (
            "a bounded set of letters enters every letter, and the scanned floors "
            f"stay above {floor!r}"
        )
    elif bp.status == SATISFIED:
        verdict = INCONCLUSIVE
        floor = None
        note = (
            "the exact check says every letter is entered from a bounded set, yet the "
            "scanned floors trend downward; widen the scan to resolve the tension"
        )
    elif bp.status == REFUTED and trending_down:
        verdict = DIVERGENT
        floor = None
        note = (
            f"floors over letters {fit[0]}..{fit[-1]} fall with slope {slope!r}; "
            "no bounded calibrated subaction can exist"
        )
    elif bp.status == REFUTED:
        verdict = INCONCLUSIVE
        floor = None
        note = (
            "unbounded entry sets were found, but the scanned floors do not yet show "
            "an established downward trend"
        )
    else:
        verdict = INCONCLUSIVE
        floor = None
        note = "the entry-set check was undecided within its horizon"

    consistent = not (
        (bp.status == SATISFIED and verdict == DIVERGENT)
        or (bp.status == REFUTED and verdict == BOUNDED)
    )
    return BoundednessProbe(
        floors=floors,
        bp=bp,
        verdict=verdict,
        floor=floor,
        slope=slope,
        fit_letters=fit,
        consistent=consistent,
        note=note,
    )
