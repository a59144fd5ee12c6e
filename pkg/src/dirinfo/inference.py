"""Permutation-test inference of causality graphs.

A measure value by itself does not decide an edge: the k-NN estimators
are biased, so even a true zero measure lands away from zero.  The test
used throughout compares, per independent data block, the observed value
against surrogate values obtained by permuting the rows of the B block
(the target's present sample) inside the embedded cloud.  Permuting B
destroys exactly the dependence under test and nothing else: the joint
statistics of (A, C) and the marginal of B are untouched, so the
surrogate carries the full estimator bias.

Per pair, the empirical (1 - alpha / n_tests) quantile of the pooled
surrogate values (nearest-rank, rounding up) is the detection threshold;
the detect rate is the fraction of blocks whose observed value lies
strictly above it, and the edge is declared present when more than half
the blocks detect it.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError
from . import measures as M
from .estimators import EstimatorConfig
from .series import LagSpec, MeasureKind, PointCloud, SampleMatrix

__all__ = [
    "SurrogatePolicy",
    "PairTestResult",
    "CausalityGraph",
    "InstantMode",
    "make_surrogate",
    "surrogate_threshold",
    "test_pair",
    "test_battery",
    "infer_graph",
    "graph_to_dot",
    "report_to_dict",
]


class InstantMode(enum.Enum):
    """Which instantaneous-exchange convention the graph uses."""

    CONDITIONAL = "conditional"
    UNCONDITIONAL = "unconditional"

    @property
    def kind(self) -> MeasureKind:
        if self is InstantMode.CONDITIONAL:
            return MeasureKind.COND_INSTANT_EXCHANGE
        return MeasureKind.UNCOND_INSTANT_EXCHANGE


@dataclass(frozen=True)
class SurrogatePolicy:
    """Surrogate-test configuration.

    n_surrogates_per_block : surrogates drawn per (pair, block) slot;
        the pooled surrogate sample has n_blocks * this many values.
    seed : base seed; every surrogate derives its own stream from
        (seed, pair index, block index, surrogate index), so results do
        not depend on evaluation order or thread count.
    alpha : family-wise level before the n_tests correction.
    n_tests : Bonferroni family size; None lets the caller default it
        (infer_graph uses the ordered-pair count, standalone test_pair
        uses 1).
    """

    n_surrogates_per_block: int = 1
    seed: int = 0
    alpha: float = 0.1
    n_tests: int | None = None

    def __post_init__(self):
        if self.n_surrogates_per_block < 1:
            raise DataError(
                f"n_surrogates_per_block must be >= 1, got {self.n_surrogates_per_block}"
            )
        if not 0 < self.alpha < 1:
            raise DataError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.n_tests is not None and self.n_tests < 1:
            raise DataError(f"n_tests must be >= 1, got {self.n_tests}")


@dataclass(frozen=True)
class PairTestResult:
    """Outcome of one surrogate test."""

    spec: M.MeasureSpec
    observed: tuple[M.MeasureValue, ...]
    surrogate: tuple[M.MeasureValue, ...]
    threshold: float
    detect_rate: float
    decision: bool
    n_tests: int

    @property
    def observed_values(self) -> np.ndarray:
        return np.array([v.value for v in self.observed])

    @property
    def surrogate_values(self) -> np.ndarray:
        return np.array([v.value for v in self.surrogate])


@dataclass(frozen=True)
class CausalityGraph:
    """Inferred graph: directed (source, target) pairs plus undirected
    instantaneous pairs stored in canonical (sorted) order."""

    vertices: tuple[str, ...]
    directed_edges: frozenset
    undirected_edges: frozenset
    instant_mode: InstantMode

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise DataError("duplicate vertices")
        for s, t in self.directed_edges:
            if s == t:
                raise DataError(f"self loop on {s!r}")
            if s not in vs or t not in vs:
                raise DataError(f"edge ({s}, {t}) references unknown vertex")
        for a, b in self.undirected_edges:
            if a == b:
                raise DataError(f"self loop on {a!r}")
            if a not in vs or b not in vs:
                raise DataError(f"edge ({a}, {b}) references unknown vertex")
            if not a < b:
                raise DataError(f"undirected edge ({a}, {b}) not in canonical order")


def make_surrogate(cloud: PointCloud, seed) -> PointCloud:
    """Permute the rows of the B block, leaving A and C untouched.

    The permutation is drawn from ``numpy.random.default_rng(seed)``;
    identity permutations are redrawn whenever the cloud has more than 3
    points, so a surrogate is never the original cloud by accident.
    Calling this with the same seed on clouds with equal row counts
    yields the same permutation, which is how the two DeltaI clouds stay
    aligned.
    """
    rng = np.random.default_rng(seed)
    m_points = cloud.n_points
    perm = rng.permutation(m_points)
    while m_points > 3 and np.array_equal(perm, np.arange(m_points)):
        perm = rng.permutation(m_points)
    return cloud.replace_block("B", cloud.block("B")[perm])


def surrogate_threshold(values: Sequence[float], alpha: float, n_tests: int) -> float:
    """Empirical (1 - alpha/n_tests) quantile, nearest rank rounding up."""
    vals = np.sort(np.asarray(values, dtype=np.float64))
    if vals.size == 0:
        raise DataError("no surrogate values to take a quantile of")
    if not 0 < alpha < 1 or n_tests < 1:
        raise DataError(f"bad quantile parameters alpha={alpha}, n_tests={n_tests}")
    q = 1.0 - alpha / n_tests
    rank = min(max(math.ceil(q * vals.size), 1), vals.size)
    return float(vals[rank - 1])


def _surrogate_seed(policy: SurrogatePolicy, pair_index: int, block_index: int, surr_index: int):
    return np.random.SeedSequence([policy.seed, pair_index, block_index, surr_index])


def _eval_block(spec, block, policy, pair_index, block_index):
    clouds = M.embed_for(block, spec)
    observed = M.evaluate_clouds(spec, clouds)
    surrogates = []
    for s in range(policy.n_surrogates_per_block):
        seed = _surrogate_seed(policy, pair_index, block_index, s)
        surr_clouds = tuple(make_surrogate(c, seed) for c in clouds)
        surrogates.append(M.evaluate_clouds(spec, surr_clouds))
    return observed, surrogates


def test_pair(
    blocks: Sequence[SampleMatrix],
    spec: M.MeasureSpec,
    policy: SurrogatePolicy,
    pair_index: int = 0,
    family_size: int | None = None,
    threads: int = 1,
) -> PairTestResult:
    """Surrogate test of one measure over independent data blocks.

    Parameters
    ----------
    blocks : sequence of SampleMatrix
        Independent realizations (or disjoint chunks) of the channels.
    spec : MeasureSpec
    policy : SurrogatePolicy
        ``policy.n_tests`` overrides ``family_size``; with both None the
        test is uncorrected (n_tests = 1).
    pair_index : int
        Seed-space coordinate of this pair; callers testing several
        pairs against one policy must pass distinct values.
    threads : int
        Worker threads over blocks; the result is identical for any
        value.

    Returns
    -------
    PairTestResult
    """
    if not blocks:
        raise DataError("need at least one data block")
    n_tests = policy.n_tests if policy.n_tests is not None else (family_size or 1)
    jobs = [
        (spec, block, policy, pair_index, b_idx)
        for b_idx, block in enumerate(blocks)
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda j: _eval_block(*j), jobs))
    else:
        outcomes = [_eval_block(*j) for j in jobs]
    observed = tuple(obs for obs, _ in outcomes)
    surrogate = tuple(sv for _, svs in outcomes for sv in svs)
    threshold = surrogate_threshold(
        [v.value for v in surrogate], policy.alpha, n_tests
    )
    detects = np.array([v.value > threshold for v in observed])
    detect_rate = float(detects.mean())
    return PairTestResult(
        spec=spec,
        observed=observed,
        surrogate=surrogate,
        threshold=threshold,
        detect_rate=detect_rate,
        decision=bool(detect_rate > 0.5),
        n_tests=n_tests,
    )


def test_battery(
    blocks: Sequence[SampleMatrix],
    specs: Sequence[M.MeasureSpec],
    policy: SurrogatePolicy,
    threads: int = 1,
) -> dict[str, PairTestResult]:
    """Run a family of measure tests with a shared Bonferroni size.

    Pair indices follow the order of ``specs``; the family size defaults
    to ``len(specs)`` unless the policy pins one.
    """
    labels = [spec.label() for spec in specs]
    if len(set(labels)) != len(labels):
        dup = sorted(l for l in set(labels) if labels.count(l) > 1)
        raise DataError(f"duplicate measure specs in battery: {dup}")
    results = {}
    for idx, spec in enumerate(specs):
        results[labels[idx]] = test_pair(
            blocks,
            spec,
            policy,
            pair_index=idx,
            family_size=len(specs),
            threads=threads,
        )
    return results


def infer_graph(
    blocks: Sequence[SampleMatrix],
    policy: SurrogatePolicy,
    lag: LagSpec = LagSpec(),
    est: EstimatorConfig = EstimatorConfig(),
    instant_mode: InstantMode = InstantMode.CONDITIONAL,
    threads: int = 1,
) -> tuple[CausalityGraph, dict[str, PairTestResult]]:
    """Infer the full causality graph over every channel pair.

    Directed edges are tested with conditional transfer entropy (side =
    all remaining channels); instantaneous edges with the conditional or
    unconditional information exchange per ``instant_mode``.  All tests
    share one Bonferroni family of size ``policy.n_tests``, defaulting
    to the ordered-pair count d * (d - 1).

    Returns the graph plus every individual test result keyed by the
    measure label.
    """
    if not blocks:
        raise DataError("need at least one data block")
    names = blocks[0].names
    for b in blocks[1:]:
        if b.names != names:
            raise DataError(f"blocks disagree on channels: {b.names} vs {names}")
    if len(names) < 2:
        raise DataError("graph inference needs at least two channels")
    d = len(names)
    family = policy.n_tests if policy.n_tests is not None else d * (d - 1)

    specs: list[M.MeasureSpec] = []
    for src in names:
        for tgt in names:
            if src == tgt:
                continue
            side = tuple(ch for ch in names if ch not in (src, tgt))
            kind = (
                MeasureKind.COND_TRANSFER_ENTROPY
                if side
                else MeasureKind.TRANSFER_ENTROPY
            )
            specs.append(
                M.MeasureSpec(
                    kind=kind, target=tgt, source=src, side=side, lag=lag, est=est
                )
            )
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            side = tuple(ch for ch in names if ch not in (a, b))
            kind = instant_mode.kind if side else MeasureKind.INSTANT_EXCHANGE
            specs.append(
                M.MeasureSpec(
                    kind=kind, target=b, source=a, side=side, lag=lag, est=est
                )
            )

    results: dict[str, PairTestResult] = {}
    for idx, spec in enumerate(specs):
        results[spec.label()] = test_pair(
            blocks, spec, policy, pair_index=idx, family_size=family, threads=threads
        )

    directed = set()
    undirected = set()
    for res in results.values():
        if not res.decision:
            continue
        s, t = res.spec.source, res.spec.target
        if res.spec.kind.is_instantaneous:
            undirected.add((s, t) if s < t else (t, s))
        else:
            directed.add((s, t))
    graph = CausalityGraph(
        vertices=tuple(names),
        directed_edges=frozenset(directed),
        undirected_edges=frozenset(undirected),
        instant_mode=instant_mode,
    )
    return graph, results


def graph_to_dot(graph: CausalityGraph) -> str:
    """Render the graph: `->` for directed edges, dashed `--` lines for
    instantaneous ones, vertices in input order, edges sorted."""
    lines = ["digraph causality {"]
    for v in graph.vertices:
        lines.append(f'  "{v}";')
    for s, t in sorted(graph.directed_edges):
        lines.append(f'  "{s}" -> "{t}";')
    for a, b in sorted(graph.undirected_edges):
        lines.append(f'  "{a}" -- "{b}" [style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _result_to_dict(res: PairTestResult) -> dict:
    spec = res.spec
    out = {
        "kind": spec.kind.value,
        "source": spec.source,
        "target": spec.target,
        "side": list(spec.side),
        "window": spec.window,
        "k": spec.est.k,
        "n_tests": res.n_tests,
        "observed": [v.value for v in res.observed],
        "surrogate": [v.value for v in res.surrogate],
        "threshold": res.threshold,
        "detect_rate": res.detect_rate,
        "decision": res.decision,
        "n_points": res.observed[0].n_points,
    }
    if spec.kind.is_geweke:
        out["ratio"] = [v.ratio for v in res.observed]
    return out


def report_to_dict(
    results: dict[str, PairTestResult],
    metadata: dict,
    graph: CausalityGraph | None = None,
) -> dict:
    """Assemble the serializable report: metadata, per-measure results,
    and (for graph runs) the edge lists."""
    report = {
        "metadata": dict(metadata),
        "results": {label: _result_to_dict(res) for label, res in sorted(results.items())},
    }
    if graph is not None:
        report["graph"] = {
            "vertices": list(graph.vertices),
            "directed_edges": sorted(list(e) for e in graph.directed_edges),
            "undirected_edges": sorted(list(e) for e in graph.undirected_edges),
            "instant_mode": graph.instant_mode.value,
        }
    return report
