"""End-to-end orchestration: cut, execute, detect, contract, compare.

Observables and distributions at this level refer to parent-circuit qubits;
the helpers here split them onto the two fragments and permute fragment
results back into parent qubit order. RNG streams are split per
(root seed, trial, side, variant) with side codes 0 = upstream,
1 = downstream, 2 = uncut reference.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, Fragment, PauliOp, bipartition, uncut
from .errors import SupportMismatch
from .fragmenter import downstream_variants, run_fragment, upstream_variants
from .golden import ORACLE_EPS, GoldenReport, detect_exact, detect_statistical
from .metrics import CostLedger, CostReport, cost_report
from .reconstructor import (
    Reconstruction,
    build_tensor,
    contract_distribution,
    contract_expectation,
)
from .seeding import stream
from .simulator import ObservableSpec, exact_distribution, exact_expectation, sample, simulate

SIDE_UPSTREAM = 0
SIDE_DOWNSTREAM = 1
SIDE_UNCUT = 2

PRUNE_MODES = ("off", "known", "exact", "statistical")


def split_observable(f1: Fragment, f2: Fragment, obs: ObservableSpec):
    """Split a parent-qubit observable into per-fragment observables.

    Every parent wire terminates in exactly one fragment output, so the
    observable factorizes across fragments up to qubit reordering.
    """
    if obs.kind == "distribution":
        return (ObservableSpec.distribution(f1.output_qubits),
                ObservableSpec.distribution(f2.output_qubits))
    ends1 = {f1.parent_qubits[q]: q for q in f1.output_qubits}
    ends2 = {f2.parent_qubits[q]: q for q in f2.output_qubits}
    part1, part2 = [], []
    payload = obs.paulis if obs.kind == "pauli" else obs.bits
    for q, item in zip(obs.qubits, payload):
        if q in ends1:
            part1.append((ends1[q], item))
        elif q in ends2:
            part2.append((ends2[q], item))
        else:
            raise SupportMismatch("parent qubit %d has no terminal output" % q)
    part1.sort()
    part2.sort()
    if obs.kind == "pauli":
        return (ObservableSpec.pauli_string([p for _, p in part1], [q for q, _ in part1]),
                ObservableSpec.pauli_string([p for _, p in part2], [q for q, _ in part2]))
    return (ObservableSpec.projector("".join(b for _, b in part1), [q for q, _ in part1]),
            ObservableSpec.projector("".join(b for _, b in part2), [q for q, _ in part2]))


def parent_permutation(f1: Fragment, f2: Fragment, n_parent: int) -> np.ndarray:
    """Index map from parent bitstring order to concatenated fragment order.

    Position j of a concatenated bitstring (f1 outputs then f2 outputs, each
    in local order) carries parent qubit parent_of[j]; the returned array
    perm satisfies parent_vector = concatenated_vector[perm].
    """
    parent_of = [f1.parent_qubits[q] for q in f1.output_qubits]
    parent_of += [f2.parent_qubits[q] for q in f2.output_qubits]
    if sorted(parent_of) != list(range(n_parent)):
        raise SupportMismatch("fragment outputs do not cover the parent exactly once")
    m = len(parent_of)
    perm = np.zeros(2 ** n_parent, dtype=np.int64)
    for i in range(2 ** n_parent):
        c = 0
        for j, q in enumerate(parent_of):
            bit = (i >> (n_parent - 1 - q)) & 1
            c |= bit << (m - 1 - j)
        perm[i] = c
    return perm


def ground_truth_distribution(circuit: Circuit) -> np.ndarray:
    """Exact bitstring distribution of the uncut circuit, parent order."""
    state = simulate(uncut(circuit))
    return exact_distribution(state, range(circuit.n_qubits))


def ground_truth_expectation(circuit: Circuit, obs: ObservableSpec) -> float:
    return exact_expectation(simulate(uncut(circuit)), obs)


def uncut_sampled_distribution(circuit: Circuit, shots: int, seed: int,
                               trial: int = 0) -> np.ndarray:
    """Empirical distribution of the uncut circuit at the same shot budget."""
    state = simulate(uncut(circuit))
    rng = stream(seed, trial, SIDE_UNCUT)
    counts = sample(state, range(circuit.n_qubits), shots, rng)
    vec = np.zeros(2 ** circuit.n_qubits)
    for bits, c in counts.counts.items():
        vec[int(bits, 2)] = c
    return vec / shots


@dataclass
class RunResult:
    """One reconstruction run with its pruning and cost bookkeeping."""

    reconstruction: Reconstruction
    expectation: float | None
    distribution: np.ndarray | None
    raw_distribution: np.ndarray | None
    golden: GoldenReport | None
    cost: CostReport
    neglected: frozenset
    k_golden: int


def _normalize_neglect(neglect):
    out = set()
    for cid, p in neglect or ():
        out.add((int(cid), p if isinstance(p, PauliOp) else PauliOp(p)))
    return frozenset(out)


def reconstruct(circuit: Circuit, obs: ObservableSpec = None, shots: int = None,
                seed: int = 0, trial: int = 0, prune: str = "off",
                neglect=(), alpha: float = 0.05, tau: float = 0.02,
                eps: float = ORACLE_EPS) -> RunResult:
    """Cut, execute, optionally prune, and reconstruct one circuit.

    obs None reconstructs the full bitstring distribution. shots None runs
    the infinite-shot oracle; otherwise every executed variant is sampled
    with shots drawn from its own seeded stream. Pruning modes:

    * "off": no neglected bases.
    * "known": neglect exactly the pairs passed in neglect.
    * "exact": neglect what exact detection (at eps) flags; the detection
      itself uses the simulator oracle, not the shot data.
    * "statistical": run every upstream setting at the shot budget, neglect
      what the Hoeffding test flags, and prune only the downstream side.
    """
    if prune not in PRUNE_MODES:
        raise ValueError("unknown prune mode %r" % prune)
    if prune == "statistical" and shots is None:
        raise ValueError("statistical pruning needs a shot budget")
    f1, f2 = bipartition(circuit)
    if obs is None:
        obs = ObservableSpec.distribution(range(circuit.n_qubits))
    obs1, obs2 = split_observable(f1, f2, obs)
    k = circuit.n_cuts

    ledger = CostLedger()
    report = None
    up_results = None
    if prune == "off":
        neglected = frozenset()
    elif prune == "known":
        neglected = _normalize_neglect(neglect)
    elif prune == "exact":
        oracle = run_fragment(f1, upstream_variants(f1, obs=obs1))
        report = detect_exact(build_tensor(oracle, obs1, "upstream"), eps)
        neglected = report.golden_pairs()
    else:
        variants = upstream_variants(f1, obs=obs1)
        up_results = run_fragment(f1, variants, shots=shots, seed=seed,
                                  seed_path=(trial, SIDE_UPSTREAM), ledger=ledger)
        report = detect_statistical(up_results, obs1, alpha=alpha, tau=tau)
        neglected = report.golden_pairs()

    if up_results is None:
        variants = upstream_variants(f1, neglected, obs=obs1)
        up_results = run_fragment(f1, variants, shots=shots, seed=seed,
                                  seed_path=(trial, SIDE_UPSTREAM), ledger=ledger)
    down_variants = downstream_variants(f2, neglected, obs=obs2)
    down_results = run_fragment(f2, down_variants, shots=shots, seed=seed,
                                seed_path=(trial, SIDE_DOWNSTREAM), ledger=ledger)

    a = build_tensor(up_results, obs1, "upstream", neglected)
    b = build_tensor(down_results, obs2, "downstream", neglected)
    if obs.kind == "distribution":
        rec = contract_distribution(a, b, neglected)
    else:
        rec = contract_expectation(a, b, neglected)
    rec.shots_used = ledger.shots_total
    ledger.basis_tuples = rec.terms_evaluated

    if report is None and prune in ("off", "known"):
        oracle = run_fragment(f1, upstream_variants(f1, obs=obs1))
        report = detect_exact(build_tensor(oracle, obs1, "upstream"), eps)

    baseline = CostLedger()
    baseline.record("upstream", 3 ** k, 0 if shots is None else shots)
    baseline.record("downstream", 6 ** k, 0 if shots is None else shots)
    baseline.basis_tuples = 4 ** k

    expectation = None
    distribution = None
    raw_distribution = None
    if obs.kind == "distribution":
        perm = parent_permutation(f1, f2, circuit.n_qubits)
        distribution = rec.value[perm]
        raw_distribution = rec.raw[perm]
    else:
        expectation = rec.value
    return RunResult(rec, expectation, distribution, raw_distribution, report,
                     cost_report(ledger, baseline), neglected,
                     len({cid for cid, _ in neglected}))
