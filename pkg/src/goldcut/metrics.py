"""Accuracy and cost metrics: weighted distance and pruning savings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySupport

CSV_COLUMNS = (
    "trial", "seed", "n_qubits", "K", "K_g", "shots_per_variant",
    "d_w_cut", "d_w_uncut", "variants_pruned", "variants_baseline",
    "tuples_pruned", "tuples_baseline",
)


def _as_dict(dist):
    if isinstance(dist, dict):
        return {k: float(v) for k, v in dist.items()}
    arr = np.asarray(dist, dtype=float)
    return {i: float(v) for i, v in enumerate(arr)}


def weighted_distance(p, q) -> float:
    """Sum of (p(x) - q(x))^2 / q(x) over the support of the truth q.

    q is the ground truth; outcomes with q(x) = 0 are excluded from the sum
    (see stray_mass for the mass p puts there). Both inputs may be mappings
    or plain probability vectors and must each sum to 1 within 1e-9.
    """
    pd, qd = _as_dict(p), _as_dict(q)
    support = [x for x, v in qd.items() if v > 0.0]
    if not support:
        raise EmptySupport("ground truth has no positive-probability outcome")
    for name, dist in (("p", pd), ("q", qd)):
        total = sum(dist.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError("%s sums to %.12g, expected 1" % (name, total))
    return float(sum((pd.get(x, 0.0) - qd[x]) ** 2 / qd[x] for x in support))


def stray_mass(p, q) -> float:
    """Total probability p assigns to outcomes outside the support of q."""
    pd, qd = _as_dict(p), _as_dict(q)
    return float(sum(v for x, v in pd.items() if qd.get(x, 0.0) <= 0.0))


@dataclass
class CostLedger:
    """Order-free accumulator of executed variants and shots."""

    upstream_variants: int = 0
    downstream_variants: int = 0
    shots_total: int = 0
    basis_tuples: int = 0

    def record(self, side: str, variants: int, shots_each: int) -> None:
        if side == "upstream":
            self.upstream_variants += variants
        elif side == "downstream":
            self.downstream_variants += variants
        else:
            raise ValueError("unknown side %r" % side)
        self.shots_total += variants * shots_each

    @property
    def variants_executed(self) -> int:
        return self.upstream_variants + self.downstream_variants


def _savings(pruned: int, baseline: int) -> float:
    if baseline <= 0:
        return 0.0
    return 1.0 - pruned / baseline


@dataclass
class CostReport:
    """Pruned-versus-baseline execution and contraction counts."""

    variants_executed: int
    shots_total: int
    basis_tuples_contracted: int
    baseline_variants: int
    baseline_shots: int
    baseline_tuples: int
    variant_savings: float
    shot_savings: float
    tuple_savings: float


def cost_report(pruned: CostLedger, baseline: CostLedger) -> CostReport:
    return CostReport(
        pruned.variants_executed,
        pruned.shots_total,
        pruned.basis_tuples,
        baseline.variants_executed,
        baseline.shots_total,
        baseline.basis_tuples,
        _savings(pruned.variants_executed, baseline.variants_executed),
        _savings(pruned.shots_total, baseline.shots_total),
        _savings(pruned.basis_tuples, baseline.basis_tuples),
    )


def closed_form_counts(k_regular: int, k_golden: int):
    """Exact integer counts for K = k_regular + k_golden cuts where each
    golden cut neglects one non-Z basis.

    Returns (pruned, baseline) CostLedgers with variant and tuple counts
    filled in; shots are left at zero for the caller to scale.
    """
    k = k_regular + k_golden
    pruned = CostLedger(
        upstream_variants=3 ** k_regular * 2 ** k_golden,
        downstream_variants=6 ** k_regular * 4 ** k_golden,
        basis_tuples=4 ** k_regular * 3 ** k_golden,
    )
    baseline = CostLedger(
        upstream_variants=3 ** k,
        downstream_variants=6 ** k,
        basis_tuples=4 ** k,
    )
    return pruned, baseline
