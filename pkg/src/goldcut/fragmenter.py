"""Enumerate and execute fragment variants.

Upstream fragments get one measurement setting per cut from {X, Y, Z};
downstream fragments get one preparation per cut from the six Pauli
eigenstates. Neglecting a basis P at a cut removes the upstream P setting
(only when P is not Z: the Z setting always runs because the identity term
is assembled from it) and removes the two P eigenstate preparations
downstream (|0> and |1> are always kept for the same reason).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, Fragment, Gate, PauliOp, _fmt, h, s, x
from .errors import AllBasesNeglected, ShotStarvation, SupportMismatch
from .seeding import stream
from .simulator import Counts, ObservableSpec, basis_rotation, exact_distribution, sample, simulate

MEASURED_BASES = (PauliOp.X, PauliOp.Y, PauliOp.Z)

PREP_LABELS = ("Zp", "Zm", "Xp", "Xm", "Yp", "Ym")

_PREP_GATES = {
    "Zp": (),
    "Zm": (x,),
    "Xp": (h,),
    "Xm": (x, h),
    "Yp": (h, s),
    "Ym": (x, h, s),
}

# (label, eigenvalue weight) pairs per basis; identity reuses the Z
# eigenstates with both weights +1.
PREP_TERMS = {
    PauliOp.I: (("Zp", 1.0), ("Zm", 1.0)),
    PauliOp.X: (("Xp", 1.0), ("Xm", -1.0)),
    PauliOp.Y: (("Yp", 1.0), ("Ym", -1.0)),
    PauliOp.Z: (("Zp", 1.0), ("Zm", -1.0)),
}


def prep_gates(label: str, qubit: int) -> list:
    """Gates that build the labeled eigenstate from |0> on the given wire."""
    return [factory(qubit) for factory in _PREP_GATES[label]]


def prep_state(label: str) -> np.ndarray:
    """The eigenstate vector a prep-gate sequence produces, bit for bit."""
    circuit = Circuit(1, tuple(prep_gates(label, 0)), ())
    return simulate(circuit).amplitudes


@dataclass(frozen=True)
class VariantKey:
    """Per-cut assignment identifying one executable variant.

    assignment maps cut_id to a basis label ("X", "Y", "Z") on the upstream
    side or a preparation label ("Zp" .. "Ym") downstream, as a tuple of
    (cut_id, label) pairs sorted by cut_id.
    """

    side: str
    assignment: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "assignment", tuple(sorted((int(c), str(l)) for c, l in self.assignment))
        )

    def label(self, cut_id: int) -> str:
        for cid, lab in self.assignment:
            if cid == cut_id:
                return lab
        raise KeyError(cut_id)


@dataclass
class VariantResult:
    """Execution record for one variant.

    Bit position i of every recorded bitstring is local qubit i of the
    fragment; cut_bits names which positions are measured cut wires, so
    they stay distinguishable from output bits.
    """

    key: VariantKey
    mode: str
    probs: np.ndarray | None
    counts: Counts | None
    n_bits: int
    cut_bits: tuple
    output_bits: tuple

    def probabilities(self) -> np.ndarray:
        if self.mode == "exact":
            return self.probs
        if self.counts.shots < 1:
            raise ShotStarvation("variant %r has no shots" % (self.key,))
        out = np.zeros(2 ** self.n_bits)
        for bits, c in self.counts.counts.items():
            out[int(bits, 2) if bits else 0] = c
        return out / self.counts.shots

    @property
    def shots(self) -> int:
        return 0 if self.mode == "exact" else self.counts.shots


def _neglected_by_cut(cut_ids, neglected):
    table = {cid: set() for cid in cut_ids}
    for cid, p in neglected:
        if cid not in table:
            raise ValueError("neglected pair references unknown cut %r" % cid)
        if p is PauliOp.I:
            raise ValueError("the identity basis cannot be neglected")
        table[cid].add(p)
    for cid, dropped in table.items():
        if dropped >= {PauliOp.X, PauliOp.Y, PauliOp.Z}:
            raise AllBasesNeglected("every basis neglected at cut %d" % cid)
    return table


def _obs_rotations(fragment: Fragment, obs) -> list:
    if obs is None or obs.kind != "pauli":
        return []
    extra = []
    outputs = set(fragment.output_qubits)
    for q, p in zip(obs.qubits, obs.paulis):
        if q not in outputs:
            raise SupportMismatch("observable qubit %d is not a fragment output" % q)
        if p in (PauliOp.X, PauliOp.Y):
            extra.extend(basis_rotation(p, q))
    return extra


def upstream_variants(f1: Fragment, neglected=frozenset(), obs=None):
    """All (VariantKey, Circuit) measurement settings for an upstream fragment.

    Each circuit is the fragment followed by readout rotations: basis
    rotations on the cut wires and, when obs is a Pauli string, rotations
    that map its X/Y factors on output wires to Z readouts. Every local
    qubit is then measured in the computational basis.
    """
    if not f1.upstream_cut_qubits:
        raise ValueError("fragment has no upstream cut qubits")
    cut_ids = [cid for cid, _ in f1.upstream_cut_qubits]
    local = dict(f1.upstream_cut_qubits)
    dropped = _neglected_by_cut(cut_ids, neglected)
    allowed = [
        [p for p in MEASURED_BASES if p is PauliOp.Z or p not in dropped[cid]]
        for cid in cut_ids
    ]
    obs_extra = _obs_rotations(f1, obs)
    out = []
    for combo in itertools.product(*allowed):
        gates = list(f1.circuit.gates) + list(obs_extra)
        for cid, p in zip(cut_ids, combo):
            gates.extend(basis_rotation(p, local[cid]))
        key = VariantKey("upstream", tuple((cid, p.value) for cid, p in zip(cut_ids, combo)))
        out.append((key, Circuit(f1.circuit.n_qubits, tuple(gates), ())))
    return out


def downstream_variants(f2: Fragment, neglected=frozenset(), obs=None):
    """All (VariantKey, Circuit) eigenstate preparations for a downstream fragment.

    Each circuit prepends preparation gates on the cut wires, then runs the
    fragment, then any Pauli readout rotations for obs. Neglecting a non-Z
    basis drops its two preparations (6 per cut becomes 4).
    """
    if not f2.downstream_cut_qubits:
        raise ValueError("fragment has no downstream cut qubits")
    cut_ids = [cid for cid, _ in f2.downstream_cut_qubits]
    local = dict(f2.downstream_cut_qubits)
    dropped = _neglected_by_cut(cut_ids, neglected)
    allowed = [
        [lab for lab in PREP_LABELS
         if lab.startswith("Z") or PauliOp(lab[0]) not in dropped[cid]]
        for cid in cut_ids
    ]
    obs_extra = _obs_rotations(f2, obs)
    out = []
    for combo in itertools.product(*allowed):
        gates = []
        for cid, lab in zip(cut_ids, combo):
            gates.extend(prep_gates(lab, local[cid]))
        gates.extend(f2.circuit.gates)
        gates.extend(obs_extra)
        key = VariantKey("downstream", tuple(zip(cut_ids, combo)))
        out.append((key, Circuit(f2.circuit.n_qubits, tuple(gates), ())))
    return out


def run_fragment(fragment: Fragment, variants, shots=None, seed=0, seed_path=(),
                 ledger=None):
    """Simulate every variant; exact probabilities or sampled counts.

    shots None stores exact probability vectors; otherwise each variant is
    sampled with its own RNG stream derived from (seed, *seed_path, index),
    so results are deterministic and independent of execution order. A
    ledger object with a record(side, variants, shots_each) method picks up
    the execution counts when provided.
    """
    side = fragment.side
    results = []
    for i, (key, circ) in enumerate(variants):
        sv = simulate(circ)
        everything = tuple(range(circ.n_qubits))
        if shots is None:
            res = VariantResult(key, "exact", exact_distribution(sv, everything), None,
                                circ.n_qubits, fragment.upstream_cut_qubits,
                                fragment.output_qubits)
        else:
            counts = sample(sv, everything, shots, stream(seed, *seed_path, i))
            res = VariantResult(key, "shots", None, counts, circ.n_qubits,
                                fragment.upstream_cut_qubits, fragment.output_qubits)
        results.append(res)
    if ledger is not None:
        ledger.record(side, len(results), 0 if shots is None else shots)
    return results


def _key_json(key: VariantKey) -> str:
    items = ", ".join('"%d": %s' % (cid, json.dumps(lab)) for cid, lab in key.assignment)
    return '{"side": %s, "assignment": {%s}}' % (json.dumps(key.side), items)


def results_to_json(results) -> str:
    """Canonical JSON array for a variant-result set."""
    rows = []
    for r in results:
        if r.mode == "exact":
            data = "[%s]" % ", ".join(_fmt(v) for v in r.probs)
        else:
            data = r.counts.to_json()
        cut_bits = ", ".join("[%d, %d]" % (cid, pos) for cid, pos in r.cut_bits)
        outputs = ", ".join(str(b) for b in r.output_bits)
        rows.append(
            '{"key": %s, "mode": %s, "data": %s, "n_bits": %d, '
            '"cut_bits": [%s], "output_bits": [%s]}'
            % (_key_json(r.key), json.dumps(r.mode), data, r.n_bits, cut_bits, outputs)
        )
    return "[%s]" % ", ".join(rows)


def results_from_json(text: str):
    rows = json.loads(text)
    out = []
    for row in rows:
        key = VariantKey(
            row["key"]["side"],
            tuple((int(c), lab) for c, lab in row["key"]["assignment"].items()),
        )
        if row["mode"] == "exact":
            probs, counts = np.array(row["data"], dtype=float), None
        else:
            probs, counts = None, Counts(row["data"]["shots"], dict(row["data"]["counts"]))
        out.append(VariantResult(key, row["mode"], probs, counts, row["n_bits"],
                                 tuple((c, p) for c, p in row["cut_bits"]),
                                 tuple(row["output_bits"])))
    return out
