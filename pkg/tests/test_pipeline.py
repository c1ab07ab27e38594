"""End-to-end reconstruction pipeline over whole circuits."""
import numpy as np
import pytest

from goldcut.circuits import Circuit, CutPoint, PauliOp, bipartition, cnot, golden_ansatz, h
from goldcut.errors import NotBipartite
from goldcut.pipeline import (
    ground_truth_distribution,
    ground_truth_expectation,
    reconstruct,
    split_observable,
    uncut_sampled_distribution,
)
from goldcut.simulator import ObservableSpec

from conftest import make_cut_circuit


def fig1():
    return Circuit(3, (h(0), cnot(0, 1), cnot(1, 2)), (CutPoint(1, 1, 1),))


class TestSplitObservable:
    def test_pauli_string_factorizes_along_outputs(self):
        f1, f2 = bipartition(fig1())
        obs = ObservableSpec.pauli_string([PauliOp.Z, PauliOp.Z, PauliOp.Z],
                                          [0, 1, 2])
        obs1, obs2 = split_observable(f1, f2, obs)
        assert obs1.qubits == (0,) and obs1.paulis == (PauliOp.Z,)
        assert obs2.qubits == (0, 1)
        assert obs2.paulis == (PauliOp.Z, PauliOp.Z)

    def test_projector_bits_follow_wires(self):
        f1, f2 = bipartition(fig1())
        obs = ObservableSpec.projector("010", [0, 1, 2])
        obs1, obs2 = split_observable(f1, f2, obs)
        assert obs1.bits == "0" and obs1.qubits == (0,)
        assert obs2.bits == "10" and obs2.qubits == (0, 1)


class TestExactReconstruction:
    @pytest.mark.parametrize("seed", range(4))
    def test_distribution_matches_ground_truth(self, seed):
        circ = make_cut_circuit(2, 3, 2, 2, seed)
        run = reconstruct(circ)
        want = ground_truth_distribution(circ)
        assert np.max(np.abs(run.raw_distribution - want)) < 1e-10
        assert run.expectation is None

    def test_projector_expectation(self):
        run = reconstruct(fig1(), obs=ObservableSpec.projector("000", [0, 1, 2]))
        assert abs(run.expectation - 0.5) < 1e-10
        assert run.distribution is None

    def test_pauli_expectation_matches_ground_truth(self):
        circ = make_cut_circuit(3, 2, 1, 2, 9)
        obs = ObservableSpec.pauli_string([PauliOp.X, PauliOp.Z, PauliOp.Y,
                                           PauliOp.I], [0, 1, 2, 3])
        run = reconstruct(circ, obs=obs)
        assert abs(run.expectation - ground_truth_expectation(circ, obs)) < 1e-10


class TestPruneModes:
    def test_known_and_exact_agree_with_off(self):
        circ = golden_ansatz(5, 1, 2)
        off = reconstruct(circ, prune="off")
        known = reconstruct(circ, prune="known", neglect=[(1, "Y")])
        exact = reconstruct(circ, prune="exact")
        assert np.max(np.abs(off.raw_distribution - known.raw_distribution)) < 1e-10
        assert np.max(np.abs(off.raw_distribution - exact.raw_distribution)) < 1e-10
        assert (1, PauliOp.Y) in exact.neglected
        assert known.k_golden == 1

    def test_exact_prune_reduces_cost(self):
        circ = golden_ansatz(3, 1, 0)
        run = reconstruct(circ, prune="exact")
        assert run.cost.variants_executed == 6
        assert run.cost.baseline_variants == 9
        assert abs(run.cost.variant_savings - 1.0 / 3.0) < 1e-12
        assert run.cost.basis_tuples_contracted == 3
        assert run.cost.baseline_tuples == 4

    def test_off_mode_still_reports_golden(self):
        run = reconstruct(golden_ansatz(3, 1, 0), prune="off")
        assert run.golden is not None
        assert run.golden.entry(1, "Y").golden
        assert run.neglected == frozenset()

    def test_statistical_prunes_downstream_only(self):
        circ = golden_ansatz(3, 1, 0)
        run = reconstruct(circ, shots=10000, seed=4, prune="statistical",
                          tau=0.05)
        assert (1, PauliOp.Y) in run.neglected
        # detection pays for every upstream setting, so only the
        # downstream side shrinks
        assert run.cost.variants_executed == 3 + 4
        assert run.reconstruction.shots_used == 7 * 10000

    def test_statistical_needs_shots(self):
        with pytest.raises(ValueError):
            reconstruct(golden_ansatz(3, 1, 0), prune="statistical")

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            reconstruct(fig1(), prune="bogus")


class TestDeterminism:
    def test_same_seed_same_result(self):
        circ = golden_ansatz(3, 1, 1)
        a = reconstruct(circ, shots=500, seed=8, trial=2)
        b = reconstruct(circ, shots=500, seed=8, trial=2)
        assert np.array_equal(a.distribution, b.distribution)

    def test_trials_draw_fresh_streams(self):
        circ = golden_ansatz(3, 1, 1)
        a = reconstruct(circ, shots=500, seed=8, trial=0)
        b = reconstruct(circ, shots=500, seed=8, trial=1)
        assert not np.array_equal(a.distribution, b.distribution)

    def test_uncut_sampling_deterministic(self):
        circ = golden_ansatz(3, 1, 1)
        a = uncut_sampled_distribution(circ, 1000, 8, trial=0)
        b = uncut_sampled_distribution(circ, 1000, 8, trial=0)
        assert np.array_equal(a, b)
        assert abs(a.sum() - 1.0) < 1e-12
        assert not np.array_equal(a, uncut_sampled_distribution(circ, 1000, 8,
                                                                trial=1))


class TestRejections:
    def test_uncut_circuit_rejected(self):
        with pytest.raises(ValueError):
            reconstruct(Circuit(2, (cnot(0, 1),), ()))

    def test_bridged_cut_rejected(self):
        bridged = Circuit(2, (cnot(0, 1), cnot(0, 1)), (CutPoint(1, 0, 1),))
        with pytest.raises(NotBipartite):
            reconstruct(bridged)
