"""Shared test helpers.

The reference simulator here deliberately avoids the package's tensordot
path: it embeds every gate into a full 2^n x 2^n matrix by explicit index
arithmetic, so the two implementations can cross-check each other. The
random cut-circuit builder makes parents that are bipartite by
construction (an upstream block, K shared wires, a downstream block), with
entangling chains so each side is one connected component.
"""
import numpy as np

from goldcut.circuits import Circuit, CutPoint, cnot, gate_matrix, random_circuit


def embed_unitary(u, qubits, n):
    """Expand a gate matrix to the full register by basis-index bookkeeping."""
    dim = 2 ** n
    k = len(qubits)
    shifts = [n - 1 - q for q in qubits]
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        a_in = 0
        for sh in shifts:
            a_in = (a_in << 1) | ((col >> sh) & 1)
        base = col
        for sh in shifts:
            base &= ~(1 << sh)
        for a_out in range(2 ** k):
            row = base
            for j, sh in enumerate(shifts):
                if (a_out >> (k - 1 - j)) & 1:
                    row |= 1 << sh
            full[row, col] += u[a_out, a_in]
    return full


def ref_unitary(circuit):
    n = circuit.n_qubits
    u = np.eye(2 ** n, dtype=complex)
    for g in circuit.gates:
        u = embed_unitary(gate_matrix(g), g.qubits, n) @ u
    return u


def ref_state(circuit, initial=None):
    n = circuit.n_qubits
    amps = np.zeros(2 ** n, dtype=complex)
    for i in range(2 ** n):
        a = 1.0 + 0.0j
        for q in range(n):
            vec = None if initial is None else initial[q]
            if vec is None:
                vec = (1.0, 0.0)
            a *= vec[(i >> (n - 1 - q)) & 1]
        amps[i] = a
    return ref_unitary(circuit) @ amps


def ref_distribution(circuit, initial=None):
    return np.abs(ref_state(circuit, initial)) ** 2


def ref_expectation(circuit, op_full, initial=None):
    psi = ref_state(circuit, initial)
    return np.vdot(psi, op_full @ psi).real


def make_cut_circuit(n_up, n_down, k, depth, seed):
    """Random parent circuit with K cut wires shared between two blocks.

    The upstream block acts on qubits 0..n_up-1, the downstream block on
    qubits n_up-k..n-1 (so the last k upstream wires continue downstream),
    and every cut sits between the blocks. Bipartition yields fragments of
    widths n_up and n_down.
    """
    assert 1 <= k <= min(n_up, n_down) and depth >= 1
    n = n_up + n_down - k
    offset = n_up - k
    up = list(random_circuit(n_up, depth, seed).gates)
    for i in range(n_up - 1):
        up.append(cnot(i, i + 1))
    down = []
    for g in random_circuit(n_down, depth, seed + 1000).gates:
        down.append(g.__class__(g.kind, tuple(q + offset for q in g.qubits),
                                g.params, g.matrix))
    for i in range(offset, n - 1):
        down.append(cnot(i, i + 1))
    cuts = tuple(
        CutPoint(offset + j, len(up) - 1, j + 1) for j in range(k)
    )
    return Circuit(n, tuple(up) + tuple(down), cuts)


def stitch(f1, f2, n_parent):
    """Reassemble a parent circuit from two fragments (upstream gates first)."""
    gates = []
    for frag in (f1, f2):
        for g in frag.circuit.gates:
            gates.append(g.__class__(g.kind, tuple(frag.parent_qubits[q] for q in g.qubits),
                                     g.params, g.matrix))
    return Circuit(n_parent, tuple(gates), ())


def counts_to_vector(counts, width):
    vec = np.zeros(2 ** width)
    for bits, c in counts.counts.items():
        vec[int(bits, 2) if bits else 0] = c
    return vec / counts.shots
