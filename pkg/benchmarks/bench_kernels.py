"""Benchmark the numba kernels against their numpy fallbacks.

Covers the three hot paths: subset-maximization for the operational
distance (dense and diagonal variants), row-wise simplex projection, and
the detector-tomography fixed-point loop.  Both implementations are
called directly so a single process measures both lanes; the
QREADOUT_NO_NUMBA environment flag is only needed to switch the lane the
package itself dispatches to.

Run: python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import numpy as np

_project_root = Path(__file__).resolve().parent.parent
if str(_project_root / "src") not in sys.path:
    sys.path.insert(0, str(_project_root / "src"))

from qreadout import _accel, kernels  # noqa: E402
from qreadout.distances import _difference_stack, _half_masks  # noqa: E402
from qreadout.fixtures import device_povm  # noqa: E402
from qreadout.povm import diagonal_projective, tensor_povm  # noqa: E402
from qreadout.simulate import _stream, haar_state_vector  # noqa: E402
from qreadout.tomography import calibration_matrices  # noqa: E402
from qreadout.simulate import synthetic_calibration  # noqa: E402


def _time(fn, *args, n_warmup=2, n_runs=5):
    for _ in range(n_warmup):
        fn(*args)
    times = []
    for _ in range(n_runs):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return np.mean(times) * 1000, np.std(times) * 1000


def _report(name, numba_stats, numpy_stats):
    mean_nb, std_nb = numba_stats
    mean_np, std_np = numpy_stats
    print(f"{name}")
    print(f"  numba:  {mean_nb:8.2f} +- {std_nb:.2f} ms")
    print(f"  numpy:  {mean_np:8.2f} +- {std_np:.2f} ms")
    print(f"  speedup: {mean_np / mean_nb:.2f}x")
    print()


def bench_subset_dense(num_qubits=4):
    povms = [device_povm(f"ibm_q{k}") for k in range(num_qubits)]
    measured = tensor_povm(*povms)
    ideal = diagonal_projective(2 ** num_qubits)
    diffs = _difference_stack(measured, ideal)
    masks = _half_masks(2 ** num_qubits)
    _report(
        f"dense subset norm, {2 ** num_qubits} outcomes, {masks.size} subsets",
        _time(kernels._max_subset_norm_numba, diffs, masks),
        _time(kernels._max_subset_norm_numpy, diffs, masks),
    )


def bench_subset_diagonal(num_qubits=5, samples=1 << 17):
    rng = _stream(123)
    n = 2 ** num_qubits
    diag = np.ascontiguousarray(rng.normal(scale=1e-2, size=(n, n)))
    masks = rng.integers(1, 1 << n, size=samples, dtype=np.int64)
    _report(
        f"diagonal subset norm, {n} outcomes, {samples} sampled subsets",
        _time(kernels._max_subset_norm_diag_numba, diag, masks),
        _time(kernels._max_subset_norm_diag_numpy, diag, masks),
    )


def bench_simplex(rows=200_000, n=8):
    rng = _stream(456)
    quasi = rng.dirichlet(np.ones(n), size=rows) + rng.normal(scale=0.05,
                                                             size=(rows, n))
    quasi = np.ascontiguousarray(quasi)
    _report(
        f"simplex projection, {rows} rows of length {n}",
        _time(kernels._simplex_rows_numba, quasi),
        _time(kernels._simplex_rows_numpy, quasi),
    )


def bench_mle(num_qubits=2, shots=20_000):
    factors = [device_povm(f"ibm_q{k}") for k in range(num_qubits)]
    effects = tensor_povm(*factors)
    records = synthetic_calibration(effects, num_qubits, shots=shots, seed=9)
    probes, freqs = calibration_matrices(records)
    d = 2 ** num_qubits
    initial = np.broadcast_to(np.eye(d, dtype=np.complex128) / d,
                              effects.shape).copy()

    # Fresh starting point each call: the kernels may work in place, and a
    # warm start would let later runs exit after one step.
    def run_numba():
        kernels._mle_loop_numba(probes, freqs, initial.copy(), 1e-10, 500)

    def run_numpy():
        kernels._mle_loop_numpy(probes, freqs, initial.copy(), 1e-10, 500)

    _report(
        f"tomography fixed point, {d} dim, {probes.shape[0]} probes",
        _time(run_numba, n_warmup=1, n_runs=3),
        _time(run_numpy, n_warmup=1, n_runs=3),
    )


def main():
    if not _accel.HAS_NUMBA:
        print("numba unavailable or disabled; nothing to compare against")
        return
    print("warming up (includes JIT compilation)...\n")
    bench_subset_dense()
    bench_subset_diagonal()
    bench_simplex()
    bench_mle()


if __name__ == "__main__":
    main()
