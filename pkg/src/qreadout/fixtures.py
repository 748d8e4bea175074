"""Bundled detector fixtures: reconstructed single-qubit readout POVMs from
five qubits each of an IBM and a Rigetti superconducting device.

Only the first effect of each detector is stored; the second is its
complement to the identity.  The same data ships as JSON files under
``qreadout/data`` for the CLI (addressable as ``fixture:<name>``), together
with a synthetic calibration run sampled from the ``ibm_q0`` detector.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

_FIRST_EFFECTS = {
    "ibm_q0": [[0.963, 0.004], [0.004, 0.137]],
    "ibm_q1": [[0.99, 0.002 - 0.001j], [0.002 + 0.001j, 0.37]],
    "ibm_q2": [[0.986, -0.001], [-0.001, 0.065]],
    "ibm_q3": [[0.919, 0.003 - 0.003j], [0.003 + 0.003j, 0.148]],
    "ibm_q4": [[0.98, -0.002j], [0.002j, 0.155]],
    "rigetti_q0": [[0.975, -0.002], [-0.002, 0.124]],
    "rigetti_q1": [[0.966, 0.002 + 0.002j], [0.002 - 0.002j, 0.101]],
    "rigetti_q2": [[0.987, 0.001 - 0.001j], [0.001 + 0.001j, 0.066]],
    "rigetti_q3": [[0.938, 0.002 + 0.001j], [0.002 - 0.001j, 0.184]],
    "rigetti_q4": [[0.903, 0.012 - 0.001j], [0.012 + 0.001j, 0.155]],
}

FIXTURE_NAMES = tuple(sorted(_FIRST_EFFECTS))

CALIBRATION_FIXTURES = ("ibm_q0_calibration",)


def device_povm(name: str) -> np.ndarray:
    """The 2-outcome POVM of the named bundled detector."""
    try:
        first = np.array(_FIRST_EFFECTS[name], dtype=np.complex128)
    except KeyError:
        raise KeyError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}"
        ) from None
    return np.stack([first, np.eye(2) - first])


def fixture_path(name: str):
    """Filesystem path of a bundled JSON fixture (POVM or calibration)."""
    if name not in FIXTURE_NAMES and name not in CALIBRATION_FIXTURES:
        raise KeyError(
            f"unknown fixture {name!r}; available: "
            f"{', '.join(FIXTURE_NAMES + CALIBRATION_FIXTURES)}"
        )
    return resources.files("qreadout.data").joinpath(f"{name}.json")
