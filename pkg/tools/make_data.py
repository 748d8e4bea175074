"""Regenerate the JSON files bundled under src/qreadout/data.

Ten detector POVMs (five IBM qubits, five Rigetti qubits) plus one
synthetic calibration run sampled from the ibm_q0 detector with a fixed
seed.  Run from the repository root:

    python3 tools/make_data.py
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from qreadout import fixtures, io, simulate  # noqa: E402

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "qreadout" / "data"
CALIBRATION_SHOTS = 8192
CALIBRATION_SEED = 20240817


def main() -> None:
    DATA_DIR.mkdir(exist_ok=True)
    for name in fixtures.FIXTURE_NAMES:
        path = DATA_DIR / f"{name}.json"
        io.save_povm(path, fixtures.device_povm(name), extra={"detector": name})
        print("wrote", path)

    records = simulate.synthetic_calibration(
        fixtures.device_povm("ibm_q0"), num_qubits=1,
        shots=CALIBRATION_SHOTS, seed=CALIBRATION_SEED,
    )
    path = DATA_DIR / "ibm_q0_calibration.json"
    io.save_calibration(
        path, records, num_qubits=1,
        extra={
            "detector": "ibm_q0",
            "shots_per_setting": CALIBRATION_SHOTS,
            "seed": CALIBRATION_SEED,
        },
    )
    print("wrote", path)


if __name__ == "__main__":
    main()
