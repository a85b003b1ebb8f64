"""Exact Clifford+T circuit simulation on decision diagrams.

States live in hash-consed decision diagrams whose edge labels are either
plain scalars (evdd mode) or scalar-weighted Pauli strings (limdd mode),
over an exact ring extending the rationals by i and sqrt(2) or over complex
doubles.  A stabilizer tableau predicts diagram-width ceilings alongside.
"""
from __future__ import annotations

from .circuit import (
    Circuit,
    QasmParseError,
    dense_probability_zero,
    dense_simulate,
    emit_qasm,
    gen_grover,
    gen_random,
    gen_wstate,
    parse_qasm,
)
from .coeff import CoeffPolicy, RingValue, bit_size, in_sqrt2_lattice, omega_power, within_coeff_bound
from .ddcore import DDStore, DiagramError, DiagramStats, Edge, State
from .gates import GateCounts, GateInstance, RunStats, apply_gate, simulate
from .measure import (
    ZeroStateError,
    collapse,
    measure_qubit,
    measurement_probability,
    sample,
    sample_counts,
    squared_norm,
)
from .pauli import PauliLIM, PauliString
from .stabtrack import BoundReport, StabilizerTableau, track

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "Circuit",
    "CoeffPolicy",
    "DDStore",
    "DiagramError",
    "DiagramStats",
    "Edge",
    "GateCounts",
    "GateInstance",
    "PauliLIM",
    "PauliString",
    "QasmParseError",
    "RingValue",
    "RunStats",
    "StabilizerTableau",
    "State",
    "ZeroStateError",
    "apply_gate",
    "bit_size",
    "collapse",
    "dense_probability_zero",
    "dense_simulate",
    "emit_qasm",
    "gen_grover",
    "gen_random",
    "gen_wstate",
    "in_sqrt2_lattice",
    "measure_qubit",
    "measurement_probability",
    "omega_power",
    "parse_qasm",
    "sample",
    "sample_counts",
    "simulate",
    "squared_norm",
    "track",
    "within_coeff_bound",
]
