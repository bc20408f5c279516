"""Distributed circuit synthesis with audited nonlocal gate counts."""

from .certificate import Certificate
from .circuit import DistributedCircuit, Gate, Partition, QubitRef
from .cnot import (
    CliffordLayers,
    DagCnotSpec,
    clifford_distribute,
    cnot_distribute,
    cnot_distribute_topology,
    dag_cnot_distribute,
)
from .errors import CertificateViolation, DqcError, NotFound, ParseError, TooLarge
from .general import synth, synth_topology
from .gf2 import F2Matrix
from .qft import QftSpec, aqft_distribute_2, aqft_distribute_k, qft_distribute_2, qft_distribute_k, qft_matrix
from .serialize import deserialize, serialize
from .simulate import VerificationReport, verify_implements
from .topology import Topology, parse_topology

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "CertificateViolation",
    "CliffordLayers",
    "DagCnotSpec",
    "DistributedCircuit",
    "DqcError",
    "F2Matrix",
    "Gate",
    "NotFound",
    "ParseError",
    "Partition",
    "QftSpec",
    "QubitRef",
    "TooLarge",
    "Topology",
    "VerificationReport",
    "aqft_distribute_2",
    "aqft_distribute_k",
    "clifford_distribute",
    "cnot_distribute",
    "cnot_distribute_topology",
    "dag_cnot_distribute",
    "deserialize",
    "parse_topology",
    "qft_distribute_2",
    "qft_distribute_k",
    "qft_matrix",
    "serialize",
    "synth",
    "synth_topology",
    "verify_implements",
]
