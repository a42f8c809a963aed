"""Classification and classical simulation of one-clean-qubit circuits whose
every prefix has a product eigenbasis."""
from .circuit import Circuit, build_full_unitary, parse, serialize
from .classifier import Classification, Rejection, classify_circuit, classify_step
from .gates import BasisControlledGate, decompose_4x4

__all__ = ["Circuit", "build_full_unitary", "parse", "serialize", "Classification",
           "Rejection", "classify_circuit", "classify_step", "BasisControlledGate", "decompose_4x4"]
