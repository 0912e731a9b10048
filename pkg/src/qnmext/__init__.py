"""Inner-product non-malleable extractor, cq-state lemma checks and
privacy-amplification protocol simulation over small finite fields."""

from .errors import (
    AdversaryError,
    DomainError,
    InvariantViolation,
    NumericalError,
    ResourceError,
)
from .extractors import NmExtParams, StrongExtParams, g_a_eval, nmext_eval, strong_ext_eval
from .field import ExtFieldSpec, FieldSpec, FpVector, canonical_field, find_irreducible
from .mac import MacKey, MacParams, mac_forgery_advantage, mac_key_derive, mac_tag, mac_verify
from .protocol import ProtocolParams, Source, security_experiment

__version__ = "0.1.0"

__all__ = [
    "AdversaryError", "DomainError", "InvariantViolation", "NumericalError", "ResourceError",
    "NmExtParams", "StrongExtParams", "g_a_eval", "nmext_eval", "strong_ext_eval",
    "ExtFieldSpec", "FieldSpec", "FpVector", "canonical_field", "find_irreducible",
    "MacKey", "MacParams", "mac_forgery_advantage", "mac_key_derive", "mac_tag", "mac_verify",
    "ProtocolParams", "Source", "security_experiment",
]
