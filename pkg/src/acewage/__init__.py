"""Software workbench for the ACE and WAGE sponge-duplex ciphers.

Functional cores, the shared duplex mode and ACE-Hash, a cycle model of the
hardware interface, and a gate-count cost model.
"""

from .ace import AceState, ace_inverse_permutation, ace_permutation
from .config import DEFAULT_CONFIG, CipherConfig, ConfigError, load_config, validate_config
from .sponge import AeadRequest, AeadResult, ace_hash, aead, decrypt, encrypt
from .wage import WageState, wage_inverse_permutation, wage_permutation

__version__ = "0.1.0"

__all__ = [
    "AceState", "WageState", "CipherConfig", "ConfigError", "DEFAULT_CONFIG",
    "AeadRequest", "AeadResult", "aead", "encrypt", "decrypt", "ace_hash",
    "ace_permutation", "ace_inverse_permutation", "wage_permutation",
    "wage_inverse_permutation", "load_config", "validate_config",
]
