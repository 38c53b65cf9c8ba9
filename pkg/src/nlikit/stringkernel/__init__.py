"""Blended character p-gram string kernels.

Hot pairwise loops run in a compiled extension when it is available, with a
pure numpy fallback selected at import (see `backend`).
"""

from .backend import available_backends, backend_name, set_backend
from .blend import blended_gram, raw_gram
from .profiles import (KERNEL_KIND_CODES, MAX_DOC_CHARS, HashedProfiles,
                       PGramProfile, build_hashed_profiles, build_profile,
                       kernel_value, pgram_hashes)

__all__ = [
    "available_backends", "backend_name", "set_backend",
    "blended_gram", "raw_gram",
    "KERNEL_KIND_CODES", "MAX_DOC_CHARS", "HashedProfiles", "PGramProfile",
    "build_hashed_profiles", "build_profile", "kernel_value", "pgram_hashes",
]
