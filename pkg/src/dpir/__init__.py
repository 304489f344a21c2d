"""Download bounds and an N-server protocol simulator for private search
over dependent messages.

The package is organized bottom-up:

- ``patterns``: search-pattern families and exact joint indicator-bit laws;
- ``infotheory``: entropies and mutual informations of those laws, in bits;
- ``constructions``: the specific families the theory uses, plus closed
  forms and the circular-family triple scan;
- ``bounds``: the sequence-optimized converse bound, reference capacities,
  and the exact-search bound curve;
- ``protocol``: dataset generation, typical-set compression, the one-mask
  XOR retrieval scheme, and seeded experiments/audits;
- ``service``: a FastAPI app exposing all of the above;
- ``cli``: a thin command-line client over the service handlers.
"""

__version__ = "0.1.0"

from . import bounds, constructions, infotheory, patterns, protocol  # noqa: F401
from .errors import DomainError  # noqa: F401
