"""capstab: rotational capillary hypersurfaces — generation, identity checks, stability."""

__version__ = "0.1.0"

from .errors import CapstabError  # noqa: F401
