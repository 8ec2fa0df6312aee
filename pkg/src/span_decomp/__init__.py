"""Width- and span-bounded decompositions of relational structures."""

from __future__ import annotations

from typing import Final

__version__: Final[str] = "0.1.0"
