"""Shared type aliases for readability and contract enforcement."""
from __future__ import annotations

from typing import Callable, NewType, TypeAlias

import numpy as np
import numpy.typing as npt

Seed = NewType("Seed", int)

FloatArray: TypeAlias = npt.NDArray[np.float64]
IntArray: TypeAlias = npt.NDArray[np.int64]
Cdf: TypeAlias = Callable[[FloatArray], FloatArray]
