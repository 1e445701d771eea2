"""Generator words: finite products of one-parameter exponentials."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import IndexOutOfRange
from .matrix import expm

Letter = tuple[int, float]


@dataclass(frozen=True)
class GeneratorWord:
    """Ordered letters ``(generator_index, time)``; replay is ``prod expm(time * X_index)``.

    Indices are 0-based positions in the generator set. ``bound_used`` is the
    length bound the producer promised (``None`` if none applies) and
    ``product_error`` the Frobenius error of the replay against whatever the
    word was built to reproduce.
    """

    letters: tuple[Letter, ...] = ()
    bound_used: int | None = None
    product_error: float = 0.0

    @classmethod
    def of(cls, letters: Iterable[Sequence], bound_used=None, product_error=0.0) -> "GeneratorWord":
        return cls(tuple((int(i), float(t)) for i, t in letters), bound_used, float(product_error))

    @property
    def length(self) -> int:
        return len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: "GeneratorWord") -> "GeneratorWord":
        return GeneratorWord(self.letters + other.letters)

    def inverse(self) -> "GeneratorWord":
        return GeneratorWord(tuple((i, -t) for i, t in reversed(self.letters)))

    @property
    def min_time(self) -> float:
        return min((t for _, t in self.letters), default=0.0)


def replay_letters(letters: Sequence[Letter], elements: Sequence[np.ndarray], dim: int | None = None) -> np.ndarray:
    if dim is None:
        dim = elements[0].shape[0]
    dtype = np.result_type(*elements) if elements else float
    out = np.eye(dim, dtype=dtype)
    m = len(elements)
    for i, t in letters:
        if not 0 <= i < m:
            raise IndexOutOfRange(f"generator index {i} outside 0..{m - 1}")
        out = out @ expm(t * elements[i])
    return out


def replay(word: GeneratorWord | Sequence[Letter], gens) -> np.ndarray:
    """Ordered product of ``expm(time * X_index)``; the verification oracle for every word."""
    letters = word.letters if isinstance(word, GeneratorWord) else word
    elements = gens.elements if hasattr(gens, "elements") else gens
    return replay_letters(letters, elements)
