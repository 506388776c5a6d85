"""Bit-packed quadratic-residue table of Z_p."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ntcore import NONRESIDUE, RESIDUE, ZERO, PrimeModulus, as_modulus

DEFAULT_MEMORY_BUDGET = 1 << 28  # bytes, i.e. 2**31 bits
TABLE_OVERHEAD = 4096
# x*x must fit in an int64 during the squaring sieve
TABULATION_LIMIT = 1 << 32
_CHUNK = 1 << 20


class BudgetExceeded(MemoryError):
    """The table for this prime does not fit the memory budget."""

    def __init__(self, p: int, required: int, budget: int):
        self.p = p
        self.required = required
        self.budget = budget
        super().__init__(
            f"character table for p={p} needs {required} bytes, budget is {budget}"
        )


def table_size(p: int) -> int:
    return (p + 7) // 8 + TABLE_OVERHEAD


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """Residue indicator of Z_p: bit a is set iff a is a nonzero square."""

    modulus: PrimeModulus
    residue_bits: np.ndarray  # uint8, little bit order, read-only

    @property
    def p(self) -> int:
        return self.modulus.p

    def bit(self, a: int) -> int:
        return int(self.residue_bits[a >> 3] >> (a & 7)) & 1

    @cached_property
    def _unpacked(self) -> np.ndarray:
        arr = np.unpackbits(self.residue_bits, count=self.p, bitorder="little")
        arr.flags.writeable = False
        return arr

    def residues(self) -> np.ndarray:
        """Unpacked 0/1 uint8 array of length p (read-only, cached)."""
        return self._unpacked

    def residue_set(self) -> list[int]:
        return np.flatnonzero(self.residues()).tolist()

    def popcount(self) -> int:
        return int(np.unpackbits(self.residue_bits).sum())

    def __repr__(self) -> str:
        return f"CharacterTable(p={self.p})"


def build_character_table(
    p: PrimeModulus | int, memory_budget: int = DEFAULT_MEMORY_BUDGET
) -> CharacterTable:
    """Tabulate residuosity by marking x*x mod p for x = 1 .. (p-1)/2."""
    mod = as_modulus(p)
    q = mod.p
    required = table_size(q)
    if required > memory_budget or q >= TABULATION_LIMIT:
        raise BudgetExceeded(q, required, memory_budget)
    bits = np.zeros((q + 7) // 8, dtype=np.uint8)
    half = (q - 1) // 2
    for lo in range(1, half + 1, _CHUNK):
        x = np.arange(lo, min(lo + _CHUNK, half + 1), dtype=np.int64)
        sq = (x * x) % q
        np.bitwise_or.at(bits, sq >> 3, (1 << (sq & 7)).astype(np.uint8))
    bits.flags.writeable = False
    return CharacterTable(mod, bits)


def chi(table: CharacterTable, a: int) -> int:
    a %= table.p
    if a == 0:
        return ZERO
    return RESIDUE if table.bit(a) else NONRESIDUE
