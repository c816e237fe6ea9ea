"""GF(2) row operations on int bitsets.

A row is a pair ``(mask, rhs)``: bit ``k`` of ``mask`` is the coefficient of
variable ``k`` and ``rhs`` is the constant on the right-hand side.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Tuple

Row = Tuple[int, int]


class InconsistentSystemError(RuntimeError):
    """Reduction produced the contradiction 0 = 1."""


def lowbit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def bits(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def rref(rows: Iterable[Row]) -> List[Row]:
    """Reduced row-echelon form, pivots on the lowest set bit, sorted by pivot.

    Zero rows ``0 = 0`` are dropped; ``0 = 1`` raises.
    """
    work = [list(row) for row in rows]
    done: List[List[int]] = []
    width = union(map(tuple, work)).bit_length()
    for col in range(width):
        piv = next((row for row in work if row[0] >> col & 1), None)
        if piv is None:
            continue
        work.remove(piv)
        for row in work + done:
            if row[0] >> col & 1:
                row[0] ^= piv[0]
                row[1] ^= piv[1]
        done.append(piv)
    if any(rhs for mask, rhs in work):
        raise InconsistentSystemError("row reduced to 0 = 1")
    return [(mask, rhs) for mask, rhs in done]


def reduce(rows: List[Row], mask: int) -> Row:
    """Reduce ``mask`` against rows already in rref; returns (remainder, rhs)."""
    rhs = 0
    for bmask, brhs in rows:
        if mask >> lowbit(bmask) & 1:
            mask ^= bmask
            rhs ^= brhs
    return mask, rhs


def span_value(rows: List[Row], mask: int) -> Optional[int]:
    """Forced rhs of ``mask`` if it lies in the span of ``rows`` (rref), else None."""
    rem, rhs = reduce(rows, mask)
    return rhs if rem == 0 else None


def in_span(rows: List[Row], mask: int) -> bool:
    return reduce(rows, mask)[0] == 0


def eliminate(rows: List[Row], var: int) -> List[Row]:
    """Generating set (rref) of the subspace with coefficient 0 on ``var``."""
    rows = rref(rows)
    pivot = next((row for row in rows if row[0] >> var & 1), None)
    if pivot is None:
        return rows
    out = []
    for row in rows:
        if row is pivot:
            continue
        if row[0] >> var & 1:
            row = (row[0] ^ pivot[0], row[1] ^ pivot[1])
        out.append(row)
    return rref(out)


def restrict(rows: List[Row], support: int) -> List[Row]:
    """Subspace of span(rows) whose vectors lie inside ``support``."""
    for var in bits(union(rows) & ~support):
        rows = eliminate(rows, var)
    return rref(rows)


def union(rows: Iterable[Row]) -> int:
    out = 0
    for mask, _ in rows:
        out |= mask
    return out


def rank(rows: Iterable[Row]) -> int:
    return len(rref(rows))
