"""Linear-time set algebra on sorted, duplicate-free tuples.

Every function takes and returns strictly increasing tuples.  The merges
walk both inputs once, so the cost is O(len(a) + len(b)).
"""

from __future__ import annotations

from bisect import bisect_left
from typing import Sequence


def is_strictly_sorted(seq: Sequence) -> bool:
    return all(x < y for x, y in zip(seq, seq[1:]))


def union(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    out = []
    append = out.append
    i = j = 0
    na, nb = len(a), len(b)
    x, y = a[0], b[0]
    while True:
        if x < y:
            append(x)
            i += 1
            if i == na:
                break
            x = a[i]
        elif y < x:
            append(y)
            j += 1
            if j == nb:
                break
            y = b[j]
        else:
            append(x)
            i += 1
            j += 1
            if i == na or j == nb:
                break
            x, y = a[i], b[j]
    if i < na:
        out.extend(a[i:])
    elif j < nb:
        out.extend(b[j:])
    return tuple(out)


def intersection(a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    out = []
    append = out.append
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x < y:
            i += 1
        elif y < x:
            j += 1
        else:
            append(x)
            i += 1
            j += 1
    return tuple(out)


def difference(a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return a
    out = []
    append = out.append
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x < y:
            append(x)
            i += 1
        elif y < x:
            j += 1
        else:
            i += 1
            j += 1
    if i < na:
        out.extend(a[i:])
    return tuple(out)


def is_subset(a: tuple, b: tuple) -> bool:
    """True iff every element of `a` occurs in `b`."""
    na, nb = len(a), len(b)
    if na > nb:
        return False
    i = j = 0
    while i < na:
        if nb - j < na - i:
            return False
        x, y = a[i], b[j]
        if x == y:
            i += 1
            j += 1
        elif y < x:
            j += 1
        else:
            return False
    return True


def contains(a: tuple, x) -> bool:
    k = bisect_left(a, x)
    return k < len(a) and a[k] == x


def insert(a: tuple, x) -> tuple:
    k = bisect_left(a, x)
    if k < len(a) and a[k] == x:
        return a
    return a[:k] + (x,) + a[k:]


def remove(a: tuple, x) -> tuple:
    k = bisect_left(a, x)
    if k < len(a) and a[k] == x:
        return a[:k] + a[k + 1:]
    return a
