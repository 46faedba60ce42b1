"""Leftist max-heap with key differences and O(1) uniform key shifts.

Nodes live in a :class:`NodePool` (parallel numpy arrays) so that many heaps
can be melded without copying and so the same primitives can run inside the
jitted single-row solver. Each node stores its key minus its parent's key; a
root stores its key minus the heap's ``offset``. Shifting every key of a heap
is therefore a single addition to ``offset``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NIL = -1
# right spines of leftist heaps have length <= log2(size + 1)
_STACK = 160


@njit(cache=True)
def meld(delta, left, right, rank, stk_node, stk_key, a, ka, b, kb):
    """Meld the trees rooted at ``a`` and ``b`` whose roots have true keys ``ka``, ``kb``.

    Returns ``(root, root_key)``; the caller sets ``delta[root]``.
    """
    if a < 0:
        return b, kb
    if b < 0:
        return a, ka
    n = 0
    while True:
        if ka < kb:
            a, b = b, a
            ka, kb = kb, ka
        stk_node[n] = a
        stk_key[n] = ka
        n += 1
        r = right[a]
        if r < 0:
            break
        a = r
        ka = ka + delta[r]
    rem = b
    remk = kb
    while n > 0:
        n -= 1
        p = stk_node[n]
        kp = stk_key[n]
        delta[rem] = remk - kp
        lc = left[p]
        rl = rank[lc] if lc >= 0 else 0
        rr = rank[rem]
        if rl < rr:
            left[p] = rem
            right[p] = lc
            rr = rl
        else:
            right[p] = rem
        rank[p] = rr + 1
        rem = p
        remk = kp
    return rem, remk


@njit(cache=True)
def push_node(delta, left, right, rank, payload, stk_node, stk_key, root, offset, node, key, item):
    """Insert the unused ``node`` holding ``key``/``item``; returns the new root."""
    left[node] = NIL
    right[node] = NIL
    rank[node] = 1
    payload[node] = item
    rk = offset + delta[root] if root >= 0 else 0.0
    new_root, new_key = meld(delta, left, right, rank, stk_node, stk_key, root, rk, node, key)
    delta[new_root] = new_key - offset
    return new_root


@njit(cache=True)
def pop_root(delta, left, right, rank, stk_node, stk_key, root, offset):
    """Remove the root; returns ``(new_root, removed_key)``."""
    key = offset + delta[root]
    lc = left[root]
    rc = right[root]
    kl = key + delta[lc] if lc >= 0 else 0.0
    kr = key + delta[rc] if rc >= 0 else 0.0
    new_root, new_key = meld(delta, left, right, rank, stk_node, stk_key, lc, kl, rc, kr)
    if new_root >= 0:
        delta[new_root] = new_key - offset
    return new_root, key


@njit(cache=True)
def meld_heaps(delta, left, right, rank, stk_node, stk_key, r1, o1, r2, o2):
    """Meld heap (r1, o1) with heap (r2, o2); the result uses offset ``o1``."""
    k1 = o1 + delta[r1] if r1 >= 0 else 0.0
    k2 = o2 + delta[r2] if r2 >= 0 else 0.0
    root, key = meld(delta, left, right, rank, stk_node, stk_key, r1, k1, r2, k2)
    if root >= 0:
        delta[root] = key - o1
    return root


class NodePool:
    """Growable node storage shared by the heaps that may be merged together."""

    def __init__(self, capacity: int = 64):
        capacity = max(int(capacity), 1)
        self.delta = np.zeros(capacity)
        self.left = np.full(capacity, NIL, dtype=np.int64)
        self.right = np.full(capacity, NIL, dtype=np.int64)
        self.rank = np.zeros(capacity, dtype=np.int64)
        self.payload = np.zeros(capacity, dtype=np.int64)
        self.stk_node = np.zeros(_STACK, dtype=np.int64)
        self.stk_key = np.zeros(_STACK)
        self._free: list[int] = []
        self._used = 0

    @property
    def capacity(self) -> int:
        return len(self.delta)

    def alloc(self) -> int:
        if self._free:
            return self._free.pop()
        if self._used == self.capacity:
            self._grow(2 * self.capacity)
        self._used += 1
        return self._used - 1

    def release(self, node: int) -> None:
        self._free.append(node)

    def _grow(self, capacity: int) -> None:
        extra = capacity - self.capacity
        self.delta = np.concatenate([self.delta, np.zeros(extra)])
        self.left = np.concatenate([self.left, np.full(extra, NIL, dtype=np.int64)])
        self.right = np.concatenate([self.right, np.full(extra, NIL, dtype=np.int64)])
        self.rank = np.concatenate([self.rank, np.zeros(extra, dtype=np.int64)])
        self.payload = np.concatenate([self.payload, np.zeros(extra, dtype=np.int64)])


class ShiftHeap:
    """Mergeable max-heap of ``(key, payload)`` entries with lazy key offsets.

    Heaps that will be merged must share a :class:`NodePool`; by default a
    fresh heap gets its own pool, and merging heaps from different pools
    copies the smaller one over.
    """

    __slots__ = ("pool", "root", "offset", "_size")

    def __init__(self, pool: NodePool | None = None):
        self.pool = pool if pool is not None else NodePool()
        self.root = NIL
        self.offset = 0.0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def __bool__(self) -> bool:
        return self._size > 0

    def push(self, key: float, payload: int = 0) -> "ShiftHeap":
        p = self.pool
        node = p.alloc()
        self.root = push_node(p.delta, p.left, p.right, p.rank, p.payload, p.stk_node, p.stk_key,
                              self.root, self.offset, node, float(key), int(payload))
        self._size += 1
        return self

    def peek_max(self) -> tuple[float, int]:
        if self.root < 0:
            raise IndexError("peek at an empty heap")
        return self.offset + self.pool.delta[self.root], int(self.pool.payload[self.root])

    def pop_max(self) -> tuple[float, int]:
        if self.root < 0:
            raise IndexError("pop from an empty heap")
        p = self.pool
        old = self.root
        item = int(p.payload[old])
        self.root, key = pop_root(p.delta, p.left, p.right, p.rank, p.stk_node, p.stk_key, old, self.offset)
        p.release(old)
        self._size -= 1
        return key, item

    def add_offset(self, delta: float) -> "ShiftHeap":
        """Add ``delta`` to every key currently stored, in constant time."""
        self.offset += delta
        return self

    def merge(self, other: "ShiftHeap") -> "ShiftHeap":
        """Move all entries of ``other`` into this heap; ``other`` is left empty."""
        if other is self or not other:
            return self
        if other.pool is not self.pool:
            for key, item in other.items():
                self.push(key, item)
        else:
            p = self.pool
            self.root = meld_heaps(p.delta, p.left, p.right, p.rank, p.stk_node, p.stk_key,
                                   self.root, self.offset, other.root, other.offset)
            self._size += other._size
        other.root, other.offset, other._size = NIL, 0.0, 0
        return self

    def items(self) -> list[tuple[float, int]]:
        """All ``(key, payload)`` entries in arbitrary order."""
        out = []
        if self.root < 0:
            return out
        p = self.pool
        stack = [(self.root, self.offset + p.delta[self.root])]
        while stack:
            node, key = stack.pop()
            out.append((key, int(p.payload[node])))
            for child in (p.left[node], p.right[node]):
                if child >= 0:
                    stack.append((child, key + p.delta[child]))
        return out

    def check_invariants(self) -> None:
        """Raise AssertionError unless heap order, leftist ranks and size are consistent."""
        p = self.pool
        count = 0
        if self.root >= 0:
            stack = [(self.root, self.offset + p.delta[self.root])]
            while stack:
                node, key = stack.pop()
                count += 1
                lc, rc = p.left[node], p.right[node]
                rl = p.rank[lc] if lc >= 0 else 0
                rr = p.rank[rc] if rc >= 0 else 0
                assert rl >= rr, f"leftist property violated at node {node}"
                assert p.rank[node] == rr + 1, f"stale rank at node {node}"
                for child in (lc, rc):
                    if child >= 0:
                        assert p.delta[child] <= 0.0, f"heap order violated below node {node}"
                        stack.append((child, key + p.delta[child]))
        assert count == self._size, f"size {self._size} but {count} reachable nodes"
