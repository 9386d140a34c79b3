"""Explicitly enumerated finite groups and class functions on them.

Elements are arbitrary hashable values with a multiplication callable.  No
multiplication table is stored; conjugacy classes are orbits under
conjugation by a small generating set.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

from .cyclotomic import Cyc, ONE, ZERO


class FiniteGroup:
    def __init__(self, elements: Iterable[Hashable], mul: Callable, name: str = "G",
                 inv: Callable | None = None):
        self.elements = list(elements)
        self.index = {g: i for i, g in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("repeated group elements")
        self._mul = mul
        self.name = name
        self.identity = self._find_identity()
        self._inv = inv
        self._classes = None
        self._gens = None

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"

    def mul(self, a, b):
        return self._mul(a, b)

    def _find_identity(self):
        g = self.elements[0]
        # the identity is the unique idempotent
        x = g
        for _ in range(len(self.elements) + 1):
            y = self._mul(x, g)
            if y == g:
                return x
            x = y
        for e in self.elements:
            if self._mul(e, e) == e:
                return e
        raise ValueError("no identity element")

    def inv(self, g):
        if self._inv is not None:
            return self._inv(g)
        x, prev = g, self.identity
        while x != self.identity:
            prev, x = x, self._mul(x, g)
        return prev

    def power(self, g, k: int):
        if k < 0:
            g, k = self.inv(g), -k
        out = self.identity
        while k:
            if k & 1:
                out = self._mul(out, g)
            g = self._mul(g, g)
            k >>= 1
        return out

    def element_order(self, g) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self._mul(x, g)
            k += 1
        return k

    def conj(self, g, x):
        """g x g^-1."""
        return self._mul(self._mul(g, x), self.inv(g))

    def contains(self, g) -> bool:
        return g in self.index

    @property
    def generators(self) -> list:
        if self._gens is None:
            gens: list = []
            span = {self.identity}
            for g in self.elements:
                if g not in span:
                    gens.append(g)
                    span = self._closure(gens)
                    if len(span) == self.order:
                        break
            self._gens = gens
        return self._gens

    def _closure(self, gens: Sequence) -> set:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self._mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def subgroup(self, gens: Sequence, name: str = "H") -> "FiniteGroup":
        return FiniteGroup(sorted(self._closure(gens), key=self.index.__getitem__), self._mul, name, self._inv)

    # conjugacy classes
    @property
    def classes(self) -> list[list]:
        if self._classes is None:
            gens = self.generators
            ginv = [self.inv(g) for g in gens]
            seen: set = set()
            classes = []
            for x in self.elements:
                if x in seen:
                    continue
                orbit = [x]
                seen.add(x)
                i = 0
                while i < len(orbit):
                    y = orbit[i]
                    for g, gi in zip(gens, ginv):
                        z = self._mul(self._mul(g, y), gi)
                        if z not in seen:
                            seen.add(z)
                            orbit.append(z)
                    i += 1
                classes.append(orbit)
            orders = [self.element_order(c[0]) for c in classes]
            keyed = sorted(zip(orders, classes), key=lambda t: (t[0], len(t[1]), self.index[t[1][0]]))
            self._classes = [c for _, c in keyed]
            self._class_of = {}
            for k, c in enumerate(self._classes):
                for x in c:
                    self._class_of[x] = k
        return self._classes

    def class_of(self, g) -> int:
        self.classes
        return self._class_of[g]

    @property
    def class_reps(self) -> list:
        return [c[0] for c in self.classes]

    @property
    def class_sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def class_orders(self) -> list[int]:
        return [self.element_order(r) for r in self.class_reps]

    def exponent(self) -> int:
        e = 1
        for o in self.class_orders():
            e = e * o // math.gcd(e, o)
        return e

    def power_map(self, k: int) -> list[int]:
        return [self.class_of(self.power(r, k)) for r in self.class_reps]

    def inverse_classes(self) -> list[int]:
        return [self.class_of(self.inv(r)) for r in self.class_reps]

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(self._mul(a, b) == self._mul(b, a) for a in gens for b in gens)


def direct_product(G: FiniteGroup, H: FiniteGroup, name: str | None = None) -> FiniteGroup:
    return FiniteGroup([(g, h) for g in G.elements for h in H.elements],
                       lambda x, y: (G.mul(x[0], y[0]), H.mul(x[1], y[1])),
                       name or f"{G.name}x{H.name}",
                       lambda x: (G.inv(x[0]), H.inv(x[1])))


class ClassFunction:
    """Cyclotomic values on the conjugacy classes of a group."""

    def __init__(self, group: FiniteGroup, values: Sequence, name: str = ""):
        if len(values) != group.num_classes:
            raise ValueError("one value per class")
        self.group = group
        self.values = tuple(Cyc.coerce(v) for v in values)
        self.name = name

    @classmethod
    def from_function(cls, group: FiniteGroup, f: Callable, name: str = "") -> "ClassFunction":
        return cls(group, [f(r) for r in group.class_reps], name)

    @classmethod
    def trivial(cls, group: FiniteGroup) -> "ClassFunction":
        return cls(group, [ONE] * group.num_classes, "1")

    @classmethod
    def zero(cls, group: FiniteGroup) -> "ClassFunction":
        return cls(group, [ZERO] * group.num_classes, "0")

    def __call__(self, g) -> Cyc:
        return self.values[self.group.class_of(g)]

    @property
    def degree(self) -> Cyc:
        return self.values[self.group.class_of(self.group.identity)]

    def dim(self) -> int:
        d = self.degree.as_fraction()
        if d.denominator != 1:
            raise ValueError("degree is not an integer")
        return int(d)

    def _check(self, other: "ClassFunction") -> None:
        if other.group is not self.group:
            raise ValueError("class functions on different groups")

    def __add__(self, other):
        self._check(other)
        return ClassFunction(self.group, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other):
        self._check(other)
        return ClassFunction(self.group, [a - b for a, b in zip(self.values, other.values)])

    def __neg__(self):
        return ClassFunction(self.group, [-a for a in self.values])

    def __mul__(self, other):
        if isinstance(other, ClassFunction):
            self._check(other)
            return ClassFunction(self.group, [a * b for a, b in zip(self.values, other.values)])
        return ClassFunction(self.group, [a * other for a in self.values])

    __rmul__ = __mul__

    def conj(self) -> "ClassFunction":
        return ClassFunction(self.group, [a.conj() for a in self.values])

    def inner(self, other: "ClassFunction") -> Cyc:
        self._check(other)
        total = ZERO
        for size, a, b in zip(self.group.class_sizes, self.values, other.values):
            total = total + a * b.conj() * size
        return total * Fraction(1, self.group.order)

    def multiplicity(self, other: "ClassFunction") -> int:
        m = self.inner(other).as_fraction()
        if m.denominator != 1:
            raise ValueError(f"non-integral multiplicity {m}")
        return int(m)

    def norm2(self) -> Fraction:
        return self.inner(self).as_fraction()

    def is_irreducible(self) -> bool:
        return self.norm2() == 1 and self.degree.as_fraction() > 0

    def __eq__(self, other):
        if not isinstance(other, ClassFunction):
            return NotImplemented
        return self.group is other.group and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        label = f"{self.name}: " if self.name else ""
        return f"ClassFunction({label}{list(self.values)})"
