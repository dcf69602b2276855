"""Second-order time jets of carrier-band fields.

A ``Jet`` holds (f, f', f'') at one instant.  Linear field operations act
entrywise and products follow the Leibniz rule, so any expression written
against the ``Field`` interface also yields its first two time derivatives.
"""

from __future__ import annotations

from math import comb
from typing import Callable, Sequence

from .field import Field

ORDER = 2

_LINEAR = (
    "lmul", "rmul", "conjugate", "dagger", "component", "scalar_part", "vector_part",
    "d", "d_slow", "d_carrier", "riesz", "abs_d", "hilbert", "dirac", "band", "band_scale",
    "multiplier", "slow_multiplier", "with_bands", "lscale",
)


class Jet:
    __slots__ = ("parts",)

    def __init__(self, parts: Sequence[Field]):
        if len(parts) != ORDER + 1:
            raise ValueError(f"a jet needs {ORDER + 1} entries")
        self.parts = tuple(parts)

    @classmethod
    def steady(cls, f: Field) -> "Jet":
        z = f * 0.0
        return cls((f, z, z))

    def __getitem__(self, n: int) -> Field:
        return self.parts[n]

    def dt(self) -> "Jet":
        """Shift: the jet of the time derivative, missing its top entry (set to zero)."""
        return Jet((self.parts[1], self.parts[2], self.parts[2] * 0.0))

    def __getattr__(self, name):
        if name not in _LINEAR:
            raise AttributeError(name)

        def op(*args, **kw):
            return Jet([getattr(p, name)(*args, **kw) for p in self.parts])

        return op

    def __add__(self, other: "Jet") -> "Jet":
        return Jet([a + b for a, b in zip(self.parts, _lift(other, self))])

    def __sub__(self, other: "Jet") -> "Jet":
        return Jet([a - b for a, b in zip(self.parts, _lift(other, self))])

    def __radd__(self, other: Field) -> "Jet":
        return _lift(other, self) + self

    def __rsub__(self, other: Field) -> "Jet":
        return _lift(other, self) - self

    def __neg__(self) -> "Jet":
        return Jet([-a for a in self.parts])

    def __mul__(self, other):
        if isinstance(other, (Jet, Field)):
            return multilinear(lambda a, b: a * b, self, _lift(other, self))
        return Jet([a * other for a in self.parts])

    def __rmul__(self, c):
        if isinstance(c, Field):
            return multilinear(lambda a, b: a * b, Jet.steady(c), self)
        return Jet([c * a for a in self.parts])


def _lift(x, like: Jet) -> Jet:
    if isinstance(x, Jet):
        return x
    if isinstance(x, Field):
        return Jet.steady(x)
    raise TypeError(f"cannot combine a jet with {type(x).__name__}")


def multilinear(op: Callable[..., Field], *args: Jet) -> Jet:
    """Time jet of op(a, b, ...) for op linear in each argument."""
    args = [_lift(a, args[0]) if not isinstance(a, Jet) else a for a in args]
    out = []
    for n in range(ORDER + 1):
        total = None
        for split in _splits(n, len(args)):
            c = _multinomial(split)
            term = op(*[a[i] for a, i in zip(args, split)]) * float(c)
            total = term if total is None else total + term
        out.append(total)
    return Jet(out)


def _splits(n: int, r: int):
    if r == 1:
        yield (n,)
        return
    for i in range(n + 1):
        for rest in _splits(n - i, r - 1):
            yield (i,) + rest


def _multinomial(split) -> int:
    c, left = 1, sum(split)
    for s in split:
        c *= comb(left, s)
        left -= s
    return c
