"""Ordered variable domains.

A :class:`Domain` fixes the order of the variables (the rows of a sparse
cell matrix) and, per variable, the order of its states.  The level of a
state is its 1-based position in that order.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

from .errors import CapacityError, DomainError

# Largest dense cell count we agree to index with int64 arithmetic.
MAX_INDEXABLE = 2**62


class Domain:
    """Ordered labels with ordered state names.

    >>> d = Domain.from_dict({"X": ["x1", "x2"], "Y": ["y1", "y2", "y3"]})
    >>> d.sizes
    (2, 3)
    >>> d.level("Y", "y3")
    3
    """

    __slots__ = ("_labels", "_states", "_pos")

    def __init__(self, labels: Sequence[str], states: Sequence[Sequence[str]]):
        labels = tuple(labels)
        states = tuple(tuple(s) for s in states)
        if len(labels) != len(states):
            raise DomainError("labels and state lists differ in length")
        pos = {}
        for i, (lab, st) in enumerate(zip(labels, states)):
            if not isinstance(lab, str) or not lab:
                raise DomainError(f"invalid variable label {lab!r}")
            if lab in pos:
                raise DomainError(f"duplicate variable label {lab!r}")
            if len(st) == 0:
                raise DomainError(f"variable {lab!r} has no states")
            if len(set(st)) != len(st):
                raise DomainError(f"variable {lab!r} has duplicate state names")
            pos[lab] = i
        self._labels = labels
        self._states = states
        self._pos = pos

    @classmethod
    def from_dict(cls, mapping: Mapping[str, Sequence[str]]) -> "Domain":
        return cls(list(mapping), [mapping[k] for k in mapping])

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self._states)

    def states(self, label: str) -> tuple[str, ...]:
        return self._states[self.index(label)]

    def as_dict(self) -> dict[str, tuple[str, ...]]:
        return dict(zip(self._labels, self._states))

    def index(self, label: str) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise DomainError(f"unknown variable {label!r}") from None

    def size(self, label: str) -> int:
        return len(self.states(label))

    def level(self, label: str, state: str) -> int:
        st = self.states(label)
        try:
            return st.index(state) + 1
        except ValueError:
            raise DomainError(f"unknown state {state!r} for variable {label!r}") from None

    def state(self, label: str, level: int) -> str:
        return self.states(label)[level - 1]

    def statespace_size(self, labels: Iterable[str] | None = None) -> int:
        """Number of dense cells over ``labels`` (all labels by default)."""
        if labels is None:
            return math.prod(self.sizes)
        return math.prod(self.size(l) for l in labels)

    def check_indexable(self, labels: Iterable[str] | None = None) -> int:
        n = self.statespace_size(labels)
        if n > MAX_INDEXABLE:
            raise CapacityError(f"dense state space of {n} cells cannot be indexed")
        return n

    def subdomain(self, labels: Iterable[str]) -> "Domain":
        labels = list(labels)
        return Domain(labels, [self.states(l) for l in labels])

    def without(self, labels: Iterable[str]) -> "Domain":
        drop = set(labels)
        return self.subdomain([l for l in self._labels if l not in drop])

    def union(self, other: "Domain") -> "Domain":
        """Labels of ``self`` followed by the new labels of ``other``.

        Shared labels must carry identical state lists.
        """
        self.check_compatible(other)
        extra = [l for l in other.labels if l not in self._pos]
        return Domain(
            self._labels + tuple(extra),
            self._states + tuple(other.states(l) for l in extra),
        )

    def check_compatible(self, other: "Domain") -> None:
        for lab in other.labels:
            if lab in self._pos and self.states(lab) != other.states(lab):
                raise DomainError(
                    f"variable {lab!r} has conflicting state lists: "
                    f"{list(self.states(lab))} vs {list(other.states(lab))}"
                )

    def __contains__(self, label) -> bool:
        return label in self._pos

    def __len__(self) -> int:
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Domain):
            return NotImplemented
        return self._labels == other._labels and self._states == other._states

    def __hash__(self) -> int:
        return hash((self._labels, self._states))

    def same_variables(self, other: "Domain") -> bool:
        """Equal up to a reordering of the labels."""
        if set(self._labels) != set(other.labels):
            return False
        return all(self.states(l) == other.states(l) for l in self._labels)

    def __repr__(self) -> str:
        inner = ", ".join(f"{l}: {list(s)}" for l, s in zip(self._labels, self._states))
        return f"Domain({{{inner}}})"
