"""Explain decision-tree predictions by reasoning over linear constraints."""

import json
from fractions import Fraction

from ._core import ReasonError, __version__
from ._core import Session as _Session
from ._core import predict as _predict
from ._core import run_script

__all__ = ["ReasonError", "Session", "predict", "run_script", "__version__"]


def _doc(value):
    return value if isinstance(value, str) else json.dumps(value)


def _value(v):
    if isinstance(v, bool):
        raise TypeError("boolean feature values are not supported")
    if isinstance(v, (int, Fraction)):
        f = Fraction(v)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    if isinstance(v, float):
        return _value(Fraction(v))
    return str(v)


class Session:
    """A reasoning session over one feature schema.

    >>> s = Session(meta)
    >>> s.model(tree)
    >>> s.instance("F", "credit", label="deny")
    >>> s.constraint("F.age = 35")
    >>> s.solve(project=["F"])
    """

    def __init__(self, metadata):
        self._s = _Session(_doc(metadata))

    def model(self, tree):
        return self._s.declare_model(_doc(tree))

    def instance(self, name, model_id, label, minconf=0):
        self._s.declare_instance(name, model_id, str(label), _value(minconf))

    def constraint(self, text):
        return self._s.add_constraint(text)

    def retract(self, constraint_id):
        self._s.remove_constraint(constraint_id)

    def undo(self):
        return self._s.undo()

    def reset(self):
        self._s.reset()

    def solve(self, project=None, minimize=None):
        return json.loads(self._s.solve_json(list(project or []), minimize))

    def solve_text(self, project=None, minimize=None):
        return self._s.solve_text(list(project or []), minimize)

    def state(self):
        return json.loads(self._s.state_json())

    def script(self):
        return self._s.script()


def predict(metadata, tree, point):
    """Returns (label, confidence) for a point given as {feature: value}."""
    return _predict(_doc(metadata), _doc(tree), {k: _value(v) for k, v in point.items()})
