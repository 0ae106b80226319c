"""scikit-learn style wrappers for batch use.

Both estimators are stateless apart from their constructor parameters;
``fit`` only validates input.  They exist so that reduction and analysis
plug into code that already speaks ``get_params``/``set_params`` and
``fit``/``transform``/``predict``.
"""

from __future__ import annotations

import random
from os import PathLike
from typing import Iterable

from sklearn.base import BaseEstimator

from .analysis import AnalysisReport, Verdict, analyze
from .fileformat import NetworkDocument, load, parse
from .network import ReactionNetwork
from .reduction import primitive_reduction

# most informative first
_VERDICT_RANK = (
    Verdict.PERSISTENT,
    Verdict.NOT_PERSISTENT,
    Verdict.BOUNDED_PERSISTENT,
    Verdict.NO_BOUNDARY_STEADY_STATES,
    Verdict.INCONCLUSIVE,
)


def check_network(obj) -> ReactionNetwork:
    """Coerce a network, parsed document, ``.crn`` text or path to a network."""
    if isinstance(obj, ReactionNetwork):
        return obj
    if isinstance(obj, NetworkDocument):
        return obj.network
    if isinstance(obj, PathLike):
        return load(obj).network
    if isinstance(obj, str):
        return parse(obj).network
    raise TypeError(f"cannot interpret {type(obj).__name__} as a reaction network")


def _networks(X: Iterable) -> list[ReactionNetwork]:
    if isinstance(X, (ReactionNetwork, NetworkDocument, str, PathLike)):
        raise TypeError("expected a sequence of networks, got a single one")
    return [check_network(x) for x in X]


class PrimitiveReducer(BaseEstimator):
    """Map each network to its primitive reduction.

    ``random_state`` shuffles the order in which removable sets are
    considered; ``None`` gives the canonical deterministic order.
    """

    def __init__(self, random_state: int | None = None):
        self.random_state = random_state

    def fit(self, X, y=None):
        self.n_networks_seen_ = len(_networks(X))
        return self

    def transform(self, X) -> list[ReactionNetwork]:
        rng = None if self.random_state is None else random.Random(self.random_state)
        self.traces_ = []
        out = []
        for net in _networks(X):
            final, trace = primitive_reduction(net, rng=rng)
            self.traces_.append(trace)
            out.append(final)
        return out

    def fit_transform(self, X, y=None) -> list[ReactionNetwork]:
        X = list(X)
        return self.fit(X).transform(X)


class PersistenceClassifier(BaseEstimator):
    """Label each network with its most informative verdict."""

    def __init__(self, assume_dissipative: bool = False):
        self.assume_dissipative = assume_dissipative

    def fit(self, X, y=None):
        self.n_networks_seen_ = len(_networks(X))
        self.classes_ = [v.value for v in _VERDICT_RANK]
        return self

    def analyze(self, X) -> list[AnalysisReport]:
        return [analyze(net, assume_dissipative=self.assume_dissipative) for net in _networks(X)]

    def predict(self, X) -> list[str]:
        labels = []
        for report in self.analyze(X):
            found = report.verdict_set
            labels.append(next(v.value for v in _VERDICT_RANK if v in found))
        return labels
