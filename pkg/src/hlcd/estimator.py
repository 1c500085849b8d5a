"""Estimator-style front end for local discovery.

Thin wrapper so the library slots into sklearn-flavored pipelines and model
selection tooling: all configuration lives in __init__, fit(X) runs the
discovery, and the learned neighborhood lands in trailing-underscore
attributes.
"""
from typing import Optional, Sequence, Union

from sklearn.base import BaseEstimator

from ._validation import validate_discrete_matrix
from .engine import HlcdOptions, discover
from .pc_search import PcOptions
from .scoring import ScoreConfig


class LocalCausalDiscovery(BaseEstimator):
    """Discover the direct causes and effects of one target column.

    Parameters mirror the CLI flags. target may be a column index or, when
    X carries names (a Dataset), a column name.
    """

    def __init__(
        self,
        target: Union[int, str] = 0,
        pc_alg: str = "pc-simple",
        score: str = "bdeu",
        alpha: float = 0.01,
        mi_threshold: float = 0.03,
        max_cond: Optional[int] = None,
        ess: float = 1.0,
        require_nonadjacent_pairs: bool = True,
        fcbf_measure: str = "su",
    ):
        self.target = target
        self.pc_alg = pc_alg
        self.score = score
        self.alpha = alpha
        self.mi_threshold = mi_threshold
        self.max_cond = max_cond
        self.ess = ess
        self.require_nonadjacent_pairs = require_nonadjacent_pairs
        self.fcbf_measure = fcbf_measure

    def _options(self) -> HlcdOptions:
        return HlcdOptions(
            pc=PcOptions(
                algorithm=self.pc_alg,
                alpha=self.alpha,
                mi_threshold=self.mi_threshold,
                max_cond_size=self.max_cond,
                fcbf_measure=self.fcbf_measure,
            ),
            score=ScoreConfig(criterion=self.score, ess=self.ess),
            require_nonadjacent_pairs=self.require_nonadjacent_pairs,
        )

    def fit(self, X, y=None, *, names: Optional[Sequence[str]] = None):
        dataset = validate_discrete_matrix(X, names=names)
        if isinstance(self.target, str):
            target = dataset.index_of(self.target)
        else:
            target = int(self.target)
        self.result_ = discover(dataset, target, self._options())
        self.n_features_in_ = dataset.n_vars
        self.feature_names_in_ = list(dataset.names)
        self.target_ = target
        self.parents_ = sorted(self.result_.parents)
        self.children_ = sorted(self.result_.children)
        self.undirected_ = sorted(self.result_.undirected)
        return self
