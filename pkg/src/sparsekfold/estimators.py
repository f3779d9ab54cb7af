"""scikit-learn style wrappers around the functional API."""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_point_cloud
from .kdp import PointCloud, kdp_fast
from .persistence import compute_persistence
from .sparse import Params, SiteSchedule, build_filtration


class KDistancePermutation(BaseEstimator):
    """Greedy k-distance ordering of a point cloud.

    Parameters
    ----------
    k : int, default=1

    Attributes
    ----------
    permutation_ : KPermutation
    order_ : ndarray of shape (n_samples,)
    lambdas_ : ndarray of shape (n_samples,)
    n_features_in_ : int
    """

    def __init__(self, k=1):
        self.k = k

    def fit(self, X, y=None):
        X = check_point_cloud(X)
        self.permutation_ = kdp_fast(PointCloud(X), self.k)
        self.order_ = self.permutation_.order
        self.lambdas_ = self.permutation_.lambdas
        self.n_features_in_ = X.shape[1]
        return self


class SparseKFoldCech(BaseEstimator):
    """Sparse approximation of the k-th order Cech filtration of one point cloud.

    Parameters
    ----------
    k : int, default=1
        Number of balls that must overlap.
    epsilon : float, default=1.0
        Multiplicative approximation factor, in (0, 1].
    max_dim : int, default=1
        Highest simplex dimension built.
    seed : int, default=0
        Seed of the randomized enclosing-ball solvers.
    limit_simplices : int or None, default=None
    n_jobs : int, default=1

    Attributes
    ----------
    filtration_ : SparseFiltration
    permutation_ : KPermutation
    schedule_ : SiteSchedule
    n_features_in_ : int
    """

    def __init__(self, k=1, epsilon=1.0, max_dim=1, seed=0, limit_simplices=None, n_jobs=1):
        self.k = k
        self.epsilon = epsilon
        self.max_dim = max_dim
        self.seed = seed
        self.limit_simplices = limit_simplices
        self.n_jobs = n_jobs

    def _params(self):
        return Params(self.k, self.epsilon, self.max_dim, self.seed)

    def fit(self, X, y=None):
        X = check_point_cloud(X, min_points=self.k)
        params = self._params()
        self.filtration_ = build_filtration(
            PointCloud(X), params, limit_simplices=self.limit_simplices, n_jobs=self.n_jobs
        )
        self.permutation_ = self.filtration_.permutation
        self.schedule_ = SiteSchedule(self.permutation_.lambdas, params.eps_prime)
        self.n_features_in_ = X.shape[1]
        return self

    def persistence(self, homology_dims=None):
        """Persistence diagram of the fitted filtration."""
        check_is_fitted(self, "filtration_")
        top = max(self.max_dim - 1, 0) if homology_dims is None else max(homology_dims)
        return compute_persistence(self.filtration_.simplices, top)


class SparseKFoldPersistence(TransformerMixin, BaseEstimator):
    """Map a collection of point clouds to persistence diagrams.

    Each point cloud is turned into its sparse k-th order Cech filtration
    and reduced. Fitting only validates parameters, so ``fit_transform`` and
    ``transform`` agree.

    Parameters
    ----------
    k, epsilon, seed, n_jobs
        As in :class:`SparseKFoldCech`.
    homology_dimensions : tuple of int, default=(0, 1)
        Simplices are built up to ``max(homology_dimensions) + 1``.

    Examples
    --------
    >>> import numpy as np
    >>> from sparsekfold import SparseKFoldPersistence
    >>> clouds = [np.random.default_rng(0).random((8, 2))]
    >>> diagrams = SparseKFoldPersistence(k=2).fit_transform(clouds)
    >>> sorted(diagrams[0].dims)
    [0, 1]
    """

    def __init__(self, k=1, epsilon=1.0, homology_dimensions=(0, 1), seed=0, n_jobs=1):
        self.k = k
        self.epsilon = epsilon
        self.homology_dimensions = homology_dimensions
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        dims = tuple(int(d) for d in self.homology_dimensions)
        if not dims or min(dims) < 0:
            raise ValueError("homology_dimensions must be nonempty and nonnegative")
        self._params = Params(self.k, self.epsilon, max(dims) + 1, self.seed)
        clouds = [check_point_cloud(x, min_points=self.k) for x in X]
        self.n_features_in_ = clouds[0].shape[1] if clouds else None
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        dims = tuple(int(d) for d in self.homology_dimensions)
        out = []
        for x in X:
            x = check_point_cloud(x, min_points=self.k)
            if self.n_features_in_ is not None and x.shape[1] != self.n_features_in_:
                raise ValueError(
                    f"point clouds have {x.shape[1]} coordinates, expected {self.n_features_in_}"
                )
            filt = build_filtration(PointCloud(x), self._params, n_jobs=self.n_jobs)
            diagram = compute_persistence(filt.simplices, max(dims))
            out.append(diagram)
        return out

    def _more_tags(self):
        return {"X_types": ["3darray"], "stateless": True}


def pairwise_log_bottleneck(diagrams):
    """Symmetric matrix of log-scale bottleneck distances between diagrams."""
    from .persistence import log_bottleneck

    m = len(diagrams)
    D = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            D[i, j] = D[j, i] = log_bottleneck(diagrams[i], diagrams[j])
    return D
