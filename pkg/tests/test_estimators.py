import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sparsekfold import KDistancePermutation, SparseKFoldCech, SparseKFoldPersistence
from sparsekfold.estimators import pairwise_log_bottleneck
from sparsekfold.exceptions import IngestionError
from sparsekfold.kdp import kdp_simple


def test_get_set_params_and_clone():
    est = SparseKFoldCech(k=2, epsilon=0.5)
    assert est.get_params()["k"] == 2
    est.set_params(max_dim=2)
    twin = clone(est)
    assert twin.get_params() == est.get_params()


def test_permutation_estimator(rng):
    X = rng.random((30, 2))
    est = KDistancePermutation(k=2).fit(X)
    assert est.permutation_ == kdp_simple(X, 2)
    assert est.n_features_in_ == 2


def test_cech_estimator(rng):
    X = rng.random((9, 2))
    est = SparseKFoldCech(k=2, epsilon=1.0, max_dim=2).fit(X)
    assert len(est.filtration_) >= 7
    assert est.schedule_.eps_prime == 1.0 / 3.0
    D = est.persistence()
    assert 0 in D.dims


def test_cech_estimator_validation():
    with pytest.raises(IngestionError):
        SparseKFoldCech(k=3).fit([[0, 0], [1, 1]])
    with pytest.raises(IngestionError):
        SparseKFoldCech().fit([[0, 0], [0, 0]])
    with pytest.raises(NotFittedError):
        SparseKFoldCech().persistence()


def test_persistence_transformer(rng):
    clouds = [rng.random((8, 2)) for _ in range(3)]
    tr = SparseKFoldPersistence(k=2, epsilon=1.0)
    diagrams = tr.fit_transform(clouds)
    assert len(diagrams) == 3
    assert all(set(d.dims) == {0, 1} for d in diagrams)
    again = tr.transform(clouds)
    assert all(a == b for a, b in zip(diagrams, again))
    D = pairwise_log_bottleneck(diagrams)
    assert D.shape == (3, 3) and np.allclose(D, D.T) and np.all(np.diag(D) == 0)
    with pytest.raises(ValueError):
        tr.transform([rng.random((8, 3))])
    with pytest.raises(NotFittedError):
        SparseKFoldPersistence().transform(clouds)
