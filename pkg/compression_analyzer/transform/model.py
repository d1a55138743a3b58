"""
L2 regularized logistic regression without a bias term,
p(Y = 1 | W, x) = sigmoid(W . x), trained with L-BFGS-B.
"""
from collections import namedtuple
import hashlib
import json
import logging
import os

import numpy as np
import scipy.optimize as optimize
from scipy.special import expit
from sklearn.metrics import roc_auc_score

import compression_analyzer.extract.constants as constants
import compression_analyzer.transform.features as features
import compression_analyzer.utils.io_utils as io_utils
from compression_analyzer.utils.errors import DegenerateDataError, InvalidInputError

CrossValidation = namedtuple('CrossValidation', ['best_C', 'mean_auc', 'fold_aucs'])


class AcceptabilityModel:

    def __init__(self, space, weights, C, metadata=None):
        """
        :param FeatureSpace space: Feature space, one weight per name
        :param np.array weights: Weights in space order
        :param float C: Inverse regularization constant
        :param dict metadata: Training metadata (iterations, objective, ...)
        """
        self.space = space
        self.weights = np.asarray(weights, dtype=float)
        self.C = C
        self.metadata = {} if metadata is None else dict(metadata)

    @property
    def weights_by_name(self):
        return {name: float(w) for name, w in zip(self.space.names, self.weights)}

    def decision(self, vectors, tally=None):
        X = features.vectorize_all(self.space, vectors, tally)
        return X @ self.weights


def objective_and_gradient(w, X, y, C):
    """
    Sum of log losses plus (1 / C) * 0.5 * ||w||^2.

    :param np.array w: Weights
    :param csr_matrix X: Examples x features
    :param np.array y: Labels in {0, 1}
    :param float C: Inverse regularization constant
    :return tuple: (objective value, gradient)
    """
    signs = 2. * y - 1.
    margins = signs * (X @ w)
    value = np.logaddexp(0., -margins).sum() + 0.5 / C * np.dot(w, w)
    gradient = X.T @ (-signs * expit(-margins)) + w / C
    return value, np.asarray(gradient).ravel()


def _check_labels(labels):
    labels = np.asarray(labels, dtype=float)
    if labels.size == 0:
        raise InvalidInputError("no training examples")
    if not np.all((labels == 0) | (labels == 1)):
        raise InvalidInputError("labels must be 0 or 1")
    if np.unique(labels).size < 2:
        raise DegenerateDataError(
            "training labels are all {}, both classes are needed".format(int(labels[0])))
    return labels


def train(vectors, labels, C=None, space=None, tolerance=None, max_iter=None):
    """
    Fit the weights by minimizing the regularized log loss.

    :param list vectors: Feature vectors (dicts)
    :param list labels: Binary labels
    :param float C: Inverse regularization constant
    :param FeatureSpace/None space: Feature space, built from vectors if None
    :param float tolerance: Gradient norm tolerance
    :param int max_iter: Max optimizer iterations
    :return AcceptabilityModel model: Trained model
    """
    C = constants.C if C is None else C
    tolerance = constants.TOLERANCE if tolerance is None else tolerance
    max_iter = constants.MAX_ITER if max_iter is None else max_iter
    if C <= 0:
        raise InvalidInputError("C must be positive, not {}".format(C))
    labels = _check_labels(labels)
    if len(vectors) != len(labels):
        raise InvalidInputError("{} vectors but {} labels".format(len(vectors), len(labels)))
    if space is None:
        space = features.FeatureSpace.from_vectors(vectors)
    X = features.vectorize_all(space, vectors)
    if not np.all(np.isfinite(X.data)):
        raise InvalidInputError("feature values must be finite")

    logger = logging.getLogger(constants.LOG_NAME)
    w0 = np.zeros(len(space))
    if len(space) == 0:
        value, _ = objective_and_gradient(w0, X, labels, C)
        metadata = {'iterations': 0, 'objective': float(value),
                    'gradient_norm': 0., 'converged': True}
        logger.info("No features, all predictions are 0.5")
    else:
        result = optimize.minimize(
            objective_and_gradient,
            w0,
            args=(X, labels, C),
            jac=True,
            method='L-BFGS-B',
            options={'gtol': tolerance, 'ftol': 1e-15, 'maxiter': max_iter},
        )
        w0 = result.x
        gradient_norm = float(np.linalg.norm(result.jac))
        metadata = {
            'iterations': int(result.nit),
            'objective': float(result.fun),
            'gradient_norm': gradient_norm,
            'converged': bool(result.success),
        }
        logger.info("Trained C={} on {} examples, {} features: {} iterations, "
                    "objective {:.6f}, gradient norm {:.2e}".format(
                        C, X.shape[0], X.shape[1], result.nit, result.fun, gradient_norm))
        if not result.success:
            logger.warning("Optimizer didn't converge: {}".format(result.message))
    metadata.update({
        'C': C,
        'tolerance': tolerance,
        'nbr_examples': int(X.shape[0]),
        'feature_space_hash': space.hash,
    })
    return AcceptabilityModel(space, w0, C, metadata)


def predict(model, vector):
    """
    :param AcceptabilityModel model: Trained model
    :param dict vector: Feature vector, unseen names contribute nothing
    :return float: p(Y = 1 | W, x)
    """
    return float(predict_all(model, [vector])[0])


def predict_all(model, vectors, tally=None):
    """
    :param AcceptabilityModel model: Trained model
    :param list vectors: Feature vectors
    :param Counter/None tally: Counts of dropped names
    :return np.array: Probabilities
    """
    return expit(model.decision(vectors, tally))


def fold_assignment(pair_ids, folds, seed):
    """
    Hash based folds: all judgments of a pair land in the same fold.

    :param list pair_ids: Pair id per example
    :param int folds: Number of folds
    :param int seed: Seed mixed into the hash
    :return np.array: Fold index per example
    """
    return np.array([
        int(hashlib.md5('{}:{}'.format(seed, pair_id).encode('utf-8')).hexdigest(), 16) % folds
        for pair_id in pair_ids
    ])


def cross_validate(vectors, labels, pair_ids, folds=None, grid=None, seed=None):
    """
    Pick C by mean ROC AUC over folds. Ties go to the smaller C.
    Folds whose train or test part holds a single class are skipped.

    :param list vectors: Feature vectors
    :param list labels: Binary labels
    :param list pair_ids: Pair id per example
    :param int folds: Number of folds
    :param iterable grid: C values
    :param int seed: Fold seed
    :return CrossValidation: best C, {C: mean AUC}, {C: [fold AUCs]}
    """
    folds = constants.NBR_FOLDS if folds is None else folds
    grid = constants.C_GRID if grid is None else grid
    seed = constants.SEED if seed is None else seed
    grid = sorted(grid)
    if len(grid) == 0:
        raise InvalidInputError("C grid is empty")
    labels = _check_labels(labels)
    assignment = fold_assignment(pair_ids, folds, seed)
    logger = logging.getLogger(constants.LOG_NAME)

    splits = []
    for k in range(folds):
        test = np.flatnonzero(assignment == k)
        train_idx = np.flatnonzero(assignment != k)
        if np.unique(labels[test]).size < 2 or np.unique(labels[train_idx]).size < 2:
            logger.warning("Fold {} skipped, a single class in train or test".format(k))
            continue
        splits.append((train_idx, test))

    mean_auc = {}
    fold_aucs = {}
    for C in grid:
        fold_aucs[C] = []
        for train_idx, test in splits:
            model = train([vectors[i] for i in train_idx], labels[train_idx], C=C)
            probs = predict_all(model, [vectors[i] for i in test])
            fold_aucs[C].append(float(roc_auc_score(labels[test], probs)))
        mean_auc[C] = float(np.mean(fold_aucs[C])) if fold_aucs[C] else float('nan')
        logger.info("C={}: mean AUC {:.4f} over {} folds".format(C, mean_auc[C], len(splits)))

    best_C = None
    for C in grid:
        if np.isnan(mean_auc[C]):
            continue
        if best_C is None or mean_auc[C] > mean_auc[best_C]:
            best_C = C
    if best_C is None:
        raise DegenerateDataError("no cross validation fold had both classes")
    return CrossValidation(best_C=best_C, mean_auc=mean_auc, fold_aucs=fold_aucs)


def save_model(model, path, **extra_metadata):
    """
    JSON with sorted {feature name: weight} and a metadata block.

    :param AcceptabilityModel model: Model
    :param str path: Output path
    :param extra_metadata: Added to the metadata block, e.g. seed, config_hash
    """
    metadata = dict(model.metadata)
    metadata.update(extra_metadata)
    metadata['feature_names'] = list(model.space.names)
    io_utils.write_json({'weights': model.weights_by_name, 'metadata': metadata}, path)


def load_model(path, expected_hash=None):
    """
    A feature space hash that doesn't match the weights (or expected_hash)
    is logged as a warning.

    :param str path: JSON written by save_model
    :param str/None expected_hash: Hash of the feature space in use
    :return AcceptabilityModel model: Model
    """
    if not os.path.isfile(path):
        raise IOError("Model file not found: {}".format(path))
    with open(path, encoding='utf-8') as json_file:
        payload = json.load(json_file)
    if 'weights' not in payload or 'metadata' not in payload:
        raise InvalidInputError("{}: model file needs 'weights' and 'metadata'".format(path))
    weights = payload['weights']
    metadata = payload['metadata']
    space = features.FeatureSpace(weights)
    model = AcceptabilityModel(
        space,
        [weights[name] for name in space.names],
        metadata.get('C', constants.C),
        metadata,
    )
    logger = logging.getLogger(constants.LOG_NAME)
    stored_hash = metadata.get('feature_space_hash')
    for other in (stored_hash, expected_hash):
        if other is not None and other != space.hash:
            logger.warning("Feature space hash mismatch for {}: {} != {}".format(
                path, other, space.hash))
    return model
