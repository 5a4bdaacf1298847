"""Least-action block diagonalization of Hermitian generators."""

import logging
from typing import Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from ..errors import DegenerateFitError, ValidationError

logger = logging.getLogger(__name__)


def least_action_block_diagonalize(
    h: np.ndarray, block_labels: Sequence[int]
) -> Tuple[np.ndarray, float]:
    """
    Rotate h into block-diagonal form with the smallest possible rotation.

    Eigenvectors are assigned to blocks by maximal weight, and the rotation
    is T = X X_bd^dag (X_bd X_bd^dag)^(-1/2), with X the eigenvector matrix
    and X_bd its block-diagonal part.

    Args:
        h: Hermitian generator
        block_labels: Block index of each basis state

    Returns:
        Tuple of (T^dag h T, spectral norm of T - 1)
    """
    h = np.asarray(h, dtype=complex)
    labels = np.asarray(block_labels, dtype=int)
    if labels.shape != (h.shape[0],):
        raise ValidationError("One block label is required per basis state")
    _, vectors = scipy.linalg.eigh(0.5 * (h + h.conj().T))

    blocks = np.unique(labels)
    slot_block = np.concatenate([np.full(np.sum(labels == b), b) for b in blocks])
    weight = np.stack([np.sum(np.abs(vectors[labels == b]) ** 2, axis=0) for b in blocks], axis=1)
    block_column = np.searchsorted(blocks, slot_block)
    eigen_index, slot_index = linear_sum_assignment(-weight[:, block_column])
    assigned = np.empty(len(labels), dtype=int)
    assigned[eigen_index] = slot_block[slot_index]

    x_bd = np.where(labels[:, None] == assigned[None, :], vectors, 0.0)
    overlap = x_bd @ x_bd.conj().T
    evals, evecs = np.linalg.eigh(overlap)
    if np.min(evals) < 1e-8:
        raise DegenerateFitError("Eigenvectors cannot be assigned to blocks")
    inv_sqrt = (evecs / np.sqrt(evals)) @ evecs.conj().T
    rotation = vectors @ x_bd.conj().T @ inv_sqrt
    h_bd = rotation.conj().T @ h @ rotation
    dressing = float(np.linalg.norm(rotation - np.eye(len(labels)), 2))
    logger.debug("Block diagonalization dressing %.3e", dressing)
    return 0.5 * (h_bd + h_bd.conj().T), dressing
