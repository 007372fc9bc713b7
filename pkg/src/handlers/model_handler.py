import json
import logging as log
from pathlib import Path
from typing import Optional
import numpy as np

from modules.Architecture import Architecture
from modules.BlsModel import BlsModel
from modules.CblsModel import CblsModel
from modules.Dataset import Dataset
from modules.DataFormatError import DataFormatError
from modules.RandomBasis import RandomBasis
from modules.TrainConfig import TrainConfig
from handlers.broadnet import replay_basis
from handlers.datasets import normalize

#Config
import broadlearn.config as cfg


def _matrix(A) -> list:
    return np.asarray(A, dtype=float).tolist()


def _array(data, columns: int = None) -> np.ndarray:
    A = np.array(data, dtype=float)
    if A.size == 0 and columns is not None:
        A = A.reshape(0, columns)
    return A


def basis_to_dict(basis: RandomBasis) -> dict:
    """A basis is stored as its recipe (architecture, seed, ranges, increments) plus a fingerprint."""
    return {
        "arch": basis.arch.to_dict(),
        "seed": basis.seed,
        "weight_range": list(basis.weight_range),
        "bias_range": list(basis.bias_range),
        "history": [list(step) for step in basis.history],
        "fingerprint": basis.fingerprint(),
    }


def basis_from_dict(data: dict) -> RandomBasis:
    basis = replay_basis(Architecture.from_dict(data["arch"]), data["seed"],
                         [tuple(step) for step in data["history"]],
                         data["weight_range"], data["bias_range"])
    if basis.fingerprint() != data["fingerprint"]:
        raise DataFormatError("The random basis rebuilt from the model file does not match the stored fingerprint")
    return basis


def save_model(model, path: Path, preprocessing: Optional[dict] = None):
    """
    Write a BLS or C-BLS model as versioned JSON. Floats are written with repr, so loading
    gives back bit-identical arrays.

    Args:
        model (BlsModel | CblsModel): The model.
        path (Path): The destination.
        preprocessing (dict): Normalization metadata to apply to future inputs.
    """
    document = {
        "version": cfg.MODEL_FORMAT_VERSION,
        "kind": "bls" if isinstance(model, BlsModel) else "cbls",
        "task": model.task,
        "basis": basis_to_dict(model.basis),
        "W": _matrix(model.W),
        "X": _matrix(model.X),
        "Y": _matrix(model.Y),
        "preprocessing": preprocessing,
    }
    if isinstance(model, BlsModel):
        document.update({"lambda": model.lam, "U": _matrix(model.U), "U_pinv": _matrix(model.U_pinv)})
    else:
        document.update({
            "config": model.config.to_dict(),
            "C_w": _matrix(model.C_w),
            "U_w": _matrix(model.U_w),
            "Y_w": _matrix(model.Y_w),
            "weights": _matrix(model.weights),
            "converged": model.converged,
            "n_iter": model.n_iter,
            "history": list(model.history),
        })

    with open(path, "w") as json_file:
        json.dump(document, json_file, allow_nan=False)
    log.debug(f"Model saved to {path}")


def load_model(path: Path):
    """
    Read a model written by save_model.

    Returns:
        tuple: (model, preprocessing dict or None)

    Raises:
        DataFormatError: Unreadable file, unknown version or inconsistent content.
    """
    try:
        with open(path, "r") as json_file:
            document = json.load(json_file)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"{path} is not a model file: {e}")

    if document.get("version") != cfg.MODEL_FORMAT_VERSION:
        raise DataFormatError(f"Unsupported model format version {document.get('version')!r}")
    try:
        basis = basis_from_dict(document["basis"])
        arch = basis.arch
        common = {
            "basis": basis,
            "W": _array(document["W"]),
            "task": document["task"],
            "X": _array(document["X"], arch.input_dim),
            "Y": _array(document["Y"], arch.output_dim),
        }
        if document["kind"] == "bls":
            model = BlsModel(lam=document["lambda"], U=_array(document["U"]), U_pinv=_array(document["U_pinv"]),
                             **common)
        else:
            model = CblsModel(config=TrainConfig(**document["config"]), C_w=_array(document["C_w"]),
                              U_w=_array(document["U_w"]), Y_w=_array(document["Y_w"]),
                              weights=_array(document["weights"]), converged=document["converged"],
                              n_iter=document["n_iter"], history=tuple(document["history"]), **common)
    except (KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"Inconsistent model file {path}: {e}")

    log.debug(f"Loaded {document['kind']} model with {model.L} nodes from {path}")
    return model, document.get("preprocessing")


def preprocessing_from(ds: Dataset, header: bool = False) -> dict:
    """Normalization metadata of a normalized training set, in JSON-ready form."""
    return {
        "mode": ds.mode,
        "feature_ranges": _matrix(ds.feature_ranges) if ds.feature_ranges is not None else None,
        "target_ranges": _matrix(ds.target_ranges) if ds.target_ranges is not None else None,
        "class_labels": list(ds.class_labels) if ds.class_labels is not None else None,
        "header": header,
    }


def apply_preprocessing(ds: Dataset, preprocessing: Optional[dict]) -> Dataset:
    """Normalize raw data with the ranges stored alongside a model."""
    if not preprocessing or preprocessing.get("mode") is None:
        return ds
    if preprocessing.get("class_labels") is not None and ds.class_labels is not None:
        ds = _align_labels(ds, tuple(preprocessing["class_labels"]))
    feature_ranges = _array(preprocessing["feature_ranges"])
    target_ranges = preprocessing.get("target_ranges")
    reference = Dataset(X=np.zeros((0, feature_ranges.shape[0])), Y=np.zeros((0, ds.Y.shape[1])), task=ds.task,
                        feature_ranges=feature_ranges,
                        target_ranges=_array(target_ranges) if target_ranges is not None else None,
                        mode=preprocessing["mode"])
    return normalize(ds, preprocessing["mode"], reference=reference)


def _align_labels(ds: Dataset, class_labels: tuple) -> Dataset:
    """Re-encode a classification set so that its class indices follow the training labels."""
    unknown = [label for label in ds.class_labels if label not in class_labels]
    if unknown:
        raise DataFormatError(f"Labels {unknown} were not seen in training")
    index = {label: i for i, label in enumerate(class_labels)}
    labels = np.array([index[ds.class_labels[i]] for i in ds.labels], dtype=int)
    Y = np.zeros((len(ds), len(class_labels)))
    Y[np.arange(len(ds)), labels] = 1.0
    return Dataset(ds.X, Y, ds.task, ds.feature_ranges, ds.target_ranges, class_labels, ds.mode)
