"""JSON round trip of a conditioned surrogate.

The document carries everything needed to rebuild the model: bounds, level
count, per-level hyperparameters, noise variance, jitter settings and the
observation list. Reloading re-factorizes the kernel matrix, so predictions
agree with the original within floating-point re-factorization error.
"""

from pamfbo.mfgp.data import ObservationSet
from pamfbo.mfgp.model import MfGpModel
from pamfbo.models import ModelDocument


def to_document(model: MfGpModel) -> ModelDocument:
    return ModelDocument(
        dimension=model.dimension,
        levels=model.n_levels,
        bounds=list(zip(model.data.lower.tolist(), model.data.upper.tolist(), strict=True)),
        noise_variance=model.noise_variance,
        jitter_start=model.jitter_start,
        jitter_max=model.jitter_max,
        hyperparameters=list(model.hyper),
        observations=model.data.observations,
    )


def from_document(document: ModelDocument) -> MfGpModel:
    lower, upper = zip(*document.bounds, strict=True)
    data = ObservationSet.from_observations(document.observations, lower, upper, document.levels)
    return MfGpModel(data, document.hyperparameters, document.noise_variance, jitter_start=document.jitter_start, jitter_max=document.jitter_max)


def dump_model(model: MfGpModel) -> str:
    return to_document(model).model_dump_json(indent=2)


def load_model(text: str) -> MfGpModel:
    return from_document(ModelDocument.model_validate_json(text))
