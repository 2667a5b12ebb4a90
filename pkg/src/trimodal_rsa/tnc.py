"""Tri-modal Neighborhood Consistency (TNC)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange, RSAError
from .metrics import spearman_rsa
from .rdm import build_rdm, vec_upper


@dataclass(frozen=True)
class TriModalResult:
    rho_ac_eeg: float
    rho_eeg_llm: float
    rho_ac_llm: float
    tnc: float
    layer: int | None = None
    sentence: str | None = None
    error: str | None = None

    @property
    def complete(self) -> bool:
        return self.error is None


def _check(rhos):
    for r in rhos:
        if not (-1.0 <= r <= 1.0):
            raise OutOfRange(f"correlation {r} outside [-1, 1]")


def tnc_from_rhos(r1: float, r2: float, r3: float) -> float:
    """Mean of the three squared pairwise correlations."""
    _check((r1, r2, r3))
    return (r1 * r1 + r2 * r2 + r3 * r3) / 3.0


def trimodal_matrix(r_ac_eeg: float, r_eeg_llm: float, r_ac_llm: float) -> np.ndarray:
    """3x3 correlation matrix ordered (acoustic, EEG, model)."""
    return np.array([
        [1.0, r_ac_eeg, r_ac_llm],
        [r_ac_eeg, 1.0, r_eeg_llm],
        [r_ac_llm, r_eeg_llm, 1.0],
    ])


def tnc_frobenius_check(r1: float, r2: float, r3: float) -> float:
    """TNC recomputed as (||R||_F^2 - 3) / 6 over the tri-modal matrix."""
    r = trimodal_matrix(r1, r2, r3)
    return (float(np.sum(r * r)) - 3.0) / 6.0


def tnc_sentence(ac, eeg, llm, layer: int | None = None, sentence: str | None = None) -> TriModalResult:
    """Three pairwise Spearman RSA values among acoustics, EEG and model states, plus TNC.

    A failing pair (degenerate RDM) yields NaN for that pair and an
    incomplete result rather than an exception.
    """
    rows = {np.shape(ac)[0], np.shape(eeg)[0], np.shape(llm)[0]}
    if len(rows) != 1:
        raise RSAError(f"modalities are not row-aligned: {sorted(rows)}")
    vecs, errors = {}, []
    for name, m in (("ac", ac), ("eeg", eeg), ("llm", llm)):
        try:
            vecs[name] = vec_upper(build_rdm(m))
        except RSAError as exc:
            errors.append(f"{name}: {exc}")

    def rho(a, b):
        if a not in vecs or b not in vecs:
            return math.nan
        try:
            return spearman_rsa(vecs[a], vecs[b]).value
        except RSAError as exc:
            errors.append(f"{a}-{b}: {exc}")
            return math.nan

    r1, r2, r3 = rho("ac", "eeg"), rho("eeg", "llm"), rho("ac", "llm")
    if errors:
        return TriModalResult(r1, r2, r3, math.nan, layer, sentence, "; ".join(errors))
    return TriModalResult(r1, r2, r3, tnc_from_rhos(r1, r2, r3), layer, sentence)
