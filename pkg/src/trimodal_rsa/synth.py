"""Monte-Carlo checks of the additive-noise and shared-confound models.

Three vectors of length ``m`` are drawn per repetition::

    ac  = z + q + e_ac
    eeg = z     + e_eeg
    llm = z + q + e_llm

with independent Gaussian z, q and noises. Pearson correlations of these
vectors are compared with the closed-form expectations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import rankdata

from .errors import AllZero
from .rng import CounterRNG

PAIRS = ("ac_eeg", "eeg_llm", "ac_llm")


@dataclass(frozen=True)
class NoiseModelCfg:
    m: int = 100_000
    sigma_z: float = 1.0
    sigma_ac: float = 1.0
    sigma_eeg: float = 1.0
    sigma_llm: float = 1.0
    sigma_q: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class TriVectors:
    ac: np.ndarray
    eeg: np.ndarray
    llm: np.ndarray


def _standard_draws(m: int, seed: int, rep: int = 0) -> np.ndarray:
    """5 x m standard normals (z, q, e_ac, e_eeg, e_llm) for one repetition."""
    rng = CounterRNG(seed).child(rep)
    return rng.normal(5 * m).reshape(5, m)


def gen_trimodal(cfg: NoiseModelCfg, rep: int = 0) -> TriVectors:
    z, q, e_ac, e_eeg, e_llm = _standard_draws(cfg.m, cfg.seed, rep)
    shared = cfg.sigma_z * z + cfg.sigma_q * q
    return TriVectors(
        ac=shared + cfg.sigma_ac * e_ac,
        eeg=cfg.sigma_z * z + cfg.sigma_eeg * e_eeg,
        llm=shared + cfg.sigma_llm * e_llm,
    )


def pearson0(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation, defined as 0 when either vector is constant."""
    a = a - a.mean()
    b = b - b.mean()
    den = math.sqrt(float(a @ a) * float(b @ b))
    return 0.0 if den == 0.0 else float(a @ b) / den


def attenuation_expected(sigma_z: float, sigma_m: float, sigma_n: float) -> float:
    """sigma_z^2 / sqrt((sigma_z^2 + sigma_m^2)(sigma_z^2 + sigma_n^2)).

    With no shared signal the expectation is 0, including the limit where a
    modality has no variance at all.
    """
    if sigma_z == 0 and sigma_m == 0 and sigma_n == 0:
        raise AllZero("all variances are zero")
    if sigma_z == 0:
        return 0.0
    vz = sigma_z * sigma_z
    return vz / math.sqrt((vz + sigma_m * sigma_m) * (vz + sigma_n * sigma_n))


def confounded_expected(cfg: NoiseModelCfg) -> dict[str, float]:
    vz, vq = cfg.sigma_z**2, cfg.sigma_q**2
    va, ve, vl = cfg.sigma_ac**2, cfg.sigma_eeg**2, cfg.sigma_llm**2

    def frac(num, d1, d2):
        den = math.sqrt(d1 * d2)
        return 0.0 if num == 0 or den == 0 else num / den

    return {
        "ac_eeg": frac(vz, vz + vq + va, vz + ve),
        "eeg_llm": frac(vz, vz + ve, vz + vq + vl),
        "ac_llm": frac(vz + vq, vz + vq + va, vz + vq + vl),
    }


def pair_correlations(v: TriVectors, rank: bool = False) -> dict[str, float]:
    ac, eeg, llm = v.ac, v.eeg, v.llm
    if rank:
        ac, eeg, llm = rankdata(ac), rankdata(eeg), rankdata(llm)
    return {"ac_eeg": pearson0(ac, eeg), "eeg_llm": pearson0(eeg, llm), "ac_llm": pearson0(ac, llm)}


@dataclass(frozen=True)
class SweepRow:
    sigma_z: float
    sigma_m: float
    sigma_n: float
    sigma_q: float
    pair: str
    expected: float
    observed_mean: float
    observed_se: float
    n_seeds: int

    @property
    def z(self) -> float:
        """Deviation from expectation in standard errors (inf if se = 0 and they differ)."""
        diff = abs(self.observed_mean - self.expected)
        if self.observed_se > 0:
            return diff / self.observed_se
        return 0.0 if diff <= 1e-12 else math.inf


def _mean_se(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return float(arr.mean()), se


DEFAULT_GRID = (0.0, 0.5, 1.0, 2.0)


def attenuation_sweep(grid=DEFAULT_GRID, m: int = 100_000, n_seeds: int = 50, seed: int = 0) -> list[SweepRow]:
    """Monte-Carlo Pearson of (z + e_m, z + e_n) over the grid^3 minus the origin.

    Each repetition draws one set of standard normals and rescales it for every
    grid cell (common random numbers); repetitions use independent streams.
    """
    cells = [(sz, sm, sn) for sz in grid for sm in grid for sn in grid if (sz, sm, sn) != (0.0, 0.0, 0.0)]
    obs = {c: [] for c in cells}
    for rep in range(n_seeds):
        z, _, e1, e2, _ = _standard_draws(m, seed, rep)
        for sz, sm, sn in cells:
            obs[(sz, sm, sn)].append(pearson0(sz * z + sm * e1, sz * z + sn * e2))
    rows = []
    for sz, sm, sn in cells:
        mean, se = _mean_se(obs[(sz, sm, sn)])
        rows.append(SweepRow(sz, sm, sn, 0.0, "m_n", attenuation_expected(sz, sm, sn), mean, se, n_seeds))
    return rows


@dataclass(frozen=True)
class DilutionRow:
    sigma_q: float
    pair: str  # one of PAIRS, or "tnc"
    expected: float
    observed_mean: float
    observed_se: float
    spearman_mean: float
    n_seeds: int


def dilution_experiment(
    sigma_qs=(0.0, 0.5, 1.0, 2.0, 4.0),
    base: NoiseModelCfg = NoiseModelCfg(m=20_000),
    n_seeds: int = 50,
    spearman: bool = False,
) -> list[DilutionRow]:
    """Pairwise Pearson means and the TNC analogue (mean of squared Pearsons) per sigma_q.

    The expected TNC analogue plugs the closed-form pair correlations into the
    mean of squares. The Spearman variant is reported only when requested.
    """
    rows = []
    for sq in sigma_qs:
        cfg = replace(base, sigma_q=sq)
        per_pair = {p: [] for p in PAIRS}
        per_pair_s = {p: [] for p in PAIRS}
        tnc_vals, tnc_s = [], []
        for rep in range(n_seeds):
            v = gen_trimodal(cfg, rep)
            r = pair_correlations(v)
            for p in PAIRS:
                per_pair[p].append(r[p])
            tnc_vals.append(sum(r[p] ** 2 for p in PAIRS) / 3.0)
            if spearman:
                rs = pair_correlations(v, rank=True)
                for p in PAIRS:
                    per_pair_s[p].append(rs[p])
                tnc_s.append(sum(rs[p] ** 2 for p in PAIRS) / 3.0)
        exp = confounded_expected(cfg)
        for p in PAIRS:
            mean, se = _mean_se(per_pair[p])
            sp = float(np.mean(per_pair_s[p])) if spearman else math.nan
            rows.append(DilutionRow(sq, p, exp[p], mean, se, sp, n_seeds))
        mean, se = _mean_se(tnc_vals)
        sp = float(np.mean(tnc_s)) if spearman else math.nan
        rows.append(DilutionRow(sq, "tnc", sum(exp[p] ** 2 for p in PAIRS) / 3.0, mean, se, sp, n_seeds))
    return rows


def dilution_direction_ok(rows: list[DilutionRow], n_se: float = 2.0) -> dict[str, bool]:
    """Check that ac-llm never drops and the EEG pairs never rise as sigma_q grows.

    A step counts as a violation only when it moves the wrong way by more
    than ``n_se`` combined standard errors.
    """
    by_pair: dict[str, list[DilutionRow]] = {}
    for r in rows:
        by_pair.setdefault(r.pair, []).append(r)
    out = {}
    for pair, direction in (("ac_llm", 1.0), ("ac_eeg", -1.0), ("eeg_llm", -1.0)):
        seq = sorted(by_pair[pair], key=lambda r: r.sigma_q)
        ok = True
        for prev, cur in zip(seq, seq[1:]):
            step = (cur.observed_mean - prev.observed_mean) * direction
            band = n_se * math.hypot(prev.observed_se, cur.observed_se)
            if step < -band:
                ok = False
        out[pair] = ok
    return out
