"""End-to-end runs over a manifest: align, reduce, score, test, aggregate, export.

Each ``run_*`` function writes CSV tables plus a ``<name>.meta.json`` document
into the output directory and returns a :class:`RunReport`. CSV bodies depend
only on the inputs and the configuration; timestamps and warnings live in the
metadata document.
"""

from __future__ import annotations

import dataclasses
import datetime as _dt
import json
import logging
import math
import platform
import warnings
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy

from . import __version__
from .datamodel import Manifest, SentenceRecord, load_manifest, load_matrix, write_matrix
from .errors import MissingFeatures, RSAError, RSAWarning
from .export import heatmap_svg, write_csv, write_json
from .features import DEFAULT_BANDS, DEFAULT_FFT_WINDOWS, DEFAULT_STATS_WINDOWS, BandSpec, EnrichConfig, enriched_matrix, layer_electrode_grid
from .metrics import ALL_METRICS, Metric, compute
from .partition import AFFECT_GROUPS, DEFAULT_K, PROSODY_COLUMNS, DEFAULT_TAU_V, DEFAULT_WEIGHTS, affect_partition, group_summary, prosody_partition
from .preprocess import DEFAULT_PCA_K, flat_columns, reduce, resample_to, zscore_columns
from .rdm import build_rdm
from .rng import CounterRNG, string_key
from .significance import DEFAULT_BATCH, DEFAULT_N_PERM, perm_test
from .synth import NoiseModelCfg, attenuation_sweep, dilution_direction_ok, dilution_experiment
from .timewin import DEFAULT_WINDOWS_MS, windowed_rsa
from .tnc import tnc_sentence

log = logging.getLogger(__name__)


@dataclass
class RunConfig:
    manifest: str | None = None
    out: str = "out"
    seed: int = 0
    pca_k: int = DEFAULT_PCA_K
    use_pca: bool = True
    metrics: tuple[str, ...] = tuple(m.value for m in ALL_METRICS)
    n_perm: int = DEFAULT_N_PERM
    batch_size: int = DEFAULT_BATCH
    permute: str = "y"
    windows_ms: tuple[tuple[float, float], ...] = DEFAULT_WINDOWS_MS
    stats_windows: tuple[int, ...] = DEFAULT_STATS_WINDOWS
    fft_windows: tuple[int, ...] = DEFAULT_FFT_WINDOWS
    bands: tuple[tuple[float, float], ...] = DEFAULT_BANDS
    taper: str = "rectangular"
    tau_v: float = DEFAULT_TAU_V
    affect_weights: tuple[float, float, float] = DEFAULT_WEIGHTS
    k_clusters: int = DEFAULT_K
    layer: str = "final"  # "final", "all" or a layer index, for tnc/partition/windows/topo
    flat_electrodes: str = "drop"  # "drop" or "fail"
    workers: int = 1
    synth_m: int = 100_000
    synth_seeds: int = 50
    synth_grid: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)
    sigma_qs: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0, 4.0)

    def __post_init__(self):
        self.metrics = tuple(Metric.parse(m).value for m in self.metrics)
        self.windows_ms = tuple((float(a), float(b)) for a, b in self.windows_ms)
        self.bands = tuple((float(a), float(b)) for a, b in self.bands)
        self.stats_windows = tuple(int(w) for w in self.stats_windows)
        self.fft_windows = tuple(int(w) for w in self.fft_windows)
        self.affect_weights = tuple(float(w) for w in self.affect_weights)
        self.synth_grid = tuple(float(s) for s in self.synth_grid)
        self.sigma_qs = tuple(float(s) for s in self.sigma_qs)
        self.layer = str(self.layer)
        if self.flat_electrodes not in ("drop", "fail"):
            raise ValueError("flat_electrodes must be 'drop' or 'fail'")
        if self.layer not in ("final", "all") and not self.layer.isdigit():
            raise ValueError("layer must be 'final', 'all' or a non-negative integer")
        if self.pca_k < 1 or self.n_perm < 0 or self.workers < 1:
            raise ValueError("pca_k >= 1, n_perm >= 0 and workers >= 1 are required")

    @property
    def metric_list(self) -> list[Metric]:
        return [Metric(m) for m in self.metrics]

    @property
    def enrich(self) -> EnrichConfig:
        return EnrichConfig(self.stats_windows, self.fft_windows, BandSpec(self.bands, self.taper))

    def to_dict(self) -> dict:
        return json.loads(json.dumps(dataclasses.asdict(self)))

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class RunReport:
    outputs: list[Path] = field(default_factory=list)
    skipped: dict[str, str] = field(default_factory=dict)
    n_sentences: int = 0
    warnings: Counter = field(default_factory=Counter)
    extra: dict = field(default_factory=dict)

    @property
    def total_failure(self) -> bool:
        return self.n_sentences > 0 and len(self.skipped) == self.n_sentences


# --- per-sentence preparation ----------------------------------------------------


@dataclass
class PreparedSentence:
    record: SentenceRecord
    eeg: np.ndarray  # T_a x C', z-scored per electrode then resampled
    channels: list[str]
    layers: list[np.ndarray]  # T_a x D each
    acoustic: np.ndarray | None  # T_a x d_ac, or None

    @property
    def t_a(self) -> int:
        return self.eeg.shape[0]


def prepare_sentence(rec: SentenceRecord, cfg: RunConfig) -> PreparedSentence:
    missing = rec.missing_paths()
    if missing:
        raise RSAError(f"missing file(s): {', '.join(str(p) for p in missing)}")
    layers = [np.asarray(load_matrix(p), dtype=np.float64) for p in rec.layers]
    t_a = layers[0].shape[0]
    if any(layer.shape[0] != t_a for layer in layers):
        raise RSAError("layers disagree on the number of tokens")
    raw = np.asarray(load_matrix(rec.eeg_path), dtype=np.float64)
    channels = list(rec.channels) or [f"ch{i}" for i in range(raw.shape[1])]
    if len(channels) != raw.shape[1]:
        raise RSAError(f"{len(channels)} channel names for {raw.shape[1]} EEG columns")
    flat = flat_columns(raw)
    if flat.size:
        if cfg.flat_electrodes == "fail":
            raise RSAError(f"constant electrode(s): {[channels[i] for i in flat]}")
        warnings.warn(f"dropped {flat.size} constant electrode(s) in {rec.id}", RSAWarning)
        keep = np.setdiff1d(np.arange(raw.shape[1]), flat)
        raw = raw[:, keep]
        channels = [channels[i] for i in keep]
        if raw.shape[1] == 0:
            raise RSAError("no electrodes with variance left")
    eeg = resample_to(zscore_columns(raw), t_a)
    ac = None
    if rec.acoustic_path is not None:
        ac = resample_to(np.asarray(load_matrix(rec.acoustic_path), dtype=np.float64), t_a)
    return PreparedSentence(rec, eeg, channels, layers, ac)


def _reduce_pair(eeg, llm, cfg: RunConfig):
    """Both sides reduced to a shared number of components."""
    if not cfg.use_pca:
        return eeg, llm
    k = max(1, min(cfg.pca_k, eeg.shape[0] - 1, eeg.shape[1], llm.shape[1]))
    return reduce(eeg, k), reduce(llm, k)


def _reduce_one(m, cfg: RunConfig):
    return reduce(m, cfg.pca_k) if cfg.use_pca else m


def selected_layers(n_layers: int, cfg: RunConfig) -> list[int]:
    if cfg.layer == "all":
        return list(range(n_layers))
    if cfg.layer == "final":
        return [n_layers - 1]
    layer = int(cfg.layer)
    if layer >= n_layers:
        raise RSAError(f"layer {layer} not available (L={n_layers})")
    return [layer]


def stream_key(seed: int, sentence: str, layer: int, metric_index: int) -> int:
    return CounterRNG(seed).child(string_key(sentence), layer, metric_index).key


# --- orchestration helpers ----------------------------------------------------------


def _map_sentences(manifest: Manifest, cfg: RunConfig, fn: Callable[[SentenceRecord], object], report: RunReport):
    """Apply ``fn`` to every sentence; failures are logged and skipped. Order is manifest order."""

    def safe(rec):
        try:
            return fn(rec)
        except (RSAError, OSError, ValueError) as exc:
            log.warning("sentence %s skipped: %s", rec.id, exc)
            return exc

    recs = list(manifest.sentences)
    report.n_sentences = len(recs)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(safe, recs))
    else:
        results = [safe(r) for r in recs]
    out = []
    for rec, res in zip(recs, results):
        if isinstance(res, Exception):
            report.skipped[rec.id] = str(res)
        else:
            out.append((rec, res))
    return out


def _load(cfg: RunConfig) -> Manifest:
    if not cfg.manifest:
        raise ValueError("a manifest is required (--manifest)")
    return load_manifest(cfg.manifest, check_files=False)


def _write_meta(name: str, cfg: RunConfig, report: RunReport, started: str) -> Path:
    doc = {
        "run": name,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "versions": {"trimodal_rsa": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "started": started,
        "finished": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "n_sentences": report.n_sentences,
        "skipped": report.skipped,
        "warnings": dict(sorted(report.warnings.items())),
        "outputs": [p.name for p in report.outputs],
        **report.extra,
    }
    return write_json(Path(cfg.out) / f"{name}.meta.json", doc)


def _run(name: str, cfg: RunConfig, body: Callable[[RunReport], None]) -> RunReport:
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    report = RunReport()
    Path(cfg.out).mkdir(parents=True, exist_ok=True)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RSAWarning)
        body(report)
    for w in caught:
        if issubclass(w.category, RSAWarning):
            report.warnings[str(w.message).split(";")[0]] += 1
    report.outputs.append(_write_meta(name, cfg, report, started))
    return report


# --- score ----------------------------------------------------------------------------

SCORE_HEADER = ("sentence", "layer", "metric", "value", "p_value", "null_mean", "null_sd", "n_perm",
                "seed", "stream", "status")


def score_sentence(rec: SentenceRecord, cfg: RunConfig) -> list[tuple]:
    prep = prepare_sentence(rec, cfg)
    rows = []
    for layer, llm in enumerate(prep.layers):
        x, y = _reduce_pair(prep.eeg, llm, cfg)
        rdm_x = rdm_y = None
        if any(m.uses_rdm for m in cfg.metric_list):
            try:
                rdm_x, rdm_y = build_rdm(x), build_rdm(y)
            except RSAError:
                pass
        for metric in cfg.metric_list:
            key = stream_key(cfg.seed, rec.id, layer, list(Metric).index(metric))
            try:
                value = compute(metric, x, y, rdm_x, rdm_y).value
            except RSAError as exc:
                rows.append((rec.id, layer, metric.value, math.nan, math.nan, math.nan, math.nan, cfg.n_perm,
                             cfg.seed, f"{key:016x}", f"error: {exc}"))
                continue
            p = nm = ns = math.nan
            if cfg.n_perm > 0:
                res = perm_test(x, y, metric, cfg.n_perm, seed=key, batch_size=cfg.batch_size, permute=cfg.permute)
                p, nm, ns = res.p_value, res.null_mean, res.null_sd
            rows.append((rec.id, layer, metric.value, value, p, nm, ns, cfg.n_perm, cfg.seed, f"{key:016x}", "ok"))
    return rows


def best_layers(rows: Sequence[tuple], metrics: Sequence[str], n_layers: int):
    """Sentence-averaged curve per metric and its argmax (ties -> shallower layer)."""
    curve, best = [], []
    for metric in metrics:
        means = []
        for layer in range(n_layers):
            vals = [r[3] for r in rows if r[1] == layer and r[2] == metric and math.isfinite(r[3])]
            mean = float(np.mean(vals)) if vals else math.nan
            means.append(mean)
            curve.append((metric, layer, mean, len(vals)))
        finite = [(m, layer) for layer, m in enumerate(means) if math.isfinite(m)]
        if finite:
            top = max(m for m, _ in finite)
            layer = min(lay for m, lay in finite if m == top)
            n = sum(1 for r in rows if r[1] == layer and r[2] == metric and math.isfinite(r[3]))
            best.append((metric, layer, top, n))
        else:
            best.append((metric, None, math.nan, 0))
    return curve, best


def run_score(cfg: RunConfig) -> RunReport:
    def body(report: RunReport):
        manifest = _load(cfg)
        done = _map_sentences(manifest, cfg, lambda r: score_sentence(r, cfg), report)
        rows = [row for _, rs in done for row in rs]
        out = Path(cfg.out)
        report.outputs.append(write_csv(out / "scores.csv", SCORE_HEADER, rows))
        curve, best = best_layers(rows, cfg.metrics, manifest.n_layers)
        report.outputs.append(write_csv(out / "layer_curve.csv", ("metric", "layer", "mean", "n_sentences"), curve))
        report.outputs.append(write_csv(out / "best_layer.csv", ("metric", "best_layer", "mean", "n_sentences"), best))

    return _run("score", cfg, body)


# --- tnc --------------------------------------------------------------------------------

TNC_HEADER = ("sentence", "layer", "metric", "rho_ac_eeg", "rho_eeg_llm", "rho_ac_llm", "tnc", "complete",
              "seed", "status")


def tnc_rows(rec: SentenceRecord, cfg: RunConfig, layers: list[int] | None = None) -> list[tuple]:
    prep = prepare_sentence(rec, cfg)
    layers = selected_layers(len(prep.layers), cfg) if layers is None else layers
    if prep.acoustic is None:
        return [(rec.id, l, "TNC", math.nan, math.nan, math.nan, math.nan, False, cfg.seed, "no acoustic features")
                for l in layers]
    ac = _reduce_one(prep.acoustic, cfg)
    eeg = _reduce_one(prep.eeg, cfg)
    rows = []
    for layer in layers:
        r = tnc_sentence(ac, eeg, _reduce_one(prep.layers[layer], cfg), layer, rec.id)
        rows.append((rec.id, layer, "TNC", r.rho_ac_eeg, r.rho_eeg_llm, r.rho_ac_llm, r.tnc, r.complete, cfg.seed,
                     "ok" if r.complete else f"incomplete: {r.error}"))
    return rows


def run_tnc(cfg: RunConfig) -> RunReport:
    def body(report: RunReport):
        manifest = _load(cfg)
        done = _map_sentences(manifest, cfg, lambda r: tnc_rows(r, cfg), report)
        rows = [row for _, rs in done for row in rs]
        out = Path(cfg.out)
        report.outputs.append(write_csv(out / "tnc.csv", TNC_HEADER, rows))
        summary = []
        for layer in sorted({r[1] for r in rows}):
            vals = [r[6] for r in rows if r[1] == layer and r[7]]
            excluded = sum(1 for r in rows if r[1] == layer and not r[7])
            arr = np.asarray(vals)
            summary.append((layer, "TNC", arr.mean() if vals else math.nan, arr.std() if vals else math.nan,
                            len(vals), excluded))
        report.outputs.append(write_csv(out / "tnc_summary.csv", ("layer", "metric", "mean", "sd", "n", "n_excluded"),
                                        summary))

    return _run("tnc", cfg, body)


# --- partition ---------------------------------------------------------------------------


def run_partition(cfg: RunConfig) -> RunReport:
    """Affect and prosody groups, with TNC summarized per group.

    Raises ``MissingFeatures`` listing every sentence without affect features
    or prosody descriptors.
    """

    def body(report: RunReport):
        manifest = _load(cfg)
        missing = [s.id for s in manifest.sentences if s.affect_features is None or s.prosody_row is None]
        if missing:
            raise MissingFeatures(missing, "affect features / prosody descriptors")
        labels = affect_partition({s.id: s.affect_features for s in manifest.sentences}, cfg.tau_v,
                                  cfg.affect_weights)
        clusters, km = prosody_partition({s.id: s.prosody_row for s in manifest.sentences}, cfg.k_clusters,
                                         seed=cfg.seed)
        out = Path(cfg.out)
        report.outputs.append(write_csv(out / "affect.csv", ("sentence", "valence", "group"),
                                        [(sid, lab.valence, lab.label) for sid, lab in labels.items()]))
        cluster_of = {sid: c.cluster_id for c in clusters for sid in c.members}
        report.outputs.append(write_csv(out / "prosody.csv", ("sentence", "cluster"),
                                        [(s.id, cluster_of[s.id]) for s in manifest.sentences]))
        report.outputs.append(write_csv(
            out / "clusters.csv", ("cluster", "n", *PROSODY_COLUMNS),
            [(c.cluster_id, len(c.members), *c.centroid) for c in clusters]))
        report.extra["kmeans"] = {"wcss": km.wcss_history, "converged": km.converged, "n_iter": km.n_iter}

        done = _map_sentences(manifest, cfg, lambda r: tnc_rows(r, cfg), report)
        names = ("tnc", "rho_ac_eeg", "rho_eeg_llm", "rho_ac_llm")
        layers = sorted({row[1] for _, rows in done for row in rows})
        summary = []
        for layer in layers:
            scores = {}
            for rec, rows in done:
                for row in rows:
                    if row[1] == layer:
                        scores[rec.id] = {n: (row[6], row[3], row[4], row[5])[i] if row[7] else None
                                          for i, n in enumerate(names)}
            groups = {s.id: f"affect/{labels[s.id].label}" for s in manifest.sentences}
            gnames = [f"affect/{g}" for g in AFFECT_GROUPS]
            pgroups = {s.id: f"prosody/{cluster_of[s.id]}" for s in manifest.sentences}
            pnames = [f"prosody/{j}" for j in range(cfg.k_clusters)]
            for grouping, gn in ((groups, gnames), (pgroups, pnames)):
                for g in group_summary(grouping, scores, names, gn):
                    summary.append((g.group, layer, g.metric, g.mean, g.sd, g.n, g.n_excluded, cfg.seed))
        report.outputs.append(write_csv(out / "group_summary.csv",
                                        ("group", "layer", "metric", "mean", "sd", "n", "n_excluded", "seed"), summary))

    return _run("partition", cfg, body)


# --- windows / topo ------------------------------------------------------------------------

WINDOW_HEADER = ("sentence", "layer", "metric", "window_start_ms", "window_end_ms", "n_tokens", "rsa", "seed", "status")


def window_rows(rec: SentenceRecord, cfg: RunConfig) -> list[tuple]:
    prep = prepare_sentence(rec, cfg)
    rows = []
    for layer in selected_layers(len(prep.layers), cfg):
        x, y = _reduce_pair(prep.eeg, prep.layers[layer], cfg)
        for w in windowed_rsa(x, y, rec.duration_ms, cfg.windows_ms):
            rows.append((rec.id, layer, "SpearmanRSA", w.a_ms, w.b_ms, w.n_tokens, w.rsa, cfg.seed, w.status))
    return rows


def run_windows(cfg: RunConfig) -> RunReport:
    def body(report: RunReport):
        manifest = _load(cfg)
        done = _map_sentences(manifest, cfg, lambda r: window_rows(r, cfg), report)
        rows = [row for _, rs in done for row in rs]
        report.outputs.append(write_csv(Path(cfg.out) / "windows.csv", WINDOW_HEADER, rows))

    return _run("windows", cfg, body)


def topo_rows(rec: SentenceRecord, cfg: RunConfig):
    prep = prepare_sentence(rec, cfg)
    enrich = cfg.enrich
    reduced = [_reduce_one(layer, cfg) for layer in prep.layers]
    grid = layer_electrode_grid(prep.eeg, reduced, enrich)
    grid_rows = [(rec.id, prep.channels[c], layer, "SpearmanRSA", grid[c, layer], cfg.seed)
                 for c in range(grid.shape[0]) for layer in range(grid.shape[1])]
    win_rows = []
    for layer in selected_layers(len(prep.layers), cfg):
        for c, name in enumerate(prep.channels):
            try:
                feats = enriched_matrix(prep.eeg[:, c], enrich)
            except RSAError as exc:
                for a, b in cfg.windows_ms:
                    win_rows.append((rec.id, layer, name, "SpearmanRSA", a, b, 0, math.nan, cfg.seed, f"missing: {exc}"))
                continue
            for w in windowed_rsa(feats, reduced[layer], rec.duration_ms, cfg.windows_ms):
                win_rows.append((rec.id, layer, name, "SpearmanRSA", w.a_ms, w.b_ms, w.n_tokens, w.rsa, cfg.seed,
                                 w.status))
    return grid_rows, win_rows


def run_topo(cfg: RunConfig) -> RunReport:
    def body(report: RunReport):
        manifest = _load(cfg)
        done = _map_sentences(manifest, cfg, lambda r: topo_rows(r, cfg), report)
        grid_rows = [row for _, (g, _) in done for row in g]
        win_rows = [row for _, (_, w) in done for row in w]
        out = Path(cfg.out)
        report.outputs.append(write_csv(out / "electrode_layer_grid.csv",
                                        ("sentence", "electrode", "layer", "metric", "score", "seed"), grid_rows))
        report.outputs.append(write_csv(out / "topo_windows.csv",
                                        ("sentence", "layer", "electrode", "metric", "window_start_ms",
                                         "window_end_ms", "n_tokens", "score", "seed", "status"), win_rows))
        electrodes = list(dict.fromkeys(r[1] for r in grid_rows))
        n_layers = manifest.n_layers
        mean = np.full((len(electrodes), n_layers), math.nan)
        mean_rows = []
        for i, e in enumerate(electrodes):
            for layer in range(n_layers):
                vals = [r[4] for r in grid_rows if r[1] == e and r[2] == layer and math.isfinite(r[4])]
                if vals:
                    mean[i, layer] = float(np.mean(vals))
                mean_rows.append((e, layer, "SpearmanRSA", mean[i, layer], len(vals)))
        report.outputs.append(write_csv(out / "electrode_layer_mean.csv",
                                        ("electrode", "layer", "metric", "mean", "n_sentences"), mean_rows))
        if electrodes:
            report.outputs.append(heatmap_svg(out / "electrode_layer_heatmap.svg", mean, electrodes,
                                              [str(l) for l in range(n_layers)], "electrode x layer Spearman RSA"))

    return _run("topo", cfg, body)


# --- synth ------------------------------------------------------------------------------------

SWEEP_HEADER = ("sigma_z", "sigma_m", "sigma_n", "sigma_q", "pair", "expected", "observed_mean", "observed_se",
                "n_seeds")


def run_synth(cfg: RunConfig) -> RunReport:
    def body(report: RunReport):
        att = attenuation_sweep(cfg.synth_grid, cfg.synth_m, cfg.synth_seeds, cfg.seed)
        rows = [(r.sigma_z, r.sigma_m, r.sigma_n, r.sigma_q, r.pair, r.expected, r.observed_mean, r.observed_se,
                 r.n_seeds) for r in att]
        base = NoiseModelCfg(m=min(cfg.synth_m, 20_000), seed=cfg.seed)
        dil = dilution_experiment(cfg.sigma_qs, base, cfg.synth_seeds)
        sig = {"ac": base.sigma_ac, "eeg": base.sigma_eeg, "llm": base.sigma_llm}
        for r in dil:
            sm, sn = (sig[r.pair.split("_")[0]], sig[r.pair.split("_")[1]]) if r.pair != "tnc" else (math.nan, math.nan)
            rows.append((base.sigma_z, sm, sn, r.sigma_q, r.pair, r.expected, r.observed_mean, r.observed_se,
                         r.n_seeds))
        report.outputs.append(write_csv(Path(cfg.out) / "synth_sweep.csv", SWEEP_HEADER, rows))
        report.extra["max_abs_z_attenuation"] = max(r.z for r in att)
        report.extra["dilution_direction_ok"] = dilution_direction_ok(dil)

    return _run("synth", cfg, body)


RUNNERS = {"score": run_score, "tnc": run_tnc, "partition": run_partition, "windows": run_windows,
           "topo": run_topo, "synth": run_synth}


# --- fixtures ---------------------------------------------------------------------------------


def _standardized(m):
    return (m - m.mean(axis=0)) / m.std(axis=0)


def generate_fixtures(
    out,
    n_sentences: int = 3,
    n_layers: int = 2,
    t_a: int = 40,
    dim: int = 16,
    match_layer: int = 1,
    duration_ms: float = 1200.0,
    seed: int = 0,
) -> Path:
    """Write a synthetic manifest whose EEG equals the model states at ``match_layer``.

    The matched layer is a column-standardized random walk; other layers are
    white noise. Acoustic tables share the random walk plus noise, so TNC is
    high at the matched layer. Affect and prosody rows are random.
    Returns the manifest path.
    """
    out = Path(out)
    for sub in ("eeg", "llm", "acoustic"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    root = CounterRNG(seed)
    sentences = []
    for s in range(n_sentences):
        rng = root.child(s)
        sid = f"s{s:03d}"
        walk = _standardized(np.cumsum(rng.normal(t_a * dim).reshape(t_a, dim), axis=0))
        layer_paths = []
        for layer in range(n_layers):
            if layer == match_layer:
                m = walk
            else:
                m = rng.normal(t_a * dim).reshape(t_a, dim)
            p = out / "llm" / f"{sid}_l{layer}.rsam"
            write_matrix(p, m)
            layer_paths.append(f"llm/{p.name}")
        write_matrix(out / "eeg" / f"{sid}.rsam", walk)
        ac = walk[:, :6] + 0.3 * rng.normal(t_a * 6).reshape(t_a, 6)
        write_matrix(out / "acoustic" / f"{sid}.rsam", ac)
        sentences.append({
            "id": sid,
            "duration_ms": duration_ms,
            "eeg": {"path": f"eeg/{sid}.rsam", "channels": [f"E{c + 1}" for c in range(dim)]},
            "layers": layer_paths,
            "acoustic": f"acoustic/{sid}.rsam",
            "prosody": [round(float(v), 6) for v in rng.normal(13)],
            "affect": [round(float(v), 6) for v in rng.normal(3)],
        })
    manifest = {"dataset_id": "synthetic-fixture", "subject_id": "sub-00", "sentences": sentences}
    path = out / "manifest.json"
    write_json(path, manifest)
    return path

