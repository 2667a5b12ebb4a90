"""Command-line entry point.

Exit codes: 0 success, 1 total failure (no sentence could be processed, or
required per-sentence inputs are absent), 2 configuration / manifest error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .datamodel import load_manifest, load_matrix
from .errors import InconsistentLayers, MissingFeatures, MissingFile, ParseError, RSAError
from .export import write_csv
from .metrics import ALL_METRICS
from .pipeline import RUNNERS, RunConfig, generate_fixtures
from .significance import perm_test

log = logging.getLogger("trimodal_rsa")

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2


def _windows(text: str):
    out = []
    for part in text.split(","):
        a, b = part.split(":")
        out.append((float(a), float(b)))
    return tuple(out)


def _ints(text: str):
    return tuple(int(v) for v in text.split(","))


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--manifest", help="manifest JSON document")
    g.add_argument("--out", help="output directory (default: out)")
    g.add_argument("--seed", type=int, help="master seed (default: 0)")
    g.add_argument("--pca-k", type=int, help="principal components kept per modality (default: 20)")
    g.add_argument("--no-pca", action="store_true", help="score the aligned matrices without PCA")
    g.add_argument("--n-perm", type=int, help="permutations per test, 0 disables testing (default: 500)")
    g.add_argument("--metrics", help="comma-separated subset of: " + ",".join(m.value for m in ALL_METRICS))
    g.add_argument("--layer", help="layer for tnc/partition/windows/topo: final, all or an index")
    g.add_argument("--windows", type=_windows, help="ms windows as a:b,a:b,... (default 0:250,250:500,500:750,750:1000)")
    g.add_argument("--stats-windows", type=_ints, help="time-domain windows (default 3,5,9)")
    g.add_argument("--fft-windows", type=_ints, help="FFT windows (default 8,16,32)")
    g.add_argument("--taper", choices=("rectangular", "hann"))
    g.add_argument("--tau-v", type=float, help="valence threshold (default 0.45)")
    g.add_argument("--k-clusters", type=int, help="prosody clusters (default 4)")
    g.add_argument("--workers", type=int, help="parallel sentence workers (default 1)")
    g.add_argument("--synth-m", type=int, help="vector length for Monte-Carlo runs (default 100000)")
    g.add_argument("--synth-seeds", type=int, help="Monte-Carlo repetitions (default 50)")
    g.add_argument("--config", help="JSON file of RunConfig fields; overrides command-line flags")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


_FLAG_FIELDS = {
    "manifest": "manifest", "out": "out", "seed": "seed", "pca_k": "pca_k", "n_perm": "n_perm", "layer": "layer",
    "windows": "windows_ms", "stats_windows": "stats_windows", "fft_windows": "fft_windows", "taper": "taper",
    "tau_v": "tau_v", "k_clusters": "k_clusters", "workers": "workers", "synth_m": "synth_m",
    "synth_seeds": "synth_seeds",
}


def build_config(args: argparse.Namespace) -> RunConfig:
    doc = {}
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            doc[name] = value
    if getattr(args, "no_pca", False):
        doc["use_pca"] = False
    if getattr(args, "metrics", None):
        doc["metrics"] = tuple(m for m in args.metrics.split(",") if m)
    if getattr(args, "config", None):
        overrides = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(overrides, dict):
            raise ValueError("config file must hold a JSON object")
        doc.update(overrides)
    return RunConfig.from_dict(doc)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="trimodal-rsa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "score": "8 metrics per sentence x layer, permutation p-values, best-layer table",
        "tnc": "tri-modal neighborhood consistency per sentence and layer",
        "partition": "affect and prosody groups with per-group TNC summaries",
        "windows": "Spearman RSA in millisecond windows on the token axis",
        "topo": "electrode x layer and electrode x window similarity exports",
        "synth": "Monte-Carlo validation of the noise and confound models",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    pt = sub.add_parser("permtest", parents=[common], help="permutation test between two matrix files")
    pt.add_argument("--x", required=True, help="fixed matrix file")
    pt.add_argument("--y", required=True, help="matrix file whose rows are shuffled")
    pt.add_argument("--metric", default="SpearmanRSA")
    pt.add_argument("--batch-size", type=int, default=16384)
    sub.add_parser("validate-manifest", parents=[common], help="parse and check a manifest")
    gf = sub.add_parser("gen-fixtures", parents=[common], help="write a synthetic manifest and matrices")
    gf.add_argument("--n-sentences", type=int, default=3)
    gf.add_argument("--n-layers", type=int, default=2)
    gf.add_argument("--t-a", type=int, default=40)
    gf.add_argument("--dim", type=int, default=16)
    gf.add_argument("--match-layer", type=int, default=1)
    gf.add_argument("--duration-ms", type=float, default=1200.0)
    return parser


def _permtest(args, cfg: RunConfig) -> int:
    x = np.asarray(load_matrix(args.x), dtype=np.float64)
    y = np.asarray(load_matrix(args.y), dtype=np.float64)
    n = cfg.n_perm if cfg.n_perm > 0 else 500
    res = perm_test(x, y, args.metric, n, seed=cfg.seed, batch_size=args.batch_size)
    print(json.dumps(res.as_dict(), sort_keys=True))
    if args.out:
        write_csv(Path(cfg.out) / "permtest.csv", ("metric", "observed", "n_perm", "null_mean", "null_sd", "p_value", "seed"),
                  [(args.metric, res.observed, res.n_perm, res.null_mean, res.null_sd, res.p_value, res.seed)])
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    try:
        cfg = build_config(args)
    except (ValueError, OSError, TypeError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG

    try:
        if args.command == "gen-fixtures":
            path = generate_fixtures(cfg.out, args.n_sentences, args.n_layers, args.t_a, args.dim, args.match_layer,
                                     args.duration_ms, cfg.seed)
            print(path)
            return EXIT_OK
        if args.command == "validate-manifest":
            if not cfg.manifest:
                raise ValueError("--manifest is required")
            m = load_manifest(cfg.manifest)
            print(f"ok: dataset={m.dataset_id!r} sentences={len(m.sentences)} layers={m.n_layers}")
            return EXIT_OK
        if args.command == "permtest":
            return _permtest(args, cfg)
        report = RUNNERS[args.command](cfg)
    except MissingFeatures as exc:
        log.error("%s", exc)
        return EXIT_FAILURE
    except (ParseError, MissingFile, InconsistentLayers) as exc:
        log.error("manifest error: %s", exc)
        return EXIT_CONFIG
    except (RSAError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_FAILURE
    except ValueError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG

    for sid, why in report.skipped.items():
        log.warning("skipped %s: %s", sid, why)
    for p in report.outputs:
        print(p)
    return EXIT_FAILURE if report.total_failure else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
