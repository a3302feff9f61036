"""Command-line orchestration: synthesize, link, evaluate from a JSON config.

Every command writes a manifest with the fully resolved configuration;
feeding that manifest back through --config reproduces the run's outputs
byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .autoencoder import AutoencoderHyper
from .data import Dataset, DataError, dataset_to_csv, load_csv, write_schema
from .evaluation import CONDITION_ORDER, evaluate_conditions
from .figures import export_projection_2d, projection_to_csv, write_projection_svg
from .linkage import (
    DEFAULT_K,
    DEFAULT_R,
    link_detailed,
    linked_to_csv,
    neighbors_to_csv,
    random_link_detailed,
)
from .synth import SyntheticPairConfig, synthesize_disjoint_pair

REDUCER_CHOICES = ("feature_importance", "pca", "autoencoder", "random")
THREADS_ENV = "DISJOINT_LINK_THREADS"


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def _expect(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"{path}: {msg}")


def _as_int(value, path: str) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool), path, "must be an integer")
    return value


def _as_num(value, path: str) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool), path, "must be a number")
    return float(value)


def resolve_config(raw: dict, base_dir: Path) -> dict:
    """Validate a config document and fill defaults; error messages carry the
    offending field path."""
    _expect(isinstance(raw, dict), "config", "must be a JSON object")
    if set(raw) == {"command", "config"}:  # a manifest round-trips as a config
        raw = raw["config"]
    cfg: dict = {}

    inputs = raw.get("inputs")
    _expect(isinstance(inputs, dict), "inputs", "must be an object")
    has_files = "files" in inputs
    has_synth = "synthetic" in inputs
    _expect(has_files != has_synth, "inputs", "needs exactly one of 'files' or 'synthetic'")

    if has_synth:
        s = inputs["synthetic"]
        _expect(isinstance(s, dict), "inputs.synthetic", "must be an object")
        out = {}
        for name in ("latent_dim", "n1", "n2", "k1", "k2", "seed"):
            _expect(name in s, f"inputs.synthetic.{name}", "is required")
            out[name] = _as_int(s[name], f"inputs.synthetic.{name}")
        for name in ("noise_sigma", "positive_rate"):
            _expect(name in s, f"inputs.synthetic.{name}", "is required")
            out[name] = _as_num(s[name], f"inputs.synthetic.{name}")
        _expect(out["latent_dim"] >= 1, "inputs.synthetic.latent_dim", "must be >= 1")
        _expect(
            out["latent_dim"] <= min(out["k1"], out["k2"]),
            "inputs.synthetic.latent_dim",
            "must be <= min(k1, k2)",
        )
        _expect(out["noise_sigma"] >= 0, "inputs.synthetic.noise_sigma", "must be >= 0")
        _expect(0 < out["positive_rate"] < 1, "inputs.synthetic.positive_rate", "must be in (0, 1)")
        _expect(out["n1"] >= 2 and out["n2"] >= 2, "inputs.synthetic.n1", "sample counts must be >= 2")
        _expect(out["seed"] >= 0, "inputs.synthetic.seed", "must be >= 0")
        cfg["inputs"] = {"synthetic": out}
    else:
        f = inputs["files"]
        _expect(isinstance(f, dict), "inputs.files", "must be an object")
        out = {}
        for side in ("d1", "d2"):
            _expect(side in f and isinstance(f[side], dict), f"inputs.files.{side}", "is required")
            entry = f[side]
            _expect(isinstance(entry.get("path"), str), f"inputs.files.{side}.path", "must be a string")
            _expect(
                isinstance(entry.get("label_column"), str),
                f"inputs.files.{side}.label_column",
                "must be a string",
            )
            path = Path(entry["path"])
            if not path.is_absolute():
                path = base_dir / path
            _expect(path.is_file(), f"inputs.files.{side}.path", f"not a readable file: {path}")
            out[side] = {"path": str(path), "label_column": entry["label_column"]}
        cfg["inputs"] = {"files": out}

    reducer = raw.get("reducer", "autoencoder")
    _expect(reducer in REDUCER_CHOICES, "reducer", f"must be one of {list(REDUCER_CHOICES)}")
    cfg["reducer"] = reducer

    reducers = raw.get("reducers", ["feature_importance", "pca", "autoencoder"])
    _expect(isinstance(reducers, list) and reducers, "reducers", "must be a non-empty list")
    for i, name in enumerate(reducers):
        _expect(
            name in ("feature_importance", "pca", "autoencoder"),
            f"reducers[{i}]",
            "must be feature_importance, pca or autoencoder",
        )
    cfg["reducers"] = list(dict.fromkeys(reducers))

    cfg["R"] = _as_int(raw.get("R", DEFAULT_R), "R")
    _expect(cfg["R"] >= 1, "R", "must be >= 1")
    cfg["k"] = _as_int(raw.get("k", DEFAULT_K), "k")
    _expect(cfg["k"] >= 1, "k", "must be >= 1")
    cfg["folds"] = _as_int(raw.get("folds", 5), "folds")
    _expect(cfg["folds"] >= 2, "folds", "must be >= 2")
    cfg["seed"] = _as_int(raw.get("seed", 0), "seed")

    seeds = raw.get("seeds", [0])
    _expect(isinstance(seeds, list) and seeds, "seeds", "must be a non-empty list")
    cfg["seeds"] = [_as_int(s, f"seeds[{i}]") for i, s in enumerate(seeds)]

    ae = raw.get("autoencoder", {})
    _expect(isinstance(ae, dict), "autoencoder", "must be an object")
    hidden = ae.get("hidden_dims", [32])
    _expect(isinstance(hidden, list), "autoencoder.hidden_dims", "must be a list")
    cfg["autoencoder"] = {
        "hidden_dims": [_as_int(h, f"autoencoder.hidden_dims[{i}]") for i, h in enumerate(hidden)],
        "epochs": _as_int(ae.get("epochs", 200), "autoencoder.epochs"),
        "batch_size": _as_int(ae.get("batch_size", 32), "autoencoder.batch_size"),
        "learning_rate": _as_num(ae.get("learning_rate", 0.01), "autoencoder.learning_rate"),
    }
    _expect(cfg["autoencoder"]["epochs"] >= 1, "autoencoder.epochs", "must be >= 1")
    _expect(cfg["autoencoder"]["batch_size"] >= 1, "autoencoder.batch_size", "must be >= 1")
    _expect(cfg["autoencoder"]["learning_rate"] > 0, "autoencoder.learning_rate", "must be positive")

    out_dir = raw.get("output_dir", "out")
    _expect(isinstance(out_dir, str) and out_dir, "output_dir", "must be a non-empty string")
    cfg["output_dir"] = out_dir
    return cfg


def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON: {exc}") from exc
    return resolve_config(raw, path.parent.resolve())


def _ae_hyper(cfg: dict, seed: int) -> AutoencoderHyper:
    ae = cfg["autoencoder"]
    return AutoencoderHyper(
        hidden_dims=tuple(ae["hidden_dims"]),
        epochs=ae["epochs"],
        batch_size=ae["batch_size"],
        learning_rate=ae["learning_rate"],
        seed=seed,
    )


def _load_pair(cfg: dict) -> tuple[Dataset, Dataset]:
    inputs = cfg["inputs"]
    if "synthetic" in inputs:
        return synthesize_disjoint_pair(SyntheticPairConfig(**inputs["synthetic"]))
    files = inputs["files"]
    d1 = load_csv(files["d1"]["path"], files["d1"]["label_column"])
    d2 = load_csv(files["d2"]["path"], files["d2"]["label_column"])
    return d1, d2


def _write_manifest(out_dir: Path, command: str, cfg: dict) -> None:
    doc = {"command": command, "config": cfg}
    (out_dir / "manifest.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _out_dir(cfg: dict, override: str | None) -> Path:
    out = Path(override) if override else Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    cfg["output_dir"] = str(out)
    return out


def cmd_synth(cfg: dict, out_override: str | None = None) -> Path:
    if "synthetic" not in cfg["inputs"]:
        raise ConfigError("inputs.synthetic: required by the synth command")
    out = _out_dir(cfg, out_override)
    d1, d2 = _load_pair(cfg)
    dataset_to_csv(d1, out / "D1.csv")
    dataset_to_csv(d2, out / "D2.csv")
    write_schema(d1.schema, out / "D1.schema.json")
    write_schema(d2.schema, out / "D2.schema.json")
    _write_manifest(out, "synth", cfg)
    return out

def cmd_link(cfg: dict, out_override: str | None = None) -> Path:
    out = _out_dir(cfg, out_override)
    d1, d2 = _load_pair(cfg)
    if cfg["reducer"] == "random":
        d12, d21, nb12, _ = random_link_detailed(d1, d2, k=cfg["k"], seed=cfg["seed"])
        payload = {"kind": "random", "k": cfg["k"], "seed": cfg["seed"]}
        linked_to_csv(d12, out / "D12.csv")
        linked_to_csv(d21, out / "D21.csv")
        neighbors_to_csv(nb12, out / "neighbors.csv")
    else:
        res = link_detailed(
            d1, d2, cfg["reducer"],
            k=cfg["k"], r=cfg["R"], ae_hyper=_ae_hyper(cfg, cfg["seed"]), seed=cfg["seed"],
        )
        payload = res.reducer_payload
        linked_to_csv(res.d12, out / "D12.csv")
        linked_to_csv(res.d21, out / "D21.csv")
        neighbors_to_csv(res.neighbors_12, out / "neighbors.csv")
    (out / "reducer.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _write_manifest(out, "link", cfg)
    return out


def cmd_evaluate(cfg: dict, out_override: str | None = None) -> Path:
    out = _out_dir(cfg, out_override)
    d1, d2 = _load_pair(cfg)
    conditions = ["unlinked", "random", *cfg["reducers"]]
    report = evaluate_conditions(
        d1, d2, conditions,
        folds=cfg["folds"], seeds=cfg["seeds"],
        k=cfg["k"], r=cfg["R"], ae_hyper=_ae_hyper(cfg, 0),
    )
    (out / "report.json").write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (out / "table.txt").write_text(report.to_table_text(), encoding="utf-8")

    before = export_projection_2d(d1)
    projection_to_csv(before, out / "before.csv")
    write_projection_svg(before, out / "before.svg", title=f"{d1.id} before linkage")

    linked_conditions = [c for c in cfg["reducers"] if c in report.conditions]
    best = max(
        linked_conditions,
        key=lambda c: (report.conditions[c].mean, -CONDITION_ORDER.index(c)),
    )
    res = link_detailed(
        d1, d2, best, k=cfg["k"], r=cfg["R"], ae_hyper=_ae_hyper(cfg, cfg["seed"]), seed=cfg["seed"]
    )
    after = export_projection_2d(res.d12)
    projection_to_csv(after, out / "after.csv")
    write_projection_svg(after, out / "after.svg", title=f"{d1.id} after {best} linkage")
    _write_manifest(out, "evaluate", cfg)
    return out


def _apply_thread_cap() -> None:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}: must be an integer, got {raw!r}")
    if n < 0:
        raise ConfigError(f"{THREADS_ENV}: must be >= 0")
    if n > 0:
        try:
            import numba

            numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
        except ImportError:  # numpy fallback is single-threaded already
            pass


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="disjoint-link",
        description="Link disjoint tabular datasets and measure the prediction lift.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("synth", "generate a synthetic disjoint dataset pair"),
        ("link", "link two datasets and write D12/D21"),
        ("evaluate", "cross-validated AUROC comparison of linkage conditions"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a JSON config or manifest")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
    args = parser.parse_args(argv)

    handlers = {"synth": cmd_synth, "link": cmd_link, "evaluate": cmd_evaluate}
    try:
        _apply_thread_cap()
        cfg = load_config(args.config)
        out = handlers[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"error: [config] {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: [{args.command}] {exc}", file=sys.stderr)
        return 1
    print(f"{args.command}: outputs written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
