"""Experiment orchestration: one cell per (variant, seed, fold).

Finished cells are appended to ``records.jsonl`` in the output directory, one
JSON object per line with sorted keys. Wall-clock durations go to the
``timings.jsonl`` sidecar so the records file is byte-identical across
repeated runs. Re-running a config with the same fingerprint skips cells that
already have a record.
"""
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..dataset import apply_normalizer, fit_normalizer, holdout_indices, load_delimited, stratified_kfold
from ..errors import RecordsError
from ..optimizer import RunResult, run
from ..rng import derive_seed

RECORDS_FILE = "records.jsonl"
TIMINGS_FILE = "timings.jsonl"
CONFIG_FILE = "config.json"


@dataclass
class RunRecord:
    fingerprint: str
    variant: str
    seed: int
    fold: int
    result: RunResult
    duration_s: float = None

    @property
    def key(self):
        return (self.variant, self.seed, self.fold)

    def to_json(self):
        payload = {
            "fingerprint": self.fingerprint,
            "variant": self.variant,
            "seed": self.seed,
            "fold": self.fold,
            "result": self.result.as_dict(),
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line):
        d = json.loads(line)
        return cls(d["fingerprint"], d["variant"], d["seed"], d["fold"], RunResult.from_dict(d["result"]))


def load_records(path):
    """Read a records file (or an output directory containing one)."""
    path = Path(path)
    if path.is_dir():
        path = path / RECORDS_FILE
    if not path.is_file():
        raise RecordsError(f"no records file at {path}")
    records = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(RunRecord.from_json(line))
            except (ValueError, KeyError, TypeError) as exc:
                raise RecordsError(f"{path}:{lineno}: malformed record ({exc})") from None
    timings = path.with_name(TIMINGS_FILE)
    if timings.is_file():
        durations = {}
        for line in timings.read_text(encoding="utf-8").splitlines():
            if line.strip():
                t = json.loads(line)
                durations[(t["fingerprint"], t["variant"], t["seed"], t["fold"])] = t["duration_s"]
        for r in records:
            r.duration_s = durations.get((r.fingerprint,) + r.key)
    return records


def file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def plan_folds(data, protocol, seed):
    """``[(fold_id, train_idx, test_idx), ...]`` for one seed."""
    if protocol.kind == "kfold":
        plan = stratified_kfold(data, protocol.folds, seed)
        return [(f, tr, te) for f, (tr, te) in enumerate(plan.folds)]
    train_idx, test_idx = holdout_indices(data, protocol.test_fraction, seed)
    return [(0, train_idx, test_idx)]


def _run_cell(task):
    config, data, fingerprint, variant, seed, fold, train_idx, test_idx = task
    start = time.perf_counter()
    train, test = data.subset(train_idx), data.subset(test_idx)
    stats = fit_normalizer(train)
    train, test = apply_normalizer(train, stats), apply_normalizer(test, stats)
    result = run(
        variant, train, test, config.swarm, config.knn, config.altruism, config.adaptive,
        seed=derive_seed(fingerprint, variant, seed, fold),
        split_seed=derive_seed(fingerprint, "validation", seed, fold),
        positive_class=config.positive_class,
    )
    return RunRecord(fingerprint, variant, seed, fold, result, time.perf_counter() - start)


def run_experiment(config, out_dir=None, workers=1, progress=None):
    """Run every missing cell of ``config`` and return the records for all
    planned cells, in plan order (seed, fold, variant)."""
    label = -1 if config.dataset.label_column is None else config.dataset.label_column
    data = load_delimited(config.dataset.path, label, config.dataset.has_header)
    fingerprint = config.fingerprint(file_digest(config.dataset.path))

    out = Path(out_dir if out_dir is not None else config.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    records_path = out / RECORDS_FILE
    done = {}
    if records_path.is_file():
        for r in load_records(records_path):
            if r.fingerprint != fingerprint:
                raise RecordsError(
                    f"{records_path} holds records for fingerprint {r.fingerprint}, "
                    f"this config is {fingerprint}; choose another output directory"
                )
            done[r.key] = r
    (out / CONFIG_FILE).write_text(
        json.dumps({"fingerprint": fingerprint, "config": config.as_dict()}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    planned, tasks = [], []
    for seed in config.seeds:
        for fold, train_idx, test_idx in plan_folds(data, config.protocol, seed):
            for variant in config.variants:
                planned.append((variant, seed, fold))
                if (variant, seed, fold) not in done:
                    tasks.append((config, data, fingerprint, variant, seed, fold, train_idx, test_idx))

    with records_path.open("a", encoding="utf-8") as rec_fh, \
            (out / TIMINGS_FILE).open("a", encoding="utf-8") as time_fh:
        for record in _execute(tasks, workers):
            rec_fh.write(record.to_json() + "\n")
            rec_fh.flush()
            time_fh.write(json.dumps({
                "fingerprint": fingerprint, "variant": record.variant, "seed": record.seed,
                "fold": record.fold, "duration_s": round(record.duration_s, 6),
            }, sort_keys=True) + "\n")
            time_fh.flush()
            done[record.key] = record
            if progress is not None:
                progress(record)
    return [done[key] for key in planned]


def _execute(tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            yield _run_cell(task)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map yields in submission order, so the file order ignores worker count
        yield from pool.map(_run_cell, tasks)
