"""Summaries of persisted run records.

Every number in a :class:`Report` is computed from the records alone, so
summarizing the same records file twice yields byte-identical output.
"""
import csv
import io
import json
from pathlib import Path

import numpy as np

from ..stats import box_summary, mann_whitney_u, mean_sd


class Report:
    def __init__(self, data):
        self.data = data

    @property
    def variants(self):
        return self.data["variants"]

    def to_json(self):
        return json.dumps(self.data, indent=2, sort_keys=True) + "\n"

    def csv_files(self):
        """Delimited outputs keyed by file name."""
        out = {}
        summary_cols = [
            "variant", "n", "single_record", "accuracy_mean", "accuracy_sd", "precision_mean",
            "recall_mean", "f1_mean", "features_mean", "features_sd", "fitness_mean", "fitness_sd",
        ]
        out["summary.csv"] = _csv(summary_cols, [
            [name] + [s[c] for c in summary_cols[1:]] for name, s in self.variants.items()
        ])
        out["runs.csv"] = _csv(
            ["variant", "seed", "fold", "accuracy", "precision", "recall", "f1",
             "selected_count", "best_fitness", "best_mask"],
            [[name, r["seed"], r["fold"], r["accuracy"], r["precision"], r["recall"], r["f1"],
              r["selected_count"], r["best_fitness"], r["best_mask"]]
             for name, s in self.variants.items() for r in s["runs"]],
        )
        out["pairwise.csv"] = _csv(
            ["a", "b", "alternative", "u_statistic", "p_value", "method"],
            [[p["a"], p["b"], p["alternative"], p["u_statistic"], p["p_value"], p["method"]]
             for p in self.data["pairwise"]],
        )
        box_rows = []
        for name, s in self.variants.items():
            for metric in ("features", "accuracy"):
                b = s[f"{metric}_box"]
                box_rows.append([name, metric, b["min"], b["q1"], b["median"], b["q3"], b["max"]])
        out["box.csv"] = _csv(["variant", "metric", "min", "q1", "median", "q3", "max"], box_rows)
        names = list(self.variants)
        traces = [self.variants[n]["mean_trace"] for n in names]
        length = max(len(t) for t in traces)
        out["convergence.csv"] = _csv(
            ["iteration"] + names,
            [[i + 1] + [t[i] if i < len(t) else "" for t in traces] for i in range(length)],
        )
        return out

    def to_table(self):
        lines = [f"fingerprint {self.data['fingerprint']}", ""]
        header = f"{'variant':<10}{'n':>4}{'acc %':>9}{'sd':>7}{'f1 %':>9}{'feat':>9}{'sd':>7}{'fitness':>10}"
        lines += [header, "-" * len(header)]
        for name, s in self.variants.items():
            flag = "*" if s["single_record"] else " "
            lines.append(
                f"{name:<10}{s['n']:>3}{flag}{100 * s['accuracy_mean']:>9.2f}{100 * s['accuracy_sd']:>7.2f}"
                f"{100 * s['f1_mean']:>9.2f}{s['features_mean']:>9.2f}{s['features_sd']:>7.2f}"
                f"{s['fitness_mean']:>10.5f}"
            )
        if any(s["single_record"] for s in self.variants.values()):
            lines.append("* n=1: standard deviations reported as 0")
        lines += ["", "selected features (min / q1 / median / q3 / max)"]
        for name, s in self.variants.items():
            b = s["features_box"]
            lines.append(f"  {name:<10}{b['min']:g} / {b['q1']:g} / {b['median']:g} / {b['q3']:g} / {b['max']:g}")
        if self.data["pairwise"]:
            lines += ["", "Mann-Whitney U on test accuracy (H1: a > b)"]
            for p in self.data["pairwise"]:
                if p["p_value"] is None:
                    lines.append(f"  {p['a']:>8} > {p['b']:<8} n/a ({p['method']})")
                else:
                    lines.append(
                        f"  {p['a']:>8} > {p['b']:<8} U={p['u_statistic']:g}  p={p['p_value']:.5f}  ({p['method']})"
                    )
        return "\n".join(lines) + "\n"

    def render(self, fmt):
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.csv_files()["summary.csv"]
        return self.to_table()

    def write(self, out_dir):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(self.to_table(), encoding="utf-8")
        (out / "summary.json").write_text(self.to_json(), encoding="utf-8")
        for name, text in self.csv_files().items():
            (out / name).write_text(text, encoding="utf-8")


def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def summarize(records, alternative="greater"):
    """Per-variant means, sample SDs, box summaries and mean convergence
    traces, plus Mann-Whitney tests on test accuracy for every ordered pair of
    variants."""
    if not records:
        raise ValueError("no records to summarize")
    fingerprints = sorted({r.fingerprint for r in records})
    by_variant = {}
    for r in records:
        by_variant.setdefault(r.variant, []).append(r)

    variants = {}
    for name, recs in by_variant.items():
        recs = sorted(recs, key=lambda r: (r.seed, r.fold))
        acc = [r.result.test_metrics.accuracy for r in recs]
        feats = [r.result.selected_count for r in recs]
        fits = [r.result.best_fitness for r in recs]
        acc_mean, acc_sd = mean_sd(acc)
        feat_mean, feat_sd = mean_sd(feats)
        fit_mean, fit_sd = mean_sd(fits)
        traces = [r.result.fitness_trace for r in recs]
        length = min(len(t) for t in traces)
        variants[name] = {
            "n": len(recs),
            "single_record": len(recs) == 1,
            "accuracy_mean": acc_mean,
            "accuracy_sd": acc_sd,
            "precision_mean": mean_sd([r.result.test_metrics.precision for r in recs])[0],
            "recall_mean": mean_sd([r.result.test_metrics.recall for r in recs])[0],
            "f1_mean": mean_sd([r.result.test_metrics.f1 for r in recs])[0],
            "features_mean": feat_mean,
            "features_sd": feat_sd,
            "fitness_mean": fit_mean,
            "fitness_sd": fit_sd,
            "features_box": box_summary(feats).as_dict(),
            "accuracy_box": box_summary(acc).as_dict(),
            "mean_trace": [float(v) for v in np.mean([t[:length] for t in traces], axis=0)],
            "runs": [
                {
                    "seed": r.seed,
                    "fold": r.fold,
                    "accuracy": r.result.test_metrics.accuracy,
                    "precision": r.result.test_metrics.precision,
                    "recall": r.result.test_metrics.recall,
                    "f1": r.result.test_metrics.f1,
                    "selected_count": r.result.selected_count,
                    "best_fitness": r.result.best_fitness,
                    "best_mask": "".join("1" if b else "0" for b in r.result.best_mask),
                }
                for r in recs
            ],
        }

    pairwise = []
    for a in variants:
        for b in variants:
            if a == b:
                continue
            xa = [r["accuracy"] for r in variants[a]["runs"]]
            xb = [r["accuracy"] for r in variants[b]["runs"]]
            entry = {"a": a, "b": b, "alternative": alternative}
            if len(xa) < 2 or len(xb) < 2:
                entry.update(u_statistic=None, p_value=None, method="insufficient_samples")
            else:
                rep = mann_whitney_u(xa, xb, alternative)
                entry.update(u_statistic=rep.u_statistic, p_value=rep.p_value, method=rep.method)
            pairwise.append(entry)

    return Report({
        "fingerprint": fingerprints[0] if len(fingerprints) == 1 else fingerprints,
        "variants": variants,
        "pairwise": pairwise,
    })
