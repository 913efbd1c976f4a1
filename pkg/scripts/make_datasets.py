"""Regenerate the bundled UCI fixture files under data/.

wine.csv          UCI Wine (178 x 13, 3 classes), via sklearn.datasets.load_wine.
breastcancer.csv  UCI Breast Cancer Wisconsin, original (699 x 9, 2 classes), via
                  the MASS ``biopsy`` table shipped in the ``rdatasets`` package.
                  The 16 missing bare-nuclei cells are filled with that column's
                  median before writing.

Requires scikit-learn, pandas and rdatasets; none of them are runtime deps.
"""
from pathlib import Path

import pandas as pd
import rdatasets
from sklearn.datasets import load_wine

OUT = Path(__file__).resolve().parents[1] / "data"


def main():
    OUT.mkdir(exist_ok=True)

    wine = load_wine(as_frame=True)
    df = wine.data.copy()
    df["class"] = wine.target.map(lambda t: f"c{t + 1}")
    df.to_csv(OUT / "wine.csv", index=False, float_format="%.6g")

    bio = rdatasets.data("MASS", "biopsy")
    cols = [f"V{i}" for i in range(1, 10)]
    feats = bio[cols].copy()
    feats["V6"] = feats["V6"].fillna(feats["V6"].median())
    feats = feats.astype(int)
    feats.columns = [
        "clump_thickness", "cell_size_uniformity", "cell_shape_uniformity",
        "marginal_adhesion", "epithelial_cell_size", "bare_nuclei",
        "bland_chromatin", "normal_nucleoli", "mitoses",
    ]
    feats["class"] = bio["class"].values
    feats.to_csv(OUT / "breastcancer.csv", index=False)


if __name__ == "__main__":
    main()
