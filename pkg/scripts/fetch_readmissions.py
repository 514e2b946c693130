"""Build a readmissions score file for the optional Table-style integration check.

Downloads the UCI "Diabetes 130-US hospitals" extract, keeps the first
encounter per patient, drops discharges to hospice or death, fits a
logistic regression with 5-fold stratified cross-validation and writes the
out-of-fold risk scores as ``score,label``.

    python3 scripts/fetch_readmissions.py readmissions.csv
    RESOLVING_POWER_READMISSIONS_SCORES=readmissions.csv pytest tests/test_acceptance.py

Needs pandas and scikit-learn, which the package itself does not use.
"""

import argparse
import io
import zipfile
from urllib.request import urlopen

import numpy as np
import pandas as pd
from sklearn.compose import ColumnTransformer
from sklearn.linear_model import LogisticRegression
from sklearn.model_selection import StratifiedKFold, cross_val_predict
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import OneHotEncoder, StandardScaler

from resolving_power.io import write_scores
from resolving_power.scores import LabeledScores, auroc

URL = "https://archive.ics.uci.edu/static/public/296/diabetes+130-us+hospitals+for+years+1999-2008.zip"
# discharge dispositions: expired or hospice
EXCLUDED_DISPOSITIONS = {11, 13, 14, 19, 20, 21}
DROPPED = ["encounter_id", "patient_nbr", "readmitted", "weight", "payer_code"]


def load(source: str | None) -> pd.DataFrame:
    if source:
        return pd.read_csv(source, na_values="?", low_memory=False)
    with urlopen(URL) as resp:
        archive = zipfile.ZipFile(io.BytesIO(resp.read()))
    name = next(n for n in archive.namelist() if n.endswith("diabetic_data.csv"))
    return pd.read_csv(archive.open(name), na_values="?", low_memory=False)


def restrict(df: pd.DataFrame) -> pd.DataFrame:
    df = df.sort_values("encounter_id").drop_duplicates("patient_nbr", keep="first")
    return df[~df["discharge_disposition_id"].isin(EXCLUDED_DISPOSITIONS)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("out", help="output score file")
    ap.add_argument("--source", help="local diabetic_data.csv instead of downloading")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    df = restrict(load(args.source))
    y = (df["readmitted"] == "<30").astype(int).to_numpy()
    X = df.drop(columns=DROPPED)
    numeric = X.select_dtypes("number").columns.difference(
        ["admission_type_id", "discharge_disposition_id", "admission_source_id"])
    categorical = X.columns.difference(numeric)
    X[categorical] = X[categorical].astype(str)
    model = make_pipeline(
        ColumnTransformer([
            ("num", StandardScaler(), list(numeric)),
            ("cat", OneHotEncoder(handle_unknown="ignore", min_frequency=20),
             list(categorical)),
        ]),
        LogisticRegression(max_iter=2000),
    )
    folds = StratifiedKFold(5, shuffle=True, random_state=args.seed)
    scores = cross_val_predict(model, X, y, cv=folds, method="decision_function")
    data = LabeledScores(np.asarray(scores, dtype=float), y)
    write_scores(args.out, data)
    print(f"{len(data)} records, {data.n_pos} readmissions, AUROC {auroc(data):.4f}")


if __name__ == "__main__":
    main()
