#!/usr/bin/env python3
"""Regenerates the education replay fixture (snapshots + session files).

The snapshots are produced by running each step's code with pandas, so the
CSV files are what a capture client would relay. Output is deterministic.
"""
import os
import sys

import numpy as np
import pandas as pd
from sklearn.model_selection import train_test_split

ROOT = os.path.join(os.path.dirname(__file__), "..", "..", "tests", "fixtures", "education")
SNAP = os.path.join(ROOT, "snapshots")


def make_raw(rng):
    n = 600
    df = pd.DataFrame({
        "Gender": rng.choice(["female", "male"], n),
        "EthnicGroup": rng.choice(["group A", "group B", "group C", "group D", "group E"], n,
                                  p=[0.1, 0.2, 0.35, 0.25, 0.1]),
        "ParentEducation": rng.choice(["some high school", "high school", "some college",
                                       "associate's degree", "bachelor's degree",
                                       "master's degree"], n,
                                      p=[0.15, 0.2, 0.25, 0.2, 0.12, 0.08]),
        "LunchType": rng.choice(["standard", "free/reduced"], n, p=[0.65, 0.35]),
        "TestPrepCourse": rng.choice(["none", "completed"], n, p=[0.6, 0.4]),
        "PracticeSport": rng.choice(["never", "sometimes", "regularly"], n, p=[0.2, 0.45, 0.35]),
        "SportsPracticeFrequency": rng.integers(0, 5, n),
        "NrSiblings": rng.integers(0, 6, n).astype(float),
        "WklyStudyHours": rng.choice(["< 5", "5 - 10", "> 10"], n, p=[0.3, 0.5, 0.2]),
        "MathScore": np.clip(rng.normal(66, 14, n).round(), 20, 100).astype(int),
        "ReadingScore": np.clip(rng.normal(69, 13, n).round(), 20, 100).astype(int),
        "WritingScore": np.clip(rng.normal(68, 14, n).round(), 20, 100).astype(int),
    })
    eth_missing = rng.choice(n, 37, replace=False)
    df.loc[eth_missing, "EthnicGroup"] = np.nan
    parent_missing = rng.choice(n, 29, replace=False)
    df.loc[parent_missing, "ParentEducation"] = np.nan
    sib_missing = rng.choice(n, 12, replace=False)
    df.loc[sib_missing, "NrSiblings"] = np.nan
    # Outliers removed by step 4.
    for row, scores in ((413, (100, 2, 1)), (470, (3, 100, 100))):
        df.loc[row, ["MathScore", "ReadingScore", "WritingScore"]] = scores
    return df


def snapshot(frame, name):
    out = frame.copy()
    out.insert(0, "__row_id", out.index)
    path = os.path.join(SNAP, name)
    out.to_csv(path, index=False, lineterminator="\n")
    return "snapshots/" + name


STEPS = [
    ("df", 'df = pd.read_csv("student_exam_scores.csv")'),
    ("df", "df['ParentEducation'] = df['ParentEducation'].fillna(df['ParentEducation'].mode()[0])"),
    ("df", "df['EthnicGroup'] = df['EthnicGroup'].fillna('unknown')"),
    ("df", "df = df.drop([413, 470])"),
    ("df", 'df = pd.get_dummies(df, columns=["Gender"], dtype=int)'),
    ("df", 'df["TestPrepCourse"] = df["TestPrepCourse"].map({"none": 0, "completed": 1})'),
    ("df", 'df = df.drop(columns=["PracticeSport"])'),
]

SPLIT_CODE = ('X = df.drop(columns=["WritingScore"])\n'
              'y = df["WritingScore"]\n'
              "X_train, X_test, y_train, y_test = train_test_split(X, y, test_size=0.2, random_state=42)")

TRAIN_CODE = ("from sklearn.linear_model import LinearRegression\n"
              "from sklearn.metrics import mean_squared_error, mean_absolute_error, r2_score\n"
              "reg = LinearRegression().fit(X_train, y_train)\n"
              "y_pred = reg.predict(X_test)\n"
              "# Calculate the mean squared error\n"
              "mse = mean_squared_error(y_test, y_pred)\n"
              "# Calculate the mean absolute error\n"
              "mae = mean_absolute_error(y_test, y_pred)\n"
              "r2 = r2_score(y_test, y_pred)")


def write_session(name, records):
    with open(os.path.join(ROOT, name), "w") as fh:
        fh.write("# Education walkthrough; one [step] record per captured event.\n")
        for rec in records:
            fh.write("\n[step]\n")
            fh.write("variable = %s\n" % rec["variable"])
            fh.write("cell_id = %s\n" % rec["cell_id"])
            fh.write("execution_count = %d\n" % rec["execution_count"])
            fh.write("snapshot = %s\n" % rec["snapshot"])
            for key, value in rec.get("metrics", {}).items():
                fh.write("metric %s = %r\n" % (key, value))
            fh.write("code <<<\n%s\n>>>\n" % rec["code"])


def main():
    os.makedirs(SNAP, exist_ok=True)
    rng = np.random.default_rng(20230707)
    raw = make_raw(rng)
    raw.to_csv(os.path.join(ROOT, "student_exam_scores.csv"), index=False, lineterminator="\n")

    records = []
    scope = {"pd": pd, "np": np, "train_test_split": train_test_split}
    for i, (var, code) in enumerate(STEPS, start=1):
        if i == 1:
            scope["df"] = raw.copy()
        else:
            exec(code, scope)
        records.append({"variable": var, "cell_id": "cell-%d" % i, "execution_count": i,
                        "code": code, "snapshot": snapshot(scope[var], "step%d_%s.csv" % (i, var))})

    exec(SPLIT_CODE, scope)
    split_train = {"variable": "X_train", "cell_id": "cell-8", "execution_count": 8,
                   "code": SPLIT_CODE, "snapshot": snapshot(scope["X_train"], "step8_X_train.csv")}
    split_test = {"variable": "X_test", "cell_id": "cell-8", "execution_count": 8,
                  "code": SPLIT_CODE, "snapshot": snapshot(scope["X_test"], "step8_X_test.csv")}
    records.append(split_train)
    write_session("session.txt", records)

    from sklearn.linear_model import LinearRegression
    from sklearn.metrics import mean_absolute_error, mean_squared_error, r2_score
    x_train = scope["X_train"].select_dtypes("number").fillna(0)
    x_test = scope["X_test"].select_dtypes("number").fillna(0)
    reg = LinearRegression().fit(x_train, scope["y_train"])
    pred = reg.predict(x_test)
    metrics = {"mse": round(float(mean_squared_error(scope["y_test"], pred)), 6),
               "mae": round(float(mean_absolute_error(scope["y_test"], pred)), 6),
               "r2": round(float(r2_score(scope["y_test"], pred)), 6)}
    train = {"variable": "X_train", "cell_id": "cell-9", "execution_count": 9, "code": TRAIN_CODE,
             "snapshot": split_train["snapshot"], "metrics": metrics}
    write_session("session_full.txt", records + [split_test, train])
    return 0


if __name__ == "__main__":
    sys.exit(main())
