"""Walk through the data pipeline: load the patient CSV, encode it into
the 18-column design matrix, split 60/20/20 with stratification, scale
to the training range, and balance the classes with synthetic samples.

Run from the repository root:  python demos/01_data_pipeline.py
"""
import numpy as np

from cardiofusion import dataset as ds

records = ds.load_dataset("fixtures/heart_merged.csv")
print(f"loaded {len(records)} patient records")
print(f"first record: {records[0]}")

X, y = ds.encode(records)
print(f"\nencoded design matrix: {X.n_rows} x {X.n_cols}")
print("columns:", ", ".join(X.column_names))
print(f"positive rate: {y.mean():.3f}")

split = ds.stratified_split(X, y, ratios=(0.6, 0.2, 0.2), seed=42)
for name, idx in (("train", split.idx_train), ("validation", split.idx_val),
                  ("test", split.idx_test)):
    print(f"{name:10s} {idx.size:4d} rows, positive rate {y[idx].mean():.3f}")

scaler = ds.fit_minmax(split.X_train)
X_train = ds.apply_minmax(scaler, split.X_train)
X_test = ds.apply_minmax(scaler, split.X_test)
print(f"\nscaled train range: [{X_train.values.min():.3f}, {X_train.values.max():.3f}]")
print(f"scaled test  range: [{X_test.values.min():.3f}, {X_test.values.max():.3f}]"
      "  (test may leave [0,1]; never clipped)")

X_bal, y_bal = ds.smote(X_train, split.y_train, k=5, seed=42)
added = X_bal.n_rows - X_train.n_rows
print(f"\nsmote added {added} synthetic minority rows "
      f"-> class counts {np.bincount(y_bal).tolist()}")
