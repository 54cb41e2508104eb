"""Train the from-scratch learners on the prepared data and compare test
accuracy. Uses reduced estimator counts so the demo finishes in seconds;
the CLI pipeline uses the full study configuration.

Run from the repository root:  python demos/02_train_learners.py
"""
from cardiofusion import dataset as ds
from cardiofusion.metrics import evaluate_scores
from cardiofusion.models import (
    ForestConfig, dumps, loads, predict_proba, preset, train_gbdt, train_gnb,
    train_logreg, train_mlp, train_random_forest,
)

records = ds.load_dataset("fixtures/heart_merged.csv")
X, y = ds.encode(records)
split = ds.stratified_split(X, y, seed=42)
scaler = ds.fit_minmax(split.X_train)
X_train = ds.apply_minmax(scaler, split.X_train)
X_test = ds.apply_minmax(scaler, split.X_test)
X_bal, y_bal = ds.smote(X_train, split.y_train, seed=42)

models = []
models.append(train_random_forest(
    X_bal.values, y_bal, ForestConfig(n_estimators=80, seed=42), "random_forest"))
for name in ("xgb_like", "catboost_like"):
    config = preset(name)
    config.n_estimators = 80
    models.append(train_gbdt(X_bal.values, y_bal, config, name))
models.append(train_logreg(X_bal.values, y_bal))
models.append(train_gnb(X_bal.values, y_bal))
models.append(train_mlp(X_bal.values, y_bal, epochs=60))

print(f"{'model':15s} {'accuracy':>8s} {'auc':>6s} {'f1':>6s}")
for model in models:
    proba = predict_proba(model, X_test.values)
    report = evaluate_scores(model.model_id, split.y_test, proba)
    print(f"{model.model_id:15s} {report.accuracy:8.4f} {report.auc:6.3f} "
          f"{report.f1:6.3f}")

# every model serializes to canonical JSON and round-trips bit-exactly
blob = dumps(models[0])
assert dumps(loads(blob)) == blob
print(f"\nserialized {models[0].model_id} to {len(blob)} bytes of JSON; "
      "round-trip is byte-identical")
