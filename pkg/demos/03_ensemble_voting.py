"""Combine the five tree learners by validation-AUC-weighted soft voting
and by hard majority, and compare against the strongest single model.

Run from the repository root:  python demos/03_ensemble_voting.py
"""
from cardiofusion import dataset as ds
from cardiofusion.metrics import evaluate_scores
from cardiofusion.models import (
    ForestConfig, predict_proba, preset, train_gbdt, train_random_forest,
)
from cardiofusion.voting import VoterOutput, compute_weights, hard_vote, soft_vote

records = ds.load_dataset("fixtures/heart_merged.csv")
X, y = ds.encode(records)
split = ds.stratified_split(X, y, seed=42)
scaler = ds.fit_minmax(split.X_train)
X_bal, y_bal = ds.smote(ds.apply_minmax(scaler, split.X_train), split.y_train,
                        seed=42)
X_val = ds.apply_minmax(scaler, split.X_val)
X_test = ds.apply_minmax(scaler, split.X_test)

names = ["random_forest", "xgb_like", "lgbm_like", "catboost_like", "gbm_like"]
models = [train_random_forest(X_bal.values, y_bal,
                              ForestConfig(n_estimators=100, seed=42), names[0])]
for name in names[1:]:
    config = preset(name)
    config.n_estimators = 100
    models.append(train_gbdt(X_bal.values, y_bal, config, name))

weights = compute_weights(models, X_val.values, split.y_val, mode="auc")
print("validation-AUC weights:")
for model, weight in zip(models, weights):
    print(f"  {model.model_id:15s} {weight:.4f}")

voters = [VoterOutput(m.model_id, "probabilistic",
                      predict_proba(m, X_test.values), w)
          for m, w in zip(models, weights)]

best_single = 0.0
for voter in voters:
    report = evaluate_scores(voter.voter_id, split.y_test, voter.scores)
    best_single = max(best_single, report.accuracy)
    print(f"{voter.voter_id:15s} test accuracy {report.accuracy:.4f}")

proba, labels = soft_vote(voters)
soft_report = evaluate_scores("soft_weighted", split.y_test, proba)
hard_labels = hard_vote(voters)
hard_report = evaluate_scores("hard_majority", split.y_test,
                              hard_labels.astype(float))
print(f"\nbest single      {best_single:.4f}")
print(f"soft weighted    {soft_report.accuracy:.4f}  (AUC {soft_report.auc:.3f})")
print(f"hard majority    {hard_report.accuracy:.4f}")
