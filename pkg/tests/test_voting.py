from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cardiofusion.errors import LengthMismatch, NoVoters, ZeroWeightSum
from cardiofusion.models import train_gnb, train_logreg
from cardiofusion.voting import (
    VoterOutput,
    compute_weights,
    hard_vote,
    load_votes_csv,
    save_votes_csv,
    soft_vote,
)


def probabilistic(voter_id, scores, weight=1.0):
    return VoterOutput(voter_id, "probabilistic", np.asarray(scores, float), weight)


def hard(voter_id, labels, weight=1.0):
    return VoterOutput(voter_id, "hard", np.asarray(labels, float), weight)


# --- soft vote ---------------------------------------------------------------

def test_single_voter_identity():
    proba, labels = soft_vote([probabilistic("a", [0.2, 0.9])])
    assert np.allclose(proba, [0.2, 0.9])
    assert np.array_equal(labels, [0, 1])


def test_weighted_two_voter_hand_example():
    # weights (0.95, 0.776), votes (1, 0): p = 0.95 / 1.726
    voters = [hard("up", [1], 0.95), hard("down", [0], 0.776)]
    proba, labels = soft_vote(voters)
    assert proba[0] == pytest.approx(0.95 / 1.726)
    assert proba[0] == pytest.approx(0.5504, abs=1e-4)
    assert labels[0] == 1


def test_all_voters_zero():
    proba, labels = soft_vote([hard("a", [0, 0]), hard("b", [0, 0])])
    assert np.all(proba == 0.0)
    assert np.all(labels == 0)


def test_soft_vote_requires_voters():
    with pytest.raises(NoVoters):
        soft_vote([])


def test_soft_vote_zero_weight_sum_rejected():
    with pytest.raises(ZeroWeightSum):
        soft_vote([hard("a", [1], 0.0)])


def test_soft_vote_length_mismatch():
    with pytest.raises(LengthMismatch):
        soft_vote([hard("a", [1, 0]), hard("b", [1])])


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(st.floats(0, 1), st.floats(0.01, 5)),
             min_size=1, max_size=6),
    st.floats(0.1, 100),
)
def test_soft_vote_invariant_under_weight_scaling(voter_specs, factor):
    base = [probabilistic(f"v{i}", [p], w) for i, (p, w) in enumerate(voter_specs)]
    scaled = [probabilistic(f"v{i}", [p], w * factor)
              for i, (p, w) in enumerate(voter_specs)]
    p_base, l_base = soft_vote(base)
    p_scaled, l_scaled = soft_vote(scaled)
    assert p_base[0] == pytest.approx(p_scaled[0], abs=1e-9)
    assert np.array_equal(l_base, l_scaled)
    assert 0.0 <= p_base[0] <= 1.0


# --- hard vote ---------------------------------------------------------------

def test_hard_majority():
    assert hard_vote([hard("a", [1]), hard("b", [1]), hard("c", [0])])[0] == 1


def test_hard_tie_resolves_positive():
    assert hard_vote([hard("a", [1]), hard("b", [0])])[0] == 1


def test_hard_all_negative():
    voters = [hard(f"v{i}", [0]) for i in range(5)]
    assert hard_vote(voters)[0] == 0


def test_hard_thresholds_probabilistic_voters_first():
    voters = [probabilistic("a", [0.8]), probabilistic("b", [0.2]),
              probabilistic("c", [0.1])]
    assert hard_vote(voters)[0] == 0


def test_hard_vote_matches_exhaustive_majority_oracle():
    for bits in itertools.product([0, 1], repeat=3):
        voters = [hard(f"v{i}", [b]) for i, b in enumerate(bits)]
        expected = 1 if sum(bits) >= 2 else 0
        assert hard_vote(voters)[0] == expected


def test_odd_voter_count_never_ties():
    rng = np.random.default_rng(0)
    for _ in range(50):
        votes = rng.integers(0, 2, size=(5, 7))
        voters = [hard(f"v{i}", votes[i]) for i in range(5)]
        counts = votes.sum(axis=0)
        assert not np.any(counts * 2 == 5)  # 5 voters cannot tie
        assert np.array_equal(hard_vote(voters), (counts * 2 >= 5).astype(int))


# --- compute_weights -----------------------------------------------------------

@pytest.fixture(scope="module")
def fitted_pair():
    rng = np.random.default_rng(1)
    X = rng.random((120, 4))
    y = (X[:, 0] + X[:, 1] > 1.0).astype(int)
    X_val = rng.random((60, 4))
    y_val = (X_val[:, 0] + X_val[:, 1] > 1.0).astype(int)
    return [train_logreg(X, y), train_gnb(X, y)], X_val, y_val


def test_uniform_mode(fitted_pair):
    models, X_val, y_val = fitted_pair
    assert compute_weights(models, X_val, y_val, "uniform") == [1.0, 1.0]


def test_accuracy_mode_equals_validation_accuracy(fitted_pair):
    models, X_val, y_val = fitted_pair
    from cardiofusion.models import predict_labels
    weights = compute_weights(models, X_val, y_val, "accuracy")
    for weight, model in zip(weights, models):
        assert weight == pytest.approx((predict_labels(model, X_val) == y_val).mean())


def test_auc_mode_bounded(fitted_pair):
    models, X_val, y_val = fitted_pair
    for weight in compute_weights(models, X_val, y_val, "auc"):
        assert 0.0 <= weight <= 1.0


# --- CSV persistence ------------------------------------------------------------

def test_votes_csv_roundtrip(tmp_path):
    path = tmp_path / "votes.csv"
    save_votes_csv(path, [3, 1, 2], "ml_soft", [0.3, 0.9, 0.5], [0, 1, 1])
    sample_ids, voter_id, proba, labels = load_votes_csv(path)
    assert sample_ids == [1, 2, 3]          # ordered by sample id
    assert voter_id == "ml_soft"
    assert np.allclose(proba, [0.9, 0.5, 0.3])
    assert np.array_equal(labels, [1, 1, 0])
