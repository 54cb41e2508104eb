"""Dataset ingestion, encoding, splitting, scaling and oversampling.

The expected CSV layout is a single header row

    Age,Sex,ChestPainType,RestingBP,Cholesterol,FastingBS,RestingECG,
    MaxHR,ExerciseAngina,Oldpeak,ST_Slope,HeartDisease

followed by one row per patient. All operations here are pure given
(input, seed) and never mutate their arguments.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateClass,
    EmptyFile,
    EmptyMatrix,
    MissingColumn,
    ShapeMismatch,
    UnparseableValue,
)

CSV_COLUMNS = (
    "Age", "Sex", "ChestPainType", "RestingBP", "Cholesterol", "FastingBS",
    "RestingECG", "MaxHR", "ExerciseAngina", "Oldpeak", "ST_Slope", "HeartDisease",
)

SEX_VALUES = ("M", "F")
CHEST_PAIN_VALUES = ("TA", "ATA", "NAP", "ASY")
RESTING_ECG_VALUES = ("Normal", "ST", "LVH")
EXERCISE_ANGINA_VALUES = ("Y", "N")
ST_SLOPE_VALUES = ("Up", "Flat", "Down")

# Observed range in the source data, not a hard constraint: values outside
# are kept but flagged with a warning.
MAX_HR_OBSERVED_RANGE = (60.0, 202.0)

#: Column order of the encoded design matrix (18 columns). One-hot groups
#: expand in place of their categorical column, in the declared value order.
FEATURE_COLUMNS = (
    "Age",
    "Sex",
    "ChestPainType=TA", "ChestPainType=ATA", "ChestPainType=NAP", "ChestPainType=ASY",
    "RestingBP",
    "Cholesterol",
    "FastingBS",
    "RestingECG=Normal", "RestingECG=ST", "RestingECG=LVH",
    "MaxHR",
    "ExerciseAngina",
    "Oldpeak",
    "ST_Slope=Up", "ST_Slope=Flat", "ST_Slope=Down",
)


@dataclass(frozen=True)
class PatientRecord:
    age: int
    sex: str
    chest_pain_type: str
    resting_bp: float
    cholesterol: float
    fasting_bs: int
    resting_ecg: str
    max_hr: float
    exercise_angina: str
    oldpeak: float
    st_slope: str
    heart_disease: int


@dataclass
class FeatureMatrix:
    """Row-major design matrix plus its column metadata."""

    values: np.ndarray
    column_names: tuple[str, ...] = FEATURE_COLUMNS

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]


@dataclass
class DatasetSplit:
    """Stratified train/validation/test partition of an encoded dataset.

    Index arrays refer to row positions in the full matrix the split was
    built from; their multiset union is exactly the full index set.
    """

    X_train: FeatureMatrix
    y_train: np.ndarray
    X_val: FeatureMatrix
    y_val: np.ndarray
    X_test: FeatureMatrix
    y_test: np.ndarray
    idx_train: np.ndarray
    idx_val: np.ndarray
    idx_test: np.ndarray
    seed: int = 42


@dataclass
class Scaler:
    """Per-column min/max learned from training rows only."""

    min_: np.ndarray
    max_: np.ndarray
    column_names: tuple[str, ...] = FEATURE_COLUMNS


def _parse_int(raw: str, row: int, column: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise UnparseableValue(row, column, raw, "expected an integer") from None


def _parse_float(raw: str, row: int, column: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise UnparseableValue(row, column, raw, "expected a number") from None
    if not np.isfinite(value):
        raise UnparseableValue(row, column, raw, "expected a finite number")
    return value


def _parse_enum(raw: str, allowed: tuple[str, ...], row: int, column: str) -> str:
    if raw not in allowed:
        raise UnparseableValue(row, column, raw, f"expected one of {', '.join(allowed)}")
    return raw


def _parse_enum_int(raw: str, allowed: tuple[int, ...], row: int, column: str) -> int:
    value = _parse_int(raw, row, column)
    if value not in allowed:
        raise UnparseableValue(row, column, raw, f"expected one of {allowed}")
    return value


def load_dataset(path) -> list[PatientRecord]:
    """Read the patient CSV and return validated records.

    Raises MissingColumn when the header deviates from the 12-column
    schema, EmptyFile when there are no data rows, and UnparseableValue
    (naming row and column) when a cell fails validation.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: no header row") from None
        header = tuple(h.strip() for h in header)
        if header != CSV_COLUMNS:
            missing = [c for c in CSV_COLUMNS if c not in header]
            if missing:
                raise MissingColumn(f"{path}: header lacks columns {missing}")
            raise MissingColumn(
                f"{path}: header order must be {','.join(CSV_COLUMNS)}, got {','.join(header)}"
            )

        records: list[PatientRecord] = []
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(CSV_COLUMNS):
                raise UnparseableValue(lineno, "<row>", ",".join(row), "wrong field count")
            cells = [c.strip() for c in row]
            record = PatientRecord(
                age=_parse_int(cells[0], lineno, "Age"),
                sex=_parse_enum(cells[1], SEX_VALUES, lineno, "Sex"),
                chest_pain_type=_parse_enum(cells[2], CHEST_PAIN_VALUES, lineno, "ChestPainType"),
                resting_bp=_parse_float(cells[3], lineno, "RestingBP"),
                cholesterol=_parse_float(cells[4], lineno, "Cholesterol"),
                fasting_bs=_parse_enum_int(cells[5], (0, 1), lineno, "FastingBS"),
                resting_ecg=_parse_enum(cells[6], RESTING_ECG_VALUES, lineno, "RestingECG"),
                max_hr=_parse_float(cells[7], lineno, "MaxHR"),
                exercise_angina=_parse_enum(cells[8], EXERCISE_ANGINA_VALUES, lineno, "ExerciseAngina"),
                oldpeak=_parse_float(cells[9], lineno, "Oldpeak"),
                st_slope=_parse_enum(cells[10], ST_SLOPE_VALUES, lineno, "ST_Slope"),
                heart_disease=_parse_enum_int(cells[11], (0, 1), lineno, "HeartDisease"),
            )
            lo, hi = MAX_HR_OBSERVED_RANGE
            if not lo <= record.max_hr <= hi:
                warnings.warn(
                    f"row {lineno}: MaxHR {record.max_hr} outside observed range "
                    f"[{lo:g}, {hi:g}]; keeping the row",
                    stacklevel=2,
                )
            records.append(record)

    if not records:
        raise EmptyFile(f"{path}: header only, no data rows")
    return records


def _one_hot(value: str, ordered: tuple[str, ...]) -> list[float]:
    return [1.0 if value == v else 0.0 for v in ordered]


def encode(records: list[PatientRecord]) -> tuple[FeatureMatrix, np.ndarray]:
    """Encode records into the fixed 18-column design matrix plus labels.

    Binary fields map {M, Y, 1} to 1 and {F, N, 0} to 0; the three
    multi-valued categoricals expand one-hot in their declared value
    order; continuous fields are copied unchanged.
    """
    if not records:
        raise EmptyMatrix("cannot encode an empty record list")
    rows = []
    labels = []
    for r in records:
        row = [float(r.age), 1.0 if r.sex == "M" else 0.0]
        row += _one_hot(r.chest_pain_type, CHEST_PAIN_VALUES)
        row += [r.resting_bp, r.cholesterol, float(r.fasting_bs)]
        row += _one_hot(r.resting_ecg, RESTING_ECG_VALUES)
        row += [r.max_hr, 1.0 if r.exercise_angina == "Y" else 0.0, r.oldpeak]
        row += _one_hot(r.st_slope, ST_SLOPE_VALUES)
        rows.append(row)
        labels.append(r.heart_disease)
    X = np.asarray(rows, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    assert X.shape[1] == len(FEATURE_COLUMNS)
    return FeatureMatrix(X), y


def _decode_one_hot(row: np.ndarray, names: tuple[str, ...], prefix: str) -> str:
    cols = [i for i, n in enumerate(names) if n.startswith(prefix + "=")]
    hot = [i for i in cols if row[i] == 1.0]
    if len(hot) != 1:
        raise ValueError(f"{prefix}: expected exactly one active indicator")
    return names[hot[0]].split("=", 1)[1]


def decode(X: FeatureMatrix, y: np.ndarray) -> list[PatientRecord]:
    """Inverse of :func:`encode` for unscaled matrices."""
    names = X.column_names
    col = {n: i for i, n in enumerate(names)}
    records = []
    for row, label in zip(X.values, y):
        records.append(PatientRecord(
            age=int(row[col["Age"]]),
            sex="M" if row[col["Sex"]] == 1.0 else "F",
            chest_pain_type=_decode_one_hot(row, names, "ChestPainType"),
            resting_bp=float(row[col["RestingBP"]]),
            cholesterol=float(row[col["Cholesterol"]]),
            fasting_bs=int(row[col["FastingBS"]]),
            resting_ecg=_decode_one_hot(row, names, "RestingECG"),
            max_hr=float(row[col["MaxHR"]]),
            exercise_angina="Y" if row[col["ExerciseAngina"]] == 1.0 else "N",
            oldpeak=float(row[col["Oldpeak"]]),
            st_slope=_decode_one_hot(row, names, "ST_Slope"),
            heart_disease=int(label),
        ))
    return records


def _allocate_counts(n: int, ratios: tuple[float, float, float]) -> list[int]:
    # Largest-remainder rounding so the three counts always sum to n.
    raw = [n * r for r in ratios]
    counts = [int(np.floor(v)) for v in raw]
    remainder = n - sum(counts)
    order = sorted(range(3), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:remainder]:
        counts[i] += 1
    return counts


def stratified_split(
    X: FeatureMatrix,
    y: np.ndarray,
    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
    seed: int = 42,
) -> DatasetSplit:
    """Partition rows into train/validation/test preserving class ratios.

    Deterministic for a fixed seed. Per class, split counts are within one
    sample of the exact ratio; the three index sets partition the input.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {ratios}")
    y = np.asarray(y)
    classes, counts = np.unique(y, return_counts=True)
    if classes.size < 2:
        raise DegenerateClass("both classes must be present to stratify")
    if counts.min() < 3:
        raise DegenerateClass(
            f"class {classes[counts.argmin()]} has {counts.min()} members; need at least 3"
        )

    rng = np.random.default_rng(seed)
    parts: list[list[np.ndarray]] = [[], [], []]
    for cls in classes:
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(idx.size)]
        n_train, n_val, n_test = _allocate_counts(idx.size, ratios)
        parts[0].append(idx[:n_train])
        parts[1].append(idx[n_train:n_train + n_val])
        parts[2].append(idx[n_train + n_val:])

    idx_train, idx_val, idx_test = (np.sort(np.concatenate(p)) for p in parts)

    def take(idx: np.ndarray) -> tuple[FeatureMatrix, np.ndarray]:
        return FeatureMatrix(X.values[idx].copy(), X.column_names), y[idx].copy()

    X_train, y_train = take(idx_train)
    X_val, y_val = take(idx_val)
    X_test, y_test = take(idx_test)
    return DatasetSplit(
        X_train, y_train, X_val, y_val, X_test, y_test,
        idx_train, idx_val, idx_test, seed=seed,
    )


def fit_minmax(train: FeatureMatrix) -> Scaler:
    """Learn per-column min/max from training rows only."""
    if train.n_rows == 0:
        raise EmptyMatrix("cannot fit a scaler on zero rows")
    return Scaler(
        min_=train.values.min(axis=0),
        max_=train.values.max(axis=0),
        column_names=train.column_names,
    )


def apply_minmax(scaler: Scaler, X: FeatureMatrix) -> FeatureMatrix:
    """Affine-map columns onto the training [0, 1] range.

    Constant training columns map to 0 for every input. Values outside
    the training range land outside [0, 1] and are not clipped.
    """
    if X.n_rows == 0:
        raise EmptyMatrix("cannot scale zero rows")
    if X.n_cols != scaler.min_.size:
        raise ShapeMismatch(
            f"column count {X.n_cols} does not match scaler ({scaler.min_.size})"
        )
    span = scaler.max_ - scaler.min_
    scale = np.where(span > 0, 1.0 / np.where(span > 0, span, 1.0), 0.0)
    values = (X.values - scaler.min_) * scale
    return FeatureMatrix(values, X.column_names)


def smote(
    X: FeatureMatrix,
    y: np.ndarray,
    k: int = 5,
    seed: int = 42,
) -> tuple[FeatureMatrix, np.ndarray]:
    """Oversample the minority class until both class counts are equal.

    Each synthetic point is x_i + u * (x_nn - x_i) with u drawn uniformly
    from [0, 1) and x_nn one of the k nearest minority neighbours of x_i
    under Euclidean distance. Original rows are returned unmodified as a
    prefix, synthetic rows appended after. Deterministic per seed.
    """
    y = np.asarray(y)
    classes, counts = np.unique(y, return_counts=True)
    if classes.size != 2:
        raise DegenerateClass(f"need exactly 2 classes, got {classes.tolist()}")
    minority = classes[counts.argmin()]
    n_min, n_maj = counts.min(), counts.max()
    deficit = int(n_maj - n_min)
    if deficit == 0:
        return FeatureMatrix(X.values.copy(), X.column_names), y.copy()
    if n_min < 2:
        raise DegenerateClass(f"minority class has {n_min} sample(s); need at least 2")

    minority_rows = X.values[y == minority]
    k_eff = min(k, int(n_min) - 1)
    # Pairwise distances among minority rows; self excluded from neighbours.
    diff = minority_rows[:, None, :] - minority_rows[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    neighbours = np.argsort(dist, axis=1, kind="stable")[:, :k_eff]

    rng = np.random.default_rng(seed)
    synthetic = np.empty((deficit, X.n_cols), dtype=X.values.dtype)
    for s in range(deficit):
        i = int(rng.integers(0, n_min))
        nn = int(neighbours[i, int(rng.integers(0, k_eff))])
        u = rng.random()
        synthetic[s] = minority_rows[i] + u * (minority_rows[nn] - minority_rows[i])

    X_out = np.vstack([X.values, synthetic])
    y_out = np.concatenate([y, np.full(deficit, minority, dtype=y.dtype)])
    return FeatureMatrix(X_out, X.column_names), y_out
