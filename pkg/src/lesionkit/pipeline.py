"""End-to-end orchestration: extract -> select -> fit -> evaluate -> compare.

Everything is trained on the train partition only; operating thresholds
are locked on train scores and applied unchanged to every validation
partition. Artifacts are plain JSON with sorted keys and no timestamps,
so a rerun with the same seed and config is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .birads import LEXICON, BiradsRecord, EncodingSpec, encode_records
from .dataset import CohortDataset, PipelineConfig
from .errors import ChecksumMismatch, SchemaViolation, SingleClass
from .lasso import LassoConfig, LassoPath, lasso_select
from .logistic import LogisticModel, fit_logistic, fit_multivariable, screen_univariable
from .metrics import (
    binary_metrics,
    confusion_from_predictions,
    consensus_reference,
    delong_paired,
    delong_variance,
    youden_threshold,
)
from .morphometry import FEATURE_NAMES, ShapeFeatureVector, extract_features
from .nomogram import (
    Nomogram,
    build_nomogram,
    check_version,
    document_checksum,
    from_document,
    to_document,
)
from .selection import FeatureMatrix, collinearity_prune, icc_filter, univariable_auc

MODEL_KEYS = ("birads", "morphometric", "fused")

BAND_LABELS = {"biopsy": "biopsy advised", "malignancy": "high malignancy risk"}


# -- feature extraction ------------------------------------------------------

def extract_all_features(
    dataset: CohortDataset, max_workers: int = 8
) -> dict[str, dict[str, ShapeFeatureVector]]:
    """Morphometrics per rater per patient; lesions run concurrently."""
    keys = sorted(dataset.contours)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        vectors = list(pool.map(lambda k: extract_features(dataset.contours[k]), keys))
    out: dict[str, dict[str, ShapeFeatureVector]] = {}
    for (pid, rid), vec in zip(keys, vectors):
        out.setdefault(rid, {})[pid] = vec
    return out


# -- outcomes ----------------------------------------------------------------

def biopsy_outcome(record: BiradsRecord) -> int:
    return int(consensus_reference(record.votes_biopsy) == "candid")


def task_rows(dataset: CohortDataset, task: str) -> tuple[list[BiradsRecord], np.ndarray]:
    """Rows carrying an outcome for the task, with the 0/1 outcome vector."""
    if task == "biopsy":
        rows = list(dataset.records)
        y = np.array([biopsy_outcome(r) for r in rows], dtype=int)
        return rows, y
    rows = [r for r in dataset.records if biopsy_outcome(r) == 1]
    missing = [r.patient_id for r in rows if r.pathology == "none"]
    if missing:
        raise SchemaViolation(
            "pathology required for malignancy-task rows; missing for: "
            + ", ".join(missing)
        )
    y = np.array([int(r.pathology == "malignant") for r in rows], dtype=int)
    return rows, y


# -- selection ---------------------------------------------------------------

@dataclass
class SelectionOutcome:
    icc_kept: list[str]
    prune_kept: list[str]
    selected: list[str]
    lasso_path: LassoPath
    report: dict


def run_selection(
    train_rows: list[BiradsRecord],
    y_train: np.ndarray,
    features: dict[str, dict[str, ShapeFeatureVector]],
    dataset: CohortDataset,
    config: PipelineConfig,
) -> SelectionOutcome:
    if len(dataset.raters) < 2:
        raise SchemaViolation("feature selection needs contours from two raters")
    rater_a, rater_b = dataset.raters[:2]
    pids = [r.patient_id for r in train_rows
            if r.patient_id in features[rater_a] and r.patient_id in features[rater_b]]
    y = np.array([yy for r, yy in zip(train_rows, y_train)
                  if r.patient_id in features[rater_a] and r.patient_id in features[rater_b]])
    names = list(FEATURE_NAMES)
    mat_a = FeatureMatrix(names, np.array([features[rater_a][p].as_array() for p in pids]), labels=y)
    mat_b = FeatureMatrix(names, np.array([features[rater_b][p].as_array() for p in pids]), labels=y)

    icc_report = icc_filter(mat_a, mat_b, config.icc_threshold)
    icc_kept = icc_report.kept_features
    if not icc_kept:
        raise SchemaViolation("no feature passed the reproducibility filter")

    kept_matrix = mat_a.subset(icc_kept)
    aucs = {n: univariable_auc(kept_matrix.column(n), y) for n in icc_kept}
    prune = collinearity_prune(kept_matrix, config.corr_threshold, aucs)

    pruned_matrix = kept_matrix.subset(prune.kept)
    corr = np.corrcoef(pruned_matrix.values, rowvar=False) if len(prune.kept) > 1 else np.ones((1, 1))
    lasso_cfg = LassoConfig(cv_folds=config.cv_folds, lambda_rule=config.lambda_rule, seed=config.seed)
    path = lasso_select(prune.kept, pruned_matrix.values, y, lasso_cfg)

    report = {
        "n_train_lesions": len(pids),
        "raters": [rater_a, rater_b],
        "icc": {
            "threshold": config.icc_threshold,
            "table": [
                {"feature": e.feature, "icc": e.icc, "msr": e.msr, "msc": e.msc,
                 "mse": e.mse, "kept": e.kept}
                for e in icc_report.entries
            ],
            "kept": icc_kept,
            "dropped": [e.feature for e in icc_report.entries if not e.kept],
        },
        "collinearity": {
            "threshold": config.corr_threshold,
            "univariable_auc": aucs,
            "dropped_pairs": [asdict(p) for p in prune.dropped_pairs],
            "kept": prune.kept,
            "correlation_matrix": {
                "features": prune.kept,
                "values": corr.tolist(),
            },
        },
        "lasso": {
            "lambda_rule": config.lambda_rule,
            "cv_folds": config.cv_folds,
            "lambda_grid": path.lambdas.tolist(),
            "cv_mean_deviance": path.cv_mean_deviance.tolist(),
            "cv_se_deviance": path.cv_se_deviance.tolist(),
            "chosen_lambda": path.chosen_lambda,
            "max_kkt_residual": float(path.kkt_residuals.max()),
            "all_converged": bool(path.converged.all()),
            "selected": path.selected,
        },
        "counts_per_step": {
            "candidates": len(names),
            "after_icc": len(icc_kept),
            "after_collinearity": len(prune.kept),
            "after_lasso": len(path.selected),
        },
    }
    return SelectionOutcome(
        icc_kept=icc_kept,
        prune_kept=prune.kept,
        selected=path.selected,
        lasso_path=path,
        report=report,
    )


# -- model fitting -------------------------------------------------------

@dataclass
class FittedModel:
    key: str
    model: LogisticModel
    predictors: list[str]
    threshold: float
    nomogram: Nomogram

    def scores_for(self, X: np.ndarray) -> np.ndarray:
        return self.model.predict_probability(X)


def _morpho_matrix(rows, features, rater, selected):
    idx = [FEATURE_NAMES.index(n) for n in selected]
    have = [r.patient_id in features[rater] for r in rows]
    X = np.array([
        features[rater][r.patient_id].as_array()[idx]
        for r, h in zip(rows, have) if h
    ])
    mask = np.array(have, dtype=bool)
    return X, mask


def _model_stats_dict(model: LogisticModel) -> dict:
    return {
        "n": model.n,
        "events": model.events,
        "intercept": model.intercept,
        "predictors": model.predictors,
        "coefficients": model.coefficients.tolist(),
        "wald": [asdict(s) for s in model.stats],
        "all_dropped": model.all_dropped,
    }


def fit_task_models(
    train_rows: list[BiradsRecord],
    y_train: np.ndarray,
    features: dict[str, dict[str, ShapeFeatureVector]],
    selection: SelectionOutcome,
    dataset: CohortDataset,
    config: PipelineConfig,
) -> tuple[dict[str, FittedModel], dict]:
    spec = EncodingSpec(one_hot=config.encoding == "onehot")
    rater = dataset.raters[0]

    # lexicon model: univariable screen then backward elimination
    Xb = encode_records(train_rows, spec)
    names_b = spec.column_names
    screen = screen_univariable(names_b, Xb, y_train.astype(float), config.alpha)
    kept = [r.name for r in screen if r.kept]
    if not kept:
        raise SchemaViolation("no lexicon predictor passed univariable screening")
    idx_kept = [names_b.index(n) for n in kept]
    birads_model, elimination = fit_multivariable(
        kept, Xb[:, idx_kept], y_train.astype(float), config.alpha
    )
    if birads_model.all_dropped:
        raise SchemaViolation("every lexicon predictor was eliminated")

    # morphometric model: plain logistic on the selected features
    if not selection.selected:
        raise SchemaViolation(
            "feature selection kept no morphometric feature; "
            "cannot fit the morphometric or fused model"
        )
    Xm, mask_m = _morpho_matrix(train_rows, features, rater, selection.selected)
    morpho_model = fit_logistic(Xm, y_train[mask_m].astype(float), names=selection.selected)

    # fused model: retained lexicon predictors plus selected morphometrics
    fused_names = birads_model.predictors + selection.selected
    Xb_kept = Xb[:, [names_b.index(n) for n in birads_model.predictors]]
    Xf = np.column_stack([Xb_kept[mask_m], Xm])
    fused_model = fit_logistic(Xf, y_train[mask_m].astype(float), names=fused_names)

    # predictor ranges and level names for the nomogram axes
    cat_levels = {name: LEXICON[name] for name in LEXICON}
    ranges: dict[str, tuple[float, float]] = {}
    for name in fused_names + birads_model.predictors:
        if name in cat_levels:
            ranges[name] = (1.0, float(len(cat_levels[name])))
    for j, name in enumerate(selection.selected):
        ranges[name] = (float(Xm[:, j].min()), float(Xm[:, j].max()))

    def make(key, model, X_train_model):
        scores_train = model.predict_probability(X_train_model)
        y_model = y_train if key == "birads" else y_train[mask_m]
        if config.threshold_rule == "youden":
            threshold = youden_threshold(scores_train, y_model)
        else:
            threshold = config.fixed_threshold
        levels = {n: cat_levels[n] for n in model.predictors if n in cat_levels}
        nomo = build_nomogram(
            model,
            {n: ranges[n] for n in model.predictors},
            task=config.task,
            levels=levels,
            bands=({"label": BAND_LABELS[config.task], "min_probability": threshold},),
            provenance={
                "model": key,
                "task": config.task,
                "seed": config.seed,
                "config_hash": config.config_hash(),
                "threshold_rule": config.threshold_rule,
            },
        )
        return FittedModel(key=key, model=model, predictors=model.predictors,
                           threshold=threshold, nomogram=nomo)

    fitted = {
        "birads": make("birads", birads_model, Xb[:, [names_b.index(n) for n in birads_model.predictors]]),
        "morphometric": make("morphometric", morpho_model, Xm),
        "fused": make("fused", fused_model, Xf),
    }
    fit_report = {
        "univariable_screen": [asdict(r) for r in screen],
        "backward_elimination": [asdict(s) for s in elimination],
        "models": {key: _model_stats_dict(f.model) for key, f in fitted.items()},
        "thresholds": {key: f.threshold for key, f in fitted.items()},
    }
    return fitted, fit_report


# -- evaluation ----------------------------------------------------------

def _design_for(model_key, fitted, rows, features, dataset, config):
    """(X, row_mask) for a model over arbitrary rows."""
    spec = EncodingSpec(one_hot=config.encoding == "onehot")
    rater = dataset.raters[0] if dataset.raters else None
    fm = fitted[model_key]
    names_b = spec.column_names
    Xb = encode_records(rows, spec)
    if model_key == "birads":
        return Xb[:, [names_b.index(n) for n in fm.predictors]], np.ones(len(rows), dtype=bool)
    morpho_names = [n for n in fm.predictors if n in FEATURE_NAMES]
    Xm, mask = _morpho_matrix(rows, features, rater, morpho_names)
    if model_key == "morphometric":
        return Xm, mask
    lex = [n for n in fm.predictors if n not in FEATURE_NAMES]
    Xb_kept = Xb[:, [names_b.index(n) for n in lex]]
    return np.column_stack([Xb_kept[mask], Xm]), mask


def _partition_eval(scores: np.ndarray, y: np.ndarray, threshold: float) -> dict:
    cm = confusion_from_predictions(scores >= threshold, y.astype(bool))
    sen, spec, acc, mcc = binary_metrics(cm)
    block = {
        "n": int(cm.total),
        "confusion": {"tp": cm.tp, "fp": cm.fp, "tn": cm.tn, "fn": cm.fn},
        "sensitivity": sen,
        "specificity": spec,
        "accuracy": acc,
        "mcc": mcc,
    }
    try:
        res = delong_variance(scores, y)
        block["auc"] = res.auc_a
        block["auc_ci"] = [res.ci_a[0], res.ci_a[1]]
    except SingleClass:
        block["auc"] = None
        block["auc_ci"] = None
    return block


def evaluate_models(
    fitted: dict[str, FittedModel],
    dataset: CohortDataset,
    features: dict[str, dict[str, ShapeFeatureVector]],
    config: PipelineConfig,
) -> dict:
    rows, y = task_rows(dataset, config.task)
    cohorts = [c for c in ("train", "internal", "external1", "external2") if dataset.by_cohort(c)]
    out: dict = {"task": config.task, "threshold_rule": config.threshold_rule, "models": {}}
    for key, fm in fitted.items():
        X, mask = _design_for(key, fitted, rows, features, dataset, config)
        scores = fm.scores_for(X)
        kept_rows = [r for r, m in zip(rows, mask) if m]
        y_kept = y[mask]
        entry = {"threshold": fm.threshold, "n_scored": int(mask.sum()),
                 "n_excluded_missing_contours": int((~mask).sum()),
                 "partitions": {}, "pooled": None}
        pooled_idx = []
        for cohort in cohorts:
            sel = np.array([r.cohort == cohort for r in kept_rows], dtype=bool)
            if not sel.any():
                continue
            entry["partitions"][cohort] = _partition_eval(scores[sel], y_kept[sel], fm.threshold)
            if cohort != "train":
                pooled_idx.append(sel)
        if pooled_idx:
            pooled = np.logical_or.reduce(pooled_idx)
            entry["pooled"] = _partition_eval(scores[pooled], y_kept[pooled], fm.threshold)
        out["models"][key] = entry
    return out


def compare_models(
    fitted: dict[str, FittedModel],
    dataset: CohortDataset,
    features: dict[str, dict[str, ShapeFeatureVector]],
    config: PipelineConfig,
) -> dict:
    """Pairwise correlated-AUC tests on pooled validation rows."""
    rows, y = task_rows(dataset, config.task)
    pooled = np.array([r.cohort != "train" for r in rows], dtype=bool)
    per_model: dict[str, dict[str, np.ndarray]] = {}
    for key, fm in fitted.items():
        X, mask = _design_for(key, fitted, rows, features, dataset, config)
        scores = np.full(len(rows), np.nan)
        scores[mask] = fm.scores_for(X)
        per_model[key] = scores
    matrix: dict[str, dict] = {}
    for i, a in enumerate(MODEL_KEYS):
        for b in MODEL_KEYS[i + 1:]:
            ok = pooled & ~np.isnan(per_model[a]) & ~np.isnan(per_model[b])
            res = delong_paired(per_model[a][ok], per_model[b][ok], y[ok])
            matrix[f"{a}_vs_{b}"] = {
                "n": int(ok.sum()),
                "auc_a": res.auc_a,
                "auc_b": res.auc_b,
                "z": res.z,
                "p": res.p,
                "degenerate": res.degenerate,
            }
    return {"task": config.task, "pooled_pairwise": matrix}


# -- artifacts -----------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_artifact(path: Path, obj) -> str:
    text = dump_json(obj)
    path.write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()


def export_nomogram(nomogram_or_doc, path: str | Path, nomogram_id: str | None = None) -> dict:
    """Write a nomogram document; returns the document written."""
    if isinstance(nomogram_or_doc, Nomogram):
        if nomogram_id is None:
            raise ValueError("nomogram_id required when exporting a Nomogram object")
        doc = to_document(nomogram_or_doc, nomogram_id)
    else:
        doc = nomogram_or_doc
    Path(path).write_text(dump_json(doc))
    return doc


def import_nomogram(path: str | Path) -> tuple[Nomogram, dict, str | None]:
    """(nomogram, document, compatibility_note); checksum must verify."""
    doc = json.loads(Path(path).read_text())
    note = check_version(str(doc.get("version", "")))
    if document_checksum(doc) != doc.get("checksum"):
        raise ChecksumMismatch(f"{path}: checksum does not match document body")
    return from_document(doc), doc, note


# -- orchestration -------------------------------------------------------

STAGES = ("extract", "select", "fit", "evaluate", "compare")


@dataclass
class RunArtifacts:
    config: PipelineConfig
    features: dict
    selection: SelectionOutcome | None = None
    fitted: dict | None = None
    fit_report: dict | None = None
    evaluation: dict | None = None
    comparisons: dict | None = None
    nomogram_docs: dict = field(default_factory=dict)
    manifest: dict = field(default_factory=dict)


def run_pipeline(
    dataset: CohortDataset,
    config: PipelineConfig,
    out_dir: str | Path | None = None,
    until: str = "compare",
) -> RunArtifacts:
    """Run stages through `until`, writing artifacts when out_dir is set.

    On failure a partial manifest (completed stages + failure reason) is
    still written before the error propagates.
    """
    if until not in STAGES:
        raise ValueError(f"unknown stage {until!r}")
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config": config.to_text(),
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "task": config.task,
        "status": "running",
        "stages_completed": [],
        "artifacts": {},
        "validation_notes": dataset.validation_notes,
    }
    art = RunArtifacts(config=config, features={}, manifest=manifest)

    def save(name, obj):
        if out is not None:
            if isinstance(obj, dict) and "checksum" not in obj and "config_hash" not in obj:
                # nomogram documents pass through untouched: they carry their
                # own stamped provenance under a checksummed body
                obj = {"config_hash": config.config_hash(), "seed": config.seed, **obj}
            manifest["artifacts"][name] = write_artifact(out / name, obj)

    def finish(stage):
        manifest["stages_completed"].append(stage)
        if out is not None:
            write_artifact(out / "manifest.json", manifest)

    stage_limit = STAGES.index(until)
    try:
        art.features = extract_all_features(dataset)
        save("features.json", {"by_rater": {
            rater: {pid: vec.values for pid, vec in sorted(per.items())}
            for rater, per in sorted(art.features.items())
        }})
        finish("extract")
        if stage_limit >= 1:
            train_rows, y_train = task_rows(_train_view(dataset), config.task)
            art.selection = run_selection(train_rows, y_train, art.features, dataset, config)
            save("selection_report.json", art.selection.report)
            finish("select")
        if stage_limit >= 2:
            art.fitted, art.fit_report = fit_task_models(
                train_rows, y_train, art.features, art.selection, dataset, config
            )
            save("models.json", art.fit_report)
            for key, fm in art.fitted.items():
                doc_id = f"{config.task}-{key}"
                doc = to_document(fm.nomogram, doc_id)
                art.nomogram_docs[doc_id] = doc
                save(f"nomogram_{doc_id}.json", doc)
            finish("fit")
        if stage_limit >= 3:
            art.evaluation = evaluate_models(art.fitted, dataset, art.features, config)
            save("eval_report.json", art.evaluation)
            finish("evaluate")
        if stage_limit >= 4:
            art.comparisons = compare_models(art.fitted, dataset, art.features, config)
            save("comparisons.json", art.comparisons)
            finish("compare")
    except Exception as exc:
        manifest["status"] = "failed"
        manifest["failure"] = f"{type(exc).__name__}: {exc}"
        if out is not None:
            write_artifact(out / "manifest.json", manifest)
        raise
    manifest["status"] = "complete"
    if out is not None:
        write_artifact(out / "manifest.json", manifest)
    return art


def _train_view(dataset: CohortDataset) -> CohortDataset:
    """Train partition only: selection and fitting never see other labels."""
    train = dataset.by_cohort("train")
    if not train:
        raise SchemaViolation("dataset has no train partition")
    pids = {r.patient_id for r in train}
    return CohortDataset(
        records=train,
        contours={k: v for k, v in dataset.contours.items() if k[0] in pids},
        raters=dataset.raters,
        validation_notes=dataset.validation_notes,
    )
