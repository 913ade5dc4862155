"""Tests for corpora, item expansion and local batch runs."""
import pytest

from app.core.exceptions import ConfigError
from app.schemas.experiment_schema import ExperimentConfig
from app.services.batch_service import batch_service
from app.services.corpus_service import corpus_service


def make_config(**overrides):
    document = {
        "dim": 2,
        "corpus": {"count": 3, "seed": 42},
        "measures": [{"kind": "gaussian", "params": [1.0]}],
        "checks": ["santalo"],
    }
    document.update(overrides)
    return ExperimentConfig.model_validate(document)


def test_generated_ids_and_determinism():
    first = corpus_service.generate(2, 3, seed=42)
    second = corpus_service.generate(2, 3, seed=42)
    assert [entry.body_id for entry in first] == ["rand2d_s42_000", "rand2d_s42_001", "rand2d_s42_002"]
    assert all(entry.body.n_vertices <= 8 for entry in first)
    assert (first[1].body.vertices == second[1].body.vertices).all()


def test_standard_bodies():
    assert [e.body_id for e in corpus_service.standard_bodies(2)] == ["cube2d", "cross2d", "sheared_square"]
    assert [e.body_id for e in corpus_service.standard_bodies(3)] == ["cube3d", "cross3d"]


def test_empty_corpus_is_rejected():
    with pytest.raises(ConfigError):
        corpus_service.build_corpus(make_config(corpus={"count": 0}))


def test_corpus_files_must_match_dimension(tmp_path):
    paths = corpus_service.write_corpus(corpus_service.generate(3, 1, seed=0), tmp_path)
    with pytest.raises(ConfigError):
        corpus_service.build_corpus(make_config(corpus={"files": [str(p) for p in paths]}))


def test_corpus_files_keep_their_ids(tmp_path):
    paths = corpus_service.write_corpus(corpus_service.generate(2, 2, seed=5), tmp_path)
    entries = corpus_service.build_corpus(make_config(corpus={"files": [str(p) for p in paths]}))
    assert [entry.body_id for entry in entries] == ["rand2d_s5_000", "rand2d_s5_001"]


def test_duplicate_ids_are_rejected(tmp_path):
    paths = corpus_service.write_corpus(corpus_service.generate(2, 1, seed=5), tmp_path)
    config = make_config(corpus={"count": 1, "seed": 5, "files": [str(paths[0])]})
    with pytest.raises(ConfigError):
        corpus_service.build_corpus(config)


def test_item_expansion():
    config = make_config(
        measures=[{"kind": "gaussian", "params": [1.0]}, {"kind": "lebesgue_box", "params": [2.0]}],
        checks=["santalo", "main", "ball_logconcavity", "prop8"],
    )
    entries = corpus_service.build_corpus(config)
    items = corpus_service.build_items(config, entries)
    by_check = {}
    for item in items:
        by_check.setdefault(item["check"], []).append(item)
    assert len(by_check["santalo"]) == 3
    assert len(by_check["main"]) == 6
    assert len(by_check["ball_logconcavity"]) == 2
    assert len(by_check["prop8"]) == 6
    assert "measure" not in by_check["santalo"][0]
    assert by_check["prop8"][4]["body2"]["body_id"] == entries[0].body_id
    assert len({item["seed"] for item in items}) == len(items)
    assert all(item["dim"] == 2 for item in items)


def test_local_batch_run_is_sorted():
    config = make_config(checks=["santalo"])
    items = corpus_service.build_items(config, corpus_service.build_corpus(config))
    reports = batch_service.run(list(reversed(items)), jobs=2)
    assert [r.body_id for r in reports] == sorted(r.body_id for r in reports)
    assert all(r.passed for r in reports)


def test_failing_item_becomes_failed_report():
    item = {"check": "santalo", "dim": 2, "body_id": "broken", "seed": 1,
            "body": {"dim": 2, "kind": "hpoly", "rows": [[1.0, 0.0], [-1.0, 0.0]]}}
    reports = batch_service.run([item], jobs=1)
    assert len(reports) == 1
    assert not reports[0].passed
    assert reports[0].body_id == "broken"
    assert "error" in reports[0].context


def test_failure_report_fields():
    report = batch_service.failure_report(
        {"check": "main", "dim": 3, "body_id": "b", "measure": {"kind": "gaussian", "params": [1.0]}, "seed": 9},
        ValueError("boom")
    )
    assert report.inequality_id == "main"
    assert report.measure_id == "gaussian(1,1,1)"
    assert report.context["error"] == "ValueError: boom"
    assert report.csv_row()["passed"] == "false"


def test_failed_correlated_item_keeps_measure_label():
    item = {"check": "main", "dim": 2, "body_id": "cube2d", "seed": 3,
            "body": {"dim": 2, "kind": "hpoly", "rows": [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]},
            "measure": {"kind": "correlated_gaussian", "cov": [[1.0, 0.5], [0.5, 1.0]]}}
    reports = batch_service.run([item], jobs=1)
    assert reports[0].measure_id == "correlated_gaussian(1,0.5,1)"
    assert not reports[0].passed
