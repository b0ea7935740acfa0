"""End-to-end smoke tests for the python bindings."""

import sumllab


def small_config(seed=0, cue_rate=0.9):
    return {
        "n_train": 200,
        "n_test_easy": 40,
        "n_test_hard": 40,
        "m": 2,
        "content_vocab": 8,
        "filler_vocab": 10,
        "cue_rate": cue_rate,
        "rule_strength": 0.95,
        "seed": seed,
    }


def tiny_train_config(seed=0):
    return {
        "max_epochs": 4,
        "embed_dim": 8,
        "hidden_dim": 8,
        "outer_lr": 3e-3,
        "train_batch_size": 32,
        "early_stop_patience": 0,
        "seed": seed,
    }


def test_tokenize():
    assert sumllab.tokenize("Hello, zz_cue world!") == ["hello", "zz_cue", "world"]


def test_generate_shapes_and_determinism():
    data = sumllab.generate(small_config(seed=3))
    assert len(data["train"]) == 200
    assert len(data["test_easy"]) == 40
    assert len(data["test_hard"]) == 40
    assert data == sumllab.generate(small_config(seed=3))
    assert data != sumllab.generate(small_config(seed=4))
    # every context key maps to one content answer
    assert len(data["pairing"]) == 8


def test_cue_report_surfaces_the_planted_cue():
    data = sumllab.generate(small_config())
    report = sumllab.cue_report(data["train"], top_k=3, min_applicability=5)
    top = report["tokens"][0]
    assert top["token"] == "zz_cue"
    assert top["productivity"] >= 0.99
    assert abs(top["coverage"] - 0.9) < 0.1


def test_train_evaluate_roundtrip():
    data = sumllab.generate(small_config(seed=1))
    train, val = data["train"][:180], data["train"][180:]
    ckpt = sumllab.train("erm", train, val, tiny_train_config())
    assert ckpt["kind"] == "erm"
    assert ckpt["version"] == "suml-ckpt-v1"
    report = sumllab.evaluate(ckpt, data["test_easy"], name="test_easy")
    assert report["dataset"] == "test_easy"
    assert report["overall"]["total"] == 40
    assert 0.0 <= report["overall"]["accuracy"] <= 1.0
    # the cued test split is easy for a cue-reading model
    assert report["overall"]["accuracy"] >= 0.8


def test_suml_needs_meta_and_runs():
    data = sumllab.generate(small_config(seed=5))
    train, val = data["train"][:160], data["train"][160:180]
    meta = data["train"][180:]
    cfg = dict(tiny_train_config(), inner_updates=2, inner_batch_size=8,
               meta_test_batch_size=8, inner_lr=0.05, max_epochs=2)
    ckpt = sumllab.train("suml", train, val, cfg, meta_test=meta)
    assert ckpt["kind"] == "suml"


def test_split_partitions_the_eval_set():
    data = sumllab.generate(small_config(seed=2, cue_rate=1.0))
    report = sumllab.split_easy_hard(
        data["train"], data["test_easy"], seeds=[0], config=tiny_train_config()
    )
    assert len(report["easy_ids"]) + len(report["hard_ids"]) == 40
    assert report["probe_seeds"] == [0]


def test_gradcheck_within_tolerance():
    assert sumllab.gradcheck(seed=0) <= 1e-6
