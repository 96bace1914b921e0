"""Smoke test for the declist extension module.

Build it first, for example `maturin develop -m crates/py/Cargo.toml`, or
copy the compiled library next to this script as `declist.so`.
"""

import declist


def check_confidence():
    assert declist.confidence(3, 4, 10) == 0.75
    assert declist.confidence(0, 0, 0, "smoothed") == 0.5
    try:
        declist.confidence(5, 4, 10)
    except declist.DeclistError:
        pass
    else:
        raise AssertionError("inconsistent counts accepted")


def check_planted():
    contexts, gold = declist.planted_corpus()
    lexicon = declist.Lexicon(contexts, 10)
    result = declist.train(contexts, lexicon, ["dinero", "asiento"], gold=gold)
    result.audit()
    report = result.evaluate(gold)
    assert result.converged and result.residual_fraction == 0.0
    assert report["accuracy_decided"] >= 0.95, report
    assert len(result.seed_ids) == 4
    assert result.model_tsv().startswith("#target=banco")
    return report


def check_pseudoword():
    corpus = declist.Corpus.from_raw(declist.topical_text(documents=300))
    pseudo, gold, ambiguous = corpus.make_pseudoword("orilla", "dinero", "orilladinero")
    contexts = pseudo.contexts("orilladinero")
    assert len(contexts) == len(gold) + len(ambiguous)
    lexicon = declist.Lexicon(contexts, 30)
    result = declist.train(contexts, lexicon, ["orilla", "dinero"], gold=gold)
    report = result.evaluate(gold, excluded=set(ambiguous))
    assert report["accuracy_overall_with_fallback"] >= report["baseline_accuracy"], report
    return report


def check_clustering():
    points = [[float(i % 3), 0.0] for i in range(20)] + [[10.0 + i % 3, 0.0] for i in range(20)]
    gold = ["a"] * 20 + ["b"] * 20
    out = declist.kmeans(points, k=2)
    assert declist.cluster_accuracy(out["assignments"], gold) == 1.0
    history = out["objective_history"]
    assert all(b <= a for a, b in zip(history, history[1:]))
    sense, k = declist.baseline(gold)
    assert (sense, k) == ("a", 0.5)


if __name__ == "__main__":
    check_confidence()
    planted = check_planted()
    pseudo = check_pseudoword()
    check_clustering()
    print(f"declist {declist.__version__}: planted accuracy {planted['accuracy_decided']:.3f}, "
          f"pseudo-word fallback accuracy {pseudo['accuracy_overall_with_fallback']:.3f}")
    print("smoke test passed")
