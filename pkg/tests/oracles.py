"""Independent reference implementations used as test oracles."""

import math


def naive_nb_scores(train, test_doc, vocab_size, alpha=1.0, mode="standard"):
    """Direct evaluation of the NB scoring formulas over dense weight lists.

    ``train`` is a list of (label, dense weights); returns {label: score}.
    """
    classes = sorted({label for label, _ in train})
    w = {c: [0.0] * vocab_size for c in classes}
    n_docs = {c: 0 for c in classes}
    for label, doc in train:
        n_docs[label] += 1
        for t in range(vocab_size):
            w[label][t] += doc[t]
    w_c = {c: sum(w[c]) for c in classes}
    scores = {}
    if mode == "standard":
        n = sum(n_docs.values())
        for c in classes:
            s = math.log(n_docs[c] / n)
            for t in range(vocab_size):
                if test_doc[t]:
                    s += test_doc[t] * math.log((w[c][t] + alpha) / (w_c[c] + alpha * vocab_size))
            scores[c] = s
    else:
        w_t = [sum(w[c][t] for c in classes) for t in range(vocab_size)]
        w_total = sum(w_c.values())
        for c in classes:
            s = 0.0
            for t in range(vocab_size):
                if test_doc[t]:
                    num = w_t[t] - w[c][t] + alpha
                    den = (w_total - w_c[c]) + alpha * vocab_size
                    s -= test_doc[t] * math.log(num / den)
            scores[c] = s
    return scores


def brute_kappa(counts):
    total = sum(map(sum, counts))
    n = len(counts)
    po = sum(counts[i][i] for i in range(n)) / total
    pe = sum(sum(counts[i]) * sum(counts[j][i] for j in range(n)) for i in range(n)) / total ** 2
    return 0.0 if pe == 1 else (po - pe) / (1 - pe)
