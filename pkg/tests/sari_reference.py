"""Brute-force SARI reference used as the independent oracle in tests.

Everything here is enumerated explicitly: n-grams as tuple lists, multiset
counts as plain dicts, per-gram min/max loops over the union of keys. No
shared code with embsimp.metrics; the two must agree to 1e-9.

Pinned conventions (same contract the library documents):
  * tokens = whitespace split, exact code points
  * orders 1..4; source/output counts scaled by the reference count,
    reference counts summed across references
  * keep and add are F1 of multiset precision/recall, delete is precision
  * zero-denominator precision/recall is 1.0 when the ideal multiset is
    empty, else 0.0; F1 of (0, 0) is 0
"""

from __future__ import annotations


def _ngrams(tokens, n):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def _count(grams):
    counts = {}
    for g in grams:
        counts[g] = counts.get(g, 0) + 1
    return counts


def _card(counts):
    return sum(counts.values())


def _ratio(numer, denom, ideal_card):
    if denom == 0:
        return 1.0 if ideal_card == 0 else 0.0
    return numer / denom


def _f1(p, r):
    if p + r == 0:
        return 0.0
    return 2.0 * p * r / (p + r)


def sari_reference(source: str, output: str, refs: list[str]):
    """Return (add, keep, delete, sari), each in [0, 100]."""
    src_tokens = source.split()
    out_tokens = output.split()
    ref_token_lists = [r.split() for r in refs]
    numref = len(refs)

    keep_by_order = []
    del_by_order = []
    add_by_order = []
    for n in range(1, 5):
        src = {g: c * numref for g, c in _count(_ngrams(src_tokens, n)).items()}
        out = {g: c * numref for g, c in _count(_ngrams(out_tokens, n)).items()}
        ref = {}
        for tokens in ref_token_lists:
            for g, c in _count(_ngrams(tokens, n)).items():
                ref[g] = ref.get(g, 0) + c
        grams = set(src) | set(out) | set(ref)

        kept = {g: min(src.get(g, 0), out.get(g, 0)) for g in grams}
        keep_ideal = {g: min(src.get(g, 0), ref.get(g, 0)) for g in grams}
        keep_good = {g: min(kept[g], keep_ideal[g]) for g in grams}
        p = _ratio(_card(keep_good), _card(kept), _card(keep_ideal))
        r = _ratio(_card(keep_good), _card(keep_ideal), _card(keep_ideal))
        keep_by_order.append(_f1(p, r))

        deleted = {g: max(src.get(g, 0) - out.get(g, 0), 0) for g in grams}
        del_ideal = {g: max(src.get(g, 0) - ref.get(g, 0), 0) for g in grams}
        del_good = {g: min(deleted[g], del_ideal[g]) for g in grams}
        del_by_order.append(_ratio(_card(del_good), _card(deleted), _card(del_ideal)))

        added = {g: max(out.get(g, 0) - src.get(g, 0), 0) for g in grams}
        add_ideal = {g: max(ref.get(g, 0) - src.get(g, 0), 0) for g in grams}
        add_good = {g: min(added[g], add_ideal[g]) for g in grams}
        p = _ratio(_card(add_good), _card(added), _card(add_ideal))
        r = _ratio(_card(add_good), _card(add_ideal), _card(add_ideal))
        add_by_order.append(_f1(p, r))

    add = 100.0 * sum(add_by_order) / 4.0
    keep = 100.0 * sum(keep_by_order) / 4.0
    delete = 100.0 * sum(del_by_order) / 4.0
    sari = (add + keep + delete) / 3.0
    return add, keep, delete, sari
