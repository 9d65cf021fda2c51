"""Independent brute-force oracles the implementation is checked against.

These deliberately re-derive results from first principles (direct formula
evaluation, naive recounts) and never call the code paths they verify.
"""

import math

from stancegen.metrics import tokenize


def path_parity_stance(discussion, claim_id):
    """Walk parent links, multiplying +1/-1 per pro/con label."""
    sign = 1
    claim = discussion.claims[claim_id]
    while not claim.is_thesis:
        sign *= 1 if claim.stance_label == "pro" else -1
        claim = discussion.claims[claim.parent_id]
    return "pro" if sign > 0 else "con"


def bm25_direct(docs, query, k1=1.5, b=0.75):
    """Direct Okapi BM25 evaluation: doc_id -> score, from raw texts."""
    tokenized = {doc_id: tokenize(text) for doc_id, text in docs}
    n = len(tokenized)
    avgdl = sum(len(t) for t in tokenized.values()) / n
    df = {}
    for tokens in tokenized.values():
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    scores = {}
    for doc_id, tokens in tokenized.items():
        dl = len(tokens)
        s = 0.0
        for term in tokenize(query):
            if term not in df:
                continue
            f = tokens.count(term)
            idf = math.log((n - df[term] + 0.5) / (df[term] + 0.5) + 1.0)
            s += idf * (f * (k1 + 1)) / (f + k1 * (1 - b + b * dl / avgdl))
        scores[doc_id] = s
    return scores


def bm25_direct_rank(docs, query, descending, k1=1.5, b=0.75):
    scores = bm25_direct(docs, query, k1, b)
    key = (lambda d: (-scores[d], d)) if descending else (lambda d: (scores[d], d))
    return [(d, scores[d]) for d in sorted(scores, key=key)]


def recount_stats(corpus):
    """Naive population statistics over a corpus, without CorpusStats."""
    sizes = [len(d.claims) for d in corpus.discussions.values()]

    def depth(d, cid):
        steps = 0
        claim = d.claims[cid]
        while claim.parent_id is not None:
            claim = d.claims[claim.parent_id]
            steps += 1
        return steps

    depths = [
        max(depth(d, cid) for cid in d.claims)
        for d in corpus.discussions.values()
    ]

    def mean(xs):
        return sum(xs) / len(xs)

    def pstd(xs):
        m = mean(xs)
        return math.sqrt(sum((x - m) ** 2 for x in xs) / len(xs))

    authors = {}
    for d in corpus.discussions.values():
        for claim in d.claims.values():
            authors[claim.author_id] = authors.get(claim.author_id, 0) + 1
    return {
        "discussion_count": len(sizes),
        "unique_claim_count": sum(sizes),
        "claims_per_discussion_mean": mean(sizes),
        "claims_per_discussion_std": pstd(sizes),
        "max_depth_per_discussion_mean": mean(depths),
        "max_depth_per_discussion_std": pstd(depths),
        "author_count": len(authors),
        "claims_per_author_min": min(authors.values()),
        "claims_per_author_max": max(authors.values()),
    }


def recount_bucket_table(corpus, split, threshold):
    """Brute-force persona-size bucket counts per split."""
    train_count = {}
    for d in corpus.discussions.values():
        if split.split_of(d.discussion_id) != "train":
            continue
        for claim in d.claims.values():
            train_count[claim.author_id] = train_count.get(claim.author_id, 0) + 1
    table = {}
    for d in corpus.discussions.values():
        row = table.setdefault(split.split_of(d.discussion_id), {})
        for claim in d.claims.values():
            size = train_count.get(claim.author_id, 0)
            key = str(size) if size < threshold else f">={threshold}"
            row[key] = row.get(key, 0) + 1
    return table
