import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import bm25_direct_rank, path_parity_stance
from stancegen import ingest, persona
from stancegen.corpus import Claim, build_corpus, build_discussion
from stancegen.errors import IsThesis, UnknownAuthor, UnknownClaim
from synth import random_corpus, random_discussion


def chain(labels, discussion_id="d1", author="a1"):
    """Discussion that is a single path with the given pro/con labels;
    claim ids are <discussion_id>-c0 (thesis) through -cN."""
    pre = discussion_id
    claims = [Claim(f"{pre}-c0", discussion_id, author, None, "thesis", "thesis")]
    for i, label in enumerate(labels, start=1):
        claims.append(
            Claim(f"{pre}-c{i}", discussion_id, author, f"{pre}-c{i-1}",
                  f"claim {i}", label)
        )
    return build_discussion(claims)


def all_train_split(corpus):
    return ingest.stratified_split(corpus, 0.0, 0.0, seed=0)


class TestPropagateStance:
    def test_direct_pro_child(self):
        assert persona.propagate_stance(chain(["pro"]), "d1-c1") == "pro"

    def test_con_child_of_pro(self):
        assert persona.propagate_stance(chain(["pro", "con"]), "d1-c2") == "con"

    def test_con_child_of_con(self):
        assert persona.propagate_stance(chain(["con", "con"]), "d1-c2") == "pro"

    def test_thesis_raises(self):
        with pytest.raises(IsThesis):
            persona.propagate_stance(chain(["pro"]), "d1-c0")

    def test_unknown_claim(self):
        with pytest.raises(UnknownClaim):
            persona.propagate_stance(chain(["pro"]), "zz")

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32))
    def test_matches_path_parity_oracle(self, seed):
        rng = random.Random(seed)
        d = random_discussion("dx", rng.randint(2, 40), rng)
        for cid in d.claims:
            if d.claims[cid].is_thesis:
                continue
            assert persona.propagate_stance(d, cid) == path_parity_stance(d, cid)


class TestExplicitPool:
    def test_unknown_author(self, fixture_corpus, fixture_split):
        with pytest.raises(UnknownAuthor):
            persona.explicit_pool(fixture_corpus, fixture_split, "nobody")

    def test_pool_excludes_non_train(self, fixture_corpus, fixture_split):
        train = set(fixture_split.discussions_in("train"))
        for author in fixture_corpus.author_index:
            pool = persona.explicit_pool(fixture_corpus, fixture_split, author)
            for claim in pool:
                assert claim.discussion_id in train
            assert [c.claim_id for c in pool] == sorted(c.claim_id for c in pool)

    def test_author_only_in_test_has_empty_pool(self):
        d1 = chain(["pro"], "d1", author="train_author")
        d2 = chain(["pro"], "d2", author="test_author")
        corpus = build_corpus([d1, d2])
        split = ingest.SplitAssignment(
            {"d1": "train", "d2": "test"}, 0, 0.0, 0.5, "manual"
        )
        pool = persona.explicit_pool(corpus, split, "test_author")
        assert pool == []
        assert persona.bucket_of(len(pool)) == persona.NO_PERSONA

    def test_pool_size_matches_recount(self, fixture_corpus, fixture_split):
        train = set(fixture_split.discussions_in("train"))
        for author, claim_ids in fixture_corpus.author_index.items():
            expected = sum(
                1
                for cid in claim_ids
                if fixture_corpus.claim(cid).discussion_id in train
            )
            pool = persona.explicit_pool(fixture_corpus, fixture_split, author)
            assert len(pool) == expected


class TestSelectRandom:
    def pool(self, n):
        d = chain(["pro"] * n, author="auth")
        return [c for c in d.claims.values() if not c.is_thesis]

    def test_small_pool_takes_everything(self):
        pool = self.pool(2)
        selected = persona.select_random(pool, cap=5, seed=1)
        assert set(selected.selected_ids) == {c.claim_id for c in pool}

    def test_deterministic_per_seed(self):
        pool = self.pool(100)
        a = persona.select_random(pool, cap=5, seed=9)
        b = persona.select_random(pool, cap=5, seed=9)
        assert a == b
        c = persona.select_random(pool, cap=5, seed=10)
        assert a != c

    def test_cap_respected(self):
        assert len(persona.select_random(self.pool(100), cap=5, seed=3).selected_ids) == 5

    def test_empty_pool(self):
        p = persona.select_random([], cap=5, seed=0)
        assert p.selected_claims == ()

    def test_inclusion_frequency_is_uniform(self):
        # pool of 10, cap 5: each claim should be included with p = 0.5
        pool = self.pool(10)
        n_seeds = 10_000
        counts = {c.claim_id: 0 for c in pool}
        for seed in range(n_seeds):
            for cid in persona.select_random(pool, cap=5, seed=seed).selected_ids:
                counts[cid] += 1
        sigma = (n_seeds * 0.5 * 0.5) ** 0.5
        for count in counts.values():
            assert abs(count - n_seeds * 0.5) <= 3 * sigma


class TestSelectBySimilarity:
    def make_pool(self, texts):
        claims = [Claim("c0", "d1", "auth", None, "thesis", "thesis")]
        for i, text in enumerate(texts, start=1):
            claims.append(Claim(f"c{i:02d}", "d1", "auth", "c0", text, "pro"))
        d = build_discussion(claims)
        return [d.claims[f"c{i:02d}"] for i in range(1, len(texts) + 1)]

    def test_pool_of_one(self):
        pool = self.make_pool(["only claim"])
        assert persona.select_dynamic(pool, "anything", 5).selected_claims == (
            "only claim",
        )
        assert persona.select_negative(pool, "anything", 5).selected_claims == (
            "only claim",
        )

    def test_small_pool_same_set_different_order(self):
        pool = self.make_pool(["alpha beta", "gamma delta", "alpha gamma"])
        dyn = persona.select_dynamic(pool, "alpha", 5)
        neg = persona.select_negative(pool, "alpha", 5)
        assert set(dyn.selected_ids) == set(neg.selected_ids)

    def test_matches_exhaustive_bm25(self):
        rng = random.Random(404)
        vocab = "god jesus history vote evidence tax art freedom".split()
        texts = [
            " ".join(rng.choices(vocab, k=rng.randint(3, 10))) for _ in range(20)
        ]
        pool = self.make_pool(texts)
        query = "historical evidence about jesus"
        docs = [(c.claim_id, c.text) for c in pool]
        top = bm25_direct_rank(docs, query, descending=True)[:5]
        bottom = bm25_direct_rank(docs, query, descending=False)[:5]
        dyn = persona.select_dynamic(pool, query, 5)
        neg = persona.select_negative(pool, query, 5)
        assert list(dyn.selected_ids) == [d for d, _ in top]
        assert list(neg.selected_ids) == [d for d, _ in bottom]

    def test_topical_pool_surfaces_related_claims(self):
        pool = self.make_pool([
            "even if there was a historical person named jesus of nazareth",
            "the electoral college victories have caused tumult and disorder",
            "there is no evidence to support the assertions of christianity",
            "tax policy should favor the middle class",
        ])
        query = "there is historical evidence that jesus christ existed"
        dyn = persona.select_dynamic(pool, query, 2)
        religion = {pool[0].text, pool[2].text}
        assert set(dyn.selected_claims) == religion
        neg = persona.select_negative(pool, query, 2)
        assert not set(neg.selected_claims) & religion


class TestCapInvariant:
    def test_all_strategies_select_min_pool_cap(self):
        corpus = random_corpus(10, seed=17, shared_authors=["w1", "w2", "w3"])
        split = all_train_split(corpus)
        for author in corpus.author_index:
            pool = persona.explicit_pool(corpus, split, author)
            for selected in (
                persona.select_random(pool, 5, 0),
                persona.select_dynamic(pool, "alpha beta", 5),
                persona.select_negative(pool, "alpha beta", 5),
            ):
                assert len(selected.selected_claims) == min(len(pool), 5)
            if len(pool) <= 5:
                assert (
                    set(persona.select_random(pool, 5, 0).selected_ids)
                    == set(persona.select_dynamic(pool, "alpha", 5).selected_ids)
                    == set(persona.select_negative(pool, "alpha", 5).selected_ids)
                )


class TestImplicitPersona:
    def test_single_pro_child(self):
        d = chain(["pro"], author="solo")
        corpus = build_corpus([d])
        split = all_train_split(corpus)
        p = persona.implicit_persona(corpus, split, "solo")
        assert len(p.entries) == 1
        entry = p.entries[0]
        assert (entry.pro_count, entry.con_count) == (1, 0)
        assert entry.thesis_text == "thesis"

    def test_counts_match_per_claim_oracle(self, fixture_corpus, fixture_split):
        train = set(fixture_split.discussions_in("train"))
        for author in list(fixture_corpus.author_index)[:5]:
            p = persona.implicit_persona(fixture_corpus, fixture_split, author)
            expected = {}
            for cid in fixture_corpus.author_index[author]:
                claim = fixture_corpus.claim(cid)
                if claim.discussion_id not in train or claim.is_thesis:
                    continue
                d = fixture_corpus.discussions[claim.discussion_id]
                stance = path_parity_stance(d, cid)
                pair = expected.setdefault(claim.discussion_id, [0, 0])
                pair[0 if stance == "pro" else 1] += 1
            assert {
                e.discussion_id: [e.pro_count, e.con_count] for e in p.entries
            } == expected
            assert [e.discussion_id for e in p.entries] == sorted(
                e.discussion_id for e in p.entries
            )

    def test_counts_sum_to_non_thesis_pool_size(self, fixture_corpus, fixture_split):
        for author in fixture_corpus.author_index:
            p = persona.implicit_persona(fixture_corpus, fixture_split, author)
            pool = persona.explicit_pool(fixture_corpus, fixture_split, author)
            non_thesis = sum(1 for c in pool if not c.is_thesis)
            assert sum(e.pro_count + e.con_count for e in p.entries) == non_thesis

    def test_unknown_author(self, fixture_corpus, fixture_split):
        with pytest.raises(UnknownAuthor):
            persona.implicit_persona(fixture_corpus, fixture_split, "ghost")


class TestSerialization:
    def test_explicit_join(self):
        p = persona.ExplicitPersona("a", ("claimA", "claimB"), ("1", "2"), "random", 5)
        assert persona.serialize_explicit(p) == "claimA [SEP] claimB"

    def test_empty_personas(self):
        e = persona.ExplicitPersona("a", (), (), "random", 5)
        assert persona.serialize_explicit(e) == ""
        i = persona.ImplicitPersona("a", ())
        assert persona.serialize_implicit(i) == ""

    def test_implicit_format(self):
        p = persona.ImplicitPersona(
            "a",
            (
                persona.ThesisStanceSummary("d1", "Military conscription", 1, 0),
                persona.ThesisStanceSummary("d2", "Judaism", 37, 18),
            ),
        )
        assert persona.serialize_implicit(p) == (
            "pro: 1 - con: 0 - text: Military conscription"
            " [SEP] pro: 37 - con: 18 - text: Judaism"
        )

    def test_implicit_roundtrip(self, fixture_corpus, fixture_split):
        for author in list(fixture_corpus.author_index)[:10]:
            p = persona.implicit_persona(fixture_corpus, fixture_split, author)
            parsed = persona.parse_implicit(persona.serialize_implicit(p))
            assert parsed == [
                (e.pro_count, e.con_count, e.thesis_text) for e in p.entries
            ]


class TestBucketOf:
    @pytest.mark.parametrize(
        "size,expected",
        [
            (0, persona.NO_PERSONA),
            (1, persona.SMALL_PERSONA),
            (4, persona.SMALL_PERSONA),
            (5, persona.BIG_PERSONA),
            (6123, persona.BIG_PERSONA),
        ],
    )
    def test_boundaries_at_default_threshold(self, size, expected):
        assert persona.bucket_of(size, 5) == expected

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            persona.bucket_of(3, 0)


def test_leakage_rule(fixture_corpus, fixture_split):
    held_out = {
        cid
        for split_name in ("validation", "test")
        for did in fixture_split.discussions_in(split_name)
        for cid in fixture_corpus.discussions[did].claims
    }
    for author in fixture_corpus.author_index:
        pool = persona.explicit_pool(fixture_corpus, fixture_split, author)
        selected = persona.select_random(pool, 5, seed=3)
        assert not set(selected.selected_ids) & held_out
        dyn = persona.select_dynamic(pool, "alpha beta gamma", 5)
        assert not set(dyn.selected_ids) & held_out
