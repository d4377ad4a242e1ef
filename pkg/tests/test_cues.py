import pytest
from hypothesis import given, settings, strategies as st

from dialogcues.corpus import POS, AnnotatedToken, Corpus, Person, PronSubtype, Speaker, Utterance
from dialogcues.cues import (
    FIRST_EXPERIMENT_CUES, FULL_CUES, START, CueId, CuePattern, CueSchema, PatternRow, PatternTable,
    SchemaError, UtteranceType as UT, add_context_cue, build_schema, extract_pattern, extract_table,
    lexical_cues, read_table, strip_leading_conjunction, subject_type, tabulate, utterance_type,
    verb_types,
)
from dialogcues.lexicon import SubjectType, VerbType

from conftest import make_utterance

P1 = "PRON.P1.SG.PERSONAL"
P2 = "PRON.P2.SG.PERSONAL"


# --- bundled example sentences ------------------------------------------------------

def test_antigone_sentence_full_pattern(sample, lexicon):
    u = sample.by_id["d01-03"]
    schema = build_schema(FULL_CUES, lexicon)
    assert extract_pattern(u, schema, lexicon).values == ("d", "n", "i", "graag", "w", "e", "n")


def test_antigone_sentence_first_experiment_projection(sample, lexicon):
    u = sample.by_id["d01-03"]
    assert u.speaker is Speaker.CLIENT
    schema = build_schema(FIRST_EXPERIMENT_CUES, lexicon)
    assert extract_pattern(u, schema, lexicon).values == ("c", "d", "i", "w", "n")


def test_weet_u_wie(sample, lexicon):
    u = sample.by_id["d01-07"]
    ut = utterance_type(u, lexicon)
    assert ut is UT.YNQ
    assert subject_type(u, ut, lexicon) is SubjectType.P2
    wh, qm, _ = lexical_cues(u, lexicon)
    assert wh and qm


def test_en_op_18_maart(sample, lexicon):
    u = sample.by_id["d01-05"]
    assert [t.surface for t in strip_leading_conjunction(u, lexicon)] == ["op", "18", "maart", "?"]
    assert utterance_type(u, lexicon) is UT.PRE
    assert subject_type(u, UT.PRE, lexicon) is SubjectType.NONE
    assert verb_types(u, lexicon) == (VerbType.NONE, VerbType.NONE)
    assert extract_pattern(u, build_schema([CueId.QM], lexicon), lexicon).values == ("y",)


def test_declarative_question(sample, lexicon):
    u = sample.by_id["d01-11"]
    assert utterance_type(u, lexicon) is UT.DEC
    wh, qm, cw = lexical_cues(u, lexicon)
    assert (wh, qm, cw) == (False, True, "toch")
    assert subject_type(u, UT.DEC, lexicon) is SubjectType.P1


def test_coordinated_name_is_performance(sample, lexicon):
    u = sample.by_id["d02-03"]  # "Mini en Maxi speelt op 12 en 13 april ."
    assert utterance_type(u, lexicon) is UT.DEC
    assert subject_type(u, UT.DEC, lexicon) is SubjectType.PERFORMANCE


# --- conjunction stripping ---------------------------------------------------------

def test_strip_identity_and_empty(lexicon):
    u = make_utterance("op/PREP 18/NUM maart/NOUN")
    assert strip_leading_conjunction(u, lexicon) == u.tokens
    only = make_utterance("en/CONJ of/CONJ")
    assert strip_leading_conjunction(only, lexicon) == ()
    assert utterance_type(only, lexicon) is UT.MIS
    assert only.tokens and len(only.tokens) == 2  # original untouched


# --- utterance type decision list ------------------------------------------------

@pytest.mark.parametrize("spec, expected", [
    ("ja/INTJ ./PUNCT", UT.CON),
    ("Nee/nee/INTJ hoor/INTJ", UT.CON),
    ("Prima/prima/ADJ", UT.CON),                    # confirmation before ADJ
    ("Dat/dat/PRON.DEMONSTRATIVE is/zijn/FIN_V.P3.SG goed/ADJ", UT.CON),  # before DEC
    ("Bedankt/bedankt/INTJ", UT.THA),               # before EXC
    ("Tot/tot/PREP ziens/zien/NOUN", UT.GRE),       # before PRE
    ("oh/INTJ", UT.EXC),
    ("hè/INTJ hè/INTJ", UT.EXC),
    (f"Wie/wie/PRON.INTERROGATIVE speelt/spelen/FIN_V.P3.SG Antigone/PROPER ?/PUNCT", UT.WHQ),
    (f"Hoeveel/hoeveel/NUM kaartjes/kaartje/NOUN wilt/willen/FIN_V.P2.SG u/{P2} ?/PUNCT", UT.WHQ),
    ("Speelt/spelen/FIN_V.P3.SG Antigone/PROPER vanavond/ADV ?/PUNCT", UT.YNQ),
    (f"Heeft/hebben/FIN_V.P3.SG u/{P2} nog/ADV kaartjes/kaartje/NOUN", UT.YNQ),
    ("Reserveer/reserveren/FIN_V.P1.SG twee/NUM kaartjes/kaartje/NOUN", UT.IMP),
    ("Reserveren/reserveren/INF_V maar/ADV", UT.IMP),
    (f"Ik/ik/{P1} wil/willen/FIN_V.P1.SG graag/ADV", UT.DEC),
    ("op/PREP 18/NUM maart/NOUN", UT.PRE),
    ("de/DET voorstelling/NOUN", UT.NOM),
    ("erg/ADV mooi/ADJ", UT.ADJ),
    ("heel/ADV de/DET", UT.MIS),
    (f"graag/ADV ik/{P1} wil/willen/FIN_V.P1.SG nu/ADV reserveren/INF_V", UT.MIS),
])
def test_utterance_types(spec, expected, lexicon):
    assert utterance_type(make_utterance(spec), lexicon) is expected


def test_dec_uses_chunks_when_present(lexicon):
    # finite verb is the third token but in the second chunk
    u = make_utterance("De/de/DET@0 voorstelling/NOUN@0 begint/beginnen/FIN_V.P3.SG@1 om/PREP@2 acht/NUM@2")
    assert utterance_type(u, lexicon) is UT.DEC
    flat = make_utterance("De/de/DET voorstelling/NOUN begint/beginnen/FIN_V.P3.SG om/PREP acht/NUM")
    assert utterance_type(flat, lexicon) is UT.MIS


def test_wh_word_after_verb_does_not_force_whq(lexicon):
    u = make_utterance(f"Weet/weten/FIN_V.P2.SG u/{P2} wie/wie/PRON.INTERROGATIVE dat/DET stuk/NOUN "
                       "schreef/schrijven/FIN_V.P3.SG ?/PUNCT")
    assert utterance_type(u, lexicon) is UT.YNQ
    assert lexical_cues(u, lexicon)[0] is True


# --- subject types -------------------------------------------------------------------

@pytest.mark.parametrize("spec, expected", [
    (f"Ik/ik/{P1} wil/willen/FIN_V.P1.SG graag/ADV", SubjectType.P1),
    ("Hij/hij/PRON.P3.SG.PERSONAL speelt/spelen/FIN_V.P3.SG goed/ADV", SubjectType.P3),
    ("Wie/wie/PRON.INTERROGATIVE speelt/spelen/FIN_V.P3.SG er/ADV", SubjectType.INT),
    ("Dit/dit/PRON.DEMONSTRATIVE kost/kosten/FIN_V.P3.SG veel/ADV", SubjectType.DEM),
    ("Antigone/PROPER begint/beginnen/FIN_V.P3.SG om/PREP acht/NUM", SubjectType.PERFORMANCE),
    ("De/de/DET@0 korting/NOUN@0 geldt/gelden/FIN_V.P3.SG@1 vandaag/ADV@2", SubjectType.DOMAIN_OTHER),
    ("De/de/DET@0 zon/NOUN@0 schijnt/schijnen/FIN_V.P3.SG@1 vandaag/ADV@2", SubjectType.OTHER),
    (f"Wanneer/wanneer/ADV begint/beginnen/FIN_V.P3.SG de/DET voorstelling/NOUN", SubjectType.PERFORMANCE),
    (f"Morgen/morgen/ADV speel/spelen/FIN_V.P1.SG ik/{P1}", SubjectType.P1),
])
def test_subject_types(spec, expected, lexicon):
    u = make_utterance(spec)
    ut = utterance_type(u, lexicon)
    assert ut in (UT.DEC, UT.WHQ, UT.YNQ)
    assert subject_type(u, ut, lexicon) is expected


def test_object_pronoun_is_not_a_subject(lexicon):
    u = make_utterance("Geef/geven/FIN_V.P1.SG mij/mij/PRON.P1.SG.PERSONAL twee/NUM kaartjes/kaartje/NOUN")
    assert utterance_type(u, lexicon) is UT.IMP


@pytest.mark.parametrize("ut", [t for t in UT if t not in (UT.WHQ, UT.YNQ, UT.DEC)])
def test_subject_type_not_applicable(ut, sample, lexicon):
    assert subject_type(sample.by_id["d01-03"], ut, lexicon) is SubjectType.NONE


# --- verb types ------------------------------------------------------------------

def test_verb_types(lexicon):
    three = make_utterance(f"Ik/ik/{P1} wil/willen/FIN_V.P1.SG kaartjes/kaartje/NOUN reserveren/INF_V "
                           "kopen/INF_V")
    assert verb_types(three, lexicon) == (VerbType.WANT, VerbType.RESERVE)
    one = make_utterance("Dat/dat/PRON.DEMONSTRATIVE is/zijn/FIN_V.P3.SG mooi/ADJ")
    assert verb_types(one, lexicon) == (VerbType.BE, VerbType.NONE)


def test_unknown_verbs(lexicon):
    aux = make_utterance(f"Mag/mogen/FIN_V.P1.SG ik/{P1} fluiten/INF_V")
    assert verb_types(aux, lexicon)[0] is VerbType.AUX
    domain = make_utterance(f"Ik/ik/{P1} fluit/fluiten/FIN_V.P1.SG")
    assert verb_types(domain, lexicon)[0] is VerbType.DOMAIN


# --- lexical cues -----------------------------------------------------------------

def test_lexical_cues(lexicon):
    u = make_utterance("misschien/ADV graag/ADV ./PUNCT")
    assert lexical_cues(u, lexicon) == (False, False, "misschien")
    q = make_utterance("Antigone/PROPER ?/PUNCT '/PUNCT")
    assert lexical_cues(q, lexicon) == (False, True, "none")
    mid = make_utterance("Wat/wat/PRON.INTERROGATIVE ?/PUNCT Nee/nee/INTJ ./PUNCT")
    assert lexical_cues(mid, lexicon) == (True, False, "none")


# --- schema, patterns, tables --------------------------------------------------

def test_schema_invariants(lexicon):
    s = build_schema(FULL_CUES, lexicon)
    assert s.ids == FULL_CUES and len(s) == 7
    assert s.alphabet(CueId.UT) == tuple("dwyipnatgcem")
    assert s.alphabet(CueId.CW)[0] == "none" and "graag" in s.alphabet(CueId.CW)
    assert CueSchema.from_dict(s.to_dict()) == s
    assert s.schema_id.startswith("UT+WH+ST+CW+FVT+SVT+QM#")
    with pytest.raises(SchemaError):
        CueSchema(((CueId.UT, ("d",)), (CueId.UT, ("w",))))
    with pytest.raises(SchemaError):
        CueSchema(((CueId.UT, ()),))
    with pytest.raises(SchemaError):
        build_schema([CueId.PREV_CLASS], lexicon)


def test_pattern_validation(lexicon):
    s = build_schema([CueId.UT, CueId.QM], lexicon)
    assert CuePattern(("d", "y"), s)[CueId.QM] == "y"
    with pytest.raises(SchemaError):
        CuePattern(("d",), s)
    with pytest.raises(SchemaError):
        CuePattern(("d", "maybe"), s)


def test_extract_rejects_prev_class(sample, lexicon):
    s = build_schema([CueId.UT], lexicon).extended(CueId.PREV_CLASS, (START, "0"))
    with pytest.raises(SchemaError):
        extract_pattern(sample.utterances[0], s, lexicon)


def test_tabulate(lexicon):
    s = build_schema([CueId.UT, CueId.QM], lexicon)
    p, q = CuePattern(("d", "n"), s), CuePattern(("w", "y"), s)
    t = tabulate([("u1", p), ("u2", p), ("u3", q)])
    assert t.n_cpts == 2
    assert dict(t.distinct) == {p.values: 2, q.values: 1}
    assert sum(c for _, c in t.distinct) == len(t)
    assert [v for v, _ in t.distinct] == sorted(v for v, _ in t.distinct)
    assert tabulate([]).n_cpts == 0
    other = build_schema([CueId.UT, CueId.WH], lexicon)
    with pytest.raises(SchemaError):
        tabulate([("u1", p), ("u2", CuePattern(("d", "n"), other))])


def test_sample_cpt_count_matches_set_oracle(sample, lexicon):
    schema = build_schema(FULL_CUES, lexicon)
    table = extract_table(sample, schema, lexicon)
    oracle = set()
    for u in sample.utterances:
        oracle.add(tuple(extract_pattern(u, schema, lexicon).values))
    assert table.n_cpts == len(oracle)


def test_table_tsv_round_trip(sample, lexicon):
    schema = build_schema(FULL_CUES, lexicon)
    table = extract_table(sample, schema, lexicon)
    assert read_table(table.to_tsv(), schema) == table
    labeled = table.with_labels([i % 3 for i in range(len(table))])
    text = labeled.to_tsv()
    assert text.splitlines()[0].split("\t") == ["utterance_id", *[c.value for c in FULL_CUES], "class"]
    assert read_table(text, schema) == labeled
    with pytest.raises(SchemaError):
        read_table(text, build_schema([CueId.UT], lexicon))


# --- context cue ------------------------------------------------------------------

def _ctx_fixture(lexicon):
    s = build_schema([CueId.UT], lexicon)
    utts = [make_utterance("ja/INTJ", uid=f"x{i}", dialogue=d, turn=i)
            for i, d in enumerate(["a", "a", "b", "a"])]
    corpus = Corpus(tuple(utts))
    rows = [PatternRow(u.id, CuePattern(("c",), s), lab) for u, lab in zip(utts, [2, 0, 1, 1])]
    return PatternTable(tuple(rows), s), corpus


def test_add_context_cue(lexicon):
    table, corpus = _ctx_fixture(lexicon)
    ctx = add_context_cue(table, corpus, n_classes=3)
    prev = {r.utterance_id: r.pattern[CueId.PREV_CLASS] for r in ctx.rows}
    assert prev == {"x0": START, "x1": "2", "x2": START, "x3": "0"}
    assert len(ctx.schema) == len(table.schema) + 1
    assert all(len(r.pattern.values) == 2 for r in ctx.rows)
    assert ctx.schema.alphabet(CueId.PREV_CLASS) == (START, "0", "1", "2")


def test_add_context_cue_errors(lexicon):
    table, corpus = _ctx_fixture(lexicon)
    unlabeled = PatternTable(tuple(PatternRow(r.utterance_id, r.pattern) for r in table.rows), table.schema)
    with pytest.raises(ValueError):
        add_context_cue(unlabeled, corpus)
    with pytest.raises(KeyError):
        add_context_cue(table, corpus.subset(["x0", "x1"]))
    with pytest.raises(SchemaError):
        add_context_cue(add_context_cue(table, corpus), corpus)


# --- properties -------------------------------------------------------------------

_VOCAB = [
    ("ik", "ik", POS.PRON, Person.P1, PronSubtype.PERSONAL),
    ("u", "u", POS.PRON, Person.P2, PronSubtype.PERSONAL),
    ("wie", "wie", POS.PRON, None, PronSubtype.INTERROGATIVE),
    ("dat", "dat", POS.PRON, None, PronSubtype.DEMONSTRATIVE),
    ("mij", "mij", POS.PRON, Person.P1, PronSubtype.PERSONAL),
    ("wil", "willen", POS.FIN_V, Person.P1, None),
    ("speelt", "spelen", POS.FIN_V, Person.P3, None),
    ("fluit", "fluiten", POS.FIN_V, None, None),
    ("weten", "weten", POS.INF_V, None, None),
    ("reserveren", "reserveren", POS.INF_V, None, None),
    ("Antigone", "Antigone", POS.PROPER, None, None),
    ("kaartje", "kaartje", POS.NOUN, None, None),
    ("de", "de", POS.DET, None, None),
    ("op", "op", POS.PREP, None, None),
    ("18", "18", POS.NUM, None, None),
    ("mooi", "mooi", POS.ADJ, None, None),
    ("graag", "graag", POS.ADV, None, None),
    ("en", "en", POS.CONJ, None, None),
    ("ja", "ja", POS.INTJ, None, None),
    ("oh", "oh", POS.INTJ, None, None),
    ("?", "?", POS.PUNCT, None, None),
    (".", ".", POS.PUNCT, None, None),
    ("xx", "xx", POS.OTHER, None, None),
]


@st.composite
def utterances(draw):
    picks = draw(st.lists(st.sampled_from(_VOCAB), min_size=1, max_size=8))
    chunked = draw(st.booleans())
    toks, chunk = [], 0
    for i, (surface, lemma, pos, person, sub) in enumerate(picks):
        if chunked and i and draw(st.booleans()):
            chunk += 1
        toks.append(AnnotatedToken(surface, lemma, pos, person, None, sub, chunk if chunked else None))
    return Utterance("u", "d", 0, 0, draw(st.sampled_from(list(Speaker))), tuple(toks))


@settings(max_examples=300, deadline=None)
@given(utterances())
def test_extraction_total_deterministic_and_applicable(lexicon, u):
    schema = build_schema(FIRST_EXPERIMENT_CUES + (CueId.WH, CueId.CW, CueId.SVT), lexicon)
    p = extract_pattern(u, schema, lexicon)
    assert p == extract_pattern(u, schema, lexicon)
    for cue, value in zip(schema.ids, p.values):
        assert value in schema.alphabet(cue)
    if p[CueId.UT] not in (UT.WHQ.value, UT.YNQ.value, UT.DEC.value):
        assert p[CueId.ST] == SubjectType.NONE.value
