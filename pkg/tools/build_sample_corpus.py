"""Regenerate src/dialogcues/data/sample_corpus.jsonl from compact annotations.

Run from the repository root:  python tools/build_sample_corpus.py
"""

from pathlib import Path

from dialogcues.corpus import Corpus, Speaker, Utterance, parse_corpus, tokens_from_string, write_corpus

C, S = Speaker.CLIENT, Speaker.SYSTEM

P1 = "PRON.P1.SG.PERSONAL"
P2 = "PRON.P2.SG.PERSONAL"

DIALOGUES = {
    "d01": [
        (S, "Welkom/welkom/ADJ@0 bij/PREP@1 de/DET@1 schouwburg/NOUN@1 ./PUNCT@1"),
        (S, f"Wat/wat/PRON.INTERROGATIVE@0 kan/kunnen/FIN_V.P1.SG@1 ik/{P1}@2 voor/PREP@3 u/{P2}@3 "
            "doen/INF_V@4 ?/PUNCT@4"),
        (C, f"ik/{P1}@0 wil/willen/FIN_V.P1.SG@1 graag/ADV@2 meer/ADV@3 weten/INF_V@4 over/PREP@5 "
            "de/DET@5 voorstelling/NOUN@5 '/PUNCT@5 Antigone/PROPER@5 '/PUNCT@5 ./PUNCT@5"),
        (S, "De/de/DET@0 voorstelling/NOUN@0 Antigone/PROPER@0 wordt/worden/FIN_V.P3.SG@1 "
            "gespeeld/spelen/INF_V@2 op/PREP@3 18/NUM@3 maart/NOUN@3 ./PUNCT@3"),
        (C, "En/en/CONJ op/PREP 18/NUM maart/NOUN ?/PUNCT"),
        (S, "Ja/ja/INTJ ,/PUNCT op/PREP 18/NUM maart/NOUN om/PREP 20.00/NUM uur/NOUN ./PUNCT"),
        (C, f"WEet/weten/FIN_V.P2.SG@0 u/{P2}@1 wie/wie/PRON.INTERROGATIVE@2 dat/DET@3 stuk/NOUN@3 "
            "heeft/hebben/FIN_V.P3.SG@4 geschreven/schrijven/INF_V@5 ?/PUNCT@5"),
        (S, "Dat/dat/DET@0 stuk/NOUN@0 is/zijn/FIN_V.P3.SG@1 geschreven/schrijven/INF_V@2 "
            "door/PREP@3 Sophocles/PROPER@3 ./PUNCT@3"),
        (C, f"Ik/ik/{P1}@0 wil/willen/FIN_V.P1.SG@1 graag/ADV@2 een/DET@3 reservering/NOUN@3 ./PUNCT@3"),
        (S, f"Hoeveel/hoeveel/NUM@0 kaartjes/kaartje/NOUN@0 wilt/willen/FIN_V.P2.SG@1 u/{P2}@2 "
            "reserveren/INF_V@3 ?/PUNCT@3"),
        (C, f"2/NUM zei/zeggen/FIN_V.P1.SG ik/{P1} toch/ADV ?/PUNCT"),
        (S, "Dat/dat/PRON.DEMONSTRATIVE is/zijn/FIN_V.P3.SG goed/ADJ ./PUNCT"),
        (C, "Bedankt/bedankt/INTJ ./PUNCT"),
        (S, "Tot/tot/PREP ziens/zien/NOUN ./PUNCT"),
    ],
    "d02": [
        (S, "Goedenavond/goedenavond/INTJ ./PUNCT"),
        (C, f"Ik/ik/{P1}@0 wil/willen/FIN_V.P1.SG@1 graag/ADV@2 naar/PREP@3 Mini/PROPER@3 en/CONJ@3 "
            "Maxi/PROPER@3 ./PUNCT@3"),
        (S, "Mini/PROPER@0 en/CONJ@0 Maxi/PROPER@0 speelt/spelen/FIN_V.P3.SG@1 op/PREP@2 12/NUM@2 "
            "en/CONJ@2 13/NUM@2 april/NOUN@2 ./PUNCT@2"),
        (C, "Wanneer/wanneer/ADV@0 begint/beginnen/FIN_V.P3.SG@1 de/DET@2 voorstelling/NOUN@2 ?/PUNCT@2"),
        (S, "De/de/DET@0 voorstelling/NOUN@0 begint/beginnen/FIN_V.P3.SG@1 om/PREP@2 20.15/NUM@2 "
            "uur/NOUN@2 ./PUNCT@2"),
        (C, "Hoeveel/hoeveel/NUM@0 kost/kosten/FIN_V.P3.SG@1 een/DET@2 kaartje/NOUN@2 ?/PUNCT@2"),
        (S, "Een/een/DET@0 kaartje/NOUN@0 kost/kosten/FIN_V.P3.SG@1 25/NUM@2 gulden/NOUN@2 ./PUNCT@2"),
        (C, "Is/zijn/FIN_V.P3.SG@0 er/er/PRON.OTHER@1 korting/NOUN@2 voor/PREP@3 studenten/student/NOUN@3 "
            "?/PUNCT@3"),
        (S, f"Met/met/PREP@0 een/DET@0 CJP-pas/cjp-pas/NOUN@0 krijgt/krijgen/FIN_V.P2.SG@1 u/{P2}@2 "
            "5/NUM@3 gulden/NOUN@3 korting/NOUN@3 ./PUNCT@3"),
        (C, "Oké/oké/INTJ ./PUNCT"),
        (C, "Reserveer/reserveren/FIN_V.P1.SG dan/ADV maar/ADV twee/NUM kaartjes/kaartje/NOUN "
            "voor/PREP mij/PRON.P1.SG.PERSONAL ./PUNCT"),
        (S, "Wat/wat/PRON.INTERROGATIVE@0 is/zijn/FIN_V.P3.SG@1 uw/DET@2 naam/NOUN@2 ?/PUNCT@2"),
        (C, "Jansen/PROPER ./PUNCT"),
        (S, "Uw/uw/DET@0 kaartjes/kaartje/NOUN@0 liggen/liggen/FIN_V.P3.PL@1 klaar/ADJ@2 bij/PREP@3 "
            "de/DET@3 kassa/NOUN@3 ./PUNCT@3"),
        (C, "Dank/dank/NOUN u/PRON.P2.SG.PERSONAL wel/ADV ./PUNCT"),
    ],
    "d03": [
        (S, f"Hallo/hallo/INTJ@0 ,/PUNCT@0 u/{P2}@1 spreekt/spreken/FIN_V.P2.SG@2 met/PREP@3 de/DET@3 "
            "schouwburg/NOUN@3 ./PUNCT@3"),
        (C, "Welke/welke/DET@0 voorstellingen/voorstelling/NOUN@0 zijn/zijn/FIN_V.P3.PL@1 "
            "er/er/PRON.OTHER@2 deze/DET@3 week/NOUN@3 ?/PUNCT@3"),
        (S, "Herman/PROPER@0 Finkers/PROPER@0 speelt/spelen/FIN_V.P3.SG@1 deze/DET@2 week/NOUN@2 ./PUNCT@2"),
        (C, "Herman/PROPER Finkers/PROPER ?/PUNCT"),
        (C, "Leuk/leuk/ADJ !/PUNCT"),
        (C, "Wat/wat/PRON.INTERROGATIVE kost/kosten/FIN_V.P3.SG dat/dat/PRON.DEMONSTRATIVE ?/PUNCT"),
        (S, "Dat/dat/PRON.DEMONSTRATIVE@0 kost/kosten/FIN_V.P3.SG@1 30/NUM@2 gulden/NOUN@2 ./PUNCT@2"),
        (C, f"Kan/kunnen/FIN_V.P1.SG@0 ik/{P1}@1 ook/ADV@2 met/PREP@3 een/DET@3 creditcard/NOUN@3 "
            "betalen/INF_V@4 ?/PUNCT@4"),
        (S, "Nee/nee/INTJ@0 ,/PUNCT@0 dat/dat/PRON.DEMONSTRATIVE@1 is/zijn/FIN_V.P3.SG@2 "
            "helaas/ADV@3 niet/ADV@3 mogelijk/ADJ@3 ./PUNCT@3"),
        (C, "Jammer/jammer/ADJ ./PUNCT"),
        (C, "Geef/geven/FIN_V.P1.SG mij/PRON.P1.SG.PERSONAL dan/ADV maar/ADV drie/NUM "
            "kaartjes/kaartje/NOUN voor/PREP zaterdag/NOUN ./PUNCT"),
        (S, "Op/op/PREP welke/welke/DET naam/NOUN ?/PUNCT"),
        (C, "Op/op/PREP naam/NOUN van/PREP De/de/PROPER Vries/PROPER ./PUNCT"),
        (S, "Uw/uw/DET@0 reservering/NOUN@0 is/zijn/FIN_V.P3.SG@1 genoteerd/noteren/INF_V@2 ./PUNCT@2"),
        (C, "Goed/goed/ADJ ./PUNCT"),
        (C, "Tot/tot/PREP ziens/zien/NOUN ./PUNCT"),
    ],
    "d04": [
        (S, f"Goedemiddag/goedemiddag/INTJ@0 ,/PUNCT@0 waarmee/waarmee/ADV@1 kan/kunnen/FIN_V.P1.SG@2 "
            f"ik/{P1}@3 u/{P2}@4 helpen/INF_V@5 ?/PUNCT@5"),
        (C, f"Ik/ik/{P1}@0 zoek/zoeken/FIN_V.P1.SG@1 een/DET@2 concert/NOUN@2 voor/PREP@3 "
            "zondagmiddag/NOUN@3 ./PUNCT@3"),
        (S, "Zondagmiddag/zondagmiddag/NOUN@0 is/zijn/FIN_V.P3.SG@1 er/er/PRON.OTHER@2 een/DET@3 "
            "concert/NOUN@3 van/PREP@4 het/DET@4 Residentie/PROPER@4 Orkest/PROPER@4 ./PUNCT@4"),
        (C, "Hoe/hoe/ADV@0 laat/ADJ@0 begint/beginnen/FIN_V.P3.SG@1 dat/DET@2 concert/NOUN@2 ?/PUNCT@2"),
        (S, "Om/om/PREP 14.30/NUM uur/NOUN ./PUNCT"),
        (C, "Zijn/zijn/FIN_V.P3.PL@0 er/er/PRON.OTHER@1 nog/ADV@2 plaatsen/plaats/NOUN@3 vrij/ADJ@3 ?/PUNCT@3"),
        (S, "Er/er/PRON.OTHER@0 zijn/zijn/FIN_V.P3.PL@1 nog/ADV@2 veel/DET@3 plaatsen/plaats/NOUN@3 "
            "vrij/ADJ@3 ./PUNCT@3"),
        (C, "Wat/wat/PRON.INTERROGATIVE@0 is/zijn/FIN_V.P3.SG@1 het/DET@2 verschil/NOUN@2 in/PREP@3 "
            "prijs/NOUN@3 ?/PUNCT@3"),
        (S, "Het/het/DET@0 balkon/NOUN@0 kost/kosten/FIN_V.P3.SG@1 20/NUM@2 gulden/NOUN@2 en/CONJ@3 "
            "de/DET@4 zaal/NOUN@4 35/NUM@5 gulden/NOUN@5 ./PUNCT@5"),
        (C, "Twee/twee/NUM@0 kaartjes/kaartje/NOUN@0 voor/PREP@1 het/DET@1 balkon/NOUN@1 graag/ADV@2 ./PUNCT@2"),
        (S, f"Wilt/willen/FIN_V.P2.SG@0 u/{P2}@1 de/DET@2 kaartjes/kaartje/NOUN@2 ophalen/INF_V@3 "
            "of/CONJ@4 zullen/FIN_V.P1.PL@5 we/PRON.P1.PL.PERSONAL@6 ze/PRON.P3.PL.PERSONAL@7 "
            "opsturen/INF_V@8 ?/PUNCT@8"),
        (C, "Ophalen/ophalen/INF_V ./PUNCT"),
        (S, "Prima/prima/ADJ ./PUNCT"),
        (C, "Hartelijk/hartelijk/ADJ dank/NOUN ./PUNCT"),
    ],
}


def build() -> Corpus:
    utterances = []
    for dialogue_id, lines in DIALOGUES.items():
        turn, position, previous = -1, 0, None
        for n, (speaker, spec) in enumerate(lines):
            if speaker != previous:
                turn, position = turn + 1, 0
            else:
                position += 1
            previous = speaker
            utterances.append(Utterance(f"{dialogue_id}-{n + 1:02d}", dialogue_id, turn, position,
                                        speaker, tokens_from_string(spec)))
    return Corpus(tuple(utterances))


if __name__ == "__main__":
    corpus = build()
    text = write_corpus(corpus)
    assert parse_corpus(text) == corpus
    out = Path(__file__).resolve().parent.parent / "src" / "dialogcues" / "data" / "sample_corpus.jsonl"
    out.write_text(text, encoding="utf-8")
    print(f"wrote {len(corpus)} utterances in {len(corpus.dialogues)} dialogues to {out}")
