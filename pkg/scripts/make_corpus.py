#!/usr/bin/env python3
"""Regenerate the bundled desk-scale corpus, tag lexicon, and colormap.

The corpus is synthetic English from a small weighted grammar, built so that
next-token prediction genuinely benefits from context held across long spans:
subject-verb number agreement (optionally across prepositional phrases and
relative clauses), clause chains that reuse the opening subject verbatim,
quoted speech whose closing quote must be followed by a speaker, one shared
tense per sentence, and an adverb opener that forces "!" as the final
punctuation. Content words are Zipf-weighted over a few hundred lemmas so the
vocabulary is large relative to the model width. A pool of rare words appears
once or twice each so frequency thresholding has something to fold into UNK,
and numeral tokens exercise the NUM rule.

Usage: python3 scripts/make_corpus.py [--out src/statelens/data]
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

TRAIN_SENTENCES = 3800
TEST_SENTENCES = 450
SEED = 20260810

NOUNS_SG = """cat dog bird horse farmer teacher student engineer writer mayor worker neighbor singer
doctor sailor painter market garden river city village house school library station report letter
story song meeting crowd union council bridge train boat tree road field window door wall roof
floor kitchen office shop bakery mill barn castle tower church temple museum theater park forest
hill valley lake island harbor beach cliff cave meadow farm orchard vineyard mine quarry factory
workshop studio gallery archive court palace inn tavern hotel clinic hospital pharmacy lab
carpenter plumber tailor barber butcher baker grocer merchant trader banker lawyer judge clerk
nurse pilot driver guard ranger scout messenger porter gardener shepherd fisher hunter miner
smith mason weaver potter glazier printer binder scribe poet novelist editor reporter critic
professor scholar tutor pupil apprentice master captain colonel general admiral sergeant
violin piano drum flute trumpet guitar harp organ bell whistle ladder bucket hammer nail rope
basket candle lamp mirror carpet blanket pillow curtain shelf drawer cabinet chest trunk crate""".split()

MASS_NOUNS = """solidarity courage patience freedom unity hope silence peace wisdom honesty
kindness sorrow joy pride faith harmony""".split()

INTRANS_VERBS = [
    ("walks", "walk", "walked"), ("sings", "sing", "sang"), ("stands", "stand", "stood"),
    ("works", "work", "worked"), ("sleeps", "sleep", "slept"), ("arrives", "arrive", "arrived"),
    ("waits", "wait", "waited"), ("smiles", "smile", "smiled"), ("listens", "listen", "listened"),
    ("rests", "rest", "rested"), ("travels", "travel", "traveled"), ("speaks", "speak", "spoke"),
    ("laughs", "laugh", "laughed"), ("dances", "dance", "danced"), ("jumps", "jump", "jumped"),
    ("runs", "run", "ran"), ("sits", "sit", "sat"), ("falls", "fall", "fell"),
    ("rises", "rise", "rose"), ("swims", "swim", "swam"), ("marches", "march", "marched"),
    ("wanders", "wander", "wandered"), ("pauses", "pause", "paused"), ("kneels", "kneel", "knelt"),
    ("shivers", "shiver", "shivered"), ("yawns", "yawn", "yawned"), ("drifts", "drift", "drifted"),
    ("stumbles", "stumble", "stumbled"),
]
TRANS_VERBS = [
    ("sees", "see", "saw"), ("helps", "help", "helped"), ("finds", "find", "found"),
    ("reads", "read", "read"), ("writes", "write", "wrote"), ("watches", "watch", "watched"),
    ("carries", "carry", "carried"), ("supports", "support", "supported"),
    ("visits", "visit", "visited"), ("greets", "greet", "greeted"),
    ("joins", "join", "joined"), ("follows", "follow", "followed"),
    ("paints", "paint", "painted"), ("builds", "build", "built"),
    ("repairs", "repair", "repaired"), ("cleans", "clean", "cleaned"),
    ("opens", "open", "opened"), ("closes", "close", "closed"),
    ("lifts", "lift", "lifted"), ("pushes", "push", "pushed"),
    ("pulls", "pull", "pulled"), ("holds", "hold", "held"),
    ("brings", "bring", "brought"), ("sends", "send", "sent"),
    ("teaches", "teach", "taught"), ("feeds", "feed", "fed"),
    ("leads", "lead", "led"), ("guards", "guard", "guarded"),
    ("praises", "praise", "praised"), ("trusts", "trust", "trusted"),
]
SAY_VERBS = """said emphasized noted replied whispered shouted added insisted declared
murmured observed argued""".split()
ADJECTIVES = """quick quiet old young bright small large happy tired brave gentle busy calm
proud tall short heavy light warm cold clever kind strict loyal patient eager humble noble
plain rough smooth narrow wide deep shallow""".split()
ADVERBS = """quickly quietly often always today yesterday slowly carefully again soon rarely
gladly barely firmly gently loudly softly twice""".split()
DETERMINERS = ["the", "a", "this", "that", "every", "some", "each", "their", "our"]
PRONOUNS_SG = ["she", "he", "it"]
PRONOUNS_PL = ["we", "they", "you", "i"]
PREPOSITIONS = ["in", "on", "near", "under", "with", "from", "by", "at", "over", "through"]
CONJUNCTIONS = ["and", "but", "because", "while", "when"]

RARE_WORDS = """abacus alcove almanac anvil aqueduct arbor armoire atlas badger balustrade banjo
barnacle bassoon bazaar beacon bellows bobbin brocade buttress cairn caliper carafe cartographer
casket catacomb cauldron cello chalice chandler chisel cistern cobbler colonnade compass cooper
coracle cormorant cornice crucible cupola dirigible dovecote dulcimer easel eaves ember epaulet
ewer falconer ferrule fjord flagon flotilla forge fresco frigate gable galleon gargoyle gazebo
gondola grotto gusset haberdasher hamlet harpoon hearth heron hourglass inkwell isthmus jetty
keelson kiln lantern lattice lectern lichen lyre mandolin mast meadowlark millstone minaret
monocle moor mosaic nautilus obelisk ocarina paddock pagoda parapet pellet pergola petrel
pewter phial pillory plinth portcullis quill rampart reef rookery rudder satchel scabbard
sconce sextant shale shoal sickle spindle sprocket steeple stile sundial tapestry thicket
trellis tributary turret vellum viaduct weir wharf windlass zephyr""".split()

TAGS = [
    ("NOUN", "#2ca25f"),
    ("VERB", "#8856a7"),
    ("DET", "#e6c400"),
    ("ADP", "#e6c400"),
    ("PRON", "#e6c400"),
    ("CONJ", "#e6c400"),
    ("ADJ", "#3182bd"),
    ("ADV", "#e6550d"),
    ("PUNCT", "#888888"),
    ("NUMBER", "#8c510a"),
    ("OTHER", "#cccccc"),
    ("default", "#cccccc"),
]


def pluralize(noun: str) -> str:
    if noun.endswith("y") and noun[-2] not in "aeiou":
        return noun[:-1] + "ies"
    if noun.endswith(("s", "sh", "ch", "x")):
        return noun + "es"
    return noun + "s"


NOUN_PAIRS = [(n, pluralize(n)) for n in NOUNS_SG]


class Grammar:
    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self._weights: dict[int, np.ndarray] = {}

    def choice(self, items):
        return items[self.rng.integers(len(items))]

    def zipf_choice(self, items):
        """Weighted choice with a 1/(rank+2)^0.9 tail over the list order."""
        n = len(items)
        if n not in self._weights:
            w = 1.0 / np.power(np.arange(2, n + 2), 0.9)
            self._weights[n] = w / w.sum()
        return items[self.rng.choice(n, p=self._weights[n])]

    def noun_phrase(self, number: str, allow_pp=False, rare_ok=False) -> list[str]:
        det = self.choice(DETERMINERS if number == "sg" else
                          [d for d in DETERMINERS if d not in ("a", "this", "that", "every", "each")])
        pair = self.zipf_choice(NOUN_PAIRS)
        noun = pair[0] if number == "sg" else pair[1]
        if rare_ok and self.rng.random() < 0.5:
            noun = self.choice(RARE_WORDS)
        words = [det]
        if self.rng.random() < 0.25:
            words.append(self.zipf_choice(ADJECTIVES))
        words.append(noun)
        if allow_pp and self.rng.random() < 0.6:
            words.extend(self.prep_phrase())
        return words

    def prep_phrase(self) -> list[str]:
        # attach a NP of the opposite-ish number to stress agreement
        inner_number = "sg" if self.rng.random() < 0.5 else "pl"
        return [self.choice(PREPOSITIONS)] + self.noun_phrase(inner_number)

    def subject(self, rare_ok=False) -> tuple[list[str], str]:
        r = self.rng.random()
        if r < 0.22:
            if self.rng.random() < 0.5:
                return [self.choice(PRONOUNS_SG)], "sg"
            return [self.choice(PRONOUNS_PL)], "pl"
        number = "sg" if self.rng.random() < 0.55 else "pl"
        if r < 0.34:
            # relative clause: head-noun number must survive the inner clause
            head = self.noun_phrase(number)
            inner_number = "sg" if self.rng.random() < 0.5 else "pl"
            tense = "past" if self.rng.random() < 0.4 else "present"
            inner = [self.verb_form(TRANS_VERBS, number, tense)]
            inner.extend(self.noun_phrase(inner_number))
            return head + ["who"] + inner, number
        allow_pp = self.rng.random() < 0.3
        return self.noun_phrase(number, allow_pp=allow_pp, rare_ok=rare_ok), number

    def verb_form(self, verbs, number: str, tense: str) -> str:
        sg, pl, past = self.zipf_choice(verbs)
        if tense == "past":
            return past
        return sg if number == "sg" else pl

    def numeral(self) -> str:
        if self.rng.random() < 0.25:
            return f"{self.rng.integers(1, 99)}.{self.rng.integers(0, 9)}"
        return str(self.rng.integers(2, 2000))

    def predicate(self, number: str, tense: str) -> list[str]:
        r = self.rng.random()
        if r < 0.35:
            words = [self.verb_form(INTRANS_VERBS, number, tense)]
            if self.rng.random() < 0.35:
                words.append(self.zipf_choice(ADVERBS))
            if self.rng.random() < 0.35:
                words.extend(self.prep_phrase())
        elif r < 0.75:
            obj_number = "sg" if self.rng.random() < 0.6 else "pl"
            words = [self.verb_form(TRANS_VERBS, number, tense)]
            words.extend(self.noun_phrase(obj_number, allow_pp=self.rng.random() < 0.3))
        elif r < 0.9:
            verb = {"present": "stands" if number == "sg" else "stand", "past": "stood"}[tense]
            words = [verb, "in", self.zipf_choice(MASS_NOUNS)]
        else:
            words = [self.verb_form(TRANS_VERBS, number, tense), self.numeral()]
            pair = self.zipf_choice(NOUN_PAIRS)
            words.append(pair[1])
        return words

    def clause(self, tense: str, rare_ok=False) -> list[str]:
        subj, number = self.subject(rare_ok=rare_ok)
        return subj + self.predicate(number, tense)

    def clause_chain(self, tense: str, rare_ok=False) -> list[str]:
        """One to four clauses joined by `, conj`, sharing one tense; follow-on
        clauses often reuse the opening subject verbatim, so the model must
        hold which noun phrase opened the sentence across a long span."""
        subj, number = self.subject(rare_ok=rare_ok)
        words = subj + self.predicate(number, tense)
        r = self.rng.random()
        n_extra = 3 if r < 0.10 else (2 if r < 0.30 else (1 if r < 0.65 else 0))
        for _ in range(n_extra):
            words += [",", self.choice(CONJUNCTIONS)]
            if self.rng.random() < 0.45 and "who" not in subj:
                words += subj + self.predicate(number, tense)
            else:
                words += self.clause(tense)
        return words

    def sentence(self) -> str:
        r = self.rng.random()
        rare_ok = self.rng.random() < 0.04
        tense = "past" if self.rng.random() < 0.4 else "present"
        opener = self.rng.random() < 0.22
        if r < 0.18:
            # quoted speech: the closing quote must be followed by a speaker
            inner = self.clause_chain(tense)
            words = ['"'] + inner + [",", '"', self.choice(PRONOUNS_SG), self.choice(SAY_VERBS)]
            opener = False
        elif opener:
            words = [self.zipf_choice(ADVERBS), ","] + self.clause_chain(tense, rare_ok)
        else:
            words = self.clause_chain(tense, rare_ok)
        # an adverb opener always closes with "!": a one-bit fact the model
        # must carry across the whole sentence
        if opener:
            end = "!"
        else:
            end = "." if self.rng.random() < 0.97 else "!"
        return " ".join(words + [end])


def all_words() -> dict[str, str]:
    tags: dict[str, str] = {}
    for sg, pl in NOUN_PAIRS:
        tags[sg] = "NOUN"
        tags[pl] = "NOUN"
    for noun in MASS_NOUNS:
        tags[noun] = "NOUN"
    for verbs in (INTRANS_VERBS, TRANS_VERBS):
        for forms in verbs:
            for form in forms:
                tags[form] = "VERB"
    for verb in SAY_VERBS:
        tags[verb] = "VERB"
    for word in ADJECTIVES:
        tags[word] = "ADJ"
    for word in ADVERBS:
        tags[word] = "ADV"
    for word in DETERMINERS:
        tags[word] = "DET"
    for word in PRONOUNS_SG + PRONOUNS_PL + ["who"]:
        tags[word] = "PRON"
    for word in PREPOSITIONS:
        tags[word] = "ADP"
    for word in CONJUNCTIONS:
        tags[word] = "CONJ"
    for word in [",", ".", "!", '"']:
        tags[word] = "PUNCT"
    for word in RARE_WORDS:
        tags[word] = "NOUN"
    tags["<num>"] = "NUMBER"
    tags["<unk>"] = "OTHER"
    tags["<eos>"] = "PUNCT"
    return tags


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="src/statelens/data", type=Path)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(SEED)
    grammar = Grammar(rng)
    train = [grammar.sentence() for _ in range(TRAIN_SENTENCES)]
    test = [grammar.sentence() for _ in range(TEST_SENTENCES)]

    (args.out / "train.txt").write_text("\n".join(train) + "\n", encoding="utf-8")
    (args.out / "test.txt").write_text("\n".join(test) + "\n", encoding="utf-8")
    lex_lines = [f"{tok}\t{tag}" for tok, tag in sorted(all_words().items())]
    (args.out / "tags.tsv").write_text("\n".join(lex_lines) + "\n", encoding="utf-8")
    color_lines = [f"{tag} = {color}" for tag, color in TAGS]
    (args.out / "colors.cfg").write_text("\n".join(color_lines) + "\n", encoding="utf-8")
    print(f"wrote {len(train)} train / {len(test)} test sentences to {args.out}")


if __name__ == "__main__":
    main()
