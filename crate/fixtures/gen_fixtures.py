#!/usr/bin/env python3
"""Regenerates the test fixtures. Deterministic; run from any directory.

Manifests are computed here with a separate re-statement of the counting
rules so that the Rust side is checked against an independent oracle.
"""
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
TAGS = ["CopyingExpression", "Synonyms", "TenseSemantics", "Transliteration", "WordFormTransmission"]


def tokens(text):
    out = []
    for chunk in text.split():
        lo, hi = 0, len(chunk)
        while lo < hi and not chunk[lo].isalnum():
            out.append(chunk[lo])
            lo += 1
        if lo == hi:
            continue
        while hi > lo and not chunk[hi - 1].isalnum():
            hi -= 1
        out.append(chunk[lo:hi])
        out.extend(chunk[hi:])
    return out


def has_year(text):
    return any(len(t) == 4 and t.isdigit() and 1000 <= int(t) <= 2099 for t in tokens(text))


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------- clean_1000

NOUNS = ["share", "price", "budget", "salary", "population", "income", "export", "production",
         "profit", "tax", "pension", "unemployment", "inflation", "consumption", "number"]
PLURAL = ["prices", "rates", "salaries", "exports", "profits", "taxes", "sales", "costs", "figures"]
PAST = ["decreased", "increased", "fell", "rose", "grew", "dropped", "declined", "doubled",
        "remained stable", "reached a peak", "changed", "stayed low"]
PLACES = ["in Russia", "in the city", "in the region", "in Europe", "in the country", "in rural areas"]
LEX_NOUNS = ["cashier", "factory", "company", "bank", "shop", "market", "office", "hospital", "library",
             "museum", "theatre", "airport", "ticket", "student", "teacher", "doctor", "manager",
             "university", "restaurant", "newspaper", "computer", "village", "train", "metro"]
VERBS_NOW = ["needs", "has", "offers", "opens", "closes", "attracts", "employs", "supports"]
OBJECTS = ["new workers", "many visitors", "a lot of money", "modern equipment", "long queues",
           "good service", "young people", "cheap goods"]
SHORT = ["Prices rose.", "It was calm.", "We agree.", "Nothing changed.", "Why not?", "Costs fell sharply.",
         "Thank you.", "I disagree.", "See below.", "The chart shows", "Time passes.", "Yes, really."]


def clean_sentence(rng, kind):
    if kind == "year":
        y = rng.randint(1950, 2030)
        if rng.random() < 0.5:
            subj = "the " + rng.choice(NOUNS)
        else:
            subj = "the " + rng.choice(PLURAL)
        form = rng.randrange(3)
        if form == 0:
            return f"In {y} {subj} {rng.choice(PAST)} {rng.choice(PLACES)}."
        if form == 1:
            s = f"{subj[0].upper()}{subj[1:]} {rng.choice(PAST)} {rng.choice(PLACES)} in {y}."
            return s
        return f"By {y}, {subj} {rng.choice(PAST)} and the situation improved."
    if kind == "dict":
        frame = rng.randrange(4)
        if frame == 0:
            return f"They covered the distance in {rng.randint(2, 9)} days {rng.choice(PLACES)}."
        if frame == 1:
            return f"A big dinner was prepared for everyone {rng.choice(PLACES)}."
        if frame == 2:
            return f"The primary cost was {rng.randint(2, 9)} billion dollars for the {rng.choice(LEX_NOUNS)}."
        return f"Students covered the topic and everyone passed the exam {rng.choice(PLACES)}."
    if kind == "noun":
        return f"The {rng.choice(LEX_NOUNS)} {rng.choice(VERBS_NOW)} {rng.choice(OBJECTS)} {rng.choice(PLACES)}."
    if kind == "short":
        return rng.choice(SHORT)
    return f"Many people think that {rng.choice(OBJECTS)} are important for the future."


def clean_1000():
    rng = random.Random(1000)
    kinds = ["year"] * 300 + ["dict"] * 200 + ["noun"] * 300 + ["short"] * 100 + ["plain"] * 100
    rng.shuffle(kinds)
    rows, short_ids, year_ids = [], [], []
    for i, kind in enumerate(kinds):
        sid = f"clean-{i:04d}"
        text = clean_sentence(rng, kind)
        rows.append({"id": sid, "text": text, "source": "realec", "split": None, "spans": []})
        if len(tokens(text)) < 5:
            short_ids.append(sid)
        if has_year(text):
            year_ids.append(sid)
    write_jsonl(HERE / "clean_1000.jsonl", rows)
    manifest = {"sentences": len(rows), "short_ids": short_ids, "year_ids": year_ids, "min_tokens": 5}
    (HERE / "clean_1000.manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")


# ---------------------------------------------------------------- learner_200

DETS = ["the", "a", "this", "that", "every", "some", "many", "our", "my", "their", "most", "several", "no"]
ADJS = ["big", "modern", "young", "old", "expensive", "cheap", "important", "difficult", "useful", "local",
        "foreign", "public", "private", "small", "huge", "serious", "popular", "dangerous", "healthy",
        "new", "traditional", "urban", "rural", "digital", "strict", "free", "famous", "typical", "rich"]
NOUNS_L = ["government", "student", "teacher", "city", "family", "company", "child", "law", "job", "school",
           "hospital", "car", "salary", "university", "museum", "book", "computer", "phone", "tourist",
           "worker", "village", "country", "factory", "river", "park", "shop", "newspaper", "film", "game",
           "friend", "parent", "doctor", "library", "market", "road", "exam", "language", "holiday", "house",
           "restaurant", "train", "neighbour", "festival", "garden", "habit", "decision", "reason", "problem",
           "idea", "opinion", "price", "chart", "budget", "future", "society", "environment", "internet"]
VERBS = ["needs", "supports", "destroys", "changes", "explains", "ignores", "improves", "creates", "helps",
         "visited", "bought", "built", "lost", "found", "closed", "opened", "watched", "criticised",
         "will replace", "can damage", "should protect", "must control", "would prefer", "has reduced",
         "is making", "was building", "does not understand", "could influence", "may affect", "wants to sell",
         "tries to avoid", "decided to leave", "refused to pay for", "began to study", "forgot about",
         "depends from", "is worried about", "spends money on", "complains about", "dreams about"]
PREPS = ["in", "near", "for", "without", "after", "before", "during", "because of", "instead of", "with",
         "against", "behind", "across", "among", "despite of", "according to", "except", "inside"]
OPENERS_L = ["", "", "", "", "", "", "", "", "Nowadays", "However,", "Moreover,", "Firstly,", "Secondly,",
             "Unfortunately,", "Sometimes", "Yesterday", "Besides,", "Obviously,", "Still,", "Then",
             "Finally,", "Perhaps", "Suddenly", "Usually", "Luckily,", "Later"]
CONJ = ["because", "although", "so", "but", "when", "while", "if", "since", "until", "and", "unless", "after"]
PRONOUNS = ["I", "we", "they", "he", "she", "it", "everybody", "nobody", "you", "people"]


def noun_phrase(rng):
    words = [rng.choice(DETS)]
    if rng.random() < 0.5:
        words.append(rng.choice(ADJS))
    noun = rng.choice(NOUNS_L)
    if words[0] in ("many", "most", "several", "some", "no") or rng.random() < 0.2:
        noun = noun[:-1] + "ies" if noun.endswith("y") and noun[-2] not in "aeiou" else noun + "s"
    words.append(noun)
    if words[0] == "a" and words[1][0] in "aeiou":
        words[0] = "an"
    return " ".join(words)


def learner_sentence(rng):
    parts = [rng.choice(OPENERS_L), noun_phrase(rng), rng.choice(VERBS), noun_phrase(rng)]
    if rng.random() < 0.5:
        parts += [rng.choice(PREPS), noun_phrase(rng)]
    if rng.random() < 0.4:
        parts += [rng.choice(CONJ), rng.choice(PRONOUNS), rng.choice(VERBS), noun_phrase(rng)]
    text = " ".join(p for p in parts if p)
    return text[0].upper() + text[1:] + (rng.choice("!?") if rng.random() < 0.1 else ".")


def learner_200():
    rng = random.Random(200)
    rows, seen = [], set()
    while len(rows) < 200:
        text = learner_sentence(rng)
        if text in seen:
            continue
        seen.add(text)
        rows.append({"id": f"learner-{len(rows):03d}", "text": text, "source": "realec", "split": None,
                     "spans": []})
    write_jsonl(HERE / "learner_200.jsonl", rows)


# ---------------------------------------------------------------- realec_sample

# Each document is a list of lines; each line is a list of sentences. A
# sentence is a list of pieces: plain strings or (surface, label, correction).
DOCS = {
    "essay01": [
        [["A big bath was prepared for ", ("every of us", "CopyingExpression", "everyone"), "."]],
        [["The distance can be ", ("overcame", "Synonyms", "covered"), " by the train."],
         ["In 1999 the share ", ("decreases", "TenseSemantics", "decreased"), "."]],
        [["And often a lot of money comes to the ", ("cassa", "Transliteration", "cashier"), "."]],
        [["The primary cost was $5 ", ("billions", "WordFormTransmission", "billion"), "."]],
    ],
    "essay02": [
        [["In 2005 the number of tourists ", ("grows", "TenseSemantics", "grew"), " ",
          ("in two times", "CopyingExpression", "twice"), "."],
         ["Many ", ("peoples", "Spelling", "people"), " agree with this."]],
        [["Students ", ("overcame", "Synonyms", "covered"), " the whole course in one month."]],
        [["My friend works as a ", ("kassir", "Transliteration", "cashier"), " in the shop."],
         ["She likes it."]],
    ],
    "essay03": [
        [["The graph shows that in 2010 the prices ", ("rise", "TenseSemantics", "rose"), " quickly."]],
        [["Everybody ", ("make", "Grammar", "makes"), " mistakes sometimes."]],
        [["We ", ("passed", "Synonyms", "covered"), " the distance very fast and ",
          ("every of them", "CopyingExpression", "everyone"), " was happy."]],
        [["The company spent 3 ", ("millions", "WordFormTransmission", "million"), " on ",
          ("reklama", "Transliteration", "advertising"), "."]],
    ],
    "essay04": [
        [["Short line."]],
        [["It is a ", ("big", "Synonyms", "great"), " pleasure to ", ("visit", "Articles", None), " the museum."]],
        [["The ", ("informations", "WordFormTransmission", "information"), " was useful for ",
          ("every of us", "CopyingExpression", "everyone"), "."]],
    ],
}


def realec_sample():
    out = HERE / "realec_sample"
    out.mkdir(exist_ok=True)
    manifest = {"documents": {}, "sentences": 0, "spans": 0, "sentences_with_spans": 0,
                "spans_by_tag": {t: 0 for t in TAGS}, "unknown_tags": {}}
    for doc_id, lines in DOCS.items():
        doc, ann, t, n = "", [], 0, 0
        line_texts = []
        for line in lines:
            sent_texts = []
            for sent in line:
                pos_in_doc = len("\n".join(line_texts)) + (1 if line_texts else 0) + \
                    sum(len(s) + 1 for s in sent_texts)
                text, known = "", 0
                for piece in sent:
                    if isinstance(piece, str):
                        text += piece
                        continue
                    surface, label, corr = piece
                    start = pos_in_doc + len(text)
                    text += surface
                    t += 1
                    ann.append(f"T{t}\t{label} {start} {start + len(surface)}\t{surface}")
                    if corr is not None:
                        ann.append(f"#{t}\tAnnotatorNotes T{t}\t{corr}")
                    if label in TAGS:
                        manifest["spans_by_tag"][label] += 1
                        manifest["spans"] += 1
                        known += 1
                    else:
                        manifest["unknown_tags"][label] = manifest["unknown_tags"].get(label, 0) + 1
                sent_texts.append(text)
                n += 1
                manifest["sentences_with_spans"] += known > 0
            line_texts.append(" ".join(sent_texts))
        doc = "\n".join(line_texts) + "\n"
        ann.append("A1\tConfidence T1 High")
        (out / f"{doc_id}.txt").write_text(doc, encoding="utf-8")
        (out / f"{doc_id}.ann").write_text("\n".join(ann) + "\n", encoding="utf-8")
        manifest["documents"][doc_id] = n
        manifest["sentences"] += n
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")


if __name__ == "__main__":
    clean_1000()
    learner_200()
    realec_sample()
