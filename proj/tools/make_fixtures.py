#!/usr/bin/env python3
"""Regenerates data/fixtures/. Output is deterministic."""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data" / "fixtures"

ONSETS = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "dr", "kr", "st", "tr", "gl"]
VOWELS = ["a", "e", "i", "o", "u", "ai", "ou", "ei"]
CODAS = ["", "n", "r", "l", "s", "th", "m", "x"]


def word(rng, syllables):
    return "".join(rng.choice(ONSETS) + rng.choice(VOWELS) + rng.choice(CODAS) for _ in range(syllables)).capitalize()


def unique_words(rng, n, syllables, taken):
    out = []
    while len(out) < n:
        w = word(rng, syllables)
        if w.lower() not in taken:
            taken.add(w.lower())
            out.append(w)
    return out


def write_jsonl(path, records):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def synthetic50():
    rng = random.Random(20240117)
    taken = set()
    entities = unique_words(rng, 50, 3, taken)
    people = unique_words(rng, 100, 2, taken)
    cities = unique_words(rng, 50, 2, taken)
    kinds = ["magazine", "journal", "gazette", "review", "quarterly"]
    tables, qa = [], []
    for i, name in enumerate(entities):
        tid = f"syn-{i:02d}"
        editor = f"{people[2 * i]} {people[2 * i + 1]}"
        kind = kinds[i % len(kinds)]
        founded = str(1900 + (i * 37) % 120)
        tables.append({
            "id": tid,
            "title": f"{name} ({kind})",
            "header": ["Field", "Value"],
            "rows": [["Editor", editor], ["Founded", founded], ["Based in", cities[i]], ["Type", kind]],
        })
        if i % 2 == 0:
            qa.append({"qid": f"q{i:02d}", "question": f"who was the editor of {name}?", "table_id": tid,
                       "answers": [editor]})
        else:
            qa.append({"qid": f"q{i:02d}", "question": f"where is {name} based?", "table_id": tid,
                       "answers": [cities[i]]})
    write_jsonl(ROOT / "synthetic50" / "corpus.jsonl", tables)
    write_jsonl(ROOT / "synthetic50" / "qa.jsonl", qa)


def ikar():
    rng = random.Random(7)
    taken = {"ikar"}
    names = unique_words(rng, 11, 2, taken)
    editors = unique_words(rng, 11, 2, taken)
    tables = [{"id": "ikar", "title": "Ikar", "header": ["Editor", "Year"], "rows": [["A. Smith", "1990"]]}]
    for i, (n, e) in enumerate(zip(names, editors)):
        tables.append({"id": f"mag-{i:02d}", "title": n, "header": ["Editor", "Year"],
                       "rows": [[f"{e[0]}. {e}", str(1950 + 3 * i)]]})
    write_jsonl(ROOT / "ikar" / "corpus.jsonl", tables)
    write_jsonl(ROOT / "ikar" / "qa.jsonl", [
        {"qid": "ikar-1", "question": "who was the editor for Ikar?", "table_id": "ikar", "answers": ["A. Smith"]}])


def phantom():
    tables = [
        {"id": "phantom-1986", "title": "The Phantom of the Opera (1986 musical) original London cast",
         "header": ["Role", "Performer"],
         "rows": [["The Phantom", "Michael Crawford"], ["Christine Daae", "Sarah Brightman"],
                  ["Raoul", "Steve Barton"], ["Carlotta", "Rosemary Ashe"]]},
        {"id": "cats-1981", "title": "Cats (1981 musical) original London cast",
         "header": ["Role", "Performer"],
         "rows": [["Grizabella", "Elaine Paige"], ["Old Deuteronomy", "Brian Blessed"]]},
        {"id": "evita-1978", "title": "Evita (1978 musical) original London cast",
         "header": ["Role", "Performer"],
         "rows": [["Eva Peron", "Elaine Paige"], ["Che", "David Essex"]]},
        {"id": "les-mis-1985", "title": "Les Miserables (1985 musical) original London cast",
         "header": ["Role", "Performer"],
         "rows": [["Jean Valjean", "Colm Wilkinson"], ["Javert", "Roger Allam"]]},
    ]
    qa = [{"qid": "phantom-1", "question": "Who played the first Phantom of the Opera?", "table_id": "phantom-1986",
           "answers": ["Michael Crawford", "Sarah Brightman", "Steve Barton", "Rosemary Ashe"]}]
    write_jsonl(ROOT / "phantom" / "corpus.jsonl", tables)
    write_jsonl(ROOT / "phantom" / "qa.jsonl", qa)


if __name__ == "__main__":
    synthetic50()
    ikar()
    phantom()
