"""Regenerates counts.json, the reference counts for passages.json.

Sentences are the entries of each paragraph list (headings included).
Words are whitespace-separated tokens holding a letter or digit, the way a
word processor counts them. Characters are letters. Syllables come from the
CMU pronouncing dictionary (first pronunciation, hyphenated parts summed),
with MANUAL covering tokens it lacks. Difficult words are tokens that are
not on the familiar list, even after dropping -s/-es/-d/-ed/-ing/'s.
Complex words have 3+ syllables once an -es/-ed/-ing ending is dropped
(when the bare stem is a dictionary word); capitalised words inside a
sentence are names and never complex.

usage: python make_counts.py path/to/cmudict.dict path/to/dale_chall_familiar.txt
"""
import json
import re
import sys

MANUAL = {"e.g": 2}


def load_cmu(path):
    cmu = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            parts = line.split("#")[0].split()
            if not parts or re.search(r"\(\d+\)$", parts[0]):
                continue
            cmu[parts[0]] = sum(1 for ph in parts[1:] if ph[-1].isdigit())
    return cmu


def syllables(token, cmu):
    w = re.sub(r"[^a-z'\-.]", "", token.lower()).strip(".'-")
    if w in MANUAL:
        return MANUAL[w]
    return sum(cmu[part] for part in w.split("-") if part)


def bare(token):
    return re.sub(r"[^a-z'\-.]", "", token.lower()).strip(".'-")


def is_difficult(token, familiar):
    w = re.sub(r"[^a-z]", "", bare(token).replace("'s", ""))
    if not w or w in familiar:
        return False
    for suffix in ("s", "es", "d", "ed", "ing"):
        if w.endswith(suffix) and w[: -len(suffix)] in familiar:
            return False
    return True


def gf_syllables(token, cmu):
    w = bare(token)
    for suffix in ("es", "ed", "ing"):
        if w.endswith(suffix):
            for stem in (w[: -len(suffix)], w[: -len(suffix)] + "e"):
                if stem in cmu:
                    return cmu[stem]
    return syllables(token, cmu)


def main():
    cmu = load_cmu(sys.argv[1])
    familiar = set()
    with open(sys.argv[2], encoding="utf-8") as f:
        for line in f:
            line = line.strip().lower()
            if line and not line.startswith("#"):
                familiar.add(line)
    passages = json.load(open("passages.json", encoding="utf-8"))
    out = []
    for p in passages:
        sentences = [s for para in p["paragraphs"] for s in para]
        tokens = [t for s in sentences for t in s.split() if re.search(r"[A-Za-z0-9]", t)]
        complex_words = 0
        for s in sentences:
            words = [t for t in s.split() if re.search(r"[A-Za-z0-9]", t)]
            for i, t in enumerate(words):
                if i > 0 and t[0].isupper():
                    continue
                complex_words += gf_syllables(t, cmu) >= 3
        syl = [syllables(t, cmu) for t in tokens]
        out.append({
            "id": p["id"],
            "words": len(tokens),
            "sentences": len(sentences),
            "syllables": sum(syl),
            "characters": sum(1 for t in tokens for c in t if c.isalpha()),
            "polysyllables": sum(1 for s in syl if s >= 3),
            "difficult_words": sum(1 for t in tokens if is_difficult(t, familiar)),
            "complex_words": complex_words,
        })
    with open("counts.json", "w", encoding="utf-8") as f:
        json.dump(out, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
