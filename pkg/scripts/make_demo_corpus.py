"""Generate the synthetic demo corpus under demo/.

Six speakers, each with two "human" texts and two texts from each of two
imitating sources, for 36 files and 18 speaker/source groups. The texts are
random word salad drawn from weighted pools; they exist to exercise the
pipeline end to end, not to resemble real speeches.

    python scripts/make_demo_corpus.py [--out demo]
"""

import argparse
import csv
import random
from pathlib import Path

SPEAKERS = {
    "Reagan": (1982, 1985),
    "Clinton": (1994, 1997),
    "Bush": (2002, 2006),
    "Obama": (2010, 2014),
    "Trump": (2018, 2019),
    "Biden": (2022, 2023),
}

FUNCTION = ("the of and to a in that is for it on with as by this be are was have "
            "not but at from or an so all there when what".split())
SHORT = ("work job home tax law hope plan win help time year pay way day good new "
         "real hard free safe fair kids town farm road care".split())
LONG = ("opportunity prosperity innovation leadership commitment infrastructure "
        "economic government security education healthcare democracy freedom "
        "community investment together principles challenges responsibility".split())
POLITICS = "Congress president federal budget policy majority senate republican democrat".split()
NEGATIVE = "fear threat crisis war terror danger loss attack blame".split()
POSITIVE = "proud peace success strength trust courage thank blessed hopeful".split()

PRONOUNS = {
    "self": ["I", "me", "my", "myself"],
    "we": ["we", "us", "our", "ourselves"],
    "you": ["you", "your"],
    "shehe": ["he", "she", "his", "her"],
    "they": ["they", "them", "their"],
}

SIGNATURE = {
    "Reagan": "deficit Soviet spending entrepreneurs".split(),
    "Clinton": "bridge century welfare families".split(),
    "Bush": "terrorists Iraq compassion liberty".split(),
    "Obama": "recovery clean energy middle-class".split(),
    "Trump": "wall borders great jobs".split(),
    "Biden": "pandemic Ukraine folks unions".split(),
}

# Per-source style knobs: sentence length range, pronoun weights, long-word
# weight, sentiment weights and text length in sentences.
STYLE = {
    "human": dict(sent=(8, 28), pron=dict(self=3, we=5, you=2, shehe=1, they=2),
                  long=1.0, pos=1.0, neg=1.0, pol=1.0, n=(40, 60)),
    "gpt-3.5": dict(sent=(14, 30), pron=dict(self=1, we=9, you=1, shehe=0, they=1),
                    long=2.5, pos=2.5, neg=0.4, pol=1.5, n=(16, 22)),
    "gpt-4o": dict(sent=(12, 27), pron=dict(self=0.5, we=11, you=0.6, shehe=0, they=0.6),
                   long=2.0, pos=2.3, neg=0.3, pol=2.2, n=(20, 28)),
}


def sentence(rng, speaker, style):
    lo, hi = style["sent"]
    pools = [
        (FUNCTION, 10.0),
        (SHORT, 4.0),
        (LONG, 2.0 * style["long"]),
        (POLITICS, 0.8 * style["pol"]),
        (POSITIVE, 0.8 * style["pos"]),
        (NEGATIVE, 0.6 * style["neg"]),
        (SIGNATURE[speaker], 0.8),
    ]
    for key, weight in style["pron"].items():
        if weight:
            pools.append((PRONOUNS[key], 0.3 * weight))
    words = []
    for _ in range(rng.randint(lo, hi)):
        pool = rng.choices([p for p, _ in pools], weights=[w for _, w in pools])[0]
        words.append(rng.choice(pool))
    if rng.random() < 0.15:
        words.insert(rng.randrange(len(words)), f"in {rng.randint(1950, 2023)}")
    if rng.random() < 0.3 and len(words) > 6:
        words[rng.randrange(2, len(words) - 2)] += ","
    text = " ".join(words)
    text = text[0].upper() + text[1:]
    end = rng.choices([".", "!", "?"], weights=[20, 2, 1])[0]
    return text + end


def speech(rng, speaker, source):
    style = STYLE[source]
    sentences = [sentence(rng, speaker, style) for _ in range(rng.randint(*style["n"]))]
    paragraphs = [" ".join(sentences[i:i + 5]) for i in range(0, len(sentences), 5)]
    return "\n\n".join(paragraphs) + "\n"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "demo"))
    ap.add_argument("--seed", type=int, default=1789)
    args = ap.parse_args()
    out = Path(args.out)
    (out / "texts").mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    rows = []
    for speaker, years in SPEAKERS.items():
        for source in STYLE:
            for year in years:
                doc_id = f"{speaker.lower()}-{year}" + ("" if source == "human" else f"-{source}")
                rel = f"texts/{doc_id}.txt"
                (out / rel).write_text(speech(rng, speaker, source), encoding="utf-8")
                rows.append([doc_id, speaker, year, source, rel])
    with open(out / "manifest.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "author", "year", "source_label", "path"])
        writer.writerows(rows)


if __name__ == "__main__":
    main()
