#!/usr/bin/env python3
"""Generate the bundled keyword-separable desk corpus.

Each racism row carries two or three marker words from its subtype's list;
normal rows draw content words from a disjoint list. Both classes share
filler words, digits, punctuation and the odd emoji so every cleaning stage
has something to do.
"""
import argparse
import csv
import random
import sys

MARKERS = {
    "representational": ["কালো", "গায়ের", "রঙ", "চেহারা", "বর্ণ", "ময়লা"],
    "ideological": ["জাত", "শ্রেষ্ঠ", "নিচু", "বংশ", "উঁচু", "রক্ত"],
    "discursive": ["অসভ্য", "বর্বর", "উপজাতি", "বহিরাগত", "নোংরা", "জংলি"],
}
NORMAL = ["খেলা", "বই", "গান", "আকাশ", "নদী", "ভাত", "স্কুল", "বৃষ্টি", "বন্ধু",
          "সুন্দর", "ছবি", "মাঠ", "বাজার", "চা", "ফুল", "ট্রেন"]
FILLER = ["আজ", "এই", "খুব", "সবাই", "মানুষ", "দেখলাম", "বলল", "কথা", "সময়",
          "অনেক", "আমি", "তুমি", "এবং", "কিন্তু", "থেকে", "সাথে"]
DECOR = ["!", "।", "?", "...", ",", "😀", "🙏", "২০২৪", "১০", "5"]
COUNTS = {"representational": 40, "ideological": 40, "discursive": 40, "normal": 80}


def sentence(rng, label):
    pool = NORMAL if label == "normal" else MARKERS[label]
    words = rng.sample(pool, rng.randint(2, 3)) + rng.sample(FILLER, rng.randint(3, 5))
    rng.shuffle(words)
    out = []
    for w in words:
        if rng.random() < 0.15:
            w = rng.choice(DECOR[-3:]) + w
        out.append(w)
        if rng.random() < 0.2:
            out.append(rng.choice(DECOR[:-3]))
    return " ".join(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    rows, seen = [], set()
    for label, n in COUNTS.items():
        while sum(1 for _, l in rows if l == label) < n:
            text = sentence(rng, label)
            if text not in seen:
                seen.add(text)
                rows.append((text, label))
    rng.shuffle(rows)
    out = sys.stdout if args.output == "-" else open(args.output, "w", encoding="utf-8", newline="")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["id", "text", "label"])
    for i, (text, label) in enumerate(rows):
        w.writerow([i, text, label])


if __name__ == "__main__":
    main()
