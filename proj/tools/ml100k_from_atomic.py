#!/usr/bin/env python3
"""Rebuild the MovieLens 100k file layout (u.data, u.item, u.user) from the
tab-separated "atomic" copy of the dataset shipped with some Python packages
(ml-100k.inter / ml-100k.item / ml-100k.user).

Usage: ml100k_from_atomic.py <atomic_dir> <out_dir>
"""
import os
import sys

GENRES = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
    "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
    "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
]


def rows(path):
    with open(path, encoding="latin-1") as f:
        next(f)
        for line in f:
            line = line.rstrip("\n")
            if line:
                yield line.split("\t")


def main(src, dst):
    os.makedirs(dst, exist_ok=True)
    with open(os.path.join(dst, "u.data"), "w", newline="\n") as out:
        for user, item, rating, ts in rows(os.path.join(src, "ml-100k.inter")):
            out.write(f"{user}\t{item}\t{int(float(rating))}\t{int(float(ts))}\n")
    with open(os.path.join(dst, "u.item"), "w", encoding="latin-1", newline="\n") as out:
        for item, title, year, classes in rows(os.path.join(src, "ml-100k.item")):
            tags = set(classes.split(" "))
            unknown = [g for g in tags if g not in GENRES]
            if unknown:
                raise SystemExit(f"item {item}: unknown genre(s) {unknown}")
            flags = "|".join("1" if g in tags else "0" for g in GENRES)
            out.write(f"{item}|{title}|{year}||||{flags}\n")
    with open(os.path.join(dst, "u.user"), "w", newline="\n") as out:
        for user, age, gender, occupation, zipcode in rows(os.path.join(src, "ml-100k.user")):
            out.write(f"{user}|{age}|{gender}|{occupation}|{zipcode}\n")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        raise SystemExit(__doc__)
    main(sys.argv[1], sys.argv[2])
