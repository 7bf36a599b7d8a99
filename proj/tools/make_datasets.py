#!/usr/bin/env python3
# Copyright 2026 The ODT Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the benchmark datasets under data/.

The MONK's problems and the tic-tac-toe endgame set are fully determined by
their published definitions, so they are rebuilt from scratch. The breast
cancer table is converted from the R MASS::biopsy CSV when a path is given.

  python3 tools/make_datasets.py [--biopsy path/to/biopsy.csv]
"""

import argparse
import csv
import itertools
import os

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")

MONKS_DOMAINS = [(1, 2, 3), (1, 2, 3), (1, 2), (1, 2, 3), (1, 2, 3, 4), (1, 2)]

MONKS_CONCEPTS = {
    1: lambda a: a[0] == a[1] or a[4] == 1,
    2: lambda a: sum(1 for v in a if v == 1) == 2,
    3: lambda a: (a[4] == 3 and a[3] == 1) or (a[4] != 4 and a[1] != 3),
}


def write_monks(problem):
    path = os.path.join(DATA_DIR, "monks-%d.txt" % problem)
    with open(path, "w") as out:
        for idx, attrs in enumerate(itertools.product(*MONKS_DOMAINS), start=1):
            label = 1 if MONKS_CONCEPTS[problem](attrs) else 0
            fields = " ".join(str(v) for v in (label,) + attrs)
            out.write(" %s data_%d\n" % (fields, idx))
    return path


LINES = [(0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8),
         (0, 4, 8), (2, 4, 6)]


def winner(board):
    for a, b, c in LINES:
        if board[a] != "b" and board[a] == board[b] == board[c]:
            return board[a]
    return None


def terminal_boards():
    seen = set()
    order = []

    def play(board, player):
        if winner(board) is not None or "b" not in board:
            key = tuple(board)
            if key not in seen:
                seen.add(key)
                order.append(key)
            return
        for cell in range(9):
            if board[cell] == "b":
                board[cell] = player
                play(board, "o" if player == "x" else "x")
                board[cell] = "b"

    play(["b"] * 9, "x")
    return sorted(order)


def write_ttt():
    path = os.path.join(DATA_DIR, "tic-tac-toe.csv")
    header = ["top-left-square", "top-middle-square", "top-right-square",
              "middle-left-square", "middle-middle-square",
              "middle-right-square", "bottom-left-square",
              "bottom-middle-square", "bottom-right-square", "Class"]
    with open(path, "w", newline="") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for board in terminal_boards():
            label = "positive" if winner(board) == "x" else "negative"
            writer.writerow(list(board) + [label])
    return path


def write_bc(biopsy_path):
    path = os.path.join(DATA_DIR, "breast-cancer-wisconsin.csv")
    with open(biopsy_path) as src, open(path, "w", newline="") as out:
        reader = csv.reader(src)
        header = next(reader)
        writer = csv.writer(out, lineterminator="\n")
        # Drop the R row name and the sample ID; keep V1..V9 and the class.
        writer.writerow(["clump_thickness", "cell_size_uniformity",
                         "cell_shape_uniformity", "marginal_adhesion",
                         "epithelial_cell_size", "bare_nuclei",
                         "bland_chromatin", "normal_nucleoli", "mitoses",
                         "class"])
        assert header[2:] == ["V%d" % i for i in range(1, 10)] + ["class"]
        for row in reader:
            writer.writerow(row[2:])
    return path


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--biopsy", help="MASS::biopsy CSV export")
    args = parser.parse_args()
    os.makedirs(DATA_DIR, exist_ok=True)
    for problem in (1, 2, 3):
        print(write_monks(problem))
    print(write_ttt())
    if args.biopsy:
        print(write_bc(args.biopsy))


if __name__ == "__main__":
    main()
