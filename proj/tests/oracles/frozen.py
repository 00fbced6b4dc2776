"""Prints the reference values frozen into the C++ unit and acceptance tests.

Run: python3 tests/oracles/frozen.py
"""

import math
from ref import (MT64, Stream, splitmix64, derive_seed, generate_world, sample_episode, caption_scores,
                 softmax, bayes, exact_ig, ig_topk, topk, top1, mid_rank, pmr)


def section(name):
    print(f"\n== {name}")


section("rng")
m = MT64(5489)
for _ in range(9999):
    m.next()
print("mt19937_64 default seed, 10000th:", m.next())
s = Stream(42)
print("u64 x3:", [s.mt.next() for _ in range(3)])
s = Stream(42)
print("uniform x3:", [repr(s.uniform()) for _ in range(3)])
s = Stream(42)
print("below(10) x8:", [s.below(10) for _ in range(8)])
s = Stream(42)
print("categorical(0.2,0.5,0.3) x8:", [s.categorical([0.2, 0.5, 0.3]) for _ in range(8)])
s = Stream(42)
print("sample(10,4):", s.sample(10, 4))
print("splitmix64(0):", splitmix64(0))
print("derive_seed(1,2):", derive_seed(1, 2))
print("derive_seed(derive_seed(7,0),3):", derive_seed(derive_seed(7, 0), 3))

section("world N=4 F=2 Q=2 A=2 eps=0.1 seed=7")
bits, qf, table = generate_world(4, 2, 2, 2, 0.1, 7)
print("bits:", bits)
print("question_feature:", qf)
print("table:", table)

section("world N=3 F=2 Q=5 A=3 eps=0.2 seed=13 spread=1")
bits, qf, table = generate_world(3, 2, 5, 3, 0.2, 13)
print("bits:", bits)
print("question_feature:", qf)
print("table:", [[[repr(x) for x in row] for row in rows] for rows in table])

section("dense world N=2 F=1 Q=2 A=3 seed=3")
bits, qf, table = generate_world(2, 1, 2, 3, 0.1, 3, dense=True)
print("table:", [[[repr(x) for x in row] for row in rows] for rows in table])

section("episode N=4 F=3 F0=2 eta=0.25, world seed 11 spread 0, episode stream 99")
bits, qf, table = generate_world(4, 3, 3, 2, 0.1, 11, spread=0.0)
print("bits:", bits)
target, caption = sample_episode(bits, 4, 3, 2, 0.25, Stream(99))
print("target:", target, "caption:", caption)
print("scores:", [repr(x) for x in caption_scores(bits, caption, 0.25)])

section("caption scores, 4 classes, hand bits")
hb = [[0, 0], [0, 1], [1, 0], [1, 1]]
cap = [(0, 1), (1, 0)]
print("scores:", [repr(x) for x in caption_scores(hb, cap, 0.25)])
print("prior lambda=1:", [repr(x) for x in softmax(caption_scores(hb, cap, 0.25), 1.0)])
print("prior lambda=0.5:", [repr(x) for x in softmax(caption_scores(hb, cap, 0.25), 0.5)])

section("exact_ig")
print("perfect split:", repr(exact_ig([0.5, 0.5], [[1, 0], [0, 1]])), "ln2 =", repr(math.log(2)))
b3 = [0.5, 0.3, 0.2]
r3 = [[0.9, 0.1], [0.2, 0.8], [0.5, 0.5]]
print("3-class noisy:", repr(exact_ig(b3, r3)))

section("ig_topk")
b4 = [0.4, 0.3, 0.2, 0.1]
r4 = [[0.7, 0.2, 0.1], [0.1, 0.8, 0.1], [0.3, 0.3, 0.4], [0.0, 0.0, 1.0]]
print("classes {0,1,2}, answers {0,1}:", repr(ig_topk(b4, r4, [0, 1, 2], [0, 1])))
print("classes {0,3}, answers {0,1} (class 3 falls back):", repr(ig_topk(b4, r4, [0, 3], [0, 1])))
print("full sets:", repr(ig_topk(b4, r4, [0, 1, 2, 3], [0, 1, 2])), "exact:", repr(exact_ig(b4, r4)))

section("select_question 4 classes, 3 questions, 3 answers")
belief = [0.1, 0.4, 0.2, 0.3]
tab = [  # [c][q][a]
    [[0.8, 0.1, 0.1], [0.5, 0.4, 0.1], [0.3, 0.3, 0.4]],
    [[0.1, 0.8, 0.1], [0.5, 0.4, 0.1], [0.3, 0.4, 0.3]],
    [[0.8, 0.1, 0.1], [0.1, 0.1, 0.8], [0.4, 0.3, 0.3]],
    [[0.1, 0.1, 0.8], [0.4, 0.5, 0.1], [0.3, 0.3, 0.4]],
]
cls = topk(belief, 3)
print("C_topk (K=3):", cls)
for q in range(3):
    answers = []
    for c in cls:
        a = top1(tab[c][q])
        if a not in answers:
            answers.append(a)
    rows = [tab[c][q] for c in range(4)]
    print(f"q{q} answers:", answers, "ig:", repr(ig_topk(belief, rows, cls, answers)))

section("bayes + pmr")
print("bayes((0.25,0.25,0.5),(0.8,0.2,0.1)):", [repr(x) for x in bayes([0.25, 0.25, 0.5], [0.8, 0.2, 0.1])])
print("mid-rank (0.1,0.4,0.4,0.1) target 0:", mid_rank([0.1, 0.4, 0.4, 0.1], 0), "target 1:",
      mid_rank([0.1, 0.4, 0.4, 0.1], 1))
print("pmr(rank 3.5, N 4):", repr(pmr(3.5, 4)))

section("fit_independent replay: world N=3 F=2 Q=2 A=2 eps=0.2 seed 5, 20 triples, stream 17")
bits, qf, table = generate_world(3, 2, 2, 2, 0.2, 5)
s = Stream(17)
counts = [[[0, 0] for _ in range(2)] for _ in range(3)]
for _ in range(20):
    c = s.below(3)
    q = s.below(2)
    a = s.categorical(table[c][q])
    counts[c][q][a] += 1
print("counts:", counts)
alpha = 0.5
print("alpha=0.5 table:", [[[repr((counts[c][q][a] + alpha) / (sum(counts[c][q]) + 2 * alpha)) for a in range(2)]
                             for q in range(2)] for c in range(3)])

section("rollout replay: world N=4 F=3 Q=5 A=2 eps=0 seed 11 spread 0, proposer policy w_cap=-0.5, 6 dialogs x 2 rounds")
bits, qf, table = generate_world(4, 3, 5, 2, 0.0, 11, spread=0.0)
print("question_feature:", qf)
counts = {}
for d in range(6):
    s = Stream(derive_seed(23, d))
    target, caption = sample_episode(bits, 4, 3, 1, 0.25, s)
    mentioned = {j for j, _ in caption}
    asked = []
    for t in range(2):
        unasked = [q for q in range(5) if q not in asked]
        q = min(unasked, key=lambda k: (-(1.0 + (-0.5 if qf[k] in mentioned else 0.0)), k))
        a = s.categorical(table[target][q])
        counts[(target, q, a)] = counts.get((target, q, a), 0) + 1
        asked.append(q)
print("counts (c,q,a)->n:", sorted(counts.items()))

section("high-precision direct summation (mpmath, 40 digits)")
from mpmath import mp, mpf, log as mlog
mp.dps = 40


def mp_ig(belief, rows):
    z = sum(belief)
    p = [b / z for b in belief]
    marg = [sum(p[c] * rows[c][a] for c in range(len(p))) for a in range(len(rows[0]))]
    return sum(p[c] * rows[c][a] * mlog(rows[c][a] / marg[a])
               for c in range(len(p)) for a in range(len(rows[0])) if rows[c][a] > 0 and p[c] > 0)


b = [mpf(3) / 4, mpf(1) / 4]
rows = [[mpf(9) / 10, mpf(1) / 10], [mpf(2) / 10, mpf(8) / 10]]
print("exact_ig (0.75,0.25), rows (0.9,0.1),(0.2,0.8):", mp.nstr(mp_ig(b, rows), 20))
b = [mpf(5) / 10, mpf(3) / 10]
full = [[mpf(8) / 10, mpf(1) / 10, mpf(1) / 10], [mpf(2) / 10, mpf(7) / 10, mpf(1) / 10]]
reg = [[r[0] / (r[0] + r[1]), r[1] / (r[0] + r[1])] for r in full]
print("ig_topk belief (0.5,0.3,0.2), C={0,1}, A={yes,no}, rows (0.8,0.1,0.1),(0.2,0.7,0.1),(0.4,0.4,0.2):",
      mp.nstr(mp_ig(b, reg), 20))
