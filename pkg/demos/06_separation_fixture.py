"""Why pair queries alone cannot pin the model down.

separation_fixture builds two MNLs that are nearly indistinguishable on
every pair of items (each pairwise win probability differs by at most
eps/n) yet disagree by at least eps/9 on the full slate. Any learner that
certifies accuracy on all slates must therefore pay attention to how small
pairwise errors compound.
"""

import numpy as np

import slatelearn as sl


def main():
    n, eps = 16, 0.2
    m1, m2 = sl.separation_fixture(n, eps)

    worst_pair = max(abs(sl.pair_probability(m1, u, v)
                         - sl.pair_probability(m2, u, v))
                     for u in range(n) for v in range(n) if u != v)
    print("largest pairwise gap: {:.5f}  (<= eps/n = {:.5f})".format(
        worst_pair, eps / n))

    full = np.arange(n)
    p1 = m1.slate_distribution(full)[-1]
    p2 = m2.slate_distribution(full)[-1]
    print("P(last item wins full slate): {:.5f} vs {:.5f}".format(p1, p2))
    print("full-slate gap: {:.5f}  (>= eps/9 = {:.5f})".format(
        abs(p1 - p2), eps / 9))

    rep = sl.distance_exact(m1, m2)
    print("\nexact distances: d1 = {:.5f}, dinf = {:.5f}".format(
        rep.d1, rep.dinf))
    print("worst slate has {} of {} items".format(
        len(rep.argmax_slate), n))


if __name__ == "__main__":
    main()
