"""Models and the MaxSample oracle.

An MNL model assigns each item a positive weight; offered a slate, it picks
item i with probability w_i / sum of the slate's weights. The oracle answers
one such draw per query and keeps a ledger of how often each pair (and each
larger slate) was asked.
"""

import numpy as np

import slatelearn as sl


def main():
    # three items with weights 1 : 2 : 4, stored as natural logs
    model = sl.LogWeightMnl(np.log([1.0, 2.0, 4.0]))
    print("weights:", np.exp(model.log_w))
    print("P(win | {0,1,2}) =", model.slate_distribution([0, 1, 2]))
    print("P(2 beats 0)     =", sl.pair_probability(model, 2, 0))

    # the oracle draws winners; everything is reproducible from one seed
    oracle = sl.LiveOracle(model, seed=7)
    winners = [oracle.sample_pair(0, 2) for _ in range(10)]
    print("\nten pair draws of {0, 2}:", winners)
    print("slate draw of {0,1,2}:", oracle.max_sample([0, 1, 2]))

    # the ledger has been counting all along
    print("\nledger:", sl.ledger_report(oracle.ledger))

    # a matching pseudo-MNL is the stress instance: the heavier pair always
    # wins, and within a pair the winner is a fixed Bernoulli draw
    pseudo = sl.MatchingPseudoMnl(np.array([0.7, 0.3]), np.arange(4))
    print("\npseudo-MNL P(win | {0,1}) =", pseudo.slate_distribution([0, 1]))
    print("pseudo-MNL P(win | all)   =",
          pseudo.slate_distribution([0, 1, 2, 3]))


if __name__ == "__main__":
    main()
