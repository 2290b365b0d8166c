"""Anatomy of an estimation forest.

The learners' shared intermediate object is a forest over the items: star
edges connect each item to its cluster's center, and center-to-center edges
chain neighboring weight scales together. Multiplying the (log) ratio
estimates along a path recovers any covered weight ratio; pairs left in
different components are provably negligible relative to each other.
validate_forest audits all of this against the ground truth.
"""

import numpy as np

import slatelearn as sl


def main():
    # three well-separated weight scales
    truth = sl.LogWeightMnl(np.log([1.0, 1.1, 40.0, 44.0, 1600.0]))
    oracle = sl.LiveOracle(truth, seed=5)
    forest = sl.build_estimation_forest(oracle, 0.5, 0.2, 0.1,
                                        np.random.default_rng(5))

    g = forest.graph
    print("clusters (light to heavy):",
          [c.tolist() for c in g.clusters])
    print("centers:", g.centers.tolist())

    print("\nedges (log ratio estimates):")
    for (u, v), lr in sorted(forest.edge_log.items()):
        print("  w_{} / w_{} ~= {:.3f}   (true {:.3f})".format(
            u, v, np.exp(lr), np.exp(truth.log_w[u] - truth.log_w[v])))

    comps = forest.components()
    print("\ncomponents:", [sorted(int(x) for x in c) for c in comps])
    print("edge count = n - #components:",
          len(forest.edge_log) == truth.n - len(comps))

    report = sl.validate_forest(forest, truth.log_w)
    print("validator clean:", report.ok)

    # corrupt one edge and the validator names the violated condition
    u, v = next(iter(forest.edge_log))
    forest.edge_log[(u, v)] += np.log(2.0)
    report = sl.validate_forest(forest, truth.log_w)
    print("after corrupting edge ({}, {}): clean={}, violations={}".format(
        u, v, report.ok, report.violations[:2]))


if __name__ == "__main__":
    main()
