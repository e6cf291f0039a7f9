import numpy as np
import pytest

from musecsp.core import CspInstance
from musecsp.graph import build_muse


@pytest.fixture
def shared_branch():
    """Three nodes, two segments {0,1,2} and {0,2}; node 0 has labels a,b.

    The worked example used throughout the support-set tests: edges
    0->1, 0->2, 1->2 with 0 the only start and 2 the only end.
    """
    csp = CspInstance.build([["a", "b"], ["c"], ["d"]], r2=lambda i, a, j, b: True)
    return build_muse(csp, edges=[(0, 1), (0, 2), (1, 2)], starts=[0], ends=[2])


def parallel_branch(r2_pairs):
    """DAG 0 -> 1 -> {2, 3}, segments {0,1,2} and {0,1,3}.

    Domains: 0:{a,b}, 1:{c,d}, 2:{e}, 3:{f}; r2 defaults to admissible except
    the listed (i, a, j, b) -> 0/1 entries (stored symmetrically).
    """
    def r2(i, x, j, y):
        key = (i, x, j, y) if i < j else (j, y, i, x)
        return bool(r2_pairs.get(key, 1))

    csp = CspInstance.build([["a", "b"], ["c", "d"], ["e"], ["f"]], r2=r2)
    return build_muse(csp, [(0, 1), (1, 2), (1, 3)], [0], [2, 3])


def unsupported_label_net():
    """Label c at node 1 has support at node 0 but none at either branch."""
    return parallel_branch({
        (0, "a", 1, "c"): 1, (0, "a", 1, "d"): 0,
        (0, "b", 1, "c"): 0, (0, "b", 1, "d"): 1,
        (1, "c", 2, "e"): 0, (1, "c", 3, "f"): 0,
        (1, "d", 2, "e"): 1, (1, "d", 3, "f"): 1,
        (0, "a", 2, "e"): 1, (0, "a", 3, "f"): 1,
        (0, "b", 2, "e"): 1, (0, "b", 3, "f"): 1,
    })


def locally_supported_net():
    """Arc consistent over the DAG, yet c@1 and a@0 appear in no solution.

    c@1 is supported by a@0 and e@2 inside segment {0,1,2}, but those two
    supporters are incompatible with each other; only joint path consistency
    plus another arc pass can remove c and then a.
    """
    return parallel_branch({
        (0, "a", 1, "c"): 1, (0, "a", 1, "d"): 0,
        (0, "b", 1, "c"): 0, (0, "b", 1, "d"): 1,
        (0, "a", 2, "e"): 0, (0, "b", 2, "e"): 1,
        (0, "a", 3, "f"): 1, (0, "b", 3, "f"): 1,
        (1, "c", 2, "e"): 1, (1, "d", 2, "e"): 1,
        (1, "c", 3, "f"): 0, (1, "d", 3, "f"): 1,
    })


def live_r2_equal(x, y) -> bool:
    """Relation equality restricted to labels still in the domains."""
    if x.csp.domains != y.csp.domains:
        return False
    for (i, j) in sorted(p for p in x.e_pairs if p[0] < p[1]):
        for a in sorted(x.csp.domains[i], key=str):
            for b in sorted(x.csp.domains[j], key=str):
                if x.csp.r2_ok(i, a, j, b) != y.csp.r2_ok(i, a, j, b):
                    return False
    return True


def full_r2_equal(x, y) -> bool:
    return all(
        np.array_equal(x.csp.r2_table(*p), y.csp.r2_table(*p))
        for p in sorted(x.e_pairs)
    )
