BANANA = "banana"

# symbol codes for the inferred banana alphabet
A, B, N = 1, 2, 3

# preorder node ids of the banana suffix tree
(ROOT, LEAF_END, NODE_A, LEAF_A, NODE_ANA, LEAF_ANA, LEAF_ANANA,
 LEAF_BANANA, NODE_NA, LEAF_NA, LEAF_NANA) = range(11)


def naive_lcp(a, b) -> int:
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k
