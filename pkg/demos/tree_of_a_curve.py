"""
The cluster tree of a function on a line
========================================

A function with two bumps has a tree with two leaves joined at the level of
the valley between them. Merge heights and tree distances are read off the
tree.
"""

import numpy as np

from clustertree import MergeHeightIndex, ScalarField, build_cluster_tree, merge_height, tree_distance

# five values on a path graph: peaks at vertices 1 and 3, valley at 2
f = ScalarField.on_path([1.0, 3.0, 1.0, 4.0, 1.0])
tree = build_cluster_tree(f)
print(tree)

for i in tree.preorder():
    print(f"node {i}: born at {tree.birth[i]}, dies at {tree.death(i)}, children {tree.children[i]}")

# the two peaks meet at level 1, so their distance along the tree is 3 + 4 - 2
index = MergeHeightIndex(tree)
print("merge height of the peaks:", merge_height(index, 1, 3))
print("tree distance of the peaks:", tree_distance(index, 1, 3))

# a smooth curve: three bumps of different heights
x = np.linspace(-4, 4, 400)
g = ScalarField.on_path(np.exp(-(x + 2) ** 2) + 0.6 * np.exp(-(x**2) * 4) + 0.9 * np.exp(-((x - 2.2) ** 2)))
print(build_cluster_tree(g))
