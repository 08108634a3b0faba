import pytest

from kronchi.quiver import SupportQuiver
from kronchi.trees import LocalizationTree


def make_tree(source_levels, sink_levels, edges):
    q = SupportQuiver.from_levels(source_levels, sink_levels)
    return LocalizationTree(q, frozenset(edges))


@pytest.fixture
def example_split_trees():
    """The two localization data for ``(1*2+2*1, 1*5)`` used in the refinement discussion."""
    e1 = [("i_1_1", "j_1_1"), ("i_1_1", "j_1_2"), ("i_1_2", "j_1_2"), ("i_1_2", "j_1_3"),
          ("i_2_1", "j_1_3"), ("i_2_1", "j_1_4"), ("i_2_1", "j_1_5")]
    e2 = [("i_1_1", "j_1_1"), ("i_1_1", "j_1_2"), ("i_2_1", "j_1_2"), ("i_2_1", "j_1_3"),
          ("i_2_1", "j_1_4"), ("i_1_2", "j_1_4"), ("i_1_2", "j_1_5")]
    return make_tree([1, 1, 2], [1] * 5, e1), make_tree([1, 1, 2], [1] * 5, e2)


@pytest.fixture
def alternating_path():
    edges = [("i_1_1", "j_1_1"), ("i_1_1", "j_1_2"), ("i_1_2", "j_1_2"), ("i_1_2", "j_1_3"),
             ("i_1_3", "j_1_3"), ("i_1_3", "j_1_4"), ("i_1_4", "j_1_4"), ("i_1_4", "j_1_5")]
    return make_tree([1] * 4, [1] * 5, edges)
