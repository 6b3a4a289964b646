# Copyright 2025 Beacon, shrwnsan
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""The belief tree of a Bayes-adaptive MDP.

Nodes live in a flat list addressed by id. Expanding a node appends all of its
children at once, so the children of one node occupy a contiguous id range:
child ``first_child + a * 2S + 2 * s_next + r`` is reached by action ``a``,
next state ``s_next`` and Bernoulli reward ``r``. Parents always have smaller
ids than their children, which lets backups run as one reverse sweep.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from beliefsearch.config import tree_config
from beliefsearch.core.belief import (
    DIRICHLET,
    HyperState,
    PosteriorModel,
    Transition,
    posterior_update,
)
from beliefsearch.core.mdp import Policy, argmax_lowest
from beliefsearch.exceptions import CapabilityError, ErrorCode, ResourceError, StateError
from beliefsearch.planning.bounds import BoundEstimate, exact_bounds, pinned_policy

logger = logging.getLogger(__name__)


class LeafValueSource(str, Enum):
    """Where a backup takes its leaf values from."""

    LOWER = "lower"
    UPPER = "upper"
    EXACT_LOWER = "exact_lower"
    EXACT_UPPER = "exact_upper"
    MEAN_OF_SAMPLES = "mean_of_samples"
    # Trivial bracket: 0 below and 1 / (1 - gamma) above
    PAD_LOWER = "pad_lower"
    PAD_UPPER = "pad_upper"


LeafValues = LeafValueSource | Mapping[int, float] | Callable[[int], float]


@dataclass(frozen=True)
class Branch:
    """All policies that start with ``root_action``."""

    root_action: int


@dataclass(slots=True)
class TreeNode:
    """One hyper-state of the tree.

    ``reward_in`` and ``action_in`` describe the edge from the parent; both are
    ``None`` at the root.
    """

    id: int
    hyper: HyperState
    depth: int
    parent: int | None = None
    action_in: int | None = None
    reward_in: int | None = None
    probability: float = 1.0
    first_child: int | None = None
    child_probabilities: np.ndarray | None = None
    lower: BoundEstimate = field(default_factory=BoundEstimate)
    upper: BoundEstimate = field(default_factory=BoundEstimate)
    backed_up: tuple[float, float] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.first_child is None

    @property
    def state(self) -> int:
        return self.hyper.state


class Tree:
    """A belief tree rooted at one hyper-state."""

    def __init__(
        self,
        root: HyperState,
        model: PosteriorModel = DIRICHLET,
        node_cap: int | None = None,
    ):
        belief = root.belief
        self.model = model
        self.node_cap = node_cap if node_cap is not None else tree_config.node_cap
        self.discount = belief.discount
        self.n_states = belief.n_states
        self.n_actions = belief.n_actions
        self.per_action = tree_config.n_rewards * self.n_states
        self.branching_factor = self.n_actions * self.per_action
        # Reward carried by each child within one action's block
        self._edge_rewards = np.tile(np.arange(tree_config.n_rewards, dtype=float), self.n_states)

        self.nodes: list[TreeNode] = [TreeNode(id=0, hyper=root, depth=0)]
        self._leaves: dict[int, None] = {0: None}
        self._branch_depths = np.zeros(self.n_actions, dtype=np.int64)
        self._max_depth = 0
        self.expansions = 0
        self._policies: dict[bytes, Policy] = {}
        self._exact: dict[tuple[int, bytes], tuple[float, float]] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    @property
    def max_depth(self) -> int:
        return self._max_depth

    def node(self, node_id: int) -> TreeNode:
        if not 0 <= node_id < len(self.nodes):
            msg = f"Unknown node id {node_id}"
            raise StateError(msg, node_id=node_id)
        return self.nodes[node_id]

    def expand(self, node_id: int) -> list[int]:
        """Create every child of a leaf: one per (action, next state, reward).

        Raises:
            StateError: If the node is already expanded
            ResourceError: If the children would exceed the node cap
        """
        node = self.node(node_id)
        if not node.is_leaf:
            msg = f"Node {node_id} is already expanded"
            raise StateError(msg, node_id=node_id)
        if len(self.nodes) + self.branching_factor > self.node_cap:
            msg = f"Expanding node {node_id} would exceed the node cap of {self.node_cap}"
            raise ResourceError(
                msg,
                resource="nodes",
                required=len(self.nodes) + self.branching_factor,
                limit=self.node_cap,
                error_code=ErrorCode.NODE_CAP_EXCEEDED,
            )

        s = node.state
        belief = node.hyper.belief
        first = len(self.nodes)
        depth = node.depth + 1
        probabilities = np.empty((self.n_actions, self.per_action))
        for a in range(self.n_actions):
            predictive = self.model.predictive(belief, s, a)
            for s_next in range(self.n_states):
                for r in range(tree_config.n_rewards):
                    child_id = len(self.nodes)
                    p = float(predictive[r, s_next])
                    probabilities[a, 2 * s_next + r] = p
                    child_belief = posterior_update(belief, Transition(s, a, r, s_next))
                    self.nodes.append(
                        TreeNode(
                            id=child_id,
                            hyper=HyperState(s_next, child_belief),
                            depth=depth,
                            parent=node_id,
                            action_in=a,
                            reward_in=r,
                            probability=p,
                        )
                    )
                    self._leaves[child_id] = None

        node.first_child = first
        node.child_probabilities = probabilities
        del self._leaves[node_id]
        self.expansions += 1
        self._max_depth = max(self._max_depth, depth)
        branch = self.branch_of(first)
        if node_id == 0:
            self._branch_depths[:] = np.maximum(self._branch_depths, 1)
        elif branch is not None:
            self._branch_depths[branch.root_action] = max(
                self._branch_depths[branch.root_action], depth
            )
        return list(range(first, first + self.branching_factor))

    def children(self, node_id: int, action: int) -> range:
        node = self.node(node_id)
        if node.first_child is None:
            return range(0)
        start = node.first_child + action * self.per_action
        return range(start, start + self.per_action)

    def children_by_action(self, node_id: int) -> dict[int, list[tuple[int, float]]] | None:
        """``action -> [(child id, probability)]``; ``None`` for a leaf."""
        node = self.node(node_id)
        if node.is_leaf or node.child_probabilities is None:
            return None
        return {
            a: [
                (child, float(p))
                for child, p in zip(
                    self.children(node_id, a), node.child_probabilities[a], strict=True
                )
            ]
            for a in range(self.n_actions)
        }

    def leaves(self) -> list[int]:
        """Leaf ids in increasing order."""
        return list(self._leaves)

    def path(self, node_id: int) -> list[int]:
        """Ids from the root down to ``node_id``."""
        path = [node_id]
        parent = self.node(node_id).parent
        while parent is not None:
            path.append(parent)
            parent = self.nodes[parent].parent
        path.reverse()
        return path

    def branch_of(self, node_id: int) -> Branch | None:
        """Root branch containing the node; ``None`` for the root."""
        if node_id == 0:
            return None
        path = self.path(node_id)
        action = self.nodes[path[1]].action_in
        return None if action is None else Branch(action)

    def branch_depths(self) -> np.ndarray:
        """Deepest node depth per root branch (0 while the root is a leaf)."""
        return self._branch_depths.copy()

    def pinned_policy(self, node_id: int) -> Policy:
        """Mean-MDP optimal policy at the node, cached per belief."""
        belief = self.node(node_id).hyper.belief
        key = belief.key()
        policy = self._policies.get(key)
        if policy is None:
            policy = pinned_policy(self.model, self.nodes[node_id].hyper)
            self._policies[key] = policy
        return policy

    def exact_bounds(self, node_id: int) -> tuple[float, float]:
        """Exact ``(lower, upper)`` at a node of a finite-support tree."""
        hyper = self.node(node_id).hyper
        key = (hyper.state, hyper.belief.key())
        cached = self._exact.get(key)
        if cached is not None:
            return cached
        support = self.model.support(hyper.belief)
        if support is None:
            msg = "Exact bounds need a finite-support posterior"
            raise CapabilityError(msg, planner="exact_bounds")
        result = exact_bounds(hyper.state, support)
        self._exact[key] = result
        return result

    def leaf_value(self, node_id: int, source: LeafValues) -> float:
        node = self.node(node_id)
        if isinstance(source, LeafValueSource):
            return self._source_value(node, source)
        if isinstance(source, Mapping):
            if node_id not in source:
                msg = f"Leaf {node_id} has no value"
                raise StateError(msg, node_id=node_id)
            return float(source[node_id])
        return float(source(node_id))

    def _source_value(self, node: TreeNode, source: LeafValueSource) -> float:
        if source is LeafValueSource.PAD_LOWER:
            return 0.0
        if source is LeafValueSource.PAD_UPPER:
            return 1.0 / (1.0 - self.discount)
        if source is LeafValueSource.EXACT_LOWER:
            return self.exact_bounds(node.id)[0]
        if source is LeafValueSource.EXACT_UPPER:
            return self.exact_bounds(node.id)[1]

        if source is LeafValueSource.LOWER:
            estimate = node.lower
        elif source is LeafValueSource.UPPER:
            estimate = node.upper
        else:
            estimate = BoundEstimate(
                node.lower.samples + node.upper.samples, node.lower.total + node.upper.total
            )
        if estimate.count == 0:
            msg = f"Leaf {node.id} has no {source.value} samples"
            raise StateError(msg, node_id=node.id)
        return estimate.mean

    def immediate_rewards(self, node_id: int) -> np.ndarray:
        """Expected one-step reward of every action under the predictive."""
        node = self.node(node_id)
        return np.array(
            [
                self.model.predictive(node.hyper.belief, node.state, a)[1].sum()
                for a in range(self.n_actions)
            ]
        )

    def action_values(self, node_id: int, values: np.ndarray) -> np.ndarray:
        """``Q[a] = sum_children p * (r + gamma * v(child))`` for an expanded node."""
        node = self.node(node_id)
        if node.first_child is None or node.child_probabilities is None:
            msg = f"Node {node_id} is a leaf"
            raise StateError(msg, node_id=node_id)
        child_values = values[node.first_child : node.first_child + self.branching_factor]
        child_values = child_values.reshape(self.n_actions, self.per_action)
        returns = self._edge_rewards + self.discount * child_values
        return (node.child_probabilities * returns).sum(axis=1)

    def refresh_ancestors(self, node_id: int, values: np.ndarray) -> None:
        """Recompute backed-up values on the path above ``node_id`` in place."""
        parent = self.node(node_id).parent
        while parent is not None:
            values[parent] = self.action_values(parent, values).max()
            parent = self.nodes[parent].parent

    def best_action(self, node_id: int, values: np.ndarray) -> int:
        return argmax_lowest(self.action_values(node_id, values))


def backup_values(tree: Tree, source: LeafValues) -> tuple[np.ndarray, np.ndarray]:
    """Backwards induction over the whole tree.

    Returns:
        ``(node_values, branch_values)``: the backed-up value of every node and
        the value of each root action. For an unexpanded root the branch
        values are the expected immediate rewards.
    """
    values = np.empty(len(tree))
    for node in reversed(tree.nodes):
        if node.is_leaf:
            values[node.id] = tree.leaf_value(node.id, source)
        else:
            values[node.id] = tree.action_values(node.id, values).max()
    if tree.root.is_leaf:
        return values, tree.immediate_rewards(0)
    return values, tree.action_values(0, values)


def backup(tree: Tree, source: LeafValues) -> np.ndarray:
    """Per-branch values of the root after backwards induction."""
    return backup_values(tree, source)[1]


def record_backup(tree: Tree, lower: np.ndarray, upper: np.ndarray) -> None:
    """Store backed-up ``(lower, upper)`` pairs on every node."""
    for node in tree.nodes:
        node.backed_up = (float(lower[node.id]), float(upper[node.id]))


def full_tree_size(branching_factor: int, depth: int) -> int:
    """Number of non-root nodes of a tree expanded fully to ``depth``."""
    return sum(branching_factor**j for j in range(1, depth + 1))


def build_full_tree(
    root: HyperState,
    depth: int,
    model: PosteriorModel = DIRICHLET,
    node_cap: int | None = None,
) -> Tree:
    """Expand every node up to ``depth``.

    Raises:
        ResourceError: If the full tree would exceed the node cap
    """
    tree = Tree(root, model=model, node_cap=node_cap)
    required = 1 + full_tree_size(tree.branching_factor, depth)
    if required > tree.node_cap:
        msg = f"A depth-{depth} tree needs {required} nodes, cap is {tree.node_cap}"
        raise ResourceError(
            msg,
            resource="nodes",
            required=required,
            limit=tree.node_cap,
            error_code=ErrorCode.NODE_CAP_EXCEEDED,
        )
    frontier = [0]
    for _ in range(depth):
        next_frontier: list[int] = []
        for node_id in frontier:
            next_frontier.extend(tree.expand(node_id))
        frontier = next_frontier
    logger.debug("Built full tree of depth %d with %d nodes", depth, len(tree))
    return tree


def exhaustive_bamdp_value(
    root: HyperState,
    horizon: int,
    source: LeafValues,
    model: PosteriorModel = DIRICHLET,
    node_cap: int | None = None,
) -> np.ndarray:
    """Per-branch values of the tree fully expanded to ``horizon``."""
    tree = build_full_tree(root, horizon, model=model, node_cap=node_cap)
    return backup(tree, source)


DUMP_COLUMNS = (
    "id",
    "parent",
    "depth",
    "action",
    "r",
    "s_next",
    "probability",
    "lower_mean",
    "upper_mean",
    "samples",
    "backed_lower",
    "backed_upper",
)


def format_tree_dump(tree: Tree) -> str:
    """One tab-separated line per node, preceded by a header line."""

    def cell(value: object) -> str:
        if value is None:
            return "-"
        if isinstance(value, float):
            return "nan" if np.isnan(value) else f"{value:.6g}"
        return str(value)

    lines = ["\t".join(DUMP_COLUMNS)]
    for node in tree.nodes:
        row = (
            node.id,
            node.parent,
            node.depth,
            node.action_in,
            node.reward_in,
            node.state if node.parent is not None else None,
            node.probability,
            node.lower.mean,
            node.upper.mean,
            node.lower.count + node.upper.count,
            *(node.backed_up or (None, None)),
        )
        lines.append("\t".join(cell(value) for value in row))
    return "\n".join(lines) + "\n"
