"""Incremental weak learners emitting real-valued scores in [-1, 1].

Both boosting algorithms consume the same contract: `learn(x, y, w)` with a
positive sample weight, `score(x)` in [-1, 1], `reset()`.  Leaf/region values
are weighted means of the labels, i.e. the pointwise Newton step for the
exponential loss, so a weighted least-squares fit of y doubles as the Newton
stage update.

Three learners are provided:

* `RegressionStump` - streaming stump over per-feature equal-width bins
  (bounded memory, rebinned when the observed range grows).
* `ExactStump` - stores every weighted sample and searches all distinct
  thresholds; unbounded memory, used for batch fits and as a reference.
* `HoeffdingTree` - simplified incremental decision tree for numeric
  features with per-class Gaussian summaries and info-gain splits.
"""

from __future__ import annotations

import math

import numpy as np

from .core import DataError, Instance, clamp_score

_SQRT2 = math.sqrt(2.0)


def prob_to_score(p_plus: float) -> float:
    """Map P(y=+1|x) in [0, 1] onto the score range [-1, 1]."""
    if not (0.0 <= p_plus <= 1.0):
        raise ValueError(f"probability out of range: {p_plus}")
    return 2.0 * p_plus - 1.0


class WeakLearner:
    """Behavioral contract shared by all stage learners."""

    def learn(self, x: Instance, y: int, w: float) -> None:
        raise NotImplementedError

    def score(self, x: Instance) -> float:
        raise NotImplementedError

    def reset(self) -> None:
        raise NotImplementedError

    def get_state(self) -> dict:
        raise NotImplementedError

    def set_state(self, state: dict) -> None:
        raise NotImplementedError

    def _check_weight(self, w: float) -> bool:
        """Validate a sample weight; returns False for the zero no-op."""
        if not (w >= 0.0) or not math.isfinite(w):
            raise DataError(f"sample weight must be finite and >= 0, got {w}")
        return w > 0.0


class RegressionStump(WeakLearner):
    """Streaming single-split regressor on equal-width feature bins.

    Each feature keeps `n_bins` bins between its running min and max; bin
    contents are remapped by bin center whenever the range expands.  The
    best (feature, threshold) pair is recomputed lazily from the bin sums
    at score time and minimizes weighted squared error over the candidate
    edges.  Leaf values are clamped weighted label means.
    """

    def __init__(self, n_bins: int = 64):
        if n_bins < 2:
            raise ValueError("need at least 2 bins")
        self.n_bins = n_bins
        self.reset()

    def reset(self) -> None:
        self._n_features: int | None = None
        self._lo = None
        self._hi = None
        self._sum_w = None
        self._sum_wy = None
        self._total_w = 0.0
        self._total_wy = 0.0
        self._split = None

    def learn(self, x: Instance, y: int, w: float) -> None:
        if not self._check_weight(w):
            return
        f = x.features
        if self._n_features is None:
            d = f.shape[0]
            self._n_features = d
            self._lo = f.astype(np.float64).copy()
            self._hi = f.astype(np.float64).copy()
            self._sum_w = np.zeros((d, self.n_bins))
            self._sum_wy = np.zeros((d, self.n_bins))
        elif f.shape[0] != self._n_features:
            raise DataError(
                f"feature count changed: {self._n_features} -> {f.shape[0]}"
            )
        grew = (f < self._lo) | (f > self._hi)
        for j in np.nonzero(grew)[0]:
            self._expand(int(j), min(f[j], self._lo[j]), max(f[j], self._hi[j]))
        idx = self._bin_indices(f)
        rows = np.arange(self._n_features)
        self._sum_w[rows, idx] += w
        self._sum_wy[rows, idx] += w * y
        self._total_w += w
        self._total_wy += w * y
        self._split = None

    def _bin_indices(self, f: np.ndarray) -> np.ndarray:
        width = self._hi - self._lo
        idx = np.zeros(self._n_features, dtype=np.intp)
        nz = width > 0
        scaled = (f[nz] - self._lo[nz]) / width[nz] * self.n_bins
        idx[nz] = np.minimum(scaled.astype(np.intp), self.n_bins - 1)
        return idx

    def _expand(self, j: int, new_lo: float, new_hi: float) -> None:
        """Remap bin mass of feature j onto the widened range, by bin center."""
        old_lo, old_hi = self._lo[j], self._hi[j]
        old_w = self._sum_w[j]
        old_wy = self._sum_wy[j]
        if old_hi > old_lo:
            centers = old_lo + (np.arange(self.n_bins) + 0.5) * (
                (old_hi - old_lo) / self.n_bins
            )
        else:
            centers = np.full(self.n_bins, old_lo)
        scaled = (centers - new_lo) / (new_hi - new_lo) * self.n_bins
        dest = np.minimum(scaled.astype(np.intp), self.n_bins - 1)
        new_w = np.zeros(self.n_bins)
        new_wy = np.zeros(self.n_bins)
        np.add.at(new_w, dest, old_w)
        np.add.at(new_wy, dest, old_wy)
        self._sum_w[j] = new_w
        self._sum_wy[j] = new_wy
        self._lo[j] = new_lo
        self._hi[j] = new_hi

    def chosen_split(self):
        """(feature, threshold, left_value, right_value); feature None when
        the stump is degenerate (no two separable bins) or pristine."""
        if self._n_features is None or self._total_w <= 0.0:
            return (None, None, 0.0, 0.0)
        if self._split is None:
            self._split = self._best_split()
        return self._split

    def _best_split(self):
        cw = np.cumsum(self._sum_w, axis=1)[:, :-1]
        cwy = np.cumsum(self._sum_wy, axis=1)[:, :-1]
        w_l = cw
        w_r = self._total_w - cw
        s_l = cwy
        s_r = self._total_wy - cwy
        valid = (w_l > 0) & (w_r > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = np.where(valid, s_l**2 / w_l + s_r**2 / w_r, -np.inf)
        if not valid.any():
            mean = clamp_score(self._total_wy / self._total_w)
            return (None, None, mean, mean)
        flat = int(np.argmax(gain))  # first max: lowest feature, lowest edge
        j, e = divmod(flat, self.n_bins - 1)
        threshold = self._lo[j] + (e + 1) * (self._hi[j] - self._lo[j]) / self.n_bins
        left = clamp_score(s_l[j, e] / w_l[j, e])
        right = clamp_score(s_r[j, e] / w_r[j, e])
        return (int(j), float(threshold), left, right)

    def score(self, x: Instance) -> float:
        feature, threshold, left, right = self.chosen_split()
        if feature is None:
            return left  # 0.0 when pristine, global mean when degenerate
        return left if x.features[feature] < threshold else right

    def get_state(self) -> dict:
        return {
            "n_bins": self.n_bins,
            "n_features": self._n_features,
            "lo": self._lo,
            "hi": self._hi,
            "sum_w": self._sum_w,
            "sum_wy": self._sum_wy,
            "total_w": self._total_w,
            "total_wy": self._total_wy,
        }

    def set_state(self, state: dict) -> None:
        self.n_bins = int(state["n_bins"])
        self._n_features = state["n_features"]
        self._split = None
        self._total_w = state["total_w"]
        self._total_wy = state["total_wy"]
        if self._n_features is None:
            self._lo = self._hi = self._sum_w = self._sum_wy = None
        else:
            self._n_features = int(self._n_features)
            self._lo = np.asarray(state["lo"], dtype=np.float64)
            self._hi = np.asarray(state["hi"], dtype=np.float64)
            self._sum_w = np.asarray(state["sum_w"], dtype=np.float64).reshape(
                self._n_features, self.n_bins
            )
            self._sum_wy = np.asarray(state["sum_wy"], dtype=np.float64).reshape(
                self._n_features, self.n_bins
            )


class ExactStump(WeakLearner):
    """Single-split regressor searching every distinct threshold.

    Keeps all weighted samples, so memory grows with the stream; meant for
    batch fitting and for reference comparisons against `RegressionStump`.
    """

    def __init__(self):
        self.reset()

    def reset(self) -> None:
        self._rows: list[np.ndarray] = []
        self._ys: list[int] = []
        self._ws: list[float] = []
        self._split = None

    def learn(self, x: Instance, y: int, w: float) -> None:
        if not self._check_weight(w):
            return
        if self._rows and x.features.shape[0] != self._rows[0].shape[0]:
            raise DataError("feature count changed mid-stream")
        self._rows.append(x.features)
        self._ys.append(y)
        self._ws.append(w)
        self._split = None

    def chosen_split(self):
        if not self._rows:
            return (None, None, 0.0, 0.0)
        if self._split is None:
            self._split = self._best_split()
        return self._split

    def _best_split(self):
        X = np.vstack(self._rows)
        y = np.asarray(self._ys, dtype=np.float64)
        w = np.asarray(self._ws, dtype=np.float64)
        total_w = w.sum()
        total_wy = (w * y).sum()
        best = None
        best_gain = -np.inf
        for j in range(X.shape[1]):
            order = np.argsort(X[:, j], kind="stable")
            xs = X[order, j]
            cw = np.cumsum(w[order])
            cwy = np.cumsum(w[order] * y[order])
            cut = np.nonzero(xs[1:] > xs[:-1])[0]  # boundaries between distinct values
            for i in cut:
                w_l, s_l = cw[i], cwy[i]
                w_r, s_r = total_w - w_l, total_wy - s_l
                gain = s_l**2 / w_l + s_r**2 / w_r
                if gain > best_gain:
                    best_gain = gain
                    t = (xs[i] + xs[i + 1]) / 2.0
                    best = (
                        j,
                        float(t),
                        clamp_score(s_l / w_l),
                        clamp_score(s_r / w_r),
                    )
        if best is None:
            mean = clamp_score(total_wy / total_w)
            return (None, None, mean, mean)
        return best

    def score(self, x: Instance) -> float:
        feature, threshold, left, right = self.chosen_split()
        if feature is None:
            return left
        return left if x.features[feature] < threshold else right

    def get_state(self) -> dict:
        if self._rows:
            X = np.vstack(self._rows)
        else:
            X = np.zeros((0, 0))
        return {
            "x": X,
            "shape0": X.shape[0],
            "shape1": X.shape[1],
            "y": np.asarray(self._ys, dtype=np.float64),
            "w": np.asarray(self._ws, dtype=np.float64),
        }

    def set_state(self, state: dict) -> None:
        self.reset()
        n, d = int(state["shape0"]), int(state["shape1"])
        X = np.asarray(state["x"], dtype=np.float64).reshape(n, d)
        ys = np.asarray(state["y"])
        ws = np.asarray(state["w"])
        for i in range(n):
            row = X[i].copy()
            row.setflags(write=False)
            self._rows.append(row)
            self._ys.append(int(ys[i]))
            self._ws.append(float(ws[i]))


def _entropy2(a: float, b: float) -> float:
    """Binary entropy in bits of the class-mass pair (a, b)."""
    total = a + b
    if total <= 0.0:
        return 0.0
    h = 0.0
    for m in (a, b):
        if m > 0.0:
            p = m / total
            h -= p * math.log2(p)
    return h


def _phi(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / _SQRT2))


class _HNode:
    __slots__ = (
        "depth",
        "w",
        "mean",
        "m2",
        "fmin",
        "fmax",
        "w_since",
        "feature",
        "threshold",
        "left",
        "right",
    )

    def __init__(self, n_features: int, depth: int):
        self.depth = depth
        self.w = np.zeros(2)
        self.mean = np.zeros((2, n_features))
        self.m2 = np.zeros((2, n_features))
        self.fmin = np.full(n_features, np.inf)
        self.fmax = np.full(n_features, -np.inf)
        self.w_since = 0.0
        self.feature: int | None = None
        self.threshold = 0.0
        self.left: _HNode | None = None
        self.right: _HNode | None = None


class HoeffdingTree(WeakLearner):
    """Incremental decision tree for numeric features.

    Leaves hold weighted per-class Gaussian summaries (count, mean, variance
    per feature).  Every `grace_period` units of leaf weight, candidate
    splits on an equal-spaced threshold grid are ranked by information gain,
    and the leaf splits when the gain lead over the runner-up feature beats
    the Hoeffding bound eps = sqrt(ln(1/delta) / (2n)), or when eps has
    shrunk below the tie threshold.  Children inherit the Gaussian-estimated
    class masses of their side.  Leaf probabilities are Laplace-smoothed
    (+1 per class).
    """

    def __init__(
        self,
        delta: float = 1e-7,
        grace_period: float = 200.0,
        tie_threshold: float = 0.05,
        max_depth: int = 20,
        split_candidates: int = 10,
    ):
        if not (0.0 < delta < 1.0):
            raise ValueError("delta must be in (0, 1)")
        self.delta = delta
        self.grace_period = grace_period
        self.tie_threshold = tie_threshold
        self.max_depth = max_depth
        self.split_candidates = split_candidates
        self.reset()

    def reset(self) -> None:
        self._n_features: int | None = None
        self._root: _HNode | None = None
        self.n_splits = 0

    def _leaf_for(self, f: np.ndarray) -> _HNode:
        node = self._root
        while node.feature is not None:
            node = node.left if f[node.feature] < node.threshold else node.right
        return node

    def learn(self, x: Instance, y: int, w: float) -> None:
        if not self._check_weight(w):
            return
        f = x.features
        if self._n_features is None:
            self._n_features = f.shape[0]
            self._root = _HNode(self._n_features, depth=0)
        elif f.shape[0] != self._n_features:
            raise DataError(
                f"feature count changed: {self._n_features} -> {f.shape[0]}"
            )
        node = self._leaf_for(f)
        c = 0 if y < 0 else 1
        node.w[c] += w
        row = node.mean[c]
        delta = f - row
        row += delta * (w / node.w[c])
        node.m2[c] += w * delta * (f - row)
        np.minimum(node.fmin, f, out=node.fmin)
        np.maximum(node.fmax, f, out=node.fmax)
        node.w_since += w
        if node.w_since >= self.grace_period and node.depth < self.max_depth:
            self._attempt_split(node)

    def _attempt_split(self, node: _HNode) -> None:
        node.w_since = 0.0
        w_neg, w_pos = node.w
        if w_neg <= 0.0 or w_pos <= 0.0:
            return  # single class: every gain is zero
        total = w_neg + w_pos
        h0 = _entropy2(w_neg, w_pos)
        best_gain = second_gain = 0.0
        best_feature = -1
        best_threshold = 0.0
        best_masses = None
        for j in range(self._n_features):
            gain_j, t_j, masses_j = self._best_candidate(node, j, h0, total)
            if gain_j > best_gain:
                second_gain = best_gain
                best_gain = gain_j
                best_feature = j
                best_threshold = t_j
                best_masses = masses_j
            elif gain_j > second_gain:
                second_gain = gain_j
        if best_feature < 0 or best_gain <= 0.0:
            return
        eps = math.sqrt(math.log(1.0 / self.delta) / (2.0 * total))
        if best_gain - second_gain > eps or eps < self.tie_threshold:
            self._split_leaf(node, best_feature, best_threshold, best_masses)

    def _best_candidate(self, node: _HNode, j: int, h0: float, total: float):
        lo, hi = node.fmin[j], node.fmax[j]
        if not (hi > lo):
            return 0.0, 0.0, None
        mus = node.mean[:, j]
        sds = [
            max(math.sqrt(node.m2[c, j] / node.w[c]), 1e-9) if node.w[c] > 0 else 1e-9
            for c in (0, 1)
        ]
        best_gain = 0.0
        best_t = 0.0
        best_masses = None
        k = self.split_candidates
        for i in range(1, k + 1):
            t = lo + i * (hi - lo) / (k + 1)
            l0 = node.w[0] * _phi((t - mus[0]) / sds[0])
            l1 = node.w[1] * _phi((t - mus[1]) / sds[1])
            r0 = node.w[0] - l0
            r1 = node.w[1] - l1
            wl = l0 + l1
            wr = r0 + r1
            gain = h0 - (wl * _entropy2(l0, l1) + wr * _entropy2(r0, r1)) / total
            if gain > best_gain:
                best_gain = gain
                best_t = t
                best_masses = (l0, l1, r0, r1)
        return best_gain, best_t, best_masses

    def _split_leaf(self, node, feature, threshold, masses) -> None:
        l0, l1, r0, r1 = masses
        node.feature = feature
        node.threshold = threshold
        node.left = _HNode(self._n_features, node.depth + 1)
        node.right = _HNode(self._n_features, node.depth + 1)
        node.left.w[:] = (l0, l1)
        node.right.w[:] = (r0, r1)
        node.mean = node.m2 = None  # split nodes drop their leaf statistics
        node.fmin = node.fmax = None
        self.n_splits += 1

    def class_probs(self, x: Instance) -> tuple[float, float]:
        """Laplace-smoothed (P(y=-1|x), P(y=+1|x)); sums to 1 exactly."""
        if self._root is None:
            return (0.5, 0.5)
        node = self._leaf_for(x.features)
        denom = node.w[0] + node.w[1] + 2.0
        return ((node.w[0] + 1.0) / denom, (node.w[1] + 1.0) / denom)

    def score(self, x: Instance) -> float:
        return prob_to_score(self.class_probs(x)[1])

    def get_state(self) -> dict:
        return {
            "delta": self.delta,
            "grace_period": self.grace_period,
            "tie_threshold": self.tie_threshold,
            "max_depth": self.max_depth,
            "split_candidates": self.split_candidates,
            "n_features": self._n_features,
            "n_splits": self.n_splits,
            "root": self._node_state(self._root),
        }

    def _node_state(self, node):
        if node is None:
            return None
        return {
            "depth": node.depth,
            "w": node.w,
            "mean": None if node.mean is None else node.mean,
            "m2": None if node.m2 is None else node.m2,
            "fmin": node.fmin,
            "fmax": node.fmax,
            "w_since": node.w_since,
            "feature": node.feature,
            "threshold": node.threshold,
            "left": self._node_state(node.left),
            "right": self._node_state(node.right),
        }

    def set_state(self, state: dict) -> None:
        self.delta = state["delta"]
        self.grace_period = state["grace_period"]
        self.tie_threshold = state["tie_threshold"]
        self.max_depth = int(state["max_depth"])
        self.split_candidates = int(state["split_candidates"])
        self._n_features = (
            None if state["n_features"] is None else int(state["n_features"])
        )
        self.n_splits = int(state["n_splits"])
        self._root = self._node_from_state(state["root"])

    def _node_from_state(self, state):
        if state is None:
            return None
        d = self._n_features if self._n_features is not None else 0
        node = _HNode(d, int(state["depth"]))
        node.w = np.asarray(state["w"], dtype=np.float64)
        for name in ("mean", "m2"):
            val = state[name]
            setattr(
                node,
                name,
                None if val is None else np.asarray(val, dtype=np.float64).reshape(2, d),
            )
        for name in ("fmin", "fmax"):
            val = state[name]
            setattr(
                node, name, None if val is None else np.asarray(val, dtype=np.float64)
            )
        node.w_since = state["w_since"]
        node.feature = None if state["feature"] is None else int(state["feature"])
        node.threshold = state["threshold"]
        node.left = self._node_from_state(state["left"])
        node.right = self._node_from_state(state["right"])
        return node
