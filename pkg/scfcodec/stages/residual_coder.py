"""
Stage 3: residual coding of colors that are new to the image.

Each component is predicted with the median adaptive predictor (MAP). The
largest absolute MAP error among four causal neighbors, plus one, gives an
adaptive range r. When r is within the threshold t = e_max // 36, a binary
decision tells whether |e| <= r:

    case 1  in range      e coded with the in-range histogram limited to [-r, r]
    case 2  out of range  e folded past the range, coded with the out-of-range
                          histogram limited to [-e_max + r, e_max - r - 1]
    case 3  r > t         error of the component-adaptive predictor (MAPc)
                          coded with the full case-3 histogram

With pruning disabled every component takes the case-3 path.
"""

from typing import Any, Dict, List, Sequence, Tuple

from ..core.base_model import BaseModel, DecisionCounter
from ..core.config import CodecConfig
from ..core.entropy import ArithmeticDecoder, ArithmeticEncoder, FrequencyTable
from ..core.errors import CorruptStreamError, ModelContractError
from ..core.image import RANGE_NEIGHBORS, Canvas, Color, SidePlanes, max_value, neighbor

NUM_COMPONENTS = 3
THRESHOLD_DIVISOR = 36

PREDICTORS = ('med', 'left', 'top', 'topleft', 'planar')

CASE_IN_RANGE = 0
CASE_OUT_OF_RANGE = 1
CASE_3 = 2


def map_predict(left: int, top: int, topleft: int) -> int:
    """Median adaptive prediction from the left, top and top-left values."""
    if topleft >= max(left, top):
        return min(left, top)
    if topleft <= min(left, top):
        return max(left, top)
    return left + top - topleft


def predict_all(left: int, top: int, topleft: int, e_max: int) -> List[int]:
    """Every predictor of the set, in tie-breaking order, clamped to [0, e_max]."""
    planar = left + top - topleft
    return [
        map_predict(left, top, topleft),
        left,
        top,
        topleft,
        0 if planar < 0 else e_max if planar > e_max else planar,
    ]


def causal_components(canvas: Canvas, i: int, j: int, k: int) -> Tuple[int, int, int]:
    """Component k of the left, top and top-left neighbors."""
    return (
        neighbor(canvas, i, j, -1, 0)[k],
        neighbor(canvas, i, j, 0, -1)[k],
        neighbor(canvas, i, j, -1, -1)[k],
    )


def best_predictor(canvas: Canvas, i: int, j: int, k: int, actual: int) -> int:
    """Index of the predictor with the smallest |error| on component k (lowest index on ties)."""
    candidates = predict_all(*causal_components(canvas, i, j, k), max_value(canvas.depth))
    return min(range(len(candidates)), key=lambda idx: abs(actual - candidates[idx]))


def mapc_predict(canvas: Canvas, i: int, j: int, k: int, prev_best_idx: int) -> int:
    """
    Component-adaptive prediction: component 0 uses MAP, every later component
    uses the predictor that fitted the previous component best at (i, j).
    """
    left, top, topleft = causal_components(canvas, i, j, k)
    if k == 0:
        return map_predict(left, top, topleft)
    return predict_all(left, top, topleft, max_value(canvas.depth))[prev_best_idx]


def map_errors(canvas: Canvas, i: int, j: int, c: Color) -> Tuple[int, int, int]:
    """MAP prediction error of every component of c at (i, j)."""
    return tuple(c[k] - map_predict(*causal_components(canvas, i, j, k)) for k in range(NUM_COMPONENTS))


def compute_range(side: SidePlanes, k: int, i: int, j: int) -> int:
    return max(abs(side.error(i + dx, j + dy, k)) for dx, dy in RANGE_NEIGHBORS) + 1


def fold_out_of_range(e: int, r: int) -> int:
    """Remove the impossible in-range values [-r, r] from an out-of-range error."""
    if abs(e) <= r:
        raise ModelContractError(f"fold requires |e| > r, got e={e}, r={r}")
    return e + r if e <= 0 else e - r - 1


def unfold_out_of_range(f: int, r: int) -> int:
    return f - r if f < 0 else f + r + 1


class ComponentHistograms:
    """The three error histograms and the in-range decision counts of one component."""

    def __init__(self, e_max: int, total_max: int, ctx_cap: int):
        self.in_range = FrequencyTable(2 * e_max + 1, total_max=total_max)
        self.out_of_range = FrequencyTable(2 * e_max, total_max=total_max)
        self.case3 = FrequencyTable(2 * e_max + 1, total_max=total_max)
        self.decisions = DecisionCounter(ctx_cap)


class ResidualModel(BaseModel):
    """Per-component residual histograms and the adaptive-range coding procedure."""

    def __init__(self, config: CodecConfig, depth: int):
        super().__init__(config)
        self.depth = depth
        self.e_max = max_value(depth)
        self.threshold = self.e_max // THRESHOLD_DIVISOR
        self.components = [
            ComponentHistograms(self.e_max, config.total_max, config.ctx_cap)
            for _ in range(NUM_COMPONENTS)
        ]
        # case_counts[k][case] = number of codings of component k per case
        self.case_counts = [[0, 0, 0] for _ in range(NUM_COMPONENTS)]

    def _pruned(self, r: int) -> bool:
        return self.config.enable_stage3_pruning and r <= self.threshold

    def code_residual(self, enc: ArithmeticEncoder, canvas: Canvas, side: SidePlanes,
                      i: int, j: int, c: Color) -> float:
        """
        Code the three components of a new color at (i, j).

        Returns:
            Bits consumed.
        """
        e_max = self.e_max
        bits = 0.0
        prev_best = 0
        for k in range(NUM_COMPONENTS):
            hists = self.components[k]
            x = c[k]
            left, top, topleft = causal_components(canvas, i, j, k)
            e = x - map_predict(left, top, topleft)
            r = compute_range(side, k, i, j)
            if self._pruned(r):
                in_range = abs(e) <= r
                counter = hists.decisions
                bits += enc.encode_binary(counter.n_true, counter.n_total, in_range)
                counter.update(in_range)
                if in_range:
                    table = hists.in_range.coding_table(e_max - r, e_max + r, floor=1)
                    bits += enc.encode_symbol(table, e + r)
                    hists.in_range.increment(e + e_max)
                    self.case_counts[k][CASE_IN_RANGE] += 1
                else:
                    f = fold_out_of_range(e, r)
                    self._check_folded(f, r)
                    table = hists.out_of_range.coding_table(r, 2 * e_max - r - 1, floor=1)
                    bits += enc.encode_symbol(table, f + e_max - r)
                    hists.out_of_range.increment(f + e_max)
                    self.case_counts[k][CASE_OUT_OF_RANGE] += 1
            else:
                e_c = x - mapc_predict(canvas, i, j, k, prev_best)
                bits += enc.encode_symbol(hists.case3.coding_table(floor=1), e_c + e_max)
                hists.case3.increment(e_c + e_max)
                self.case_counts[k][CASE_3] += 1
            prev_best = best_predictor(canvas, i, j, k, x)
        return bits

    def decode_residual(self, dec: ArithmeticDecoder, canvas: Canvas, side: SidePlanes,
                        i: int, j: int) -> Color:
        """Mirror of code_residual; returns the reconstructed color."""
        e_max = self.e_max
        values = []
        prev_best = 0
        for k in range(NUM_COMPONENTS):
            hists = self.components[k]
            left, top, topleft = causal_components(canvas, i, j, k)
            pred = map_predict(left, top, topleft)
            r = compute_range(side, k, i, j)
            if self._pruned(r):
                counter = hists.decisions
                in_range = dec.decode_binary(counter.n_true, counter.n_total)
                counter.update(in_range)
                if in_range:
                    table = hists.in_range.coding_table(e_max - r, e_max + r, floor=1)
                    e = dec.decode_symbol(table) - r
                    hists.in_range.increment(e + e_max)
                    self.case_counts[k][CASE_IN_RANGE] += 1
                else:
                    table = hists.out_of_range.coding_table(r, 2 * e_max - r - 1, floor=1)
                    f = dec.decode_symbol(table) - e_max + r
                    hists.out_of_range.increment(f + e_max)
                    e = unfold_out_of_range(f, r)
                    self.case_counts[k][CASE_OUT_OF_RANGE] += 1
                x = pred + e
            else:
                e_c = dec.decode_symbol(hists.case3.coding_table(floor=1)) - e_max
                hists.case3.increment(e_c + e_max)
                x = mapc_predict(canvas, i, j, k, prev_best) + e_c
                self.case_counts[k][CASE_3] += 1
            if not 0 <= x <= e_max:
                raise CorruptStreamError(f"Decoded component {k} at ({i}, {j}) out of range: {x}")
            values.append(x)
            prev_best = best_predictor(canvas, i, j, k, x)
        return Color(*values)

    def _check_folded(self, f: int, r: int) -> None:
        if f not in trimmed_interval(r, self.e_max):
            raise ModelContractError(f"Folded error {f} outside the trimmed interval for r={r}")

    def codings(self) -> int:
        return sum(sum(row) for row in self.case_counts)

    def digest(self, h) -> None:
        for hists in self.components:
            h.update(hists.in_range.counts.tobytes())
            h.update(hists.out_of_range.counts.tobytes())
            h.update(hists.case3.counts.tobytes())
            h.update(repr(hists.decisions.as_tuple()).encode())

    def describe(self) -> Dict[str, Any]:
        names = ('in_range', 'out_of_range', 'case3')
        return {
            'threshold': self.threshold,
            'cases_per_component': [dict(zip(names, row)) for row in self.case_counts],
            'decisions_per_component': [h.decisions.as_tuple() for h in self.components],
        }


def trimmed_interval(r: int, e_max: int) -> Sequence[int]:
    """Folded out-of-range values possible for range r."""
    return range(-e_max + r, e_max - r)
