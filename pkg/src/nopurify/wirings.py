"""Deterministic local wirings of two boxes and the exhaustive purification search.

Each party, for each value of its outer input bit, runs a small circuit:

* ``order``: consume box 1 first (0) or box 2 first (1);
* ``first_input``: the input bit fed to the first-consumed box;
* ``second_input_fn``: a 1-bit function of the first box's output, fed to the
  second box (4 choices: 0, id, not, 1 as a 2-bit truth table);
* ``output_fn``: a 2-bit function of (box-1 output, box-2 output) giving the
  party's outer output (16 choices, a 4-bit truth table).

That is 8 bits per outer input and 16 bits per party::

    code_x = order | first_input << 1 | second_input_fn << 2 | output_fn << 4
    party  = code_0 | code_1 << 8

``second_input_fn`` bit ``o`` is its value on ``o``; ``output_fn`` bit
``2*o1 + o2`` is its value on ``(o1, o2)``. A pair of party wirings is written
as the 32-bit hex number ``alice << 16 | bob``.

Shared randomness and classical communication between the parties are not
enumerated. Shared randomness only mixes deterministic strategies, which
mixes their purity coefficients linearly, so the best mixed strategy is never
better than the best deterministic one.
"""

from __future__ import annotations

import itertools
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .boxworld import BOX_PS, anti_pr_box, box_twirl, pr_box, pr_weight
from .nogo import QuadCoeffs

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EPS_NORM = 1e-10
CHUNK = 24  # Alice x=0 behaviours evaluated per vectorized kernel call

BITS = (0, 1)
OUTCOMES = tuple(itertools.product(BITS, BITS))  # (o1, o2)


class CheckpointError(RuntimeError):
    pass


class CompositionError(ValueError):
    pass


@dataclass(frozen=True)
class InputWiring:
    order: int
    first_input: int
    second_input_fn: int
    output_fn: int

    def encode(self) -> int:
        return self.order | self.first_input << 1 | self.second_input_fn << 2 | self.output_fn << 4

    @classmethod
    def decode(cls, code: int) -> "InputWiring":
        if not 0 <= code < 256:
            raise ValueError(f"per-input wiring code out of range: {code}")
        return cls(code & 1, (code >> 1) & 1, (code >> 2) & 3, (code >> 4) & 15)

    def behaviour(self) -> tuple:
        """``((x1, x2, out) for (o1, o2) in OUTCOMES)``: inputs fed to boxes 1 and 2
        and the outer output, given the two box outputs."""
        rows = []
        for o1, o2 in OUTCOMES:
            if self.order == 0:
                x1 = self.first_input
                x2 = (self.second_input_fn >> o1) & 1
            else:
                x2 = self.first_input
                x1 = (self.second_input_fn >> o2) & 1
            out = (self.output_fn >> (2 * o1 + o2)) & 1
            rows.append((x1, x2, out))
        return tuple(rows)


@dataclass(frozen=True)
class PartyWiring:
    per_input: tuple[InputWiring, InputWiring]

    def encode(self) -> int:
        return self.per_input[0].encode() | self.per_input[1].encode() << 8

    @classmethod
    def decode(cls, code: int) -> "PartyWiring":
        if not 0 <= code < 1 << 16:
            raise ValueError(f"party wiring code out of range: {code}")
        return cls((InputWiring.decode(code & 0xFF), InputWiring.decode(code >> 8)))

    def behaviour(self) -> "WiringBehavior":
        return WiringBehavior(tuple(w.behaviour() for w in self.per_input))


@dataclass(frozen=True)
class WiringBehavior:
    """Per outer input, the table ``(o1, o2) -> (x1, x2, out)``.

    Two wirings with the same table act identically on every pair of boxes.
    """

    table: tuple


def as_behaviour(w) -> WiringBehavior:
    if isinstance(w, WiringBehavior):
        return w
    if isinstance(w, PartyWiring):
        return w.behaviour()
    if isinstance(w, int):
        return PartyWiring.decode(w).behaviour()
    raise TypeError(f"cannot interpret {type(w).__name__} as a wiring")


def enumerate_party_wirings() -> list[PartyWiring]:
    return [PartyWiring.decode(c) for c in range(1 << 16)]


def dedupe_behaviors(ws) -> list[WiringBehavior]:
    """Distinct behaviours, in order of first appearance."""
    seen = {}
    for w in ws:
        b = as_behaviour(w)
        seen.setdefault(b, None)
    return list(seen)


@lru_cache(maxsize=None)
def input_behaviour_classes() -> tuple[tuple[int, ...], np.ndarray]:
    """Distinct single-input behaviours.

    Returns the smallest code of each class (ascending) and an array
    ``[k, o1, o2, (x1, x2, out)]``.
    """
    reps = {}
    for code in range(256):
        reps.setdefault(InputWiring.decode(code).behaviour(), code)
    codes = tuple(sorted(reps.values()))
    arr = np.array(
        [np.array(InputWiring.decode(c).behaviour()).reshape(2, 2, 3) for c in codes],
        dtype=np.int64,
    )
    return codes, arr


def party_class_count() -> int:
    return len(input_behaviour_classes()[0]) ** 2


@lru_cache(maxsize=None)
def _input_class_lookup() -> tuple[int, ...]:
    codes, _ = input_behaviour_classes()
    index = {InputWiring.decode(c).behaviour(): k for k, c in enumerate(codes)}
    return tuple(index[InputWiring.decode(c).behaviour()] for c in range(256))


def party_class_index(code: int) -> int:
    """Behaviour class of an arbitrary 16-bit party encoding."""
    lookup = _input_class_lookup()
    n = len(input_behaviour_classes()[0])
    return lookup[(code >> 8) & 0xFF] * n + lookup[code & 0xFF]


def party_class_code(k: int) -> int:
    """Smallest party encoding in behaviour class ``k``.

    Classes are indexed ``k = k1 * n + k0`` with ``k0``, ``k1`` the per-input
    class indices, which makes the encoding increase with ``k``.
    """
    codes, _ = input_behaviour_classes()
    n = len(codes)
    k1, k0 = divmod(k, n)
    return codes[k0] | codes[k1] << 8


def effective_box(wA, wB, box1, box2) -> np.ndarray:
    """The box the two parties present after wiring up ``box1`` and ``box2``.

    Entry ``[x, y, a, b]`` sums ``box1[x1, y1, a1, b1] * box2[x2, y2, a2, b2]``
    over box outputs, with each party's box inputs and outer output read off
    its behaviour table. Works on float or Fraction tables.

    Raises
    ------
    CompositionError
        If the result is not normalized; this happens only for signalling inputs.
    """
    ta = as_behaviour(wA).table
    tb = as_behaviour(wB).table
    b1 = np.asarray(box1)
    b2 = np.asarray(box2)
    exact = b1.dtype == object or b2.dtype == object
    out = np.zeros((2, 2, 2, 2), dtype=object if exact else float)
    if exact:
        out[...] = Fraction(0)
    for x, y in itertools.product(BITS, BITS):
        for ia, (a1, a2) in enumerate(OUTCOMES):
            x1, x2, a = ta[x][ia]
            for ib, (bb1, bb2) in enumerate(OUTCOMES):
                y1, y2, b = tb[y][ib]
                out[x, y, a, b] = out[x, y, a, b] + b1[x1, y1, a1, bb1] * b2[x2, y2, a2, bb2]
    sums = out.sum(axis=(2, 3))
    if exact:
        ok = all(s == 1 for s in sums.ravel())
    else:
        ok = np.max(np.abs(sums - 1.0)) <= EPS_NORM
    if not ok:
        raise CompositionError("wired box is not normalized; are the inputs non-signalling?")
    return out


def source_boxes(exact: bool = False) -> tuple[np.ndarray, np.ndarray]:
    return pr_box(exact), anti_pr_box(exact)


def extract_quad_coeffs(wA, wB, exact: bool = False) -> QuadCoeffs:
    """Purities of the twirled outputs on the four inputs PR/anti-PR (x) PR/anti-PR."""
    s = source_boxes(exact)
    q = [pr_weight(box_twirl(effective_box(wA, wB, s[i], s[j]))) for i in BITS for j in BITS]
    return QuadCoeffs(*q)


def q_curve_check(wA, wB, samples) -> float:
    """Largest deviation between the simulated purity on two copies of
    ``noisy_pr(p)`` and the quadratic built from :func:`extract_quad_coeffs`."""
    from .boxworld import noisy_pr

    c = extract_quad_coeffs(wA, wB)
    worst = 0.0
    for p in samples:
        sim = pr_weight(box_twirl(effective_box(wA, wB, noisy_pr(p), noisy_pr(p))))
        quad = p * p * c.q00 + p * (1 - p) * (c.q01 + c.q10) + (1 - p) ** 2 * c.q11
        worst = max(worst, abs(sim - quad))
    return worst


def passthrough_wiring() -> tuple[PartyWiring, PartyWiring]:
    """Both parties feed their outer input to box 1 and output its result."""
    w = InputWiring(order=0, first_input=0, second_input_fn=0, output_fn=0b1100)
    w1 = InputWiring(order=0, first_input=1, second_input_fn=0, output_fn=0b1100)
    p = PartyWiring((w, w1))
    return p, p


def constant_wiring() -> tuple[PartyWiring, PartyWiring]:
    """Both parties ignore their boxes and always output 0."""
    w = PartyWiring((InputWiring(0, 0, 0, 0), InputWiring(0, 0, 0, 0)))
    return w, w


def figure2_wiring() -> tuple[PartyWiring, PartyWiring]:
    """A representative adaptive wiring with NOT gates.

    Alice feeds ``x`` into box 1, feeds box 1's output ``a1`` into box 2 and
    outputs ``not a2``. Bob feeds ``y`` into box 1 and ``1`` into box 2 and
    outputs ``not (b1 xor b2)``. Two perfect PR-boxes give a perfect PR-box
    (``q00 = 1``), but the purity curve is ``p^2 + (1 - p)^2``.
    """
    # output_fn bit 2*o1 + o2 holds the value on (o1, o2)
    not_a2 = 0b0101
    xnor = 0b1001
    alice = PartyWiring(tuple(InputWiring(0, x, 0b10, not_a2) for x in BITS))
    bob = PartyWiring(tuple(InputWiring(0, y, 0b11, xnor) for y in BITS))
    return alice, bob


# --------------------------------------------------------------------------
# exhaustive search


@lru_cache(maxsize=None)
def agreement_tables() -> np.ndarray:
    """``G[i, j, ka, kb] = P(a == b)`` for single-input behaviours ``ka``, ``kb``
    wired onto ``box1 = s_i`` and ``box2 = s_j`` (``s_0`` PR, ``s_1`` anti-PR).

    The purity of a full wiring pair is then
    ``(G[a0, b0] + G[a0, b1] + G[a1, b0] + 1 - G[a1, b1]) / 4``, since only the
    ``x = y = 1`` input wants anti-correlated outputs.
    """
    _, beh = input_behaviour_classes()
    n = len(beh)
    s = source_boxes()
    G = np.zeros((2, 2, n, n))
    o1, o2, p1, p2 = np.meshgrid(BITS, BITS, BITS, BITS, indexing="ij")
    xa1 = beh[:, o1, o2, 0][:, None]  # Alice box-1 input, indexed by (a1, a2)
    xa2 = beh[:, o1, o2, 1][:, None]
    oa = beh[:, o1, o2, 2][:, None]
    yb1 = beh[:, p1, p2, 0][None]
    yb2 = beh[:, p1, p2, 1][None]
    ob = beh[:, p1, p2, 2][None]
    agree = oa == ob
    for i in BITS:
        for j in BITS:
            prob = s[i][xa1, yb1, o1, p1] * s[j][xa2, yb2, o2, p2]
            G[i, j] = np.where(agree, prob, 0.0).sum(axis=(2, 3, 4, 5))
    return G


def fast_quad_coeffs(ka: int, kb: int) -> QuadCoeffs:
    """Coefficients for party classes ``ka``, ``kb`` read from :func:`agreement_tables`."""
    G = agreement_tables()
    n = G.shape[2]
    a1, a0 = divmod(ka, n)
    b1, b0 = divmod(kb, n)
    q = (G[..., a0, b0] + G[..., a0, b1] + G[..., a1, b0] + 1.0 - G[..., a1, b1]) / 4.0
    return QuadCoeffs(*(float(v) for v in q.ravel()))


def default_grid(points: int = 101, p_s: float = BOX_PS) -> np.ndarray:
    """``points`` equally spaced values in ``(p_s, 1]``."""
    return np.linspace(p_s, 1.0, points + 1)[1:]


@dataclass
class BlockResult:
    block: int
    max_gap: float
    witness: tuple[int, int]
    boundary_gap: float
    attained_gap: float
    grid_gap: float
    pairs: int

    def better(self, other: "BlockResult") -> bool:
        return (self.max_gap, -self.witness[0], -self.witness[1]) > (
            other.max_gap,
            -other.witness[0],
            -other.witness[1],
        )


def _gaps(q00, q01, q10, q11, p_s, grid):
    """Closed-form extremes of ``Q(p) - p`` for arrays of coefficients.

    Returns ``(sup over (p_s, 1], value at p_s, max attained on (p_s, 1],
    max over grid)``.
    """
    s = q01 + q10
    c0 = q11
    h1 = s - 2.0 * q11 - 1.0
    c2 = q00 - s + q11
    at_ps = c0 + h1 * p_s + c2 * p_s * p_s
    at_1 = q00 - 1.0
    neg = c2 < 0
    safe = np.where(neg, c2, -1.0)
    v = -h1 / (2.0 * safe)
    inside = neg & (v > p_s) & (v < 1.0)
    at_v = np.where(inside, c0 + h1 * v + c2 * v * v, -np.inf)
    attained = np.maximum(at_1, at_v)
    # on a sorted grid a concave quadratic peaks at a neighbour of its vertex
    idx = np.clip(np.searchsorted(grid, v), 1, len(grid) - 1)
    grid_gap = np.maximum(
        np.maximum(c0 + h1 * grid[0] + c2 * grid[0] ** 2, c0 + h1 * grid[-1] + c2 * grid[-1] ** 2),
        np.where(
            neg,
            np.maximum(
                c0 + h1 * grid[idx] + c2 * grid[idx] ** 2,
                c0 + h1 * grid[idx - 1] + c2 * grid[idx - 1] ** 2,
            ),
            -np.inf,
        ),
    )
    return np.maximum(attained, at_ps), at_ps, attained, grid_gap


def _search_block(block: int, grid: np.ndarray, p_s: float, limit: int | None) -> BlockResult:
    """All Alice classes with x=1 behaviour ``block`` against every Bob class."""
    G = agreement_tables()
    codes, _ = input_behaviour_classes()
    n = len(codes)
    enc_b = np.array([party_class_code(k) for k in range(n * n)]).reshape(n, n)  # [b1, b0]

    a1 = block
    a0_stop = n if limit is None else max(0, min(n, limit - a1 * n))
    best = None
    bgap = agap = ggap = -np.inf
    pairs = 0
    for start in range(0, a0_stop, CHUNK):
        a0 = np.arange(start, min(start + CHUNK, a0_stop))
        q = []
        for i in BITS:
            for j in BITS:
                g = G[i, j]
                # shape (chunk, b1, b0)
                q.append(
                    0.25
                    * (
                        g[a0][:, None, :]
                        + g[a0][:, :, None]
                        + g[a1][None, None, :]
                        + 1.0
                        - g[a1][None, :, None]
                    )
                )
        sup, at_ps, attained, grid_gap = _gaps(*q, p_s, grid)
        pairs += sup.size
        bgap = max(bgap, float(at_ps.max()))
        agap = max(agap, float(attained.max()))
        ggap = max(ggap, float(grid_gap.max()))
        flat = int(np.argmax(sup))  # first maximum: smallest (alice, bob) encoding
        c, r = divmod(flat, n * n)
        b1, b0 = divmod(r, n)
        cand = BlockResult(
            block,
            float(sup.ravel()[flat]),
            (party_class_code(a1 * n + int(a0[c])), int(enc_b[b1, b0])),
            0.0,
            0.0,
            0.0,
            0,
        )
        if best is None or cand.better(best):
            best = cand
    if best is None:
        return BlockResult(block, -np.inf, (0, 0), -np.inf, -np.inf, -np.inf, 0)
    best.boundary_gap, best.attained_gap, best.grid_gap, best.pairs = bgap, agap, ggap, pairs
    return best


@dataclass
class SearchReport:
    total_pairs: int
    deduped_party_count: int
    deduped_pairs: int
    searched_pairs: int
    max_gap: float
    witness: tuple[int, int]
    boundary_gap: float
    attained_gap: float
    grid_max_gap: float
    p_s: float
    grid: list[float]
    blocks_done: int
    blocks_total: int
    complete: bool
    elapsed: float = field(default=0.0, compare=False)
    limitations: str = (
        "deterministic local wirings of two boxes without inter-party communication; "
        "shared randomness covered by convexity"
    )

    @property
    def witness_hex(self) -> str:
        return f"0x{self.witness[0] << 16 | self.witness[1]:08x}"

    def to_dict(self, include_timing: bool = False) -> dict:
        d = asdict(self)
        d["witness"] = list(self.witness)
        d["witness_hex"] = self.witness_hex
        d["schema_version"] = SCHEMA_VERSION
        if not include_timing:
            d.pop("elapsed")
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2)


def _merge(acc: dict, r: BlockResult) -> None:
    best = acc.get("best")
    if best is None or r.better(best):
        acc["best"] = r
    for key in ("boundary_gap", "attained_gap", "grid_gap"):
        acc[key] = max(acc.get(key, -np.inf), getattr(r, key))
    acc["pairs"] = acc.get("pairs", 0) + r.pairs


def _write_checkpoint(path: Path, grid, p_s, limit, done: list[bool], acc: dict) -> None:
    best = acc.get("best")
    state = {
        "schema_version": SCHEMA_VERSION,
        "grid": [float(g) for g in grid],
        "p_s": p_s,
        "limit": limit,
        "blocks": "".join("1" if d else "0" for d in done),
        "max_gap": None if best is None else best.max_gap,
        "witness": None if best is None else list(best.witness),
        "boundary_gap": acc.get("boundary_gap"),
        "attained_gap": acc.get("attained_gap"),
        "grid_gap": acc.get("grid_gap"),
        "pairs": acc.get("pairs", 0),
    }
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(state, sort_keys=True))
    os.replace(tmp, path)


def _read_checkpoint(path: Path, grid, p_s, limit, nblocks) -> tuple[list[bool], dict]:
    try:
        state = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"unreadable checkpoint {path}: {exc}") from exc
    try:
        if state["schema_version"] != SCHEMA_VERSION:
            raise CheckpointError(f"checkpoint schema {state['schema_version']} != {SCHEMA_VERSION}")
        if state["grid"] != [float(g) for g in grid] or state["p_s"] != p_s or state["limit"] != limit:
            raise CheckpointError("checkpoint was written for a different grid, threshold or limit")
        bits = state["blocks"]
        if len(bits) != nblocks or set(bits) - {"0", "1"}:
            raise CheckpointError("checkpoint block bitmap is malformed")
        done = [c == "1" for c in bits]
        acc = {"pairs": int(state["pairs"])}
        if state["max_gap"] is not None:
            acc["best"] = BlockResult(
                -1, float(state["max_gap"]), tuple(int(w) for w in state["witness"]), 0.0, 0.0, 0.0, 0
            )
            for key in ("boundary_gap", "attained_gap", "grid_gap"):
                acc[key] = float(state[key])
        elif any(done):
            raise CheckpointError("checkpoint marks finished blocks but holds no result")
    except CheckpointError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc!r}") from exc
    return done, acc


def search_all_wirings(
    grid=None,
    workers: int = 1,
    checkpoint_path=None,
    limit: int | None = None,
    p_s: float = BOX_PS,
    max_blocks: int | None = None,
) -> SearchReport:
    """Maximize ``Q(p) - p`` over ``(p_s, 1]`` across all deduplicated wiring pairs.

    Work is split into one block per Alice x=1 behaviour class; blocks are
    independent and merged with a max whose ties go to the smallest
    ``(alice, bob)`` encoding, so the report does not depend on worker count
    or on whether the run was resumed. ``limit`` restricts Alice to her first
    ``limit`` behaviour classes; ``max_blocks`` stops after that many new
    blocks (leaving a resumable checkpoint).
    """
    grid = default_grid(p_s=p_s) if grid is None else np.sort(np.asarray(grid, dtype=float))
    if grid.size == 0 or grid[0] <= p_s or grid[-1] > 1.0:
        raise ValueError(f"grid points must lie in ({p_s}, 1]")
    n = len(input_behaviour_classes()[0])
    nparty = n * n
    nblocks = n if limit is None else -(-min(limit, nparty) // n)
    path = None if checkpoint_path is None else Path(checkpoint_path)

    if path is not None and path.exists():
        done, acc = _read_checkpoint(path, grid, p_s, limit, nblocks)
    else:
        done, acc = [False] * nblocks, {}
    todo = [b for b in range(nblocks) if not done[b]]
    if max_blocks is not None:
        todo = todo[:max_blocks]

    agreement_tables()  # build before forking
    t0 = time.perf_counter()

    def record(r: BlockResult):
        _merge(acc, r)
        done[r.block] = True
        if path is not None:
            _write_checkpoint(path, grid, p_s, limit, done, acc)
        log.debug("block %d done: max_gap=%r", r.block, r.max_gap)

    if workers <= 1:
        for b in todo:
            record(_search_block(b, grid, p_s, limit))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_search_block, b, grid, p_s, limit) for b in todo]
            for fut in as_completed(futs):
                record(fut.result())

    best = acc.get("best")
    return SearchReport(
        total_pairs=(1 << 16) ** 2,
        deduped_party_count=nparty,
        deduped_pairs=nparty * nparty,
        searched_pairs=acc.get("pairs", 0),
        max_gap=-np.inf if best is None else best.max_gap,
        witness=(0, 0) if best is None else best.witness,
        boundary_gap=acc.get("boundary_gap", -np.inf),
        attained_gap=acc.get("attained_gap", -np.inf),
        grid_max_gap=acc.get("grid_gap", -np.inf),
        p_s=p_s,
        grid=[float(g) for g in grid],
        blocks_done=sum(done),
        blocks_total=nblocks,
        complete=all(done),
        elapsed=time.perf_counter() - t0,
    )
