"""Subgoal sampling and pragmatic utterance generation.

The human picks a lifted subgoal from a Boltzmann distribution weighing
utility against description cost, then speaks through an iterated rational
speaker: starting from the literal listener, speaker and listener levels
alternate, the speaker trading the listener's log-posterior against utterance
cost. Hardness levels fall out of set relations between the groundings of
the subgoal, the utterance, the useful set, and the listener's best guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .quests import (
    GroundingSet,
    LiftedSubgoal,
    MeaningLattice,
    enumerate_lattice,
    grounding_set,
    quest_cost,
)
from .utility import CostToGo, UtilityTable, compute_utility_table
from .world import WorldState


@dataclass(frozen=True)
class RsaParams:
    beta1: float = 3.0  # subgoal utility inverse temperature
    beta2: float = 1.5  # subgoal cost inverse temperature
    alpha: float = 2.0  # speaker inverse temperature
    alpha_prime: float = 1.0  # utterance cost weight
    k: int = 10  # iterated reasoning depth

    def __post_init__(self):
        if min(self.beta1, self.beta2, self.alpha, self.alpha_prime) <= 0 or self.k < 1:
            raise ValueError("RSA parameters must be positive, k >= 1")


class QuestModel:
    """The per-episode lattice of candidate subgoals for one quest type,
    with utilities, costs, and the Boltzmann prior."""

    def __init__(self, state: WorldState, lattice: MeaningLattice,
                 table: UtilityTable, ctg: CostToGo, params: RsaParams):
        self.state = state
        self.lattice = lattice
        self.table = table
        self.ctg = ctg
        self.params = params
        self.utilities = self._utilities()
        self.costs = np.array([quest_cost(m) for m in lattice.meanings], dtype=float)
        logits = params.beta1 * self.utilities - params.beta2 * self.costs
        logits -= logits.max()
        w = np.exp(logits)
        self.prior = w / w.sum()
        self.log_prior = np.log(self.prior)

    # -- utilities, vectorized over distinct grounding sets ----------------

    def _utilities(self) -> np.ndarray:
        lat = self.lattice
        t = self.table
        v0 = float(t.v0)
        if lat.quest_type in ("bring-me", "change-state"):
            val: dict = {}
            if lat.quest_type == "bring-me":
                val = {o: (v0 if v is None else float(v)) for o, v in t.bring.items()}
                means_for = {}
                out = np.empty(len(lat))
                for i, objs in enumerate(lat.objs):
                    key = objs
                    if key not in means_for:
                        means_for[key] = sum(val[o] for o in objs) / len(objs)
                    out[i] = v0 - means_for[key]
                return out
            out = np.empty(len(lat))
            means_for = {}
            for i, objs in enumerate(lat.objs):
                verb = lat.meanings[i].verb
                key = (objs, verb)
                if key not in means_for:
                    means_for[key] = sum(
                        (v0 if t.change.get((o, verb)) is None else float(t.change[(o, verb)]))
                        for o in objs) / len(objs)
                out[i] = v0 - means_for[key]
            return out

        # move-to: mean over object x target pairs (excluding o == t)
        obj_ids = sorted({o for objs in lat.objs for o in objs})
        tgt_ids = sorted({t_ for ts in lat.targets for t_ in ts})
        oi = {o: i for i, o in enumerate(obj_ids)}
        ti = {t_: i for i, t_ in enumerate(tgt_ids)}
        V = np.full((len(obj_ids), len(tgt_ids)), v0)
        for (o, t_), v in t.move.items():
            if o in oi and t_ in ti:
                V[oi[o], ti[t_]] = v0 if v is None else float(v)
        row_cache: dict[frozenset, np.ndarray] = {}
        col_cache: dict[frozenset, np.ndarray] = {}
        sums_cache: dict[tuple, tuple[float, int]] = {}
        out = np.empty(len(lat))
        for i in range(len(lat)):
            objs, tgts = lat.objs[i], lat.targets[i]
            key = (objs, tgts)
            if key not in sums_cache:
                r = row_cache.get(objs)
                if r is None:
                    r = np.zeros(len(obj_ids))
                    r[[oi[o] for o in objs]] = 1.0
                    row_cache[objs] = r
                c = col_cache.get(tgts)
                if c is None:
                    c = np.zeros(len(tgt_ids))
                    c[[ti[t_] for t_ in tgts]] = 1.0
                    col_cache[tgts] = c
                total = float(r @ V @ c)
                count = int(r.sum() * c.sum())
                for o in objs & tgts:
                    total -= V[oi[o], ti[o]]
                    count -= 1
                sums_cache[key] = (total, count)
            total, count = sums_cache[key]
            out[i] = v0 - (total / count) if count > 0 else 0.0
        return out

    # -- sampling -----------------------------------------------------------

    def sample_meaning(self, rng) -> int:
        r = rng.random()
        acc = 0.0
        for i, p in enumerate(self.prior):
            acc += p
            if r < acc:
                return i
        return len(self.prior) - 1

    def meaning(self, i: int) -> LiftedSubgoal:
        return self.lattice.meanings[i]

    def grounding(self, i: int) -> GroundingSet:
        return self.lattice.grounding(i)

    def utility_of(self, i: int) -> float:
        return float(self.utilities[i])

    # -- literal semantics over the lattice ---------------------------------

    def literal_row(self, u_idx_sets: tuple) -> np.ndarray:
        """1[A(m') subseteq A(u)] for every lattice meaning m'."""
        u_objs, u_tgts, u_verb = u_idx_sets
        lat = self.lattice
        n = len(lat)
        out = np.zeros(n, dtype=bool)
        obj_ok_cache: dict[frozenset, bool] = {}
        tgt_ok_cache: dict[frozenset, bool] = {}
        for i in range(n):
            if lat.quest_type == "change-state" and lat.meanings[i].verb != u_verb:
                continue
            objs = lat.objs[i]
            ok = obj_ok_cache.get(objs)
            if ok is None:
                ok = objs <= u_objs
                obj_ok_cache[objs] = ok
            if not ok:
                continue
            if lat.quest_type == "move-to":
                tgts = lat.targets[i]
                tok = tgt_ok_cache.get(tgts)
                if tok is None:
                    tok = tgts <= u_tgts
                    tgt_ok_cache[tgts] = tok
                if not tok:
                    continue
            out[i] = True
        return out


def build_quest_model(state: WorldState, goal, quest_type: str,
                      params: RsaParams = RsaParams(),
                      table_ctg: Optional[tuple[UtilityTable, CostToGo]] = None) -> QuestModel:
    lattice = enumerate_lattice(state, quest_type)
    if len(lattice) == 0:
        raise ValueError(f"empty candidate lattice for {quest_type}")
    if table_ctg is None:
        table_ctg = compute_utility_table(state, goal, (quest_type,))
    table, ctg = table_ctg
    return QuestModel(state, lattice, table, ctg, params)


# ---------------------------------------------------------------------------
# The iterated speaker
# ---------------------------------------------------------------------------


@dataclass
class RsaChain:
    """Listener/speaker distributions for one meaning's utterance set.

    Rows are candidate utterances (relaxations of the true subgoal), columns
    are lattice meanings. Only the final S_k and L_k are kept unless
    ``keep_all`` was requested (then ``all_listener[j]`` / ``all_speaker[j]``
    hold the whole ladder; speaker index 0 is unused).
    """

    utterances: list[LiftedSubgoal]
    final_listener: np.ndarray
    final_speaker: np.ndarray
    all_listener: Optional[list[np.ndarray]] = None
    all_speaker: Optional[list[Optional[np.ndarray]]] = None


def _normalize_rows(log_m: np.ndarray) -> np.ndarray:
    """Row-normalize in log space; all-(-inf) rows stay zero."""
    out = np.full_like(log_m, -np.inf)
    mx = log_m.max(axis=1, keepdims=True)
    alive = np.isfinite(mx[:, 0])
    if alive.any():
        shifted = log_m[alive] - mx[alive]
        with np.errstate(divide="ignore"):
            logz = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        out[alive] = shifted - logz
    return out


def rsa_chain(model: QuestModel, m: LiftedSubgoal, params: RsaParams,
              keep_all: bool = False,
              utterances: Optional[list[LiftedSubgoal]] = None) -> RsaChain:
    """Compute L_0 and the alternating S_j / L_j ladder up to j = k.

    Candidate utterances default to every relaxation of ``m``.
    """
    state = model.state
    if utterances is None:
        utterances = m.relaxations()
    u_costs = np.array([quest_cost(u) for u in utterances], dtype=float)
    # literal truth per utterance row over all lattice meanings
    lit = np.zeros((len(utterances), len(model.lattice)), dtype=bool)
    for r, u in enumerate(utterances):
        gs = grounding_set(state, u)
        lit[r] = model.literal_row((gs.objs, gs.targets or frozenset(), u.verb))

    log_prior = model.log_prior[None, :]
    with np.errstate(divide="ignore"):
        log_lit = np.where(lit, 0.0, -np.inf)
    log_L = _normalize_rows(log_lit + log_prior)
    all_listener = [np.exp(log_L)] if keep_all else None
    all_speaker: Optional[list[Optional[np.ndarray]]] = [None] if keep_all else None
    a, ap = params.alpha, params.alpha_prime
    log_S = None
    for _ in range(1, params.k + 1):
        # speaker: normalize over utterances for each meaning (columns)
        log_S = a * (log_L - ap * u_costs[:, None])
        log_S = _normalize_rows(log_S.T).T
        log_L = _normalize_rows(log_S + log_prior)
        if keep_all:
            all_speaker.append(np.exp(log_S))
            all_listener.append(np.exp(log_L))
    return RsaChain(
        utterances=utterances,
        final_listener=np.exp(log_L),
        final_speaker=np.exp(log_S),
        all_listener=all_listener,
        all_speaker=all_speaker,
    )


def speaker_distribution(model: QuestModel, m: LiftedSubgoal, params: RsaParams,
                         chain: Optional[RsaChain] = None,
                         ) -> tuple[list[LiftedSubgoal], np.ndarray]:
    """P_{S_k}(u | m): the final speaker distribution over relaxations."""
    if chain is None:
        chain = rsa_chain(model, m, params)
    mi = model.lattice.index[m]
    probs = chain.final_speaker[:, mi]
    total = probs.sum()
    if not np.isfinite(total) or total <= 0:
        raise ValueError("speaker distribution has no support for the subgoal")
    return chain.utterances, probs / total


def sample_utterance(model: QuestModel, m: LiftedSubgoal, rng,
                     params: RsaParams,
                     chain: Optional[RsaChain] = None) -> LiftedSubgoal:
    utterances, probs = speaker_distribution(model, m, params, chain)
    r = rng.random()
    acc = 0.0
    for u, p in zip(utterances, probs):
        acc += p
        if r < acc:
            return u
    return utterances[-1]


def pragmatic_listener_argmax(model: QuestModel, chain: RsaChain,
                              u: LiftedSubgoal, params: RsaParams) -> LiftedSubgoal:
    """r = argmax_m' P_{L_k}(m' | u), ties broken by lowest description cost
    then the lexicographically first serialization."""
    row = chain.utterances.index(u)
    probs = chain.final_listener[row]
    best = probs.max()
    tied = np.flatnonzero(probs >= best - 1e-12)
    cands = sorted(
        (quest_cost(model.lattice.meanings[i]), repr(model.lattice.meanings[i]), i)
        for i in tied
    )
    return model.lattice.meanings[cands[0][2]]


# ---------------------------------------------------------------------------
# Hardness
# ---------------------------------------------------------------------------


class HardnessError(Exception):
    pass


def classify_hardness(model: QuestModel, m: LiftedSubgoal, u: LiftedSubgoal,
                      params: RsaParams,
                      chain: Optional[RsaChain] = None) -> int:
    """Levels: 1 when the utterance pins the subgoal exactly; 2 when social
    reasoning (intersecting with the useful set) pins it; 3 when the
    pragmatic listener's best guess pins it; 4 otherwise."""
    state = model.state
    am = grounding_set(state, m)
    au = grounding_set(state, u)
    if not am.issubset(au):
        raise HardnessError("the subgoal's groundings must lie inside the utterance's")
    if am.equals(au):
        return 1
    useful = model.table.useful_keys(m.quest_type, m.verb)
    au_keys = au.pair_set()
    inter = useful & au_keys
    if am.pair_set() == inter:
        return 2
    if chain is None:
        chain = rsa_chain(model, m, params)
    r = pragmatic_listener_argmax(model, chain, u, params)
    ar = grounding_set(state, r)
    if am.equals(ar):
        return 3
    return 4
