"""RPLUW control plane for a single node.

A :class:`RplNode` owns one node's protocol state. Its handlers never touch
another node; they return a list of actions (:class:`Send`, :class:`Timer`,
:class:`Note`) that the simulation engine carries out.

Loop freedom rests on one rule: within a DODAG version a node's rank never
increases. A node that loses every eligible parent detaches, keeps its old
rank as a ceiling and advertises an infinite rank so its children drop it.
Rank can only grow again through a new DODAG version issued by the root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import swara
from .swara import AttributeSnapshot, WeightVector

INFINITE_RANK = 0xFFFF

DIO, DAO, DAO_ACK, DIS, NS, NA, RS, RA = "DIO", "DAO", "DAO-Ack", "DIS", "NS", "NA", "RS", "RA"
CONTROL_KINDS = (DIO, DAO, DAO_ACK, DIS, NS, NA, RS, RA)
# on-air sizes; DIO/DAO/DAO-Ack/DIS from the scenario table, ND messages alike
CONTROL_SIZE_BYTES = {kind: 4 for kind in CONTROL_KINDS}


class ProtocolError(RuntimeError):
    pass


# ---------------------------------------------------------------- messages

@dataclass(frozen=True)
class DioPayload:
    rank: int
    hop_count: int
    depth_m: float
    arssi_db: float
    dodag_version: int
    root_id: int
    root_position: tuple
    residual_energy_j: float
    path_delay_s: float
    path_etx: float
    mobile: bool


@dataclass(frozen=True)
class DaoPayload:
    child_id: int
    depth_m: float
    arssi_db: float


@dataclass(frozen=True)
class RaPayload:
    rank: int
    dodag_version: int
    root_id: int


@dataclass(frozen=True)
class ControlMessage:
    kind: str
    sender: int
    dest: int | None = None  # None = broadcast
    payload: object = None

    @property
    def size_bytes(self) -> int:
        return CONTROL_SIZE_BYTES[self.kind]

    def summary(self) -> str:
        p = self.payload
        if isinstance(p, DioPayload):
            return f"rank={p.rank} v={p.dodag_version}"
        if isinstance(p, DaoPayload):
            return f"child={p.child_id}"
        return ""


@dataclass(frozen=True)
class LinkObservation:
    """What a receiver measures about one reception."""

    arssi_db: float  # received level, dB re 1 uPa
    distance_m: float  # acoustic ranging estimate
    measured_delay_s: float  # propagation plus airtime
    seq: int  # sender's link-layer sequence number


# ---------------------------------------------------------------- actions

@dataclass(frozen=True)
class Send:
    msg: ControlMessage
    delay_s: float = 0.0


@dataclass(frozen=True)
class Timer:
    name: str
    at_s: float
    token: int


@dataclass(frozen=True)
class Note:
    kind: str
    info: str = ""


# ---------------------------------------------------------------- config

@dataclass(frozen=True)
class TrickleParams:
    i_min_s: float = 2.0
    i_max_s: float = 512.0
    reset_threshold_k: int = 3


@dataclass(frozen=True)
class NodeTimers:
    linkage_lt_s: float = 60.0
    mobility_mt_s: float = 10.0
    response_rt_window_s: float = 1.0

    def __post_init__(self):
        for name in ("linkage_lt_s", "mobility_mt_s", "response_rt_window_s"):
            if not getattr(self, name) > 0:
                raise ProtocolError(f"{name} must be > 0")


@dataclass(frozen=True)
class DodagConfig:
    gamma_degree_limit: float = math.inf
    kappa: int = 4
    link_quality_threshold: float = 0.8
    neighbor_range_m: float = 150.0
    arssi_smoothing: float = 0.3
    delivery_smoothing: float = 0.1
    arssi_sample_period_s: float = 2.0
    global_repair_s: float = 60.0
    trickle: TrickleParams = TrickleParams()
    timers: NodeTimers = NodeTimers()

    def __post_init__(self):
        if math.isfinite(self.gamma_degree_limit) and self.gamma_degree_limit < 1:
            raise ProtocolError("gamma_degree_limit must be >= 1 when finite")
        if not 0.0 <= self.link_quality_threshold <= 1.0:
            raise ProtocolError("link_quality_threshold must lie in [0, 1]")
        if self.kappa < 1:
            raise ProtocolError("kappa must be >= 1")


# ---------------------------------------------------------------- rank

@dataclass(frozen=True, order=True)
class Rank:
    value: int
    dodag_version: int = 0


def compute_rank(parent_rank: Rank) -> Rank:
    """Hop-count rank: one more than the parent's, same version."""
    return Rank(parent_rank.value + 1, parent_rank.dodag_version)


# ---------------------------------------------------------------- trickle

class TrickleTimer:
    """Adaptive DIO interval in [i_min, i_max].

    Each interval fires once at a point drawn from [I/2, I]. A fire with no
    inconsistency seen doubles the interval; more than ``k`` inconsistencies
    reset it to ``i_min``.
    """

    def __init__(self, params: TrickleParams, rng):
        self.i_min_s = params.i_min_s
        self.i_max_s = params.i_max_s
        self.reset_threshold_k = params.reset_threshold_k
        self.rng = rng
        self.current_interval_s = self.i_min_s
        self.inconsistency_count = 0
        self.consistent_count = 0
        self.interval_start_s = 0.0
        self.fire_time_s = math.inf

    def _draw_fire(self):
        half = self.current_interval_s / 2.0
        self.fire_time_s = self.interval_start_s + half + half * self.rng.random()

    def reset(self, now: float):
        self.current_interval_s = self.i_min_s
        self.inconsistency_count = 0
        self.consistent_count = 0
        self.interval_start_s = now
        self._draw_fire()

    def step(self, event: str, now: float) -> bool:
        """Advance on ``consistent``, ``inconsistent`` or ``fire``; True means transmit."""
        if event == "consistent":
            self.consistent_count += 1
            return False
        if event == "inconsistent":
            self.inconsistency_count += 1
            if self.inconsistency_count > self.reset_threshold_k:
                self.reset(now)
            return False
        if event != "fire":
            raise ValueError(f"unknown trickle event {event!r}")
        if self.inconsistency_count == 0:
            nxt = min(2.0 * self.current_interval_s, self.i_max_s)
        else:
            nxt = self.current_interval_s
        self.interval_start_s += self.current_interval_s
        self.current_interval_s = nxt
        self.inconsistency_count = 0
        self.consistent_count = 0
        self._draw_fire()
        return True


# ---------------------------------------------------------------- link estimation

@dataclass
class LinkStats:
    arssi_db: float
    delivery: float = 1.0
    last_seq: int = -1
    last_heard_s: float = -math.inf
    last_sample_s: float = -math.inf
    link_delay_s: float = 0.0

    @property
    def etx(self) -> float:
        if self.delivery <= 0.1:
            return 10.0
        return min(10.0, max(1.0, 1.0 / self.delivery))


# ---------------------------------------------------------------- parent table

@dataclass
class CandidateEntry:
    parent_id: int
    rank: int
    dodag_version: int
    hop_count: int
    depth_m: float
    residual_energy_j: float
    path_delay_s: float
    path_etx: float
    mobile: bool
    last_heard_s: float
    node_value: float = 0.0
    accepted: bool = False
    dao_pending: bool = False
    rejected_until_s: float = -math.inf
    snapshot: AttributeSnapshot | None = None


class Objective:
    """Assigns ``node_value`` (higher is better) to every table entry."""

    name = "objective"

    def score(self, entries: list[CandidateEntry], links: dict[int, LinkStats]):
        raise NotImplementedError


def snapshot_for(entry: CandidateEntry, link: LinkStats) -> AttributeSnapshot:
    return AttributeSnapshot(
        hop_count=entry.hop_count + 1,
        residual_energy_j=max(0.0, entry.residual_energy_j),
        arssi_db=link.arssi_db,
        delay_s=entry.path_delay_s + link.link_delay_s,
        etx=link.etx,
        delivery_rate=min(1.0, max(0.0, link.delivery)),
        depth_m=entry.depth_m,
    )


class MadmObjective(Objective):
    """Weighted sum of normalised criteria over the current candidate set."""

    name = "madm"

    def __init__(self, weights: WeightVector, fallback_bounds=swara.DEFAULT_BOUNDS):
        self.weights = weights.reordered(swara.CRITERION_NAMES) if weights.names != swara.CRITERION_NAMES else weights
        self.fallback_bounds = dict(fallback_bounds)

    def score(self, entries, links):
        for e in entries:
            e.snapshot = snapshot_for(e, links[e.parent_id])
        bounds = swara.empirical_bounds([e.snapshot for e in entries], self.fallback_bounds)
        for e in entries:
            e.node_value = swara.node_value(swara.normalize_attributes(e.snapshot, bounds), self.weights)


class MinHopObjective(Objective):
    name = "min-hop"

    def score(self, entries, links):
        for e in entries:
            e.snapshot = snapshot_for(e, links[e.parent_id])
            e.node_value = -float(e.hop_count)


class MinEtxObjective(Objective):
    name = "min-etx"

    def score(self, entries, links):
        for e in entries:
            e.snapshot = snapshot_for(e, links[e.parent_id])
            e.node_value = -(e.path_etx + links[e.parent_id].etx)


class ParentTable:
    """Up to ``kappa`` candidates, kept sorted by node value (ties: lowest id)."""

    def __init__(self, kappa: int = 4):
        self.kappa = kappa
        self.entries: list[CandidateEntry] = []
        self.preferred: int | None = None

    def __len__(self):
        return len(self.entries)

    def __contains__(self, parent_id):
        return self.get(parent_id) is not None

    def get(self, parent_id):
        for e in self.entries:
            if e.parent_id == parent_id:
                return e
        return None

    def ids(self):
        return [e.parent_id for e in self.entries]

    def rescore(self, objective: Objective, links):
        if self.entries:
            objective.score(self.entries, links)
        self.entries.sort(key=lambda e: (-e.node_value, e.parent_id))

    def offer(self, entry: CandidateEntry, objective: Objective, links) -> bool:
        """Insert or refresh ``entry``; returns whether it survives the kappa cap."""
        old = self.get(entry.parent_id)
        if old is not None:
            for name in ("rank", "dodag_version", "hop_count", "depth_m", "residual_energy_j",
                         "path_delay_s", "path_etx", "mobile", "last_heard_s"):
                setattr(old, name, getattr(entry, name))
            self.rescore(objective, links)
            return True
        self.entries.append(entry)
        self.rescore(objective, links)
        if len(self.entries) > self.kappa:
            dropped = self.entries.pop()
            return dropped is not entry
        return True

    def remove(self, parent_id):
        # ``preferred`` is left for the caller's re-selection to replace
        self.entries = [e for e in self.entries if e.parent_id != parent_id]

    def clear(self):
        self.entries.clear()
        self.preferred = None


@dataclass
class RootList:
    roots: dict = field(default_factory=dict)

    def learn(self, root_id, position):
        self.roots[root_id] = tuple(position)


# ---------------------------------------------------------------- the node

class RplNode:
    def __init__(self, node_id: int, config: DodagConfig, objective: Objective, *,
                 is_root: bool = False, trickle_rng=None, response_rng=None, root_id: int = 0):
        self.id = node_id
        self.config = config
        self.objective = objective
        self.is_root = is_root
        self.root_id = root_id
        self.response_rng = response_rng
        self.trickle = TrickleTimer(config.trickle, trickle_rng)
        self.table = ParentTable(config.kappa)
        self.links: dict[int, LinkStats] = {}
        self.children: dict[int, float] = {}
        self.roots = RootList()
        self.version = 0
        self.rank = INFINITE_RANK
        self.started = False
        self.alive = True
        # local sensor readings, refreshed by the engine
        self.depth_m = 0.0
        self.residual_energy_j = 0.0
        self.mobile = False
        self.position = (0.0, 0.0, 0.0)
        self.mt_pending = False
        self.mt_active_until_s = -math.inf
        self.diagnostics = {"malformed": 0, "stale_dio": 0}
        self._tokens: dict[str, int] = {}

    # ------------------------------------------------------------ helpers

    @property
    def preferred(self):
        return self.table.preferred

    @property
    def joined(self) -> bool:
        return self.is_root or self.table.preferred is not None

    def next_hop(self):
        return None if self.is_root else self.table.preferred

    def _timer(self, name, at):
        tok = self._tokens.get(name, 0) + 1
        self._tokens[name] = tok
        return Timer(name, at, tok)

    def timer_valid(self, name, token) -> bool:
        return self._tokens.get(name) == token

    def _advertised_rank(self):
        return self.rank if self.joined else INFINITE_RANK

    def make_dio(self, dest=None) -> ControlMessage:
        if self.is_root:
            arssi, delay, etx = 0.0, 0.0, 0.0
            root_pos = self.position
        else:
            pe = self.table.get(self.table.preferred) if self.joined else None
            link = self.links.get(self.table.preferred) if pe else None
            arssi = link.arssi_db if link else 0.0
            delay = pe.path_delay_s + link.link_delay_s if pe else 0.0
            etx = pe.path_etx + link.etx if pe else 0.0
            root_pos = self.roots.roots.get(self.root_id, (math.nan,) * 3)
        rank = self._advertised_rank()
        payload = DioPayload(rank=rank, hop_count=rank, depth_m=self.depth_m, arssi_db=arssi,
                             dodag_version=self.version, root_id=self.root_id, root_position=tuple(root_pos),
                             residual_energy_j=self.residual_energy_j, path_delay_s=delay,
                             path_etx=etx, mobile=self.mobile)
        return ControlMessage(DIO, self.id, dest, payload)

    def _link(self, sender) -> LinkStats | None:
        return self.links.get(sender)

    def overhear(self, sender: int, obs: LinkObservation, now: float):
        """Update link estimates from any reception, addressed to us or not."""
        cfg = self.config
        link = self.links.get(sender)
        if link is None:
            link = self.links[sender] = LinkStats(arssi_db=obs.arssi_db, last_sample_s=now)
        else:
            gap = obs.seq - link.last_seq - 1 if link.last_seq >= 0 else 0
            a = cfg.delivery_smoothing
            for _ in range(min(max(gap, 0), 32)):
                link.delivery *= (1.0 - a)
            link.delivery = (1.0 - a) * link.delivery + a
            period = cfg.arssi_sample_period_s
            if now < self.mt_active_until_s:
                period /= 2.0
            if now - link.last_sample_s >= period:
                s = cfg.arssi_smoothing
                link.arssi_db = (1.0 - s) * link.arssi_db + s * obs.arssi_db
                link.last_sample_s = now
        link.last_seq = obs.seq
        link.last_heard_s = now
        entry = self.table.get(sender)
        if entry is not None:
            entry.last_heard_s = now
        if sender in self.children:
            self.children[sender] = now

    def _eligible(self, e: CandidateEntry, now: float) -> bool:
        return (e.rank < self.rank and e.dodag_version == self.version
                and e.accepted and e.rejected_until_s <= now)

    def _reselect(self, now: float) -> list:
        """Apply the selection rule over eligible, acknowledged entries."""
        if self.is_root:
            return []
        old = self.table.preferred
        cands = [(e.parent_id, e.node_value) for e in self.table.entries if self._eligible(e, now)]
        try:
            new = swara.select_parent(cands)
        except swara.NoCandidate:
            new = None
        if new == old:
            return []
        actions = []
        self.table.preferred = new
        if new is None:
            # detach: keep the rank as a ceiling, poison our subtree, ask for help
            actions.append(Note("detach", f"from={old} rank_ceiling={self.rank}"))
            actions.append(Send(self.make_dio()))
            actions.append(Send(ControlMessage(DIS, self.id)))
            return actions
        entry = self.table.get(new)
        self.rank = min(self.rank, entry.rank + 1)
        # candidates that no longer sit strictly above us are useless
        self.table.entries = [e for e in self.table.entries if e.rank < self.rank]
        actions.append(Note("parent", f"{old}->{new} rank={self.rank}"))
        self.trickle.reset(now)
        actions.append(self._timer("trickle", self.trickle.fire_time_s))
        return actions

    # ------------------------------------------------------------ lifecycle

    def root_start(self, now: float) -> list:
        """Start or restart the DODAG at the sink."""
        if not self.is_root:
            raise ProtocolError(f"node {self.id} is not a root")
        self.rank = 0
        self.roots.learn(self.id, self.position)
        self.trickle.reset(now)
        actions = []
        if not self.started:
            self.started = True
            self.version = max(self.version, 1)
            actions.append(Send(self.make_dio()))
        else:
            self.version += 1
            actions.append(Note("global-repair", f"v={self.version}"))
        actions.append(self._timer("trickle", self.trickle.fire_time_s))
        if self.config.global_repair_s > 0:
            actions.append(self._timer("global-repair", now + self.config.global_repair_s))
        return actions

    def start(self, now: float) -> list:
        """Non-root boot: periodic linkage checks and one router solicitation."""
        if self.is_root:
            return self.root_start(now)
        self.started = True
        actions = [self._timer("linkage", now + self.config.timers.linkage_lt_s / 2.0)]
        if self.response_rng is not None:
            delay = self.response_rng.random() * self.config.timers.response_rt_window_s
            actions.append(Send(ControlMessage(RS, self.id), delay))
        return actions

    # ------------------------------------------------------------ receive path

    def receive(self, msg: ControlMessage, obs: LinkObservation, now: float) -> list:
        """Dispatch a control message that reached this node."""
        if msg.dest is not None and msg.dest != self.id:
            return []
        kind = msg.kind
        if kind == DIO:
            return self.handle_dio(msg, obs, now)
        if kind == DAO:
            return self.handle_dao(msg, obs, now)
        if kind == DAO_ACK:
            return self.handle_dao_ack(msg, now)
        if kind == DIS:
            return self.respond_to_dis(msg, now)
        if kind in (NS, RS, NA, RA):
            return self.neighbor_discovery(msg, now)
        self.diagnostics["malformed"] += 1
        return []

    def handle_dio(self, msg: ControlMessage, obs: LinkObservation, now: float) -> list:
        dio = msg.payload
        if not isinstance(dio, DioPayload):
            self.diagnostics["malformed"] += 1
            return [Note("drop-malformed", msg.kind)]
        if dio.root_id is not None and all(math.isfinite(x) for x in dio.root_position):
            self.roots.learn(dio.root_id, dio.root_position)
        if dio.dodag_version < self.version:
            self.diagnostics["stale_dio"] += 1
            return self._inconsistent(now)
        if self.is_root:
            return []
        actions = []
        if dio.dodag_version > self.version:
            actions.append(Note("version", f"{self.version}->{dio.dodag_version}"))
            self.version = dio.dodag_version
            self.table.clear()
            self.rank = INFINITE_RANK
            self.children.clear()
            self.trickle.reset(now)
            actions.append(self._timer("trickle", self.trickle.fire_time_s))

        link = self.links.get(msg.sender)
        if link is not None:
            link.link_delay_s = obs.measured_delay_s
        sender_is_parent = msg.sender == self.table.preferred

        if dio.rank >= self.rank or obs.distance_m > self.config.neighbor_range_m:
            # poisoned, a descendant, or out of neighbour range: not a parent candidate
            if msg.sender in self.table:
                self.table.remove(msg.sender)
                self.table.rescore(self.objective, self.links)
                actions += self._reselect(now)
            if sender_is_parent and dio.rank == INFINITE_RANK:
                actions += self._inconsistent(now)
            return actions

        if link is None:
            # first contact; overhear() normally creates it before we get here
            link = self.links[msg.sender] = LinkStats(arssi_db=obs.arssi_db, last_heard_s=now,
                                                      link_delay_s=obs.measured_delay_s)
        entry = CandidateEntry(parent_id=msg.sender, rank=dio.rank, dodag_version=dio.dodag_version,
                               hop_count=dio.hop_count, depth_m=dio.depth_m,
                               residual_energy_j=dio.residual_energy_j, path_delay_s=dio.path_delay_s,
                               path_etx=dio.path_etx, mobile=dio.mobile, last_heard_s=now)
        kept = self.table.offer(entry, self.objective, self.links)
        entry = self.table.get(msg.sender)
        if kept and entry is not None and not entry.accepted and not entry.dao_pending \
                and entry.rejected_until_s <= now:
            entry.dao_pending = True
            actions.append(Send(ControlMessage(DAO, self.id, msg.sender,
                                               DaoPayload(self.id, self.depth_m, link.arssi_db))))
            actions.append(self._timer(f"dao:{msg.sender}", now + 3.0 * self.config.timers.response_rt_window_s))
        self.trickle.step("consistent", now)

        if (dio.mobile or self.mobile) and not self.mt_pending:
            self.mt_pending = True
            actions.append(self._timer("mobility", now + self.config.timers.mobility_mt_s))
        actions += self._reselect(now)
        return actions

    def _inconsistent(self, now: float) -> list:
        before = self.trickle.fire_time_s
        self.trickle.step("inconsistent", now)
        if self.trickle.fire_time_s != before:
            return [self._timer("trickle", self.trickle.fire_time_s)]
        return []

    def handle_dao(self, msg: ControlMessage, obs: LinkObservation, now: float) -> list:
        """Approve a membership request when the link is good and there is room."""
        dao = msg.payload
        if not isinstance(dao, DaoPayload):
            self.diagnostics["malformed"] += 1
            return []
        if not self.joined:
            return []
        child = dao.child_id
        link = self.links.get(child)
        delivery = link.delivery if link else 0.0
        self._prune_children(now)
        room = child in self.children or len(self.children) < self.config.gamma_degree_limit
        if delivery >= self.config.link_quality_threshold and room:
            self.children[child] = now
            return [Send(ControlMessage(DAO_ACK, self.id, child)), Note("dao-ack", f"child={child}")]
        return [Note("dao-reject", f"child={child} delivery={delivery:.3f}")]

    def handle_dao_ack(self, msg: ControlMessage, now: float) -> list:
        entry = self.table.get(msg.sender)
        if entry is None:
            return []
        entry.accepted = True
        entry.dao_pending = False
        self._tokens.pop(f"dao:{msg.sender}", None)
        return self._reselect(now)

    def respond_to_dis(self, msg: ControlMessage, now: float) -> list:
        if not self.joined:
            return []
        delay = self.response_rng.random() * self.config.timers.response_rt_window_s
        return [Send(self.make_dio(), delay)]

    def neighbor_discovery(self, msg: ControlMessage, now: float) -> list:
        if msg.kind == NS:
            return [Send(ControlMessage(NA, self.id, msg.sender))]
        if msg.kind == RS:
            if not self.joined:
                return []
            return [Send(ControlMessage(RA, self.id, msg.sender,
                                        RaPayload(self.rank, self.version, self.root_id)))]
        # NA and RA: last_heard was already refreshed by overhear()
        return []

    # ------------------------------------------------------------ timers

    def on_timer(self, name: str, token: int, now: float) -> list:
        if not self.timer_valid(name, token) or not self.alive:
            return []
        if name == "trickle":
            return self._trickle_fire(now)
        if name == "linkage":
            actions = self.linkage_timer_expiry(now)
            actions.append(self._timer("linkage", now + self.config.timers.linkage_lt_s / 2.0))
            return actions
        if name == "mobility":
            return self.mobility_timer_evaluate(now)
        if name.startswith("dao:"):
            parent = int(name[4:])
            entry = self.table.get(parent)
            if entry is not None and entry.dao_pending:
                entry.dao_pending = False
                entry.rejected_until_s = now + self.config.timers.linkage_lt_s
                return [Note("dao-timeout", f"parent={parent}")] + self._reselect(now)
            return []
        if name == "global-repair" and self.is_root:
            return self.root_start(now)
        return []

    def _trickle_fire(self, now: float) -> list:
        transmit = self.trickle.step("fire", now)
        actions = []
        if transmit and self.joined:
            actions.append(Send(self.make_dio()))
        actions.append(self._timer("trickle", self.trickle.fire_time_s))
        return actions

    def linkage_timer_expiry(self, now: float) -> list:
        """Drop silent candidates, probe a quiet parent, solicit when orphaned."""
        lt = self.config.timers.linkage_lt_s
        self._prune_children(now)
        if self.is_root:
            return []
        actions = []
        stale = [e.parent_id for e in self.table.entries if now - e.last_heard_s >= lt]
        for pid in stale:
            actions.append(Note("parent-lost" if pid == self.table.preferred else "candidate-lost", f"id={pid}"))
            self.table.remove(pid)
        if stale:
            self.table.rescore(self.objective, self.links)
            actions += self._reselect(now)
        pref = self.table.preferred
        if pref is not None:
            if now - self.table.get(pref).last_heard_s >= lt / 2.0:
                actions.append(Send(ControlMessage(NS, self.id, pref)))
        elif not any(isinstance(a, Send) and a.msg.kind == DIS for a in actions):
            actions.append(Send(ControlMessage(DIS, self.id)))
        return actions

    def mobility_timer_evaluate(self, now: float) -> list:
        """Heightened ARSSI sampling for mobile neighbours, then re-selection."""
        self.mt_pending = False
        if self.is_root:
            return []
        if not self.table.entries:
            return [Send(ControlMessage(DIS, self.id))]
        self.mt_active_until_s = now + self.config.timers.mobility_mt_s
        actions = [Send(ControlMessage(NS, self.id, e.parent_id))
                   for e in self.table.entries if e.mobile or self.mobile]
        self.table.rescore(self.objective, self.links)
        actions += self._reselect(now)
        return actions

    def _prune_children(self, now: float):
        lt = self.config.timers.linkage_lt_s
        for c in [c for c, t in self.children.items() if now - t >= lt]:
            del self.children[c]

    # ------------------------------------------------------------ energy

    def deplete(self):
        self.alive = False
        self.table.clear()
        self.children.clear()


def make_objective(protocol: str, weights: WeightVector | None = None,
                   fallback_bounds=swara.DEFAULT_BOUNDS) -> Objective:
    """Parent-selection rule for a protocol variant name."""
    if protocol in ("rpluw-swara", "rpluw-fuzzy", "rpluw"):
        if weights is None:
            weights = swara.preset_weights("paper-fuzzy" if protocol == "rpluw-fuzzy" else "paper-swara")
        return MadmObjective(weights, fallback_bounds)
    if protocol == "baseline-hop":
        return MinHopObjective()
    if protocol == "baseline-etx":
        return MinEtxObjective()
    raise ProtocolError(f"unknown protocol variant {protocol!r}")


PROTOCOLS = ("rpluw-swara", "rpluw-fuzzy", "baseline-hop", "baseline-etx")
