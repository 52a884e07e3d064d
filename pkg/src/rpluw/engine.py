"""Deterministic discrete-event simulation of an underwater RPL network.

One :class:`Simulation` is strictly single-threaded. Events pop in
``(time, sequence)`` order, and every random draw comes from a stream keyed
by ``(seed, node id, purpose)`` so that, for example, mobility draws never
shift traffic draws between protocol variants.
"""

from __future__ import annotations

import heapq
import math
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import channel, swara
from .config import ConfigError, ScenarioConfig
from .metrics import MetricsCollector, MetricsReport
from .protocol import (DIO, LinkObservation, Note, RplNode, Send, Timer, ControlMessage, make_objective)

SINK_ID = 0

_PURPOSE = {"placement": 1, "mobile-select": 2, "mobility": 3, "traffic": 4, "link": 5,
            "trickle": 6, "response": 7}


class EngineError(RuntimeError):
    pass


def rng_stream(seed: int, node_id: int, purpose: str) -> random.Random:
    """Independent generator for one (run seed, node, purpose) triple."""
    state = np.random.SeedSequence([int(seed), int(node_id), _PURPOSE[purpose]]).generate_state(4, np.uint32)
    return random.Random(int.from_bytes(state.tobytes(), "little"))


# ---------------------------------------------------------------- event queue

@dataclass
class Event:
    time_s: float
    sequence: int
    target: int | None
    kind: str
    payload: object = None


END_OF_RUN = "end-of-run"


class EventQueue:
    def __init__(self):
        self._heap = []
        self._seq = 0
        self.now = 0.0

    def __len__(self):
        return len(self._heap)

    def schedule(self, time_s: float, kind: str, target=None, payload=None) -> Event:
        if time_s < self.now:
            raise EngineError(f"cannot schedule {kind} at {time_s} before now={self.now}")
        ev = Event(time_s, self._seq, target, kind, payload)
        heapq.heappush(self._heap, (time_s, self._seq, ev))
        self._seq += 1
        return ev

    def pop_next(self) -> Event:
        """Next event in (time, sequence) order; an end-of-run event once empty."""
        if not self._heap:
            return Event(self.now, -1, None, END_OF_RUN)
        t, _, ev = heapq.heappop(self._heap)
        self.now = t
        return ev


# ---------------------------------------------------------------- energy

class EnergyLedger:
    """Residual energy derived from per-activity accumulators, so they always balance."""

    ACTIVITIES = ("tx", "rx", "idle", "aggregation")

    def __init__(self, initial_j: float, idle_w: float):
        self.initial_j = initial_j
        self.idle_w = idle_w
        self.spent = {a: 0.0 for a in self.ACTIVITIES}
        self.depleted_at_s: float | None = None
        self.settled_at_s = 0.0

    @property
    def consumed_j(self) -> float:
        return math.fsum(self.spent.values())

    @property
    def residual_j(self) -> float:
        return self.initial_j - self.consumed_j

    @property
    def depleted(self) -> bool:
        return self.depleted_at_s is not None

    def settle_idle(self, now: float):
        if self.depleted or now <= self.settled_at_s:
            return
        dt = now - self.settled_at_s
        cost = self.idle_w * dt
        residual = self.residual_j
        if cost >= residual:
            self.spent["idle"] += residual
            self.depleted_at_s = self.settled_at_s + (residual / self.idle_w if self.idle_w > 0 else 0.0)
        else:
            self.spent["idle"] += cost
        self.settled_at_s = now

    def charge(self, activity: str, joules: float, now: float) -> bool:
        """Draw ``joules``; False (and depletion) when the battery cannot cover it."""
        self.settle_idle(now)
        if self.depleted:
            return False
        residual = self.residual_j
        if joules >= residual:
            self.spent[activity] += residual
            self.depleted_at_s = now
            return False
        self.spent[activity] += joules
        return True


# ---------------------------------------------------------------- packets and nodes

@dataclass
class DataPacket:
    origin: int
    seq: int
    created_s: float
    dest: int | None = None
    hops: int = 0
    proc_s: float = 0.0
    queue_s: float = 0.0
    prop_s: float = 0.0
    trans_s: float = 0.0
    enqueued_at_s: float = 0.0
    kind: str = "DATA"


class _Reception:
    __slots__ = ("sender", "item", "dest", "start", "end", "corrupted", "snr_ok", "link_ok", "obs")

    def __init__(self, sender, item, dest, start, end, snr_ok, link_ok, obs):
        self.sender = sender
        self.item = item
        self.dest = dest  # frozen at tx time; a relayed packet's dest moves on
        self.start = start
        self.end = end
        self.corrupted = False
        self.snr_ok = snr_ok
        self.link_ok = link_ok
        self.obs = obs


class SimNode:
    def __init__(self, node_id, position, rpl: RplNode, energy: EnergyLedger, *, is_sink=False):
        self.id = node_id
        self.is_sink = is_sink
        self.pos = list(position)
        self.rpl = rpl
        self.energy = energy
        self.alive = True
        self.mobile = False
        self.waypoint = None
        self.speed = 0.0
        self.ctrl_queue: deque = deque()
        self.data_queue: deque = deque()
        self.busy_until = 0.0
        self.tx_intervals: list = []
        self.receptions: list = []
        self.link_seq = 0
        self.traffic_seq = 0
        self.joined_at_s: float | None = 0.0 if is_sink else None
        self.mobility_rng = None
        self.traffic_rng = None
        self.link_rng = None


# ---------------------------------------------------------------- the world

class Simulation:
    def __init__(self, config: ScenarioConfig, *, seed: int | None = None, protocol: str | None = None,
                 weights: swara.WeightVector | None = None, trace: bool = False, monitor=None):
        self.cfg = config
        self.seed = config.rng_seed if seed is None else int(seed)
        if self.seed < 0:
            raise ConfigError("rng_seed: must be >= 0")
        self.protocol = protocol or config.protocol
        self.weights = weights if weights is not None else resolve_weights(config, self.protocol)
        self.queue = EventQueue()
        self.metrics = MetricsCollector()
        self.trace_enabled = trace
        self.trace_lines: list[str] = []
        self.monitor = monitor
        self.topology_dirty = True
        self.tx_count = 0
        self.rx_count = 0
        self.mobility_updates = 0
        self._build()

    # ------------------------------------------------------------ construction

    def _build(self):
        cfg = self.cfg
        radio = cfg.radio
        self.env = cfg.environment
        self.coeffs = channel.sound_speed_preset(radio.sound_speed_preset)
        _, psd = channel.noise_psd(radio.frequency_khz, self.env)
        self.noise_band_db = psd + 10.0 * math.log10(radio.bandwidth_bps)
        self.airtime_data = radio.data_packet_bytes * 8 / radio.bandwidth_bps
        self.airtime_ctrl = radio.control_packet_bytes * 8 / radio.bandwidth_bps
        objective = make_objective(self.protocol, self.weights)

        positions = [tuple(cfg.sink_position)]
        if cfg.positions:
            positions += [tuple(map(float, p)) for p in cfg.positions]
        else:
            rng = rng_stream(self.seed, 0, "placement")
            ax, ay, az = cfg.area_m
            for _ in range(cfg.node_count):
                positions.append((rng.uniform(0, ax), rng.uniform(0, ay), rng.uniform(0, az)))
        self.pos = np.array(positions, dtype=float)

        self.nodes: list[SimNode] = []
        for i, p in enumerate(positions):
            is_sink = i == SINK_ID
            rpl = RplNode(i, cfg.dodag, objective, is_root=is_sink, root_id=SINK_ID,
                          trickle_rng=rng_stream(self.seed, i, "trickle"),
                          response_rng=rng_stream(self.seed, i, "response"))
            initial = cfg.energy.sink_initial_j if is_sink else cfg.energy.node_initial_j
            node = SimNode(i, p, rpl, EnergyLedger(initial, cfg.energy.idle_w), is_sink=is_sink)
            node.mobility_rng = rng_stream(self.seed, i, "mobility")
            node.traffic_rng = rng_stream(self.seed, i, "traffic")
            node.link_rng = rng_stream(self.seed, i, "link")
            self.nodes.append(node)

        if cfg.mobile_ids is not None:
            mobile = sorted(int(i) for i in cfg.mobile_ids)
            if any(not 1 <= i <= cfg.node_count for i in mobile):
                raise ConfigError("mobile_ids: ids must name sensor nodes 1..node_count")
        else:
            count = int(round(cfg.mobile_fraction * cfg.node_count))
            sel = rng_stream(self.seed, 0, "mobile-select")
            mobile = sorted(sel.sample(range(1, cfg.node_count + 1), count))
        for i in mobile:
            n = self.nodes[i]
            n.mobile = True
            n.rpl.mobile = True
            n.waypoint = self._draw_waypoint(n)
            n.speed = n.mobility_rng.uniform(*cfg.speed_range_mps)
        for n in self.nodes:
            self._refresh_sensors(n)

    def _draw_waypoint(self, node):
        ax, ay, az = self.cfg.area_m
        r = node.mobility_rng
        return [r.uniform(0, ax), r.uniform(0, ay), r.uniform(0, az)]

    def _refresh_sensors(self, node: SimNode):
        rpl = node.rpl
        rpl.position = tuple(node.pos)
        # depth gauge: hydrostatic pressure converted back to metres
        rpl.depth_m = channel.depth_from_pressure(channel.pressure_at_depth(node.pos[2], self.env), self.env)
        rpl.residual_energy_j = node.energy.residual_j

    # ------------------------------------------------------------ tracing

    def _trace(self, node, kind, info=""):
        if self.trace_enabled:
            who = "engine" if node is None else str(node)
            self.trace_lines.append(f"{self.queue.now:.9f}\t{who}\t{kind}\t{info}")

    def write_trace(self, path):
        Path(path).write_text("".join(line + "\n" for line in self.trace_lines))

    # ------------------------------------------------------------ run loop

    def run(self) -> MetricsReport:
        cfg = self.cfg
        q = self.queue
        duration = cfg.sim_duration_s
        q.schedule(duration, END_OF_RUN)
        for n in self.nodes:
            self._apply(n, n.rpl.start(0.0))
        if any(n.mobile for n in self.nodes):
            q.schedule(min(cfg.mobility_step_s, duration), "mobility")
        for n in self.nodes[1:]:
            first = cfg.traffic_start_s + n.traffic_rng.expovariate(cfg.traffic_rate_lambda)
            if first < duration:
                q.schedule(first, "traffic", n.id)

        handlers = {
            "deliver": self._on_deliver,
            "tx-end": self._on_tx_end,
            "timer": self._on_timer,
            "traffic": self._on_traffic,
            "proc-done": self._on_proc_done,
            "send": self._on_delayed_send,
            "mobility": self._on_mobility,
        }
        last = (-math.inf, -1)
        while True:
            ev = q.pop_next()
            if ev.kind == END_OF_RUN:
                break
            key = (ev.time_s, ev.sequence)
            if key <= last:
                raise EngineError(f"event order violated: {key} after {last}")
            last = key
            handlers[ev.kind](ev)
            if self.monitor is not None:
                self.monitor(self, ev)
        q.now = duration
        return self._finalize()

    def _finalize(self) -> MetricsReport:
        cfg = self.cfg
        duration = cfg.sim_duration_s
        for n in self.nodes:
            n.energy.settle_idle(duration)
            self._check_depleted(n, duration)
        deaths = [n.energy.depleted_at_s for n in self.nodes[1:] if n.energy.depleted_at_s is not None]
        lifetime = min(min(deaths), duration) if deaths else duration
        return self.metrics.finalize(
            scenario_id=cfg.name, protocol=self.protocol, seed=self.seed, node_count=cfg.node_count,
            traffic_lambda=cfg.traffic_rate_lambda,
            mobile_fraction=sum(n.mobile for n in self.nodes) / max(1, cfg.node_count),
            per_node_energy_j=[n.energy.consumed_j for n in self.nodes], lifetime_s=lifetime,
        )

    # ------------------------------------------------------------ protocol actions

    def _apply(self, node: SimNode, actions):
        now = self.queue.now
        kick = False
        for a in actions:
            if isinstance(a, Send):
                if a.delay_s > 0:
                    self.queue.schedule(now + a.delay_s, "send", node.id, a.msg)
                else:
                    node.ctrl_queue.append(a.msg)
                    kick = True
            elif isinstance(a, Timer):
                self.queue.schedule(a.at_s, "timer", node.id, (a.name, a.token))
            elif isinstance(a, Note):
                self._trace(node.id, a.kind, a.info)
                if a.kind in ("parent", "detach", "version", "global-repair"):
                    self.topology_dirty = True
                if a.kind == "parent":
                    kick = True
                    if node.joined_at_s is None:
                        node.joined_at_s = now
        if kick:
            self._kick(node)

    def _on_timer(self, ev):
        node = self.nodes[ev.target]
        if not self._touch(node):
            return
        name, token = ev.payload
        self._apply(node, node.rpl.on_timer(name, token, self.queue.now))

    def _on_delayed_send(self, ev):
        node = self.nodes[ev.target]
        if not self._touch(node):
            return
        msg = ev.payload
        if msg.kind == DIO:
            # a delayed DIO advertises the state at send time
            msg = node.rpl.make_dio(msg.dest)
            if not node.rpl.joined:
                return
        node.ctrl_queue.append(msg)
        self._kick(node)

    # ------------------------------------------------------------ energy helpers

    def _touch(self, node: SimNode) -> bool:
        """Settle idle energy; False when the node is (now) dead."""
        if not node.alive:
            return False
        node.energy.settle_idle(self.queue.now)
        return self._check_depleted(node, self.queue.now)

    def _check_depleted(self, node: SimNode, now: float) -> bool:
        if node.alive and node.energy.depleted:
            node.alive = False
            node.rpl.deplete()
            self._trace(node.id, "depleted", f"at={node.energy.depleted_at_s:.6f}")
            while node.data_queue:
                self.metrics.record_drop(node.data_queue.popleft(), "depleted", now)
            node.ctrl_queue.clear()
            self.topology_dirty = True
        return node.alive

    # ------------------------------------------------------------ traffic

    def _on_traffic(self, ev):
        node = self.nodes[ev.target]
        now = self.queue.now
        if not self._touch(node):
            return
        node.traffic_seq += 1
        pkt = DataPacket(origin=node.id, seq=node.traffic_seq, created_s=now)
        self.metrics.record_generation(pkt, now)
        self._process(node, pkt)
        nxt = now + node.traffic_rng.expovariate(self.cfg.traffic_rate_lambda)
        if nxt < self.cfg.sim_duration_s:
            self.queue.schedule(nxt, "traffic", node.id)

    def _process(self, node, pkt):
        t_proc = self.cfg.radio.processing_delay_s
        pkt.proc_s += t_proc
        self.queue.schedule(self.queue.now + t_proc, "proc-done", node.id, pkt)

    def _on_proc_done(self, ev):
        node = self.nodes[ev.target]
        pkt = ev.payload
        now = self.queue.now
        if not self._touch(node):
            self.metrics.record_drop(pkt, "depleted", now)
            return
        if len(node.data_queue) >= self.cfg.radio.queue_capacity:
            reason = "no-route" if node.rpl.next_hop() is None else "queue-overflow"
            self.metrics.record_drop(pkt, reason, now)
            self._trace(node.id, "drop", f"{reason} {pkt.origin}:{pkt.seq}")
            return
        pkt.enqueued_at_s = now
        node.data_queue.append(pkt)
        self._kick(node)

    # ------------------------------------------------------------ radio

    def _kick(self, node: SimNode):
        now = self.queue.now
        if not node.alive or node.busy_until > now:
            return
        if node.ctrl_queue:
            self._transmit(node, node.ctrl_queue.popleft())
            return
        if node.data_queue:
            nh = node.rpl.next_hop()
            if nh is None:
                return
            pkt = node.data_queue.popleft()
            pkt.queue_s += now - pkt.enqueued_at_s
            pkt.dest = nh
            self._transmit(node, pkt)

    def _on_tx_end(self, ev):
        node = self.nodes[ev.target]
        if self._touch(node):
            self._kick(node)

    def _transmit(self, src: SimNode, item):
        """Put one frame on the water and schedule its receptions."""
        cfg = self.cfg
        radio = cfg.radio
        now = self.queue.now
        is_data = isinstance(item, DataPacket)
        air = self.airtime_data if is_data else self.airtime_ctrl
        dest = item.dest
        diff = self.pos - self.pos[src.id]
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        if dest is not None and dist[dest] <= cfg.energy.long_tx_threshold_m:
            power = cfg.energy.tx_short_w
        else:
            power = cfg.energy.tx_long_w
        ok = src.energy.charge("tx", power * air, now)
        if ok and is_data and item.origin != src.id:
            ok = src.energy.charge("aggregation", cfg.energy.aggregation_w * air, now)
        if not ok:
            self._trace(src.id, "abort-depleted", item.kind)
            if is_data:
                self.metrics.record_drop(item, "depleted", now)
            self._check_depleted(src, now)
            return
        src.rpl.residual_energy_j = src.energy.residual_j
        self.tx_count += 1
        src.link_seq += 1
        seq = src.link_seq
        if is_data:
            item.hops += 1
            item.trans_s += air
            self.metrics.data_tx += 1
        else:
            self.metrics.record_control(item.kind)
        self._trace(src.id, f"tx-{item.kind}", f"dest={dest} seq={seq}" + (
            f" pkt={item.origin}:{item.seq}" if is_data else f" {item.summary()}"))
        end_tx = now + air
        src.busy_until = end_tx
        src.tx_intervals = [iv for iv in src.tx_intervals if iv[1] > now]
        src.tx_intervals.append((now, end_tx))
        if radio.collisions:
            for r in src.receptions:
                if r.end > now and r.start < end_tx:
                    r.corrupted = True  # half duplex
        self.queue.schedule(end_tx, "tx-end", src.id)

        sl = channel.source_level_db(power)
        z_src = float(self.pos[src.id, 2])
        dest_reached = False
        for j in np.nonzero(dist <= radio.acoustic_range_m)[0]:
            j = int(j)
            if j == src.id:
                continue
            rx = self.nodes[j]
            if not rx.alive:
                continue
            d = float(dist[j])
            mid_depth = 0.5 * (z_src + float(self.pos[j, 2]))
            c = channel.sound_speed(self.env, mid_depth, self.coeffs)
            prop = channel.propagation_delay_s(d, c)
            start = now + prop
            end = start + air
            alpha = channel.absorption_db_per_km(radio.frequency_khz, self.env, mid_depth / 1000.0)
            loss = channel.path_loss_db(max(d, 1.0), radio.spreading_factor, alpha)
            received = sl - loss
            snr = received - self.noise_band_db
            p_ok = 1.0 - radio.forced_loss
            if radio.link_capacity_gate:
                p_ok *= min(1.0, channel.channel_capacity_bps(snr, radio.bandwidth_bps) / radio.bandwidth_bps)
            draw = rx.link_rng.random()
            rec = _Reception(src.id, item, dest, start, end, snr >= radio.snr_threshold_db, draw < p_ok,
                             LinkObservation(received, d, prop + air, seq))
            if radio.collisions:
                for other in rx.receptions:
                    if other.end > start and other.start < end:
                        other.corrupted = True
                        rec.corrupted = True
                for s, e in rx.tx_intervals:
                    if e > start and s < end:
                        rec.corrupted = True
            rx.receptions.append(rec)
            self.queue.schedule(end, "deliver", j, rec)
            if j == dest:
                dest_reached = True
                if is_data:
                    item.prop_s += prop
        if is_data and not dest_reached:
            reason = "depleted" if not self.nodes[dest].alive else "snr"
            self.metrics.record_drop(item, reason, now)
            self._trace(src.id, "drop", f"{reason} {item.origin}:{item.seq} unreachable={dest}")

    def _on_deliver(self, ev):
        rx = self.nodes[ev.target]
        rec: _Reception = ev.payload
        now = self.queue.now
        try:
            rx.receptions.remove(rec)
        except ValueError:
            pass
        item = rec.item
        is_data = isinstance(item, DataPacket)
        mine = is_data and rec.dest == rx.id
        if not self._touch(rx):
            if mine:
                self.metrics.record_drop(item, "depleted", now)
            return
        air = self.airtime_data if is_data else self.airtime_ctrl
        if not rx.energy.charge("rx", self.cfg.energy.rx_w * air, now):
            self._check_depleted(rx, now)
            if mine:
                self.metrics.record_drop(item, "depleted", now)
            return
        rx.rpl.residual_energy_j = rx.energy.residual_j
        if rec.corrupted or not (rec.snr_ok and rec.link_ok):
            if mine:
                reason = "collision" if rec.corrupted else "snr"
                self.metrics.record_drop(item, reason, now)
                self._trace(rx.id, "drop", f"{reason} {item.origin}:{item.seq}")
            return
        self.rx_count += 1
        rx.rpl.overhear(rec.sender, rec.obs, now)
        if is_data:
            if not mine:
                return
            if rx.is_sink:
                self.metrics.record_delivery(item, now)
                self._trace(rx.id, "delivered", f"{item.origin}:{item.seq} hops={item.hops}")
            else:
                self._process(rx, item)
            return
        if rec.dest is None or rec.dest == rx.id:
            self._trace(rx.id, f"rx-{item.kind}", f"from={rec.sender}")
            self._apply(rx, rx.rpl.receive(item, rec.obs, now))

    # ------------------------------------------------------------ mobility

    def _on_mobility(self, ev):
        now = self.queue.now
        dt = self.cfg.mobility_step_s
        for n in self.nodes:
            if n.mobile and n.alive:
                move_node(n, dt, self._draw_waypoint, self.cfg.speed_range_mps)
                self.pos[n.id] = n.pos
                self._refresh_sensors(n)
        self.mobility_updates += 1
        self._trace(None, "mobility-update", f"step={self.mobility_updates}")
        if now + dt <= self.cfg.sim_duration_s:
            self.queue.schedule(now + dt, "mobility")


def move_node(node: SimNode, dt: float, draw_waypoint, speed_range):
    """3-D random waypoint with zero pause; leftover time carries past a waypoint."""
    if not node.mobile:
        return
    remaining = dt
    for _ in range(1000):
        if remaining <= 0:
            break
        wp = node.waypoint
        vec = [w - p for w, p in zip(wp, node.pos)]
        d = math.sqrt(sum(v * v for v in vec))
        reach = node.speed * remaining
        if d <= reach:
            node.pos = list(wp)
            remaining -= d / node.speed
            node.waypoint = draw_waypoint(node)
            node.speed = node.mobility_rng.uniform(*speed_range)
        else:
            node.pos = [p + v / d * reach for p, v in zip(node.pos, vec)]
            remaining = 0.0


def resolve_weights(cfg: ScenarioConfig, protocol: str) -> swara.WeightVector | None:
    """Weight vector for an RPLUW variant; ``None`` for the baselines."""
    if not protocol.startswith("rpluw"):
        return None
    spec = cfg.weights
    if spec in ("auto", ""):
        spec = "paper-fuzzy" if protocol == "rpluw-fuzzy" else "paper-swara"
    try:
        return swara.preset_weights(spec)
    except swara.WeightConfigError:
        pass
    path = Path(spec)
    if not path.is_file():
        raise ConfigError(f"weights: {spec!r} is neither a preset nor a readable assessment file")
    try:
        w = swara.parse_assessment(path.read_text()).weights()
        return w.reordered(swara.CRITERION_NAMES)
    except swara.MCDMError as exc:
        raise ConfigError(f"weights: {path}: {exc}") from None


def run(config: ScenarioConfig, seed: int | None = None, protocol: str | None = None, **kw) -> MetricsReport:
    return Simulation(config, seed=seed, protocol=protocol, **kw).run()


# ---------------------------------------------------------------- invariants

@dataclass
class InvariantMonitor:
    """Checks protocol invariants after every event and records violations."""

    staleness_factor: float = 1.5
    violations: list = field(default_factory=list)
    topology_checks: int = 0
    events_seen: int = 0
    max_table: int = 0
    max_children: int = 0

    def __call__(self, sim: Simulation, ev: Event):
        self.events_seen += 1
        if ev.target is not None:
            self._local(sim, sim.nodes[ev.target])
        if sim.topology_dirty:
            self._topology(sim)
            sim.topology_dirty = False

    def _fail(self, sim, msg):
        if len(self.violations) < 50:
            self.violations.append(f"t={sim.queue.now:.6f}: {msg}")

    def _local(self, sim, node):
        rpl = node.rpl
        cfg = rpl.config
        now = sim.queue.now
        n = len(rpl.table)
        self.max_table = max(self.max_table, n)
        if n > cfg.kappa:
            self._fail(sim, f"node {node.id} parent table holds {n} > kappa")
        t = rpl.trickle
        if not t.i_min_s <= t.current_interval_s <= t.i_max_s:
            self._fail(sim, f"node {node.id} trickle interval {t.current_interval_s}")
        if rpl.table.preferred is not None and rpl.table.preferred not in rpl.table:
            self._fail(sim, f"node {node.id} preferred parent missing from table")
        horizon = self.staleness_factor * cfg.timers.linkage_lt_s
        for e in rpl.table.entries:
            if now - e.last_heard_s > horizon + 1e-9:
                self._fail(sim, f"node {node.id} keeps stale entry {e.parent_id}")
        self.max_children = max(self.max_children, len(rpl.children))
        if len(rpl.children) > cfg.gamma_degree_limit:
            self._fail(sim, f"node {node.id} has {len(rpl.children)} children > gamma")

    def _topology(self, sim):
        self.topology_checks += 1
        nodes = sim.nodes
        for n in nodes:
            p = n.rpl.table.preferred if n.alive else None
            if p is None:
                continue
            pr = nodes[p].rpl
            if pr.version == n.rpl.version:
                if not n.rpl.rank > pr.rank:
                    self._fail(sim, f"rank {n.id}={n.rpl.rank} not above parent {p}={pr.rank}")
            elif pr.version < n.rpl.version:
                self._fail(sim, f"node {n.id} (v{n.rpl.version}) points at older parent {p} (v{pr.version})")
        for n in nodes:
            seen = set()
            cur = n.id
            while cur is not None:
                if cur in seen:
                    self._fail(sim, f"cycle through node {cur}")
                    break
                seen.add(cur)
                nxt = nodes[cur].rpl.table.preferred if nodes[cur].alive else None
                cur = nxt


def energy_balance_error(sim: Simulation) -> float:
    """Largest |initial - residual - sum(accumulators)| over all nodes, joules."""
    worst = 0.0
    for n in sim.nodes:
        e = n.energy
        worst = max(worst, abs(e.initial_j - e.residual_j - math.fsum(e.spent.values())))
    return worst


def reachable_from_sink(positions, radius: float) -> set[int]:
    """Node ids connected to the sink through hops no longer than ``radius``."""
    pos = np.asarray(positions, float)
    seen = {SINK_ID}
    frontier = [SINK_ID]
    while frontier:
        i = frontier.pop()
        d = np.sqrt(((pos - pos[i]) ** 2).sum(axis=1))
        for j in np.nonzero(d <= radius)[0]:
            j = int(j)
            if j not in seen:
                seen.add(j)
                frontier.append(j)
    return seen
