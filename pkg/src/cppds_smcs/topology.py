"""Electrical and communication graph model of a cyber-physical feeder system.

Each branch is a feeder segment (from_bus -> to_bus) whose customers sit at
``to_bus`` and whose sectionalizing switch can disconnect the segment. A
branch is *served* when it is healthy and its load bus is reachable from a
feeder through closed, healthy segments and closed tie switches.
"""
from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

NETWORK_FORMAT = "cppds-network"
NETWORK_VERSION = 1


class TopologyError(ValueError):
    """A network description violates the schema or a structural invariant."""


@dataclass(frozen=True)
class Branch:
    id: int
    from_bus: int
    to_bus: int
    customers: int
    switch: str
    failure_rate: float | None = None  # overrides the scenario's branch rate


@dataclass(frozen=True)
class TieSwitch:
    id: str
    bus_a: int
    bus_b: int


@dataclass(frozen=True)
class ElectricalNetwork:
    feeders: tuple[int, ...]
    buses: tuple[int, ...]
    branches: tuple[Branch, ...]
    tie_switches: tuple[TieSwitch, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {b.id: b for b in self.branches})
        object.__setattr__(self, "_hash", hash((self.feeders, self.buses, self.branches, self.tie_switches, self.name)))

    def __hash__(self):
        # used as a restoration-cache key on every fault
        return self._hash

    def __getstate__(self):
        # string hashes differ between processes; rebuild derived state on load
        return {f: getattr(self, f) for f in ("feeders", "buses", "branches", "tie_switches", "name")}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)
        self.__post_init__()

    def branch(self, branch_id: int) -> Branch:
        try:
            return self._by_id[branch_id]
        except KeyError:
            raise KeyError(f"unknown branch {branch_id!r}") from None

    @property
    def branch_ids(self) -> tuple[int, ...]:
        return tuple(b.id for b in self.branches)

    @property
    def total_customers(self) -> int:
        return sum(b.customers for b in self.branches)

    def customers_of(self, branch_ids: Iterable[int]) -> int:
        return sum(self._by_id[b].customers for b in branch_ids)

    def base_configuration(self) -> "SwitchConfiguration":
        return SwitchConfiguration(frozenset(b.switch for b in self.branches))


@dataclass(frozen=True)
class Controller:
    id: str
    branch: int
    comm_switch: str


@dataclass(frozen=True)
class CyberNetwork:
    """Ring of communication switches with servers inserted into the ring.

    ``ring`` lists every ring node (comm switches and servers) in cyclic
    order; the last node links back to the first.
    """

    ring: tuple[str, ...]
    servers: tuple[str, ...]
    controllers: tuple[Controller, ...]

    def __post_init__(self):
        object.__setattr__(self, "_ctl_by_branch", {c.branch: c for c in self.controllers})
        object.__setattr__(self, "_pos", {n: i for i, n in enumerate(self.ring)})

    @property
    def comm_switches(self) -> tuple[str, ...]:
        servers = set(self.servers)
        return tuple(n for n in self.ring if n not in servers)

    def controller_for(self, branch_id: int) -> Controller:
        try:
            return self._ctl_by_branch[branch_id]
        except KeyError:
            raise KeyError(f"no controller for branch {branch_id!r}") from None

    def active_path(self, comm_switch: str, server: str) -> tuple[str, ...]:
        """Intermediate nodes on the spanning-tree path to ``server``.

        The tree blocks the ring link from the last listed node back to the
        first, so forwarding follows the ``ring`` order.
        """
        i, j = sorted((self._pos[comm_switch], self._pos[server]))
        path = self.ring[i + 1 : j]
        return path if self._pos[comm_switch] < self._pos[server] else path[::-1]

    def alternate_path(self, comm_switch: str, server: str) -> tuple[str, ...]:
        """Path the other way round, through the link RSTP unblocks."""
        i, j = sorted((self._pos[comm_switch], self._pos[server]))
        if self._pos[comm_switch] < self._pos[server]:
            return self.ring[:i][::-1] + self.ring[j + 1 :][::-1]
        return self.ring[j + 1 :] + self.ring[:i]


@dataclass(frozen=True)
class SwitchConfiguration:
    """The set of closed switches; every switch not listed is open."""

    closed: frozenset[str] = field(default_factory=frozenset)

    def with_open(self, *switches: str) -> "SwitchConfiguration":
        return SwitchConfiguration(self.closed - set(switches))

    def with_closed(self, *switches: str) -> "SwitchConfiguration":
        return SwitchConfiguration(self.closed | set(switches))

    def is_closed(self, switch: str) -> bool:
        return switch in self.closed


class CommStatus(enum.Enum):
    CONNECTED = "connected"
    CONNECTED_AFTER_RSTP = "connected_after_rstp"
    CONTROLLER_DOWN = "controller_down"


# --- electrical graph -------------------------------------------------------

_GROUND = ("ground",)


def _closed_edges(net: ElectricalNetwork, config: SwitchConfiguration, failed=frozenset()):
    for b in net.branches:
        if b.id not in failed and b.switch in config.closed:
            yield b.from_bus, b.to_bus, b.switch
    for t in net.tie_switches:
        if t.id in config.closed:
            yield t.bus_a, t.bus_b, t.id


def find_cycle(net: ElectricalNetwork, config: SwitchConfiguration) -> list[str] | None:
    """Switch ids closing a loop or a feeder-to-feeder path, or None if radial.

    Feeders are merged into one ground node, so a path joining two feeders
    shows up as a cycle through ground.
    """
    feeders = set(net.feeders)
    parent: dict = {}
    adj: dict = {}

    def key(bus):
        return _GROUND if bus in feeders else bus

    def root(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, sw in _closed_edges(net, config):
        a, b = key(a), key(b)
        ra, rb = root(a), root(b)
        if ra == rb:
            return _path_between(adj, a, b) + [sw]
        parent[ra] = rb
        adj.setdefault(a, []).append((b, sw))
        adj.setdefault(b, []).append((a, sw))
    return None


def _path_between(adj, src, dst) -> list[str]:
    prev = {src: None}
    queue = deque([src])
    while queue:
        node = queue.popleft()
        if node == dst:
            break
        for nxt, sw in adj.get(node, ()):
            if nxt not in prev:
                prev[nxt] = (node, sw)
                queue.append(nxt)
    path = []
    node = dst
    while prev.get(node) is not None:
        node, sw = prev[node]
        path.append(sw)
    return path[::-1]


def is_radial(net: ElectricalNetwork, config: SwitchConfiguration) -> bool:
    return find_cycle(net, config) is None


def energized_buses(net: ElectricalNetwork, config: SwitchConfiguration, failed=frozenset()) -> set[int]:
    adj: dict[int, list[int]] = {}
    for a, b, _ in _closed_edges(net, config, failed):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen = set(net.feeders)
    queue = deque(net.feeders)
    while queue:
        node = queue.popleft()
        for nxt in adj.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def energized_branches(net: ElectricalNetwork, config: SwitchConfiguration, failed=frozenset()) -> set[int]:
    """Healthy branches whose load bus is fed from some feeder."""
    live = energized_buses(net, config, failed)
    return {b.id for b in net.branches if b.id not in failed and b.to_bus in live}


def downstream_of(net: ElectricalNetwork, branch_id: int) -> set[int]:
    """Branches fed through ``branch_id`` in the base configuration."""
    net.branch(branch_id)
    base = net.base_configuration()
    return energized_branches(net, base) - energized_branches(net, base, {branch_id}) - {branch_id}


def single_exchange_reconfigurations(net: ElectricalNetwork) -> list[tuple[str, str]]:
    """(sectionalizer opened, tie closed) pairs that stay radial and serve every bus."""
    base = net.base_configuration()
    all_buses = set(net.feeders) | set(net.buses)
    out = []
    for b in net.branches:
        for t in net.tie_switches:
            cfg = base.with_open(b.switch).with_closed(t.id)
            if is_radial(net, cfg) and energized_buses(net, cfg) == all_buses:
                out.append((b.switch, t.id))
    return out


# --- communication ring -----------------------------------------------------


def controller_comm_status(
    cyber: CyberNetwork,
    branch_id: int,
    failed_comm_switches: Iterable[str] = (),
    failed_controllers: Iterable[str] = (),
) -> CommStatus:
    """How the operation centre currently hears from a branch's controller.

    A controller that cannot reach any server is reported as
    ``CONTROLLER_DOWN``: the branch is invisible either way.
    """
    ctl = cyber.controller_for(branch_id)
    failed_controllers = set(failed_controllers)
    if ctl.id in failed_controllers:
        return CommStatus.CONTROLLER_DOWN
    failed = set(failed_comm_switches)
    if not failed:
        return CommStatus.CONNECTED
    if ctl.comm_switch in failed:
        return CommStatus.CONTROLLER_DOWN
    rerouted = False
    for server in cyber.servers:
        if server in failed:
            continue
        if failed.isdisjoint(cyber.active_path(ctl.comm_switch, server)):
            return CommStatus.CONNECTED
        if failed.isdisjoint(cyber.alternate_path(ctl.comm_switch, server)):
            rerouted = True
    return CommStatus.CONNECTED_AFTER_RSTP if rerouted else CommStatus.CONTROLLER_DOWN


def ring_survives_single_failure(cyber: CyberNetwork) -> bool:
    """Every surviving comm switch reaches every server after any one comm switch fails."""
    for dead in cyber.comm_switches:
        for sw in cyber.comm_switches:
            if sw == dead:
                continue
            for server in cyber.servers:
                if dead in cyber.active_path(sw, server) and dead in cyber.alternate_path(sw, server):
                    return False
    return True


# --- loading ----------------------------------------------------------------


def _require(doc: Mapping, key: str, where: str):
    if key not in doc:
        raise TopologyError(f"{where}: missing required field {key!r}")
    return doc[key]


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TopologyError(f"{where}: expected an integer, got {value!r}")
    return value


def load_network(document: Mapping) -> tuple[ElectricalNetwork, CyberNetwork]:
    """Build and validate a network from its parsed JSON document."""
    if not isinstance(document, Mapping):
        raise TopologyError("network document must be a JSON object")
    fmt = document.get("format")
    if fmt != NETWORK_FORMAT:
        raise TopologyError(f"format must be {NETWORK_FORMAT!r}, got {fmt!r}")
    if document.get("version") != NETWORK_VERSION:
        raise TopologyError(f"unsupported network version {document.get('version')!r}")

    feeders = tuple(_int(f, "feeders") for f in _require(document, "feeders", "network"))
    buses = tuple(_int(b, "buses") for b in _require(document, "buses", "network"))
    if not feeders:
        raise TopologyError("network: at least one feeder is required")
    nodes = set(feeders) | set(buses)
    if len(nodes) != len(feeders) + len(buses):
        raise TopologyError("network: feeder and bus ids must be unique")

    branches = []
    switches: set[str] = set()
    for raw in _require(document, "branches", "network"):
        bid = _int(_require(raw, "id", "branch"), "branch id")
        where = f"branch {bid}"
        frm = _int(_require(raw, "from", where), f"{where} from")
        to = _int(_require(raw, "to", where), f"{where} to")
        customers = _int(_require(raw, "customers", where), f"{where} customers")
        switch = _require(raw, "switch", where)
        rate = raw.get("failure_rate")
        if frm not in nodes or to not in nodes:
            raise TopologyError(f"{where}: endpoint not a declared feeder or bus")
        if to in feeders:
            raise TopologyError(f"{where}: load end 'to' cannot be a feeder")
        if customers < 0:
            raise TopologyError(f"{where}: customers must be >= 0")
        if not isinstance(switch, str) or switch in switches:
            raise TopologyError(f"{where}: sectionalizing switch id {switch!r} missing or duplicated")
        if rate is not None and (not isinstance(rate, (int, float)) or rate < 0):
            raise TopologyError(f"{where}: failure_rate must be a number >= 0")
        switches.add(switch)
        branches.append(Branch(bid, frm, to, customers, switch, None if rate is None else float(rate)))
    if len({b.id for b in branches}) != len(branches):
        raise TopologyError("network: duplicate branch id")
    if not branches:
        raise TopologyError("network: at least one branch is required")
    loads = [b.to_bus for b in branches]
    if len(set(loads)) != len(loads):
        raise TopologyError("network: two branches share the same load bus")

    ties = []
    for raw in document.get("tie_switches", []):
        tid = _require(raw, "id", "tie switch")
        a = _int(_require(raw, "a", f"tie {tid}"), f"tie {tid} a")
        b = _int(_require(raw, "b", f"tie {tid}"), f"tie {tid} b")
        if not isinstance(tid, str) or tid in switches:
            raise TopologyError(f"tie {tid!r}: id missing or duplicated")
        if a not in nodes or b not in nodes:
            raise TopologyError(f"tie {tid}: endpoint not a declared feeder or bus")
        switches.add(tid)
        ties.append(TieSwitch(tid, a, b))

    net = ElectricalNetwork(feeders, buses, tuple(branches), tuple(ties), str(document.get("name", "")))
    cycle = find_cycle(net, net.base_configuration())
    if cycle is not None:
        raise TopologyError(f"base configuration is not radial: cycle through {', '.join(cycle)}")
    unfed = set(buses) - energized_buses(net, net.base_configuration())
    if unfed:
        raise TopologyError(f"buses not fed in base configuration: {sorted(unfed)}")

    cyber = _load_cyber(_require(document, "cyber", "network"), net)
    return net, cyber


def _load_cyber(doc: Mapping, net: ElectricalNetwork) -> CyberNetwork:
    ring = tuple(_require(doc, "ring", "cyber"))
    servers = tuple(_require(doc, "servers", "cyber"))
    if len(set(ring)) != len(ring):
        raise TopologyError("cyber: duplicate node in ring")
    if len(ring) < 3:
        raise TopologyError("cyber: ring needs at least 3 nodes")
    if not servers:
        raise TopologyError("cyber: at least one server is required")
    for s in servers:
        if s not in ring:
            raise TopologyError(f"cyber: server {s!r} is not on the ring")
    comm = set(ring) - set(servers)
    controllers = []
    seen_branches = set()
    for raw in _require(doc, "controllers", "cyber"):
        cid = _require(raw, "id", "controller")
        where = f"controller {cid}"
        branch = _require(raw, "branch", where)
        sw = _require(raw, "comm_switch", where)
        if branch not in net.branch_ids:
            raise TopologyError(f"{where}: references unknown branch {branch!r}")
        if branch in seen_branches:
            raise TopologyError(f"{where}: branch {branch} already has a controller")
        if sw not in comm:
            raise TopologyError(f"{where}: references unknown comm switch {sw!r}")
        if cid in ring or any(c.id == cid for c in controllers):
            raise TopologyError(f"{where}: id clashes with another cyber component")
        seen_branches.add(branch)
        controllers.append(Controller(cid, branch, sw))
    missing = set(net.branch_ids) - seen_branches
    if missing:
        raise TopologyError(f"cyber: branches without a controller: {sorted(missing)}")
    return CyberNetwork(ring, servers, tuple(controllers))


def network_to_document(net: ElectricalNetwork, cyber: CyberNetwork) -> dict:
    branches = []
    for b in net.branches:
        entry = {"id": b.id, "from": b.from_bus, "to": b.to_bus, "customers": b.customers, "switch": b.switch}
        if b.failure_rate is not None:
            entry["failure_rate"] = b.failure_rate
        branches.append(entry)
    return {
        "format": NETWORK_FORMAT,
        "version": NETWORK_VERSION,
        "name": net.name,
        "feeders": list(net.feeders),
        "buses": list(net.buses),
        "branches": branches,
        "tie_switches": [{"id": t.id, "a": t.bus_a, "b": t.bus_b} for t in net.tie_switches],
        "cyber": {
            "ring": list(cyber.ring),
            "servers": list(cyber.servers),
            "controllers": [
                {"id": c.id, "branch": c.branch, "comm_switch": c.comm_switch} for c in cyber.controllers
            ],
        },
    }


def load_network_file(path) -> tuple[ElectricalNetwork, CyberNetwork]:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TopologyError(f"{path}: invalid JSON: {exc}") from None
    return load_network(doc)


# Customers per branch of the three-feeder test system.
CIVANLAR_CUSTOMERS = {3: 3, 4: 5, 5: 3, 6: 2, 7: 6, 8: 8, 9: 1, 10: 1, 11: 7, 12: 1, 13: 1, 14: 1, 15: 3}

# (branch id = load bus, supply bus); feeders are buses 0, 1, 2.
_CIVANLAR_EDGES = [
    (3, 0), (4, 3), (5, 3), (6, 5),
    (7, 1), (8, 7), (9, 7), (10, 8), (11, 8),
    (12, 2), (13, 12), (14, 12), (15, 14),
]
_CIVANLAR_TIES = [("t1", 4, 10), ("t2", 9, 13), ("t3", 6, 15)]


def build_civanlar() -> tuple[ElectricalNetwork, CyberNetwork]:
    """Three-feeder, 13-branch Civanlar system with a 13-switch ring and two servers."""
    branches = tuple(
        Branch(bid, supply, bid, CIVANLAR_CUSTOMERS[bid], f"s{bid}") for bid, supply in _CIVANLAR_EDGES
    )
    ties = tuple(TieSwitch(*t) for t in _CIVANLAR_TIES)
    net = ElectricalNetwork((0, 1, 2), tuple(range(3, 16)), branches, ties, "civanlar")
    ids = [b.id for b in branches]
    half = (len(ids) + 1) // 2
    ring = ("srv1", *(f"cs{i}" for i in ids[:half]), "srv2", *(f"cs{i}" for i in ids[half:]))
    controllers = tuple(Controller(f"ctl{i}", i, f"cs{i}") for i in ids)
    return net, CyberNetwork(ring, ("srv1", "srv2"), controllers)


def shipped_data_path(name: str) -> Path:
    return Path(str(resources.files("cppds_smcs") / "data" / name))
