"""The mutable store backing imperative references, with an event trace.

Each interpreter instance owns one Store handle; the trace records every
read and write in order so that different interpreters can be checked
for identical effect ordering.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import UnboundTagError
from .syntax import Value, format_value


@dataclass(frozen=True)
class StoreEvent:
    kind: str  # "get" or "set"
    tag: str
    value: Value


class Store:
    def __init__(self, initial=None):
        initial = dict(initial or {})
        self.initial = dict(initial)
        self.bindings = initial
        self.trace: list[StoreEvent] = []

    def get(self, tag: str) -> Value:
        if tag not in self.bindings:
            raise UnboundTagError(tag)
        v = self.bindings[tag]
        self.trace.append(StoreEvent("get", tag, v))
        return v

    def set(self, tag: str, v: Value) -> Value:
        self.bindings[tag] = v
        self.trace.append(StoreEvent("set", tag, v))
        return v

    def replay(self) -> dict:
        """Final bindings recomputed from the initial bindings and the trace."""
        out = dict(self.initial)
        for ev in self.trace:
            if ev.kind == "set":
                out[ev.tag] = ev.value
        return out


def fresh_store(initial=None) -> Store:
    return Store(initial)


def store_get(tag: str, s: Store) -> Value:
    return s.get(tag)


def store_set(tag: str, v: Value, s: Store) -> Store:
    s.set(tag, v)
    return s


def format_trace(s: Store) -> str:
    """Line-per-event text log: `GET tag value` / `SET tag value`."""
    return "\n".join(
        f"{ev.kind.upper()} {ev.tag} {format_value(ev.value)}" for ev in s.trace
    )
