"""The two simulated object runtimes.

NominalWorld: named classes, single inheritance, virtual dispatch down the
parent chain, non-virtual calls pinned at an ancestor, and runtime
instance-of.  StructuralWorld: objects are bags of method slots; a type is a
method set, conformance is slot-set inclusion, and slots can be replaced at
any time (binding is resolved per call).

Method bodies are host-provided callables ``fn(self, args, world)``; their
arity is fixed when registered.  A world instance is single-threaded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

from .errors import (
    ARITY_MISMATCH,
    DUPLICATE_CLASS,
    NO_SUCH_METHOD,
    NO_SUCH_SLOT,
    NOT_AN_ANCESTOR,
    UNKNOWN_CLASS,
    UNKNOWN_CTOR,
    UNKNOWN_FIELD,
    UNKNOWN_OBJECT,
    UNKNOWN_PARENT,
    WRONG_WORLD,
    BridgeError,
)

NOMINAL = "nominal"
STRUCTURAL = "structural"


@dataclass(frozen=True)
class ObjRef:
    world: str
    id: int
    runtime_class: str | None = None


Value = Union[int, float, bool, str, None, ObjRef]

MethodFn = Callable[[ObjRef, list, object], Value]


@dataclass(frozen=True)
class MethodImpl:
    arity: int
    fn: MethodFn


def method(arity: int):
    """Decorator shorthand: ``@method(2)`` turns a function into a MethodImpl."""

    def wrap(fn: MethodFn) -> MethodImpl:
        return MethodImpl(arity, fn)

    return wrap


def _check_arity(impl: MethodImpl, args: list, what: str, origin: str) -> None:
    if len(args) != impl.arity:
        raise BridgeError(
            ARITY_MISMATCH,
            f"{what} expects {impl.arity} argument(s), got {len(args)}",
            origin,
        )


# ---- nominal world -----------------------------------------------------------


@dataclass
class NominalClass:
    name: str
    parent: str | None = None
    vtable: dict[str, MethodImpl] = field(default_factory=dict)
    fields: dict[str, Value] = field(default_factory=dict)
    ctors: dict[str, MethodImpl] = field(default_factory=dict)


@dataclass
class _Instance:
    class_name: str
    fields: dict[str, Value]


class NominalWorld:
    def __init__(self):
        self._classes: dict[str, NominalClass] = {}
        self._instances: dict[int, _Instance] = {}
        self._next_id = 1

    # -- registry --

    def register_class(self, cls: NominalClass) -> None:
        if cls.name in self._classes:
            raise BridgeError(DUPLICATE_CLASS, cls.name, NOMINAL)
        if cls.parent is not None and cls.parent not in self._classes:
            raise BridgeError(UNKNOWN_PARENT, cls.parent, NOMINAL)
        self._classes[cls.name] = cls

    def has_class(self, name: str) -> bool:
        return name in self._classes

    def chain(self, class_name: str) -> list[NominalClass]:
        """Class and its ancestors, most-derived first."""
        out = []
        cur: str | None = class_name
        while cur is not None:
            cls = self._classes.get(cur)
            if cls is None:
                raise BridgeError(UNKNOWN_CLASS, cur, NOMINAL)
            out.append(cls)
            cur = cls.parent
        return out

    # -- instances --

    def _instance(self, ref: ObjRef) -> _Instance:
        if ref.world != NOMINAL:
            raise BridgeError(WRONG_WORLD, f"expected a nominal object, got {ref.world}", NOMINAL)
        inst = self._instances.get(ref.id)
        if inst is None:
            raise BridgeError(UNKNOWN_OBJECT, ref.id, NOMINAL)
        return inst

    def allocate(self, class_name: str) -> ObjRef:
        """Create an instance with chain-default fields; no constructor runs."""
        chain = self.chain(class_name)
        fields: dict[str, Value] = {}
        for cls in reversed(chain):
            fields.update(cls.fields)
        ref = ObjRef(NOMINAL, self._next_id, class_name)
        self._next_id += 1
        self._instances[ref.id] = _Instance(class_name, fields)
        return ref

    def run_ctor(self, ref: ObjRef, class_name: str, ctor_alias: str, args: list) -> None:
        self._instance(ref)
        cls = self._classes.get(class_name)
        if cls is None:
            raise BridgeError(UNKNOWN_CLASS, class_name, NOMINAL)
        impl = cls.ctors.get(ctor_alias)
        if impl is None:
            raise BridgeError(UNKNOWN_CTOR, f"{class_name}.{ctor_alias}", NOMINAL)
        _check_arity(impl, args, f"constructor '{ctor_alias}'", NOMINAL)
        impl.fn(ref, args, self)

    def new(self, class_name: str, ctor_alias: str, args: list) -> ObjRef:
        ref = self.allocate(class_name)
        self.run_ctor(ref, class_name, ctor_alias, args)
        return ref

    # -- dispatch --

    def _lookup(self, class_name: str, alias: str) -> MethodImpl | None:
        for cls in self.chain(class_name):
            impl = cls.vtable.get(alias)
            if impl is not None:
                return impl
        return None

    def invoke_virtual(self, recv: ObjRef, alias: str, args: list) -> Value:
        inst = self._instance(recv)
        impl = self._lookup(inst.class_name, alias)
        if impl is None:
            raise BridgeError(NO_SUCH_METHOD, f"{inst.class_name}.{alias}", NOMINAL)
        _check_arity(impl, args, f"method '{alias}'", NOMINAL)
        return impl.fn(recv, args, self)

    def invoke_nonvirtual(
        self, recv: ObjRef, defining_class: str, alias: str, args: list
    ) -> Value:
        inst = self._instance(recv)
        chain_names = [c.name for c in self.chain(inst.class_name)]
        if defining_class not in chain_names:
            raise BridgeError(
                NOT_AN_ANCESTOR,
                f"'{defining_class}' is not on the chain of '{inst.class_name}'",
                NOMINAL,
            )
        impl = self._lookup(defining_class, alias)
        if impl is None:
            raise BridgeError(NO_SUCH_METHOD, f"{defining_class}.{alias}", NOMINAL)
        _check_arity(impl, args, f"method '{alias}'", NOMINAL)
        return impl.fn(recv, args, self)

    def instance_of(self, recv: ObjRef, class_name: str) -> bool:
        inst = self._instance(recv)
        if class_name not in self._classes:
            raise BridgeError(UNKNOWN_CLASS, class_name, NOMINAL)
        return class_name in (c.name for c in self.chain(inst.class_name))

    def class_of(self, recv: ObjRef) -> str:
        return self._instance(recv).class_name

    # -- field storage --

    def get_field(self, recv: ObjRef, name: str) -> Value:
        inst = self._instance(recv)
        if name not in inst.fields:
            raise BridgeError(UNKNOWN_FIELD, f"{inst.class_name}.{name}", NOMINAL)
        return inst.fields[name]

    def set_field(self, recv: ObjRef, name: str, value: Value) -> None:
        inst = self._instance(recv)
        if name not in inst.fields:
            raise BridgeError(UNKNOWN_FIELD, f"{inst.class_name}.{name}", NOMINAL)
        inst.fields[name] = value

    # -- export --

    def export_manifest(self) -> dict:
        """World description consumed by startup verification."""
        return {
            "world": NOMINAL,
            "classes": [
                {
                    "name": cls.name,
                    "parent": cls.parent,
                    "methods": [
                        {"alias": alias, "arity": impl.arity}
                        for alias, impl in cls.vtable.items()
                    ],
                    "ctors": [
                        {"alias": alias, "arity": impl.arity}
                        for alias, impl in cls.ctors.items()
                    ],
                }
                for cls in self._classes.values()
            ],
        }


# ---- structural world ----------------------------------------------------------


@dataclass
class StructuralObject:
    slots: dict[str, MethodImpl]
    state: dict[str, Value]


class StructuralWorld:
    def __init__(self):
        self._objects: dict[int, StructuralObject] = {}
        self._next_id = 1

    def _object(self, ref: ObjRef) -> StructuralObject:
        if ref.world != STRUCTURAL:
            raise BridgeError(
                WRONG_WORLD, f"expected a structural object, got {ref.world}", STRUCTURAL
            )
        obj = self._objects.get(ref.id)
        if obj is None:
            raise BridgeError(UNKNOWN_OBJECT, ref.id, STRUCTURAL)
        return obj

    def make_object(
        self,
        slots: Mapping[str, MethodImpl],
        state: Mapping[str, Value] | None = None,
    ) -> ObjRef:
        ref = ObjRef(STRUCTURAL, self._next_id)
        self._next_id += 1
        self._objects[ref.id] = StructuralObject(dict(slots), dict(state or {}))
        return ref

    def invoke(self, recv: ObjRef, alias: str, args: list) -> Value:
        obj = self._object(recv)
        impl = obj.slots.get(alias)
        if impl is None:
            raise BridgeError(NO_SUCH_SLOT, alias, STRUCTURAL)
        _check_arity(impl, args, f"slot '{alias}'", STRUCTURAL)
        return impl.fn(recv, args, self)

    def conforms(self, recv: ObjRef, required: Mapping[str, int]) -> bool:
        """True iff the object's slots cover the alias->arity map."""
        obj = self._object(recv)
        for alias, arity in required.items():
            impl = obj.slots.get(alias)
            if impl is None or impl.arity != arity:
                return False
        return True

    def slot(self, recv: ObjRef, alias: str) -> MethodImpl:
        obj = self._object(recv)
        impl = obj.slots.get(alias)
        if impl is None:
            raise BridgeError(NO_SUCH_SLOT, alias, STRUCTURAL)
        return impl

    def aliases(self, recv: ObjRef) -> list[str]:
        return list(self._object(recv).slots)

    def replace_slot(self, recv: ObjRef, alias: str, impl: MethodImpl) -> None:
        obj = self._object(recv)
        if alias not in obj.slots:
            raise BridgeError(NO_SUCH_SLOT, alias, STRUCTURAL)
        obj.slots[alias] = impl

    def get_state(self, recv: ObjRef, name: str) -> Value:
        return self._object(recv).state.get(name)

    def set_state(self, recv: ObjRef, name: str, value: Value) -> None:
        self._object(recv).state[name] = value
