"""Bridge runtime: executes a wrapper manifest over the two object worlds.

A wrapper is a structural object whose slots forward to a nominal peer.  For
``[callback]`` classes the bridge instead builds a stub pair: a generated
nominal subclass overrides every method as a callback into the structural
peer's slots (so structural overrides are visible to nominal-side internal
calls), while the structural peer's default slots call the original class
non-virtually on the stub instance (so an un-overridden method never
re-enters the stub and calls cannot loop).

Errors raised inside method bodies propagate across any number of
boundaries; the payload is never altered and each crossing appends one
entry to the error's trace.  No operation other than startup verification
is accepted before verification succeeds.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Mapping

from .codegen import MethodDesc, StructuralType, WrapperManifest
from .errors import (
    ARITY_MISMATCH,
    COERCION_FAILURE,
    NO_PEER,
    NOT_A_CALLBACK_CLASS,
    UNKNOWN_ALIAS,
    UNKNOWN_TYPE,
    VERIFY_NOT_RUN,
    ALIAS_COLLISION,
    BridgeError,
)
from .worlds import (
    NOMINAL,
    STRUCTURAL,
    MethodImpl,
    NominalClass,
    NominalWorld,
    ObjRef,
    StructuralWorld,
    Value,
)

MISSING_CLASS = "missing-class"
MISSING_METHOD = "missing-method"
MISSING_CTOR = "missing-ctor"
PARENT_MISMATCH = "parent-mismatch"


@dataclass
class Mismatch:
    kind: str
    subject: str
    detail: str

    def render(self) -> str:
        return f"{self.kind} {self.subject}: {self.detail}"


@dataclass
class VerificationReport:
    mismatches: list[Mismatch]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_doc(self) -> dict:
        return {
            "ok": self.ok,
            "mismatches": [
                {"kind": m.kind, "subject": m.subject, "detail": m.detail}
                for m in self.mismatches
            ],
        }


@dataclass
class StubPair:
    foreign_stub_instance: ObjRef
    structural_peer: ObjRef


def _world_classes(world_export: Mapping) -> dict[str, dict]:
    return {c["name"]: c for c in world_export.get("classes", [])}


def _effective_methods(classes: dict[str, dict], name: str) -> dict[str, int]:
    """Alias->arity map for a world class including inherited methods."""
    out: dict[str, int] = {}
    seen: set[str] = set()
    cur: str | None = name
    while cur is not None and cur in classes and cur not in seen:
        seen.add(cur)
        cls = classes[cur]
        for m in cls.get("methods", []):
            out.setdefault(m["alias"], m["arity"])
        cur = cls.get("parent")
    return out


def verify_manifest(manifest: WrapperManifest, world_export: Mapping) -> VerificationReport:
    """Check every described class, method and constructor against a world export.

    Methods missing from a ``[callback]`` class are tolerated (the structural
    side is expected to supply them through the stub); everything else must
    exist with the declared arity and parent edge.
    """
    classes = _world_classes(world_export)
    mismatches: list[Mismatch] = []
    for t in manifest.types:
        if t.kind != "class":
            continue
        cls = classes.get(t.source)
        if cls is None:
            mismatches.append(
                Mismatch(MISSING_CLASS, t.source, "class not present in the world")
            )
            continue
        if cls.get("parent") != t.extends:
            mismatches.append(
                Mismatch(
                    PARENT_MISMATCH,
                    t.source,
                    f"declared extends {t.extends!r}, world has {cls.get('parent')!r}",
                )
            )
        is_callback = manifest.stub_for(t.source) is not None
        methods = _effective_methods(classes, t.source)
        for m in t.methods:
            arity = methods.get(m.alias)
            if arity is None:
                if is_callback:
                    continue
                mismatches.append(
                    Mismatch(
                        MISSING_METHOD,
                        f"{t.source}.{m.alias}",
                        "method not present in the world",
                    )
                )
            elif arity != m.arity:
                mismatches.append(
                    Mismatch(
                        ARITY_MISMATCH,
                        f"{t.source}.{m.alias}",
                        f"declared arity {m.arity}, world has {arity}",
                    )
                )
        ctors = {c["alias"]: c["arity"] for c in cls.get("ctors", [])}
        for fn in manifest.constructors:
            if fn.target_class != t.source:
                continue
            arity = ctors.get(fn.alias)
            if arity is None:
                mismatches.append(
                    Mismatch(
                        MISSING_CTOR,
                        f"{t.source}.{fn.alias}",
                        "constructor not present in the world",
                    )
                )
            elif arity != fn.arity:
                mismatches.append(
                    Mismatch(
                        ARITY_MISMATCH,
                        f"{t.source}.{fn.alias}",
                        f"declared arity {fn.arity}, world has {arity}",
                    )
                )
    return VerificationReport(mismatches)


class Bridge:
    """One manifest executing over one nominal and one structural world.

    A bridge and its worlds form a single-threaded unit; independent bridges
    are independent.
    """

    def __init__(
        self,
        manifest: WrapperManifest,
        nominal: NominalWorld,
        structural: StructuralWorld,
    ):
        self.manifest = manifest
        self.nominal = nominal
        self.structural = structural
        self.verified = False
        self.crossings = 0
        self.stub_pairs: list[StubPair] = []
        self._peers: dict[int, ObjRef] = {}  # nominal id -> structural ref
        self._rpeers: dict[int, ObjRef] = {}  # structural id -> nominal ref

    # ---- verification ------------------------------------------------------

    def verify_startup(self) -> VerificationReport:
        """Check the manifest against the nominal world; unlock the bridge on success."""
        report = verify_manifest(self.manifest, self.nominal.export_manifest())
        self.verified = report.ok
        return report

    def _require_verified(self) -> None:
        if not self.verified:
            raise BridgeError(
                VERIFY_NOT_RUN, "startup verification has not succeeded yet"
            )

    # ---- marshaling ----------------------------------------------------------

    @contextmanager
    def _crossing(self, label: str):
        self.crossings += 1
        try:
            yield
        except BridgeError as err:
            err.trace.append(label)
            raise

    def _to_nominal(self, value: Value) -> Value:
        if isinstance(value, ObjRef) and value.world == STRUCTURAL:
            peer = self._rpeers.get(value.id)
            if peer is None:
                raise BridgeError(
                    NO_PEER, "structural object has no nominal peer to unwrap"
                )
            return peer
        return value

    def _to_structural(self, value: Value) -> Value:
        if isinstance(value, ObjRef) and value.world == NOMINAL:
            return self._wrap_existing(value)
        return value

    def _link(self, n_ref: ObjRef, s_ref: ObjRef) -> None:
        self._peers[n_ref.id] = s_ref
        self._rpeers[s_ref.id] = n_ref

    # ---- slot and vtable bodies ------------------------------------------------

    def _forward_virtual(self, n_ref: ObjRef, m: MethodDesc) -> MethodImpl:
        def fn(recv: ObjRef, args: list, world) -> Value:
            nargs = [self._to_nominal(a) for a in args]
            with self._crossing(f"{m.alias}:structural->nominal"):
                result = self.nominal.invoke_virtual(n_ref, m.alias, nargs)
            return self._to_structural(result)

        return MethodImpl(m.arity, fn)

    def _forward_base(self, n_ref: ObjRef, base_class: str, m: MethodDesc) -> MethodImpl:
        def fn(recv: ObjRef, args: list, world) -> Value:
            nargs = [self._to_nominal(a) for a in args]
            with self._crossing(f"{m.alias}:structural->nominal"):
                result = self.nominal.invoke_nonvirtual(n_ref, base_class, m.alias, nargs)
            return self._to_structural(result)

        return MethodImpl(m.arity, fn)

    def _callback(self, m: MethodDesc) -> MethodImpl:
        # Shared by every instance of a stub class; the structural peer is
        # resolved per receiver, and the slot per call (late binding).
        def fn(recv: ObjRef, args: list, world) -> Value:
            peer = self._peers.get(recv.id)
            if peer is None:
                raise BridgeError(NO_PEER, "stub instance has no structural peer")
            sargs = [self._to_structural(a) for a in args]
            with self._crossing(f"{m.alias}:nominal->structural"):
                result = self.structural.invoke(peer, m.alias, sargs)
            return self._to_nominal(result)

        return MethodImpl(m.arity, fn)

    # ---- construction -----------------------------------------------------------

    def wrap_new(
        self, ctor_alias: str, args: list, *, via_stub: bool | None = None
    ) -> ObjRef:
        """Allocate a nominal instance and return its structural wrapper.

        Constructors of ``[callback]`` classes build a stub pair by default;
        ``via_stub=False`` forces a plain wrapper instead (the generated
        wrapper class still exists alongside the stub machinery), and
        ``via_stub=True`` on a non-callback class is an error.
        """
        self._require_verified()
        fn = self.manifest.constructor(ctor_alias)
        if fn is None:
            raise BridgeError(UNKNOWN_ALIAS, f"unknown constructor alias '{ctor_alias}'")
        if len(args) != fn.arity:
            raise BridgeError(
                ARITY_MISMATCH,
                f"constructor '{ctor_alias}' expects {fn.arity} argument(s), got {len(args)}",
            )
        use_stub = fn.via_stub if via_stub is None else via_stub
        if use_stub:
            if self.manifest.stub_for(fn.target_class) is None:
                raise BridgeError(
                    NOT_A_CALLBACK_CLASS,
                    f"class '{fn.target_class}' has no stub pair",
                )
            pair = self._new_stub_backed(fn.target_class, ctor_alias, args)
            return pair.structural_peer
        return self._new_plain(fn.target_class, ctor_alias, args)

    def _new_plain(self, class_name: str, ctor_alias: str, args: list) -> ObjRef:
        t = self.manifest.type_for_class(class_name)
        n_ref = self.nominal.allocate(class_name)
        s_ref = self.structural.make_object(
            {m.alias: self._forward_virtual(n_ref, m) for m in t.methods}
        )
        self._link(n_ref, s_ref)
        nargs = [self._to_nominal(a) for a in args]
        with self._crossing(f"new {ctor_alias}:structural->nominal"):
            self.nominal.run_ctor(n_ref, class_name, ctor_alias, nargs)
        return s_ref

    def _new_stub_backed(self, class_name: str, ctor_alias: str, args: list) -> StubPair:
        desc = self.manifest.stub_for(class_name)
        assert desc is not None
        t = self.manifest.type_for_class(class_name)
        self._ensure_stub_class(desc.foreign_stub, class_name, t)
        n_ref = self.nominal.allocate(desc.foreign_stub)
        s_ref = self.structural.make_object(
            {m.alias: self._forward_base(n_ref, class_name, m) for m in t.methods}
        )
        # Peers are linked before the constructor body runs so that virtual
        # calls made during construction already reach structural overrides.
        self._link(n_ref, s_ref)
        nargs = [self._to_nominal(a) for a in args]
        with self._crossing(f"new {ctor_alias}:structural->nominal"):
            self.nominal.run_ctor(n_ref, class_name, ctor_alias, nargs)
        pair = StubPair(n_ref, s_ref)
        self.stub_pairs.append(pair)
        return pair

    def _ensure_stub_class(self, stub_name: str, base: str, t: StructuralType) -> None:
        if self.nominal.has_class(stub_name):
            return
        vtable = {m.alias: self._callback(m) for m in t.methods}
        self.nominal.register_class(NominalClass(stub_name, parent=base, vtable=vtable))

    def _wrap_existing(self, n_ref: ObjRef) -> ObjRef:
        existing = self._peers.get(n_ref.id)
        if existing is not None:
            return existing
        t: StructuralType | None = None
        for cls in self.nominal.chain(self.nominal.class_of(n_ref)):
            try:
                t = self.manifest.type_for_class(cls.name)
                break
            except KeyError:
                continue
        if t is None:
            raise BridgeError(
                UNKNOWN_TYPE,
                f"no structural type describes class '{self.nominal.class_of(n_ref)}'",
            )
        s_ref = self.structural.make_object(
            {m.alias: self._forward_virtual(n_ref, m) for m in t.methods}
        )
        self._link(n_ref, s_ref)
        return s_ref

    def wrap_existing(self, n_ref: ObjRef) -> ObjRef:
        """Structural wrapper for an existing nominal object, reusing any peer."""
        self._require_verified()
        return self._wrap_existing(n_ref)

    # ---- invocation and overrides -------------------------------------------------

    def override_slot(self, obj: ObjRef, alias: str, impl: MethodImpl) -> None:
        """Replace a structural slot.

        On a stub-backed object the override is visible to nominal-side
        internal calls (they dispatch through the stub's callbacks); on a
        plain wrapper only structural-side calls see it.
        """
        self._require_verified()
        current = self.structural.slot(obj, alias)
        if impl.arity != current.arity:
            raise BridgeError(
                ARITY_MISMATCH,
                f"slot '{alias}' has arity {current.arity}, override has {impl.arity}",
            )
        self.structural.replace_slot(obj, alias, impl)

    def bridged_invoke(self, obj: ObjRef, alias: str, args: list) -> Value:
        """Invoke a slot; wrapper arguments are unwrapped and object results wrapped."""
        self._require_verified()
        return self.structural.invoke(obj, alias, args)

    # ---- coercions ------------------------------------------------------------------

    def coerce_up(self, obj: ObjRef, type_name: str) -> ObjRef:
        """View an object at a supertype; identity on the reference."""
        self._require_verified()
        if type_name == self.manifest.top:
            required: dict[str, int] = {}
        else:
            try:
                required = self.manifest.type_named(type_name).arities()
            except KeyError:
                raise BridgeError(UNKNOWN_TYPE, type_name) from None
        if not self.structural.conforms(obj, required):
            raise BridgeError(
                COERCION_FAILURE, f"object does not conform to '{type_name}'"
            )
        return obj

    def coerce_down(self, obj: ObjRef, coercion: str) -> ObjRef:
        """Apply a ``cs<Class>_of_top`` coercion, checked against the nominal peer."""
        self._require_verified()
        fn = self.manifest.coercion(coercion)
        if fn is None:
            raise BridgeError(UNKNOWN_ALIAS, f"unknown coercion '{coercion}'")
        peer = self._rpeers.get(obj.id)
        if peer is None:
            raise BridgeError(NO_PEER, "object has no nominal peer to downcast")
        target_class = self.manifest.type_named(fn.target).source
        if not self.nominal.instance_of(peer, target_class):
            raise BridgeError(
                COERCION_FAILURE,
                f"'{self.nominal.class_of(peer)}' is not a '{target_class}'",
            )
        return obj

    # ---- composition -------------------------------------------------------------------

    def multi_inherit(
        self, parents: list[ObjRef], overrides: Mapping[str, MethodImpl] | None = None
    ) -> ObjRef:
        """Combine several wrappers into one object by slot-set union.

        Each inherited slot keeps forwarding to its own parent's nominal peer.
        An alias provided by more than one parent must be resolved by an
        override.
        """
        self._require_verified()
        overrides = dict(overrides or {})
        slots: dict[str, MethodImpl] = {}
        provider: dict[str, int] = {}
        for idx, parent in enumerate(parents):
            for alias in self.structural.aliases(parent):
                if alias in slots and provider[alias] != idx and alias not in overrides:
                    raise BridgeError(
                        ALIAS_COLLISION,
                        f"alias '{alias}' is provided by more than one parent",
                    )
                slots[alias] = self.structural.slot(parent, alias)
                provider[alias] = idx
        slots.update(overrides)
        return self.structural.make_object(slots)

    def reverse_expose(
        self,
        callback_class: str,
        impls: Mapping[str, MethodImpl],
        ctor_args: list,
        ctor_alias: str | None = None,
    ) -> ObjRef:
        """Hand structural implementations to nominal code as a stub instance.

        Returns the nominal reference of the stub; its virtual methods reach
        the supplied implementations, and omitted aliases fall back to the
        base class non-virtually.
        """
        self._require_verified()
        if self.manifest.stub_for(callback_class) is None:
            raise BridgeError(
                NOT_A_CALLBACK_CLASS, f"class '{callback_class}' has no stub pair"
            )
        t = self.manifest.type_for_class(callback_class)
        arities = t.arities()
        for alias, impl in impls.items():
            declared = arities.get(alias)
            if declared is None:
                raise BridgeError(
                    UNKNOWN_ALIAS, f"'{callback_class}' has no method '{alias}'"
                )
            if impl.arity != declared:
                raise BridgeError(
                    ARITY_MISMATCH,
                    f"method '{alias}' has arity {declared}, implementation has {impl.arity}",
                )
        if ctor_alias is None:
            candidates = [
                c.alias
                for c in self.manifest.constructors
                if c.target_class == callback_class
            ]
            if len(candidates) != 1:
                raise BridgeError(
                    UNKNOWN_ALIAS,
                    f"class '{callback_class}' needs an explicit constructor alias",
                )
            ctor_alias = candidates[0]
        fn = self.manifest.constructor(ctor_alias)
        if fn is None or fn.target_class != callback_class:
            raise BridgeError(UNKNOWN_ALIAS, f"unknown constructor alias '{ctor_alias}'")
        if len(ctor_args) != fn.arity:
            raise BridgeError(
                ARITY_MISMATCH,
                f"constructor '{ctor_alias}' expects {fn.arity} argument(s), got {len(ctor_args)}",
            )
        pair = self._new_stub_backed(callback_class, ctor_alias, ctor_args)
        for alias, impl in impls.items():
            self.structural.replace_slot(pair.structural_peer, alias, impl)
        return pair.foreign_stub_instance

    # ---- introspection -----------------------------------------------------------------

    def peer_of(self, obj: ObjRef) -> ObjRef | None:
        """The paired object across the boundary, if any."""
        self._require_verified()
        if obj.world == NOMINAL:
            return self._peers.get(obj.id)
        return self._rpeers.get(obj.id)
