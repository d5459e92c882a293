"""Wrapper-manifest generation.

From a resolved class graph this produces the inventory of bridge artifacts:
one structural type per class and per interface (prefix ``cs``), one wrapper
per declaration, one constructor function per declared constructor, one
downcast coercion per class (``cs<Class>_of_top``), and one stub pair per
``[callback]`` class.  Field declarations surface as ``get_``/``set_``
accessor methods so structural types stay purely method-shaped.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .semantics import ClassGraph, ClassNode, InterfaceNode
from .syntax import ClassDecl, FieldDecl, TypeRef, declarations, named

TOP = "top"

_CAMEL = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def snake_case(name: str) -> str:
    return _CAMEL.sub("_", name).lower()


def structural_name(source: str) -> str:
    return f"cs{source}"


def coercion_name(source: str) -> str:
    return f"{structural_name(source)}_of_top"


@dataclass(frozen=True)
class MethodDesc:
    alias: str
    params: tuple[str, ...]
    returns: str

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class StructuralType:
    name: str
    source: str
    kind: str  # "class" or "interface"
    extends: str | None
    implements: tuple[str, ...]
    methods: tuple[MethodDesc, ...]

    def arities(self) -> dict[str, int]:
        return {m.alias: m.arity for m in self.methods}


@dataclass
class WrapperClass:
    name: str
    exposes: str
    source_class: str


@dataclass
class ConstructorFn:
    alias: str
    target_class: str
    params: tuple[str, ...]
    via_stub: bool

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class CoercionFn:
    name: str
    target: str


@dataclass
class StubPairDesc:
    source_class: str
    foreign_stub: str
    native_stub: str


@dataclass
class WrapperManifest:
    package: str
    types: list[StructuralType] = field(default_factory=list)
    wrappers: list[WrapperClass] = field(default_factory=list)
    constructors: list[ConstructorFn] = field(default_factory=list)
    coercions: list[CoercionFn] = field(default_factory=list)
    stub_pairs: list[StubPairDesc] = field(default_factory=list)
    subtype_edges: list[tuple[str, str]] = field(default_factory=list)
    top: str = TOP

    def type_named(self, name: str) -> StructuralType:
        for t in self.types:
            if t.name == name:
                return t
        raise KeyError(name)

    def type_for_class(self, source: str) -> StructuralType:
        for t in self.types:
            if t.source == source:
                return t
        raise KeyError(source)

    def constructor(self, alias: str) -> ConstructorFn | None:
        for c in self.constructors:
            if c.alias == alias:
                return c
        return None

    def coercion(self, name: str) -> CoercionFn | None:
        for c in self.coercions:
            if c.name == name:
                return c
        return None

    def stub_for(self, source_class: str) -> StubPairDesc | None:
        for s in self.stub_pairs:
            if s.source_class == source_class:
                return s
        return None

    def counts(self) -> dict[str, int]:
        return {
            "types": len(self.types),
            "wrappers": len(self.wrappers),
            "constructors": len(self.constructors),
            "coercions": len(self.coercions),
            "stub_pairs": len(self.stub_pairs),
        }


def _type_str(ty: TypeRef) -> str:
    return str(ty)


def _accessors(fields: list[FieldDecl]) -> list[MethodDesc]:
    out = []
    for f in fields:
        ty = _type_str(f.type)
        out.append(MethodDesc(f"get_{f.name}", (), ty))
        out.append(MethodDesc(f"set_{f.name}", (ty,), "void"))
    return out


def _inherited_fields(graph: ClassGraph, node: ClassNode) -> list[FieldDecl]:
    chain: list[ClassNode] = []
    cur: ClassNode | None = node
    while cur is not None:
        chain.append(cur)
        parent = graph.nodes.get(cur.parent) if cur.parent else None
        cur = parent if isinstance(parent, ClassNode) else None
    fields: list[FieldDecl] = []
    for c in reversed(chain):  # root first so inherited accessors come first
        fields.extend(c.decl.fields)
    return fields


def gen_manifest(graph: ClassGraph) -> WrapperManifest:
    """Generate the wrapper manifest for a resolved graph (deterministic order)."""
    manifest = WrapperManifest(package=graph.package)
    for decl in declarations(graph.file):
        node = graph.nodes[decl.name]
        if isinstance(node, ClassNode):
            assert isinstance(decl, ClassDecl)
            methods = tuple(
                _accessors(_inherited_fields(graph, node))
                + [
                    MethodDesc(m.alias, tuple(map(_type_str, m.params)), _type_str(m.return_type))
                    for m in node.closure
                ]
            )
            st = StructuralType(
                structural_name(decl.name),
                decl.name,
                "class",
                decl.extends,
                tuple(node.interfaces),
                methods,
            )
            manifest.types.append(st)
            manifest.wrappers.append(
                WrapperClass(snake_case(decl.name), st.name, decl.name)
            )
            for c in decl.ctors:
                manifest.constructors.append(
                    ConstructorFn(
                        c.alias,
                        decl.name,
                        tuple(map(_type_str, c.params)),
                        node.callback,
                    )
                )
            manifest.coercions.append(CoercionFn(coercion_name(decl.name), st.name))
            if node.callback:
                manifest.stub_pairs.append(
                    StubPairDesc(
                        decl.name,
                        f"{decl.name}Stub",
                        f"callback_{snake_case(decl.name)}",
                    )
                )
            if decl.extends is None and not node.interfaces:
                manifest.subtype_edges.append((st.name, TOP))
            else:
                if decl.extends is not None:
                    manifest.subtype_edges.append((st.name, structural_name(decl.extends)))
                for iname in node.interfaces:
                    manifest.subtype_edges.append((st.name, structural_name(iname)))
        else:
            assert isinstance(node, InterfaceNode)
            methods = tuple(
                MethodDesc(m.alias, tuple(map(_type_str, m.params)), _type_str(m.return_type))
                for m in node.closure
            )
            st = StructuralType(
                structural_name(decl.name), decl.name, "interface", None, (), methods
            )
            manifest.types.append(st)
            manifest.wrappers.append(
                WrapperClass(snake_case(decl.name), st.name, decl.name)
            )
            manifest.subtype_edges.append((st.name, TOP))
    return manifest


def structural_signature(manifest: WrapperManifest, type_name: str) -> frozenset[MethodDesc]:
    """Full method set of a structural type, accessors included; top is empty."""
    if type_name == manifest.top:
        return frozenset()
    return frozenset(manifest.type_named(type_name).methods)


# ---- serialization ----------------------------------------------------------


def manifest_to_doc(manifest: WrapperManifest) -> dict:
    return {
        "package": manifest.package,
        "types": [
            {
                "name": t.name,
                "source": t.source,
                "kind": t.kind,
                "extends": t.extends,
                "implements": list(t.implements),
                "methods": [
                    {"alias": m.alias, "params": list(m.params), "return": m.returns}
                    for m in t.methods
                ],
            }
            for t in manifest.types
        ],
        "wrappers": [
            {"name": w.name, "exposes": w.exposes, "source_class": w.source_class}
            for w in manifest.wrappers
        ],
        "constructors": [
            {
                "alias": c.alias,
                "target_class": c.target_class,
                "params": list(c.params),
                "via_stub": c.via_stub,
            }
            for c in manifest.constructors
        ],
        "coercions": [{"name": c.name, "target": c.target} for c in manifest.coercions],
        "stub_pairs": [
            {
                "source_class": s.source_class,
                "foreign_stub": s.foreign_stub,
                "native_stub": s.native_stub,
            }
            for s in manifest.stub_pairs
        ],
        "subtype_edges": [[sub, sup] for sub, sup in manifest.subtype_edges],
    }


def emit_manifest(manifest: WrapperManifest) -> bytes:
    """Canonical manifest serialization; byte-identical for equal manifests."""
    doc = manifest_to_doc(manifest)
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


def load_manifest(data: bytes | str) -> WrapperManifest:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    doc = json.loads(data)
    return WrapperManifest(
        package=doc["package"],
        types=[
            StructuralType(
                t["name"],
                t["source"],
                t["kind"],
                t["extends"],
                tuple(t["implements"]),
                tuple(
                    MethodDesc(m["alias"], tuple(m["params"]), m["return"])
                    for m in t["methods"]
                ),
            )
            for t in doc["types"]
        ],
        wrappers=[
            WrapperClass(w["name"], w["exposes"], w["source_class"])
            for w in doc["wrappers"]
        ],
        constructors=[
            ConstructorFn(
                c["alias"], c["target_class"], tuple(c["params"]), c["via_stub"]
            )
            for c in doc["constructors"]
        ],
        coercions=[CoercionFn(c["name"], c["target"]) for c in doc["coercions"]],
        stub_pairs=[
            StubPairDesc(s["source_class"], s["foreign_stub"], s["native_stub"])
            for s in doc["stub_pairs"]
        ],
        subtype_edges=[(sub, sup) for sub, sup in doc["subtype_edges"]],
    )
